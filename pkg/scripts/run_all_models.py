"""Run every verification suite on every shipped model config and print a table."""
import argparse
import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
MODELS = ["hermite", "laguerre", "jacobi", "continuous_hahn", "wilson", "askey_wilson",
          "hahn", "racah", "q_racah"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--float", action="store_true", help="float mode instead of exact")
    ap.add_argument("--json", type=Path, help="also write all reports to this file")
    args = ap.parse_args()

    reports = {}
    for name in MODELS:
        cmd = [sys.executable, "-m", "dqm.cli", "verify", "--config", str(ROOT / "configs" / f"{name}.cfg"),
               "--suite", "all", "--timings"]
        if args.float:
            cmd.append("--float")
        proc = subprocess.run(cmd, capture_output=True, text=True)
        rep = json.loads(proc.stdout)
        reports[name] = rep
        cells = " ".join(f"{c['name']}={c['status']}" for c in rep["checks"])
        total = sum(rep["timings"].values())
        print(f"{name:16s} {rep['status']:5s} {total:6.2f}s  {cells}")
        for d in rep["discrepancies"]:
            print(f"{'':16s} flag: {d['message']} [{d['citation']}]")
    if args.json:
        args.json.write_text(json.dumps(reports, indent=2, sort_keys=True))
    return 0 if all(r["status"] == "pass" for r in reports.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
