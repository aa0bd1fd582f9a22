"""``dqm`` command line: spectra, verification suites and QES sectors.

Exit codes: 0 pass (or a reported finding), 1 verification failure,
2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from typing import Callable, Optional

from . import algebra, lattice, orthogonality, polyop, qes
from .errors import DomainError, DQMError, UnsupportedError, ValidationError
from .kernel import magnitude, to_float
from .models import energy_discrepancy, exact_twin, load_config, model_from_config
from .models.base import Model

SUITES = ("shape", "closure", "dual", "heisenberg", "ladder", "crum", "rodrigues",
          "orthogonality")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# float mode takes polynomial ingredients (closure fit, eigenpolynomials,
# dual-closure polynomials) from the exact twin and checks them with float
# operators; residuals are scale-relative
FLOAT_TOL = 1e-9


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=str)


def _load_model(path: str, exact: bool) -> Model:
    cfg = load_config(path)
    return model_from_config(cfg, exact=exact)


# ---------------------------------------------------------------------------
# spectrum


def spectrum_rows(model: Model, n_max: Optional[int]) -> list:
    """(n, E_formula, E_computed, residual) rows.

    rdQM: eigenvalues of the lattice H.  oQM/pdQM: diagonal of the
    triangular Ht matrix on polynomials.
    """
    if model.kind == "rdQM":
        n_max = model.N if n_max is None else min(n_max, model.N)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = lattice.diagonalize(model, warn=False)
        return rep.rows(n_max)
    n_max = 10 if n_max is None else n_max
    m = polyop.htilde_matrix(model, n_max)
    rows = []
    for n in range(n_max + 1):
        e = model.energy(n)
        got = m[n, n]
        rows.append({"n": n, "E_formula": _real(e), "E_computed": _real(got),
                     "residual": magnitude(got - e) / max(1.0, magnitude(e))})
    return rows


def _real(v):
    v = to_float(v)
    return v.real if isinstance(v, complex) else float(v)


def cmd_spectrum(args) -> int:
    model = _load_model(args.config, args.exact)
    tol = 1e-10 if args.tol is None else args.tol
    rows = spectrum_rows(model, args.nmax)
    flag = energy_discrepancy(model)
    flags = [flag] if flag else []
    for f in flags:
        print(f"warning: {f['message']} [{f['citation']}]", file=sys.stderr)
    ok = all(r["residual"] <= tol for r in rows)
    if args.format == "json":
        print(_dumps({"command": "spectrum", "model": model.describe(), "rows": rows,
                      "tol": tol, "status": "pass" if ok else "fail", "discrepancies": flags}))
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["n", "E_formula", "E_computed", "residual"],
                           lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        sys.stdout.write(buf.getvalue())
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify


def _check(name, status, **info) -> dict:
    return dict(info, name=name, status=status)


def _suite_shape(model, args):
    if model.kind == "rdQM":
        r = lattice.shape_invariance_check(model)
        tol = args.tol if args.tol is not None else (0.0 if model.exact else 1e-10)
        scale = max(1.0, max(magnitude(d) for d in lattice.partner_data(model)[0]))
        ok = r.residual <= tol and r.matrix_residual <= 1e-12 * scale * (model.N + 1)
        return _check("shape", "pass" if ok else "fail", **r.to_dict())
    if model.kind == "pdQM":
        r = lattice.pdqm_shape_invariance_check(model, seed=args.seed)
    else:
        r = lattice.oqm_shape_invariance_check(model)
    tol = args.tol if args.tol is not None else (0.0 if model.exact and model.kind == "pdQM" else 1e-9)
    return _check("shape", "pass" if r["residual"] <= tol else "fail", **r)


def _suite_closure(model, args):
    # the fit is always exact; float mode re-checks it with float operators
    cmp = algebra.compare_closure(exact_twin(model))
    independent = algebra.closure_check(model, cmp.fitted, seed=args.seed)
    tol = args.tol if args.tol is not None else (0.0 if model.exact else FLOAT_TOL)
    ok = cmp.fitted_residual <= tol and independent <= tol
    status = "fail" if not ok else ("flagged" if not cmp.matches else "pass")
    info = cmp.to_dict()
    info["independent_residual"] = independent
    info["frame"] = "Ht" if model.kind != "rdQM" else "lattice"
    return _check("closure", status, **info)


def _suite_dual(model, args):
    polys = None
    if not model.exact:
        polys = tuple(p.map(to_float) for p in polyop.dual_closure_polys(exact_twin(model)))
    r = polyop.dual_closure_check(model, trials=20, seed=args.seed, relative=not model.exact,
                                  polys=polys)
    tol = args.tol if args.tol is not None else (0.0 if model.exact else 1e-8)
    return _check("dual", "pass" if r <= tol else "fail", residual=r,
                  relative=not model.exact)


def _rdqm_only(fn: Callable):
    def run(model, args):
        if model.kind != "rdQM":
            return _check(fn.__name__.replace("_suite_", ""), "skipped",
                          reason=f"{model.kind} model has no finite lattice")
        try:
            return fn(model, args)
        except DomainError as exc:
            return _check(fn.__name__.replace("_suite_", ""), "skipped", reason=str(exc))
    run.__name__ = fn.__name__
    return run


@_rdqm_only
def _suite_heisenberg(model, args):
    ts = (0.1, 1.0, 3.0)
    r = algebra.heisenberg_check(model, ts)
    tol = args.tol if args.tol is not None else 1e-8
    return _check("heisenberg", "pass" if r <= tol else "fail", residual=r, t=list(ts), tol=tol)


@_rdqm_only
def _suite_ladder(model, args):
    rep = algebra.build_ladder(model).report()
    tol = args.tol if args.tol is not None else 1e-10
    ok = (rep["annihilation"] <= 1e-12 * max(1, model.N) * 100
          and max(rep["leakage"].values()) <= tol * 100
          and rep["sum_rule"] <= tol * 100 and rep["nilpotency"] <= tol)
    rec = algebra.recurrence_vs_ladder(model)
    ok = ok and rec["tridiagonal_defect"] <= 1e-8
    return _check("ladder", "pass" if ok else "fail", ladder=rep, recurrence=rec)


@_rdqm_only
def _suite_crum(model, args):
    r = lattice.crum_step(model)
    return _check("crum", "pass" if r.passed else "fail", **r.to_dict())


@_rdqm_only
def _suite_rodrigues(model, args):
    reps = [lattice.rodrigues_chain(model, n) for n in range(model.N + 1)]
    worst = min(r.overlap for r in reps)
    ok = worst >= 1 - 1e-10 and all(r.energy_identity for r in reps)
    return _check("rodrigues", "pass" if ok else "fail", min_overlap=worst,
                  energy_identity=all(r.energy_identity for r in reps))


def _suite_orthogonality(model, args):
    if model.kind == "rdQM":
        g = orthogonality.lattice_gram(model)
        off = g.max_offdiag()
        ok = off == 0 if model.exact else g.normalized_offdiag() <= 1e-10
        return _check("orthogonality", "pass" if ok else "fail", max_offdiag=str(off),
                      normalized=g.normalized_offdiag())
    g = orthogonality.quadrature_gram(model, 5)
    r = g.normalized_offdiag()
    tol = args.tol if args.tol is not None else 1e-6
    return _check("orthogonality", "pass" if r <= tol else "fail", normalized=r, n_max=5)


_SUITE_FUNCS = {name: globals()[f"_suite_{name}"] for name in SUITES}


def run_verify(model: Model, suites, args) -> dict:
    checks, timings = [], {}
    for name in suites:
        t0 = time.perf_counter()
        try:
            checks.append(_SUITE_FUNCS[name](model, args))
        except DQMError as exc:
            checks.append(_check(name, "fail", error=f"{type(exc).__name__}: {exc}"))
        timings[name] = round(time.perf_counter() - t0, 4)
    discrepancies = []
    flag = energy_discrepancy(model)
    if flag:
        discrepancies.append(flag)
    for c in checks:
        if c["status"] == "flagged" and c.get("citation"):
            discrepancies.append({"kind": "closure-table", "family": model.family,
                                  "citation": c["citation"], "message": c["summary"]})
    report = {"command": "verify", "model": model.describe(), "checks": checks,
              "discrepancies": discrepancies,
              "status": "fail" if any(c["status"] == "fail" for c in checks) else "pass"}
    if getattr(args, "timings", False):
        report["timings"] = timings
    return report


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES + ('all',))}")
    model = _load_model(args.config, args.exact)
    suites = SUITES if args.suite == "all" else (args.suite,)
    report = run_verify(model, suites, args)
    for d in report["discrepancies"]:
        print(f"warning: {d['message']} [{d['citation']}]", file=sys.stderr)
    print(_dumps(report))
    return EXIT_FAIL if report["status"] == "fail" else EXIT_OK


# ---------------------------------------------------------------------------
# qes


def cmd_qes(args) -> int:
    from .models import load_config as _load

    cfg = _load(args.config)
    result = qes.qes_from_config(cfg, exact=args.exact)
    if isinstance(result, qes.QesInfeasible):
        out = {"command": "qes", "feasible": False, **result.to_dict()}
        print(_dumps(out))
        return EXIT_OK
    cert = qes.certify_invariance(result)
    spec = qes.qes_spectrum(result)
    tol = 0.0 if result.exact else (1e-9 if args.tol is None else args.tol)
    status = "pass" if cert <= tol else "fail"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["k", "re", "im"])
        for k, v in enumerate(spec.eigenvalues):
            w.writerow([k, repr(float(v.real)), repr(float(v.imag))])
        sys.stdout.write(buf.getvalue())
        print(f"e0={result.e0} e1={result.e1} certificate={cert}", file=sys.stderr)
    else:
        out = {"command": "qes", "feasible": True, "spec": result.to_dict(),
               "certificate": cert, "spectrum": spec.to_dict(), "status": status,
               "note": "realness of the restricted spectrum is reported, not certified"}
        print(_dumps(out))
    return EXIT_OK if status == "pass" else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dqm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default):
        sp.add_argument("--config", required=True, help="key = value model file")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--exact", dest="exact", action="store_true", default=True)
        mode.add_argument("--float", dest="exact", action="store_false")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings")

    s = sub.add_parser("spectrum", help="energy formula vs computed spectrum")
    common(s, "csv")
    s.add_argument("--nmax", type=int, default=None)
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v, "json")
    v.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or all")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("qes", help="compensation, invariance certificate, restricted spectrum")
    common(q, "json")
    q.set_defaults(func=cmd_qes)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "nmax", None) is not None and args.nmax < 0:
        parser.error("--nmax must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, UnsupportedError) as exc:
        print(f"dqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DQMError as exc:
        print(f"dqm: failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
