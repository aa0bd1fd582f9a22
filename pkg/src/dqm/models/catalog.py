"""Model construction by name, module-level accessors and config loading."""
from __future__ import annotations

import dataclasses
import random
import re
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional

from .. import citations
from ..errors import DiscrepancyWarning, ValidationError
from ..kernel import gaussian, is_exact, parse_scalar, to_exact, to_float
from .base import ClosureData, Model
from .families import (AskeyWilson, ContinuousHahn, Hahn, Hermite, Jacobi,
                       Laguerre, QRacah, Racah, Wilson)

__all__ = [
    "FAMILIES", "RDQM_FAMILIES", "PDQM_FAMILIES", "OQM_FAMILIES",
    "family_class", "make_model", "potential", "energy", "groundstate_weight",
    "closure_table", "energy_discrepancy", "warn_energy_discrepancy",
    "random_params", "random_model", "default_model", "ConfigError",
    "parse_config", "load_config", "model_from_config", "exact_twin",
]

_CLASSES = {cls.family: cls for cls in
            (Hermite, Laguerre, Jacobi, ContinuousHahn, Wilson, AskeyWilson,
             Hahn, Racah, QRacah)}
FAMILIES = tuple(_CLASSES)
OQM_FAMILIES = ("hermite", "laguerre", "jacobi")
PDQM_FAMILIES = ("continuous_hahn", "wilson", "askey_wilson")
RDQM_FAMILIES = ("hahn", "racah", "q_racah")

_ALIASES = {
    "hermite": "hermite", "laguerre": "laguerre", "jacobi": "jacobi",
    "continuoushahn": "continuous_hahn", "conthahn": "continuous_hahn",
    "chahn": "continuous_hahn", "wilson": "wilson",
    "askeywilson": "askey_wilson", "aw": "askey_wilson",
    "hahn": "hahn", "racah": "racah", "qracah": "q_racah",
}


def _canonical(family: str) -> str:
    key = re.sub(r"[\s_.\-]", "", family).lower()
    if key not in _ALIASES:
        raise ValidationError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    return _ALIASES[key]


def family_class(family: str):
    return _CLASSES[_canonical(family)]


def _field_names(cls) -> list:
    return [f.name for f in dataclasses.fields(cls)]


def _convert(name, raw, exact: Optional[bool]):
    if name == "N":
        if isinstance(raw, str):
            try:
                raw = Fraction(raw.strip())
            except ValueError:
                raise ValidationError(f"N must be an integer (got {raw!r})") from None
        if isinstance(raw, float) or (isinstance(raw, Fraction) and raw.denominator == 1):
            if raw != int(raw):
                raise ValidationError(f"N must be an integer (got {raw})")
            raw = int(raw)
        return raw
    if isinstance(raw, str):
        try:
            value = parse_scalar(raw, exact=True)
        except ValueError as exc:
            raise ValidationError(f"parameter {name}: {exc}") from None
    else:
        value = raw
    if exact is True:
        return to_exact(value)
    if exact is False:
        return to_float(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def make_model(family: str, params: Optional[Mapping] = None,
               exact: Optional[bool] = None) -> Model:
    """Validated model of ``family`` with parameters from a raw map.

    Values may be numbers or strings like ``"3/2"`` or ``"1/2+1/3i"``.
    ``exact=None`` keeps exact inputs exact and floats as floats;
    ``True``/``False`` force one mode.  rdQM families need ``N >= 1``.
    """
    cls = family_class(family)
    params = dict(params or {})
    names = _field_names(cls)
    unknown = sorted(set(params) - set(names))
    if unknown:
        raise ValidationError(f"{cls.family}: unknown parameter(s) {', '.join(unknown)}; "
                              f"expected {', '.join(names) or 'none'}")
    missing = [n for n in names if n not in params]
    if missing:
        raise ValidationError(f"{cls.family}: missing parameter(s) {', '.join(missing)}")
    values = {n: _convert(n, params[n], exact) for n in names}
    if exact is None and any(not is_exact(v) for n, v in values.items() if n != "N"):
        values = {n: (v if n == "N" else to_float(v)) for n, v in values.items()}
    if "N" in values:
        n = values["N"]
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"{cls.family}: lattice size N>=1 violated (N={n})")
    return cls(**values)


def potential(model: Model, which: str, x):
    """V/V* (pdQM), B/D (rdQM) or w' (oQM, ``which="plus"``)."""
    if which == "plus":
        return model.v_plus(x)
    if which == "minus":
        if model.kind == "oQM":
            raise ValidationError("oQM models expose only w'(x) (which='plus')")
        return model.v_minus(x)
    raise ValidationError(f"which must be 'plus' or 'minus', got {which!r}")


def energy(model: Model, n: int, printed: bool = False):
    return model.energy(n, printed=printed)


def exact_twin(model: Model) -> Model:
    """``model`` itself if exact, else the same family at the exact values of its floats."""
    if model.exact:
        return model
    return make_model(model.family, model.params(), exact=True)


def groundstate_weight(model: Model, x):
    if model.kind == "rdQM":
        x = int(x)
        if not 0 <= x <= model.N:
            raise ValidationError(f"x={x} outside the lattice 0..{model.N}")
    return model.weight(x)


def closure_table(model: Model) -> ClosureData:
    return model.closure_table()


def energy_discrepancy(model: Model) -> Optional[dict]:
    """Flag describing the printed-energy normalization mismatch, if any."""
    if model.printed_energy_note is None:
        return None
    return {
        "kind": "energy-normalization" if model.printed_energy_factor != 1 else "energy-formula",
        "family": model.family,
        "citation": citations.ENERGY_FACTOR if model.printed_energy_factor != 1
        else citations.ENERGY_FORMULA,
        "printed_factor": model.printed_energy_factor,
        "message": (f"{model.family}: {model.printed_energy_note}; the spectrum of "
                    f"H = A^dagger A is used"),
    }


def warn_energy_discrepancy(model: Model) -> Optional[dict]:
    flag = energy_discrepancy(model)
    if flag is not None:
        warnings.warn(f"{flag['message']} [{flag['citation']}]", DiscrepancyWarning, stacklevel=2)
    return flag


# ---------------------------------------------------------------------------
# random admissible parameters


def _rat(rng, lo_num, hi_num, max_den=6):
    return Fraction(rng.randint(lo_num, hi_num), rng.randint(1, max_den))


def random_params(family: str, rng: random.Random, N: Optional[int] = None) -> dict:
    """Random admissible exact parameters (strictly inside every range)."""
    fam = _canonical(family)
    if N is None:
        N = rng.randint(1, 8)
    if fam == "hermite":
        return {}
    if fam == "laguerre":
        return {"g": 1 + _rat(rng, 1, 30)}
    if fam == "jacobi":
        return {"g": 1 + _rat(rng, 1, 30), "h": 1 + _rat(rng, 1, 30)}
    if fam == "continuous_hahn":
        return {f"a{k}": gaussian(_rat(rng, 1, 20), _rat(rng, -10, 10)) for k in (1, 2)}
    if fam == "wilson":
        x_re, x_im = _rat(rng, 1, 20), _rat(rng, 1, 10)
        if rng.random() < 0.5:
            a1, a2 = gaussian(x_re, x_im), gaussian(x_re, -x_im)
        else:
            a1, a2 = x_re, _rat(rng, 1, 20)
        return {"a1": a1, "a2": a2, "a3": _rat(rng, 1, 20), "a4": _rat(rng, 1, 20)}
    if fam == "askey_wilson":
        den = rng.randint(2, 4)
        q = Fraction(rng.randint(1, den - 1), den) ** 2
        small = lambda: Fraction(rng.randint(-9, 9), 10)
        x_re, x_im = Fraction(rng.randint(-6, 6), 10), Fraction(rng.randint(1, 6), 10)
        if rng.random() < 0.5:
            a1, a2 = gaussian(x_re, x_im), gaussian(x_re, -x_im)
        else:
            a1, a2 = small(), small()
        return {"a1": a1, "a2": a2, "a3": small(), "a4": small(), "q": q}
    if fam == "hahn":
        return {"a": _rat(rng, 1, 20), "b": _rat(rng, 1, 20), "N": N}
    if fam == "racah":
        d = _rat(rng, 1, 12)
        b = (1 + d) * Fraction(rng.randint(1, 9), 10)
        a = N + d + _rat(rng, 1, 12)
        return {"a": a, "b": b, "d": d, "N": N}
    if fam == "q_racah":
        q = rng.choice([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(3, 4)])
        d = Fraction(rng.randint(1, 9), 10)
        b = q * d + (1 - q * d) * Fraction(rng.randint(1, 9), 10)
        a = min(b, q ** N * d) * Fraction(rng.randint(1, 9), 10)
        return {"a": a, "b": b, "d": d, "q": q, "N": N}
    raise AssertionError(fam)


def random_model(family: str, rng: random.Random, N: Optional[int] = None,
                 exact: bool = True) -> Model:
    return make_model(family, random_params(family, rng, N), exact=exact)


_DEFAULTS = {
    "hermite": {},
    "laguerre": {"g": "3/2"},
    "jacobi": {"g": "3/2", "h": "5/2"},
    "continuous_hahn": {"a1": "1+1/2i", "a2": "2-1/3i"},
    "wilson": {"a1": "1/2+1/3i", "a2": "1/2-1/3i", "a3": "3/2", "a4": "5/4"},
    "askey_wilson": {"a1": "1/2+1/5i", "a2": "1/2-1/5i", "a3": "1/3", "a4": "-1/4", "q": "1/4"},
    "hahn": {"a": "3/2", "b": "5/2", "N": 6},
    "racah": {"a": "21/2", "b": "1", "d": "3/2", "N": 6},
    "q_racah": {"a": "3/1024", "b": "1/2", "d": "3/4", "q": "1/2", "N": 6},
}


def default_model(family: str, N: Optional[int] = None, exact: bool = True) -> Model:
    """A fixed admissible representative of ``family`` (used by CLI and scripts)."""
    fam = _canonical(family)
    params = dict(_DEFAULTS[fam])
    if N is not None and "N" in params:
        params["N"] = N
        if fam == "racah":
            params["a"] = str(N + Fraction(9, 2))
        if fam == "q_racah":
            params["a"] = str(Fraction(3, 2 ** (N + 4)))
    return make_model(fam, params, exact=exact)


# ---------------------------------------------------------------------------
# key = value config files


class ConfigError(ValidationError):
    """Malformed config file; carries the offending line number."""

    def __init__(self, message, line: Optional[int] = None, field: Optional[str] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.field = field


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Returns raw strings.

    Returns ``{"_lines": {key: line_no}, key: value, ...}``.
    """
    out, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=no)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"empty key or value in {raw.strip()!r}", line=no, field=key or None)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", line=no, field=key)
        out[key] = value
        lines[key] = no
    out["_lines"] = lines
    return out


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror or exc}") from None
    return parse_config(text)


def model_from_config(cfg: Mapping, exact: Optional[bool] = None) -> Model:
    """Build a model from a parsed config (``family`` plus parameter keys)."""
    cfg = dict(cfg)
    lines = cfg.pop("_lines", {})
    if "family" not in cfg:
        raise ConfigError("missing required key 'family'", field="family")
    family = cfg.pop("family")
    for extra in ("name", "description"):
        cfg.pop(extra, None)
    try:
        cls = family_class(family)
    except ValidationError as exc:
        raise ConfigError(str(exc), line=lines.get("family"), field="family") from None
    names = set(_field_names(cls))
    for key in cfg:
        if key not in names:
            raise ConfigError(f"unknown parameter {key!r} for {cls.family}",
                              line=lines.get(key), field=key)
    for key, raw in cfg.items():
        try:
            _convert(key, raw, exact)
        except ValidationError as exc:
            raise ConfigError(str(exc), line=lines.get(key), field=key) from None
    return make_model(family, cfg, exact=exact)
