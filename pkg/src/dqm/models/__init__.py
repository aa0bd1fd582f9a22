"""Catalog of the nine exactly solvable families."""
from .base import ClosureData, Model
from .catalog import (FAMILIES, OQM_FAMILIES, PDQM_FAMILIES, RDQM_FAMILIES,
                      ConfigError, closure_table, default_model, energy,
                      energy_discrepancy, exact_twin, family_class, groundstate_weight,
                      load_config, make_model, model_from_config,
                      parse_config, potential, random_model, random_params,
                      warn_energy_discrepancy)
from .coordinates import (OQM, Cos2xCoordinate, CosCoordinate,
                          LinearCoordinate, QRacahCoordinate,
                          QuadraticCoordinate, RacahCoordinate, ShiftKind,
                          SinusoidalCoordinate, pdqm_q_shift, pdqm_shift,
                          rdqm_shift)
from .families import (AskeyWilson, ContinuousHahn, Hahn, Hermite, Jacobi,
                       Laguerre, QRacah, Racah, Wilson)

__all__ = [
    "ClosureData", "Model", "ShiftKind", "SinusoidalCoordinate",
    "LinearCoordinate", "QuadraticCoordinate", "Cos2xCoordinate",
    "CosCoordinate", "RacahCoordinate", "QRacahCoordinate",
    "OQM", "pdqm_shift", "pdqm_q_shift", "rdqm_shift",
    "Hermite", "Laguerre", "Jacobi", "ContinuousHahn", "Wilson",
    "AskeyWilson", "Hahn", "Racah", "QRacah",
    "FAMILIES", "OQM_FAMILIES", "PDQM_FAMILIES", "RDQM_FAMILIES",
    "make_model", "family_class", "potential", "energy", "groundstate_weight",
    "closure_table", "energy_discrepancy", "warn_energy_discrepancy",
    "random_params", "random_model", "default_model",
    "ConfigError", "parse_config", "load_config", "model_from_config", "exact_twin",
]
