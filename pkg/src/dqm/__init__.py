"""Exactly solvable discrete quantum mechanics: models, operators and checks."""
from .errors import (DiscrepancyWarning, DomainError, DQMError, InconsistentSystemError,
                     InterpolationError, PoleError, SingularSystemError, StructureError,
                     UnsupportedError, ValidationError)
from .models import (FAMILIES, ClosureData, Model, closure_table, default_model, energy,
                     groundstate_weight, make_model, potential)

__all__ = [
    "FAMILIES", "ClosureData", "Model", "make_model", "default_model", "potential",
    "energy", "groundstate_weight", "closure_table",
    "DQMError", "DomainError", "PoleError", "StructureError", "InterpolationError",
    "InconsistentSystemError", "SingularSystemError", "ValidationError",
    "UnsupportedError", "DiscrepancyWarning",
]
