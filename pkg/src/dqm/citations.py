"""Reference locations quoted in discrepancy flags.

Reports must say which printed value a computed result contradicts, so
these labels are part of the output format.
"""

DATA_BLOCKS = "§2.3 data blocks"
ENERGY_FACTOR = f"{DATA_BLOCKS} (printed factor 4)"
ENERGY_FORMULA = f"{DATA_BLOCKS} (printed q-Racah energy)"
CLOSURE_TABLE = "§2.4 closure tables"
JACOBI_CLOSURE = "§2.4 Jacobi closure row"
QRACAH_CLOSURE = "§2.4 q-Racah closure row"

ALL = (ENERGY_FACTOR, ENERGY_FORMULA, CLOSURE_TABLE, JACOBI_CLOSURE, QRACAH_CLOSURE)
