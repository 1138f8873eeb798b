"""High-precision checks of near-identities: each claim is measured and
classified as TRUE, FRAUD (false but agreeing to many digits) or FALSE."""

from .errors import ZooError
from .numeric import PrecisionContext
from .report import ENTRY_IDS, VerdictReport, classify, run_all, run_entry

__version__ = "0.1.0"

__all__ = [
    "ENTRY_IDS",
    "PrecisionContext",
    "VerdictReport",
    "ZooError",
    "classify",
    "run_all",
    "run_entry",
]
