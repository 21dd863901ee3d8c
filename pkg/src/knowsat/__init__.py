"""Deduction and static equivalence for frames under convergent rewrite systems."""
from pathlib import Path

__version__ = "0.1.0"

THEORIES = Path(__file__).parent / "theories"
