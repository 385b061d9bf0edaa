"""Decision procedures for Frobenius splitting of varieties with torus actions.

Each engine takes a combinatorial or polynomial description of an instance
together with a prime ``p`` and returns :class:`~frobsplit.verdict.Verdict`
records (Yes / No / Unknown) carrying a certificate or an obstruction.
"""

from frobsplit.errors import FrobSplitError
from frobsplit.verdict import Decision, Value, Verdict

__all__ = ["Decision", "FrobSplitError", "Value", "Verdict"]

__version__ = "0.1.0"
