"""Algebraic evaluators for sentences.

This module provides a unified interface for evaluating sentences in
different truth-value algebras (P*, the Heyting quotient H, any quantale).
"""

from typing import Type

from valuations.base import TruthValues, ValuationError
from valuations.heyting import HeytingValues
from valuations.nucleus import NucleusValues
from valuations.pstar import PStarValues

# Registry of available valuations
VALUATIONS: dict[str, Type[TruthValues]] = {
    "pstar": PStarValues,
    "heyting": HeytingValues,
    "nucleus": NucleusValues,
}


def get_valuation_class(valuation: str) -> Type[TruthValues]:
    """Get the valuation class by name.

    Args:
        valuation: Valuation name (e.g., 'pstar', 'heyting').

    Returns:
        The valuation class.

    Raises:
        ValueError: If the valuation is not supported.
    """
    if valuation not in VALUATIONS:
        supported = ", ".join(VALUATIONS.keys())
        raise ValueError(f"Unknown valuation: {valuation}. Supported: {supported}")
    return VALUATIONS[valuation]


__all__ = [
    "TruthValues",
    "ValuationError",
    "PStarValues",
    "HeytingValues",
    "NucleusValues",
    "VALUATIONS",
    "get_valuation_class",
]
