"""Abstract base class for algebraic truth-value evaluators."""

import logging
from abc import ABC, abstractmethod
from typing import Mapping, Optional, Sequence

from algebra import Quantale
from logic import (
    Bot,
    Diamond,
    Exists,
    Forall,
    Formula,
    Imp,
    Letter,
    Member,
    Or,
    RevImp,
    StrongAnd,
    WeakAnd,
    constants,
    desugar,
    is_sugar_free,
    substitute,
)

logger = logging.getLogger(__name__)


class ValuationError(Exception):
    """Base exception for evaluation errors (unknown atoms or constants)."""

    pass


class TruthValues(ABC):
    """Evaluates sentences in a quantale with a possibility operator.

    Connectives map to the quantale operations: & to the product, /\\ to the
    meet, \\/ to the join, -> and <- to the residual, ∃ and ∀ to joins and
    meets over the domain instances, and ◇ to ``diamond``. Atomic sentences
    (letters and memberships between constants) take the values in ``atoms``.

    All implementations must provide ``name`` and ``diamond``.
    """

    def __init__(self, algebra: Quantale, domain: Sequence[str], atoms: Mapping[Formula, int]):
        self.algebra = algebra
        self.domain = tuple(domain)
        self.atoms = dict(atoms)
        self._known = set(self.domain)

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the valuation name (e.g., 'pstar', 'heyting')."""
        pass

    @abstractmethod
    def diamond(self, x: int) -> int:
        """Interpret ◇ on an element of the algebra.

        Args:
            x: Element index.

        Returns:
            int: Element index of ◇x.
        """
        pass

    def atom_value(self, atom: Formula) -> int:
        try:
            return self.atoms[atom]
        except KeyError:
            raise ValuationError(f"No value for atomic sentence {atom}") from None

    def evaluate(self, formula: Formula, cache: Optional[dict] = None) -> int:
        """Value of a sentence.

        Args:
            formula: Sentence over the domain constants (sugar allowed).
            cache: Optional memo shared across calls on the same valuation.

        Returns:
            int: Element index in ``algebra``.

        Raises:
            ValuationError: If the sentence names an unknown constant or atom.
        """
        unknown = constants(formula) - self._known
        if unknown:
            raise ValuationError(f"Unknown constants: {', '.join(sorted(unknown))}")
        if not is_sugar_free(formula):
            formula = desugar(formula)
        return self._value(formula, {} if cache is None else cache)

    def _value(self, node: Formula, cache: dict) -> int:
        hit = cache.get(node)
        if hit is not None:
            return hit

        q = self.algebra
        if isinstance(node, Bot):
            value = q.bottom
        elif isinstance(node, (Letter, Member)):
            value = self.atom_value(node)
        elif isinstance(node, (StrongAnd, WeakAnd, Or, Imp, RevImp)):
            left = self._value(node.left, cache)
            right = self._value(node.right, cache)
            if isinstance(node, StrongAnd):
                value = int(q.prod[left, right])
            elif isinstance(node, WeakAnd):
                value = int(q.meet_table[left, right])
            elif isinstance(node, Or):
                value = int(q.join_table[left, right])
            elif isinstance(node, Imp):
                value = int(q.residual_table[left, right])
            else:
                value = int(q.residual_table[right, left])
        elif isinstance(node, Diamond):
            value = self.diamond(self._value(node.body, cache))
        elif isinstance(node, Exists):
            value = q.join_all(
                self._value(substitute(node.body, node.var, d), cache) for d in self.domain
            )
        elif isinstance(node, Forall):
            value = q.meet_all(
                self._value(substitute(node.body, node.var, d), cache) for d in self.domain
            )
        else:
            raise ValuationError(f"Cannot evaluate {type(node).__name__} (open formula or sugar)")

        cache[node] = value
        return value

    def is_valid(self, formula: Formula, cache: Optional[dict] = None) -> bool:
        """True when the sentence takes the top value."""
        return self.evaluate(formula, cache) == self.algebra.top
