"""Values in the Heyting algebra H = P*/F_γ."""

from typing import Mapping, Sequence

from logic import Formula
from nuclei import QuotientAlgebra, UnaryMap, induced_map
from valuations.base import TruthValues


class HeytingValues(TruthValues):
    """Classes of the quotient by the dense filter of γ.

    ◇ acts by |A| ↦ |γ(A)|, which is the identity on H since |γ(A)| = |A|.

    Args:
        quotient: H with its class map.
        gamma: The nucleus on the base algebra of the quotient.
        domain: Constant names.
        atoms: Atomic sentence to class index.
    """

    def __init__(
        self,
        quotient: QuotientAlgebra,
        gamma: UnaryMap,
        domain: Sequence[str],
        atoms: Mapping[Formula, int],
    ):
        super().__init__(quotient.quotient, domain, atoms)
        self.quotient = quotient
        self.induced = induced_map(quotient, gamma)

    @property
    def name(self) -> str:
        return "heyting"

    def diamond(self, x: int) -> int:
        return self.induced(x)
