"""Values in P*, with ◇ read as the nucleus induced by a conucleus."""

from typing import Mapping, Sequence

from frames import Conucleus, PStarLattice, gamma_delta
from logic import Formula
from valuations.base import TruthValues


class PStarValues(TruthValues):
    """Forcing sets as elements of the P* quantale.

    Args:
        pstar: The strongly hereditary sets of the frame.
        delta: Conucleus interpreting ◇ through γ_δ.
        domain: Constant names.
        atoms: Atomic sentence to P* element index.
    """

    def __init__(
        self,
        pstar: PStarLattice,
        delta: Conucleus,
        domain: Sequence[str],
        atoms: Mapping[Formula, int],
    ):
        super().__init__(pstar.as_quantale, domain, atoms)
        self.pstar = pstar
        self.gamma = gamma_delta(delta, pstar)

    @property
    def name(self) -> str:
        return "pstar"

    def diamond(self, x: int) -> int:
        return self.gamma(x)
