"""Values in an arbitrary quantale with a nucleus as ◇."""

from typing import Mapping, Optional, Sequence

from logic import Formula
from nuclei import UnaryMap
from valuations.base import TruthValues


class NucleusValues(TruthValues):
    """Any finite quantale; ◇ is the given nucleus."""

    def __init__(
        self,
        gamma: UnaryMap,
        domain: Sequence[str] = (),
        atoms: Optional[Mapping[Formula, int]] = None,
    ):
        super().__init__(gamma.base, domain, atoms or {})
        self.gamma = gamma

    @property
    def name(self) -> str:
        return "nucleus"

    def diamond(self, x: int) -> int:
        return self.gamma(x)
