"""Order-dual frames, conuclei and the lattice P* of strongly hereditary sets.

A frame (complete SO-commutative monoid) has the monoid unit 1 at the bottom
and ∞ at the top. Subsets of a frame are int bit masks: bit p is set when
world p is a member.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from algebra import (
    BoundExceededError,
    NotALatticeError,
    Quantale,
    families,
    lattice_tables,
    readonly,
    verify_quantale_laws,
)
from config import config
from nuclei import UnaryMap, is_quantic_nucleus, nucleus_predicates
from reports import HYPOTHESIS_UNMET, CheckResult, LawReport, check

logger = logging.getLogger(__name__)


class FrameError(Exception):
    """Base exception for invalid frames."""

    pass


class MalformedFrameError(FrameError):
    """The tables do not describe a complete SO-commutative monoid."""

    pass


class ConucleusError(FrameError):
    """A map violates a conucleus condition."""

    pass


def bits(mask: int) -> list[int]:
    """Indices of the set bits of a mask, ascending."""
    out = []
    p = 0
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return out


def to_mask(members: Iterable[int]) -> int:
    mask = 0
    for p in members:
        mask |= 1 << int(p)
    return mask


class SOMonoid:
    """Finite complete SO-commutative monoid.

    Attributes:
        n: Carrier size.
        names: World labels.
        leq: Read-only order matrix; the unit is the minimum.
        prod: Read-only product table.
        meet_table: Binary meets.
        unit: Index of 1 (bottom).
        top: Index of ∞.
        implication_table: a → c = ⋀{b : c ≤ a·b}.
    """

    def __init__(self, names: Sequence[str], leq, prod):
        names = [str(name) for name in names]
        leq = np.asarray(leq, dtype=bool)
        prod = np.asarray(prod, dtype=np.int64)
        n = len(names)
        if n == 0 or leq.shape != (n, n) or prod.shape != (n, n):
            raise MalformedFrameError(f"Frame tables must be nonempty and {n}x{n}")
        if prod.min() < 0 or prod.max() >= n:
            raise MalformedFrameError("Product table contains a non-world")
        try:
            meet, _ = lattice_tables(leq, names)
        except NotALatticeError as e:
            raise MalformedFrameError(str(e)) from e

        self.n = n
        self.names = tuple(names)
        self.leq = readonly(leq)
        self.prod = readonly(prod)
        self.meet_table = readonly(meet)
        self.unit = int(np.flatnonzero(self.leq.all(axis=1))[0])
        self.top = int(np.flatnonzero(self.leq.all(axis=0))[0])
        self._validate_product()
        self.implication_table = readonly(self._compute_implications())

    def _validate_product(self) -> None:
        prod, leq, meet, name = self.prod, self.leq, self.meet_table, self.names
        if not np.array_equal(prod, prod.T):
            a, b = map(int, np.argwhere(prod != prod.T)[0])
            raise MalformedFrameError(f"Product not commutative at ({name[a]}, {name[b]})")
        if not np.array_equal(prod[prod, :], prod[:, prod]):
            a, b, c = map(int, np.argwhere(prod[prod, :] != prod[:, prod])[0])
            raise MalformedFrameError(
                f"Product not associative at ({name[a]}, {name[b]}, {name[c]})"
            )
        if not np.array_equal(prod[self.unit, :], np.arange(self.n)):
            raise MalformedFrameError(f"Bottom {name[self.unit]} is not the product unit")
        mono = leq[prod[:, None, :], prod[None, :, :]]
        if (leq[:, :, None] & ~mono).any():
            a, b, c = map(int, np.argwhere(leq[:, :, None] & ~mono)[0])
            raise MalformedFrameError(
                f"Product not monotone: {name[a]} ≤ {name[b]} but "
                f"{name[a]}·{name[c]} ≰ {name[b]}·{name[c]}"
            )
        if (prod[:, self.top] != self.top).any():
            a = int(np.flatnonzero(prod[:, self.top] != self.top)[0])
            raise MalformedFrameError(f"{name[a]}·∞ is not ∞")
        lhs = prod[:, meet]
        rhs = meet[prod[:, :, None], prod[:, None, :]]
        if not np.array_equal(lhs, rhs):
            a, b, c = map(int, np.argwhere(lhs != rhs)[0])
            raise MalformedFrameError(
                f"Product does not distribute over meets at {name[a]}·({name[b]} ∧ {name[c]})"
            )

    def _compute_implications(self) -> np.ndarray:
        n = self.n
        table = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            for c in range(n):
                table[a, c] = self.meet_all(np.flatnonzero(self.leq[c, self.prod[a, :]]))
        return table

    def meet_all(self, worlds: Iterable[int]) -> int:
        """Meet of a family; the empty meet is ∞."""
        result = self.top
        for p in worlds:
            result = int(self.meet_table[result, p])
        return result

    def index(self, name: str) -> int:
        try:
            return self.names.index(str(name))
        except ValueError:
            raise ValueError(f"Unknown world: {name}") from None

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        """up_masks[p] is the mask of {q : p ≤ q}."""
        return tuple(to_mask(np.flatnonzero(self.leq[p, :])) for p in range(self.n))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def fingerprint(self) -> str:
        return codualize(self).fingerprint

    def __eq__(self, other) -> bool:
        if not isinstance(other, SOMonoid):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.prod, other.prod)
        )

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        unit, top = self.names[self.unit], self.names[self.top]
        return f"SOMonoid({list(self.names)}, unit={unit}, top={top})"

    def as_document(self) -> dict:
        return {"names": list(self.names), "leq": self.leq.tolist(), "prod": self.prod.tolist()}


def dualize(q: Quantale) -> SOMonoid:
    """Same carrier and product with the order reversed: 1 becomes the bottom, 0 becomes ∞."""
    return SOMonoid(q.names, q.leq.T, q.prod)


def codualize(P: SOMonoid) -> Quantale:
    """Inverse of dualize."""
    return Quantale(P.names, P.leq.T, P.prod)


def p_implication(P: SOMonoid, a: int, c: int) -> int:
    """a → c = ⋀{b : c ≤ a·b}."""
    return int(P.implication_table[a, c])


def p_negation(P: SOMonoid, a: int) -> int:
    """∼a = a → ∞."""
    return int(P.implication_table[a, P.top])


def verify_so_laws(P: SOMonoid) -> LawReport:
    """The listed dual laws, plus a few unlisted duals recorded as observations."""
    report = LawReport(repr(P))
    E = range(P.n)
    leq, prod, imp, meet = P.leq, P.prod, P.implication_table, P.meet_table
    neg = imp[:, P.top]
    one, inf = P.unit, P.top
    names = P.names

    def law(name, labels, arity, predicate, asserted=True):
        found = None
        for t in itertools.product(E, repeat=arity):
            if not predicate(*t):
                found = {label: names[v] for label, v in zip(labels, t)}
                break
        report.add(check(name, found is None, found, asserted=asserted))

    law("adjunction", "acb", 3, lambda a, c, b: leq[imp[a, c], b] == leq[c, prod[a, b]])
    law("order-implication", "ab", 2, lambda a, b: leq[a, b] == (imp[b, a] == one))
    law("implication-recovers", "ab", 2, lambda a, b: leq[b, prod[a, imp[a, b]]])
    law(
        "implication-antitone", "abc", 3, lambda a, b, c: not leq[a, b] or leq[imp[b, c], imp[a, c]]
    )
    law(
        "implication-monotone", "abc", 3, lambda a, b, c: not leq[a, b] or leq[imp[c, a], imp[c, b]]
    )
    law("currying", "abc", 3, lambda a, b, c: imp[prod[a, b], c] == imp[a, imp[b, c]])
    law("negation-annihilates", "a", 1, lambda a: prod[a, neg[a]] == inf)

    law("product-above-operands", "ab", 2, lambda a, b: leq[a, prod[a, b]], asserted=False)
    law("double-negation-deflationary", "a", 1, lambda a: leq[neg[neg[a]], a], asserted=False)
    law("triple-negation", "a", 1, lambda a: neg[neg[neg[a]]] == neg[a], asserted=False)
    law(
        "negation-of-meet",
        "ab",
        2,
        lambda a, b: neg[meet[a, b]] == prod[neg[a], neg[b]],
        asserted=False,
    )
    return report


# Conuclei


def conucleus_violations(
    P: SOMonoid, table: Sequence[int], subset_bound: Optional[int] = None
) -> list[str]:
    """Names of the conucleus conditions a map fails (empty when it is a conucleus).

    Meet preservation is checked on binary meets always and on every nonempty
    family when the frame is within the subset bound.
    """
    E = range(P.n)
    leq, prod, meet = P.leq, P.prod, P.meet_table
    d = table
    failed = []
    if not all(leq[d[p], p] for p in E):
        failed.append("deflationary")
    if not all(leq[d[p], d[q]] for p in E for q in E if leq[p, q]):
        failed.append("monotone")
    if not all(d[d[p]] == d[p] for p in E):
        failed.append("idempotent-map")
    if not all(leq[d[prod[p, q]], prod[d[p], d[q]]] for p in E for q in E):
        failed.append("submultiplicative")
    if not all(d[meet[p, q]] == meet[d[p], d[q]] for p in E for q in E):
        failed.append("preserves-meets")
    else:
        bound = config.subset_bound if subset_bound is None else subset_bound
        if P.n <= bound:
            for k in range(3, P.n + 1):
                if any(
                    d[P.meet_all(f)] != P.meet_all(d[p] for p in f)
                    for f in itertools.combinations(E, k)
                ):
                    failed.append("preserves-meets")
                    break
    return failed


@dataclass(frozen=True)
class Conucleus:
    """A conucleus δ on a frame."""

    frame: SOMonoid
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != self.frame.n:
            raise ConucleusError(f"Conucleus must have {self.frame.n} entries")
        if any(not 0 <= v < self.frame.n for v in self.table):
            raise ConucleusError(f"Conucleus values must be worlds: {self.table}")
        failed = conucleus_violations(self.frame, self.table)
        if failed:
            raise ConucleusError(f"Not a conucleus ({', '.join(failed)}): {list(self.table)}")

    @classmethod
    def identity(cls, P: SOMonoid) -> "Conucleus":
        return cls(P, tuple(range(P.n)))

    def __call__(self, p: int) -> int:
        return self.table[p]

    def describe(self) -> dict:
        names = self.frame.names
        return {names[p]: names[v] for p, v in enumerate(self.table)}


@dataclass(frozen=True)
class ConucleusFlags:
    idempotent: bool
    respects_top: bool
    respects_implications: bool

    @property
    def standard(self) -> bool:
        return self.idempotent and self.respects_top and self.respects_implications

    def failing(self) -> list[str]:
        names = ("idempotent", "respects_top", "respects_implications")
        return [name for name in names if not getattr(self, name)]

    def as_dict(self) -> dict:
        return {
            "idempotent": self.idempotent,
            "respects_top": self.respects_top,
            "respects_implications": self.respects_implications,
            "standard": self.standard,
        }


def conucleus_predicates(delta: Conucleus) -> ConucleusFlags:
    P = delta.frame
    E = range(P.n)
    imp, prod = P.implication_table, P.prod
    d = delta
    return ConucleusFlags(
        idempotent=all(d(prod[p, p]) == d(p) for p in E),
        respects_top=d(P.top) == P.top,
        respects_implications=all(
            (d(imp[p, q]) == P.unit) == (imp[p, d(q)] == P.unit) for p in E for q in E
        ),
    )


def verify_conucleus_laws(delta: Conucleus) -> LawReport:
    """Conucleus conditions as a report, with the standardness flags as observations."""
    report = LawReport(f"conucleus {list(delta.table)}")
    failed = conucleus_violations(delta.frame, delta.table)
    conditions = (
        "deflationary",
        "monotone",
        "idempotent-map",
        "submultiplicative",
        "preserves-meets",
    )
    for name in conditions:
        report.add(check(name, name not in failed))
    flags = conucleus_predicates(delta)
    for name in ("idempotent", "respects_top", "respects_implications"):
        holds = getattr(flags, name)
        detail = "holds" if holds else "fails"
        report.add(check(name.replace("_", "-"), holds, detail=detail, asserted=False))
    return report


def enumerate_conuclei(P: SOMonoid, bound: Optional[int] = None) -> list[Conucleus]:
    """All conuclei on P in lexicographic order of their tables.

    Raises:
        BoundExceededError: If P is larger than the enumeration bound.
    """
    limit = config.enumeration_bound if bound is None else bound
    if P.n > limit:
        raise BoundExceededError("Conucleus enumeration", P.n, limit)

    n, leq = P.n, P.leq
    table = [0] * n
    found: list[Conucleus] = []

    def extend(p: int) -> None:
        if p == n:
            if not conucleus_violations(P, table):
                found.append(Conucleus(P, tuple(table)))
            return
        for v in range(n):
            if not leq[v, p]:
                continue
            if any(
                (leq[a, p] and not leq[table[a], v]) or (leq[p, a] and not leq[v, table[a]])
                for a in range(p)
            ):
                continue
            table[p] = v
            extend(p + 1)

    extend(0)
    logger.info(f"Found {len(found)} conuclei on {P!r}")
    return found


def enumerate_standard_conuclei(P: SOMonoid, bound: Optional[int] = None) -> list[Conucleus]:
    return [d for d in enumerate_conuclei(P, bound) if conucleus_predicates(d).standard]


# Strongly hereditary sets


def _mask_of(P: SOMonoid, subset) -> int:
    if isinstance(subset, StronglyHereditarySet):
        return subset.mask
    if isinstance(subset, int):
        return subset
    return to_mask(subset)


def is_up_closed(P: SOMonoid, mask: int) -> bool:
    return all(P.up_masks[p] & ~mask == 0 for p in bits(mask))


def is_meet_closed(P: SOMonoid, mask: int) -> bool:
    members = bits(mask)
    return all(mask >> int(P.meet_table[a, b]) & 1 for a in members for b in members)


def is_strongly_hereditary(P: SOMonoid, subset) -> bool:
    """Nonempty, upward closed and closed under binary meets of members."""
    mask = _mask_of(P, subset)
    return mask != 0 and is_up_closed(P, mask) and is_meet_closed(P, mask)


def is_cap_closed(P: SOMonoid, subset) -> bool:
    """Hereditary (upward closed) and closed under finite meets of members."""
    mask = _mask_of(P, subset)
    return is_up_closed(P, mask) and is_meet_closed(P, mask)


def closure_mask(P: SOMonoid, mask: int) -> int:
    """Least upward closed, meet-closed superset of a nonempty mask."""
    while True:
        grown = mask
        for p in bits(mask):
            grown |= P.up_masks[p]
        members = bits(grown)
        for a in members:
            for b in members:
                grown |= 1 << int(P.meet_table[a, b])
        if grown == mask:
            return mask
        mask = grown


@dataclass(frozen=True)
class StronglyHereditarySet:
    """A strongly hereditary subset of a frame, stored as a bit mask."""

    mask: int
    frame: SOMonoid = field(compare=False, repr=False)

    def __post_init__(self):
        if not is_strongly_hereditary(self.frame, self.mask):
            raise ValueError(f"Not strongly hereditary: {describe_mask(self.frame, self.mask)}")

    @property
    def members(self) -> list[int]:
        return bits(self.mask)

    def __contains__(self, p: int) -> bool:
        return bool(self.mask >> p & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def issubset(self, other: "StronglyHereditarySet") -> bool:
        return self.mask & ~other.mask == 0

    def describe(self) -> str:
        return describe_mask(self.frame, self.mask)


def describe_mask(P: SOMonoid, mask: int) -> str:
    return "{" + ",".join(P.names[p] for p in bits(mask)) + "}"


def strongly_hereditary_closure(P: SOMonoid, subset) -> StronglyHereditarySet:
    """Least strongly hereditary superset.

    Raises:
        ValueError: If the subset is empty.
    """
    mask = _mask_of(P, subset)
    if mask == 0:
        raise ValueError("Closure of the empty set is undefined")
    return StronglyHereditarySet(closure_mask(P, mask), P)


class PStarLattice:
    """All strongly hereditary subsets of a frame with their quantale structure.

    Elements are ordered by size and then by mask, so index 0 is {∞} and the
    last index is the whole carrier. Index-level operations go through
    ``as_quantale``; the mask-level operations below define its tables.
    """

    def __init__(self, frame: SOMonoid, masks: Sequence[int]):
        self.frame = frame
        self.masks = tuple(sorted(masks, key=lambda m: (bin(m).count("1"), m)))
        self.position = {m: i for i, m in enumerate(self.masks)}
        self.bottom_mask = 1 << frame.top
        self.top_mask = frame.full_mask
        if self.masks[0] != self.bottom_mask or self.masks[-1] != self.top_mask:
            raise FrameError("P* must range from {∞} to the whole carrier")

    @cached_property
    def as_quantale(self) -> Quantale:
        k = len(self.masks)
        names = [describe_mask(self.frame, m) for m in self.masks]
        leq = [[a & ~b == 0 for b in self.masks] for a in self.masks]
        prod = [[self.position[self.mask_product(a, b)] for b in self.masks] for a in self.masks]
        q = Quantale(names, leq, prod)
        logger.debug(f"P* over {self.frame!r} has {k} elements")
        return q

    def __len__(self) -> int:
        return len(self.masks)

    def element(self, i: int) -> StronglyHereditarySet:
        return StronglyHereditarySet(self.masks[i], self.frame)

    def elements(self) -> list[StronglyHereditarySet]:
        return [self.element(i) for i in range(len(self.masks))]

    def index_of(self, subset) -> int:
        mask = _mask_of(self.frame, subset)
        try:
            return self.position[mask]
        except KeyError:
            raise ValueError(
                f"Not an element of P*: {describe_mask(self.frame, mask)}"
            ) from None

    def describe(self, i: int) -> str:
        return describe_mask(self.frame, self.masks[i])

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.masks) - 1

    # Mask-level operations

    def mask_product(self, a: int, b: int) -> int:
        """A·B = {c : c ≥ a·b for some a ∈ A, b ∈ B}."""
        up, prod = self.frame.up_masks, self.frame.prod
        out = 0
        for x in bits(a):
            for y in bits(b):
                out |= up[int(prod[x, y])]
        return out

    def mask_implies(self, a: int, b: int) -> int:
        """A → B = {c : c·A ⊆ B}."""
        prod = self.frame.prod
        members = bits(a)
        out = 0
        for c in range(self.frame.n):
            if all(b >> int(prod[c, x]) & 1 for x in members):
                out |= 1 << c
        return out

    def mask_left_implies(self, a: int, b: int) -> int:
        """A ← B = B → A."""
        return self.mask_implies(b, a)

    def mask_neg(self, a: int) -> int:
        return self.mask_implies(a, self.bottom_mask)

    def mask_join(self, a: int, b: int) -> int:
        return closure_mask(self.frame, a | b)

    def mask_meet(self, a: int, b: int) -> int:
        return a & b

    def big_join(self, masks: Iterable[int]) -> int:
        """Least strongly hereditary superset of the union ({∞} for no sets)."""
        union = 0
        for m in masks:
            union |= m
        return closure_mask(self.frame, union) if union else self.bottom_mask

    def big_join_definitional(self, masks: Iterable[int]) -> int:
        """All c above the meet of some nonempty family drawn from the union."""
        union = 0
        for m in masks:
            union |= m
        if not union:
            return self.bottom_mask
        members = bits(union)
        out = 0
        for k in range(1, len(members) + 1):
            for family in itertools.combinations(members, k):
                out |= self.frame.up_masks[self.frame.meet_all(family)]
        return out

    def big_meet(self, masks: Iterable[int]) -> int:
        out = self.top_mask
        for m in masks:
            out &= m
        return out


def _antichains(P: SOMonoid) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    leq = P.leq

    def extend(start: int, chosen: list[int]) -> None:
        if chosen:
            out.append(tuple(chosen))
        for p in range(start, P.n):
            if all(not leq[p, c] and not leq[c, p] for c in chosen):
                chosen.append(p)
                extend(p + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


def enumerate_p_star(P: SOMonoid, bound: Optional[int] = None) -> PStarLattice:
    """Enumerate P* by walking antichain-generated up-sets and keeping the meet-closed ones.

    Raises:
        BoundExceededError: If the frame is larger than the P* bound.
    """
    limit = config.pstar_bound if bound is None else bound
    if P.n > limit:
        raise BoundExceededError("P* enumeration", P.n, limit)

    masks = []
    for antichain in _antichains(P):
        up = 0
        for p in antichain:
            up |= P.up_masks[p]
        if is_meet_closed(P, up):
            masks.append(up)
    pstar = PStarLattice(P, masks)
    logger.info(f"Enumerated P* over {P!r}: {len(pstar)} strongly hereditary sets")
    return pstar


def verify_p_star_laws(pstar: PStarLattice, seed: Optional[int] = None) -> LawReport:
    """Quantale laws of P* plus agreement of its operations with their set definitions."""
    q = pstar.as_quantale
    report = verify_quantale_laws(q, seed=seed, subject=f"P* over {pstar.frame!r}")
    masks = pstar.masks
    k = len(masks)
    pairs = list(itertools.product(range(k), repeat=2))

    def first(predicate):
        for i, j in pairs:
            if not predicate(masks[i], masks[j]):
                return {"A": pstar.describe(i), "B": pstar.describe(j)}
        return None

    for name, predicate in (
        (
            "residual-is-arrow",
            lambda a, b: masks[q.residual_table[pstar.position[a], pstar.position[b]]]
            == pstar.mask_implies(a, b),
        ),
        (
            "join-is-closure-of-union",
            lambda a, b: masks[q.join_table[pstar.position[a], pstar.position[b]]]
            == pstar.mask_join(a, b),
        ),
        (
            "meet-is-intersection",
            lambda a, b: masks[q.meet_table[pstar.position[a], pstar.position[b]]] == a & b,
        ),
        ("product-within-intersection", lambda a, b: pstar.mask_product(a, b) & ~(a & b) == 0),
        ("operations-stay-in-p-star", lambda a, b: all(
            m in pstar.position
            for m in (pstar.mask_product(a, b), pstar.mask_implies(a, b), pstar.mask_join(a, b))
        )),
    ):
        witness = first(predicate)
        report.add(check(name, witness is None, witness))

    bad = next(
        (
            f
            for f in families(k, seed=seed)
            if pstar.big_join(masks[i] for i in f)
            != pstar.big_join_definitional(masks[i] for i in f)
        ),
        None,
    )
    report.add(
        check(
            "big-join-agrees-with-definition",
            bad is None,
            bad is not None and {"family": [pstar.describe(i) for i in bad]},
        )
    )
    report.add(
        check(
            "bottom-absorbing",
            all(pstar.mask_product(m, pstar.bottom_mask) == pstar.bottom_mask for m in masks),
        )
    )
    report.add(check("infinity-in-every-set", all(m >> pstar.frame.top & 1 for m in masks)))
    return report


# The nucleus induced by a conucleus


def gamma_delta(delta: Conucleus, pstar: PStarLattice) -> UnaryMap:
    """γ_δ(A) = {p : δ(q) ≤ p for some q ∈ A}, as a map on the P* quantale."""
    up = delta.frame.up_masks
    table = []
    for mask in pstar.masks:
        out = 0
        for q in bits(mask):
            out |= up[delta(q)]
        table.append(pstar.index_of(out))
    return UnaryMap(pstar.as_quantale, tuple(table))


def verify_gamma_delta(
    delta: Conucleus, pstar: PStarLattice, seed: Optional[int] = None
) -> LawReport:
    """γ_δ is a quantic nucleus on P* and preserves joins of nonempty families."""
    report = LawReport(f"gamma of conucleus {list(delta.table)}")
    gamma = gamma_delta(delta, pstar)
    q = gamma.base
    report.add(check("is-quantic-nucleus", is_quantic_nucleus(gamma)))
    bad = next(
        (
            f
            for f in families(q.n, seed=seed)
            if f and gamma(q.join_all(f)) != q.join_all(gamma(i) for i in f)
        ),
        None,
    )
    report.add(
        check(
            "preserves-joins",
            bad is None,
            bad is not None and {"family": [pstar.describe(i) for i in bad]},
        )
    )
    return report


def verify_gamma_standardness(delta: Conucleus, pstar: PStarLattice) -> LawReport:
    """Each standardness flag of δ carries over to γ_δ.

    A flag δ lacks makes the corresponding implication vacuous; it is reported
    as hypothesis-unmet together with the flag γ_δ actually has.
    """
    report = LawReport(f"standardness of gamma for conucleus {list(delta.table)}")
    dflags = conucleus_predicates(delta)
    gflags = nucleus_predicates(gamma_delta(delta, pstar))
    for name, hypothesis, conclusion in (
        ("idempotent-gives-product-idempotent", dflags.idempotent, gflags.idempotent_wrt_products),
        (
            "implications-give-implications",
            dflags.respects_implications,
            gflags.respects_implications,
        ),
        ("top-gives-bottom", dflags.respects_top, gflags.respects_bottom),
    ):
        if hypothesis:
            report.add(check(name, conclusion))
        else:
            report.add(
                CheckResult(name, HYPOTHESIS_UNMET, detail=f"gamma flag observed: {conclusion}")
            )
    return report
