"""Closure operators, quantic nuclei, filters and quotient algebras."""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from algebra import BoundExceededError, Quantale, families, is_idempotent
from config import config
from reports import HYPOTHESIS_UNMET, CheckResult, LawReport, check

logger = logging.getLogger(__name__)


class InconsistencyError(Exception):
    """An induced quotient operation depends on the chosen representatives.

    Filters induce congruences, so this signals a bug rather than bad input.
    """

    pass


@dataclass(frozen=True)
class UnaryMap:
    """A total map on the carrier of a quantale."""

    base: Quantale
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.base.n:
            raise ValueError(f"Map must have {self.base.n} entries, got {len(self.table)}")
        if any(not 0 <= v < self.base.n for v in self.table):
            raise ValueError(f"Map values must be element indices: {self.table}")
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    @classmethod
    def identity(cls, q: Quantale) -> "UnaryMap":
        return cls(q, tuple(range(q.n)))

    @classmethod
    def constant(cls, q: Quantale, value: int) -> "UnaryMap":
        return cls(q, (value,) * q.n)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def compose(self, other: "UnaryMap") -> "UnaryMap":
        """self after other."""
        return UnaryMap(self.base, tuple(self.table[other.table[x]] for x in range(self.base.n)))

    def fixed_points(self) -> list[int]:
        return [x for x in range(self.base.n) if self.table[x] == x]

    def image(self) -> list[int]:
        return sorted(set(self.table))

    def describe(self) -> dict:
        names = self.base.names
        return {names[x]: names[v] for x, v in enumerate(self.table)}


def _is_expansive(m: UnaryMap) -> bool:
    return all(m.base.leq[x, m(x)] for x in range(m.base.n))


def _is_monotone(m: UnaryMap) -> bool:
    leq = m.base.leq
    return all(
        leq[m(x), m(y)] for x in range(m.base.n) for y in range(m.base.n) if leq[x, y]
    )


def _is_idempotent_map(m: UnaryMap) -> bool:
    return all(m(m(x)) == m(x) for x in range(m.base.n))


def is_closure_operator(m: UnaryMap) -> bool:
    """Expansive, idempotent and monotone."""
    return _is_expansive(m) and _is_idempotent_map(m) and _is_monotone(m)


def is_quantic_nucleus(m: UnaryMap) -> bool:
    """Closure operator with γ(x)·γ(y) ≤ γ(x·y)."""
    if not is_closure_operator(m):
        return False
    q = m.base
    return all(
        q.leq[q.prod[m(x), m(y)], m(q.prod[x, y])]
        for x in range(q.n)
        for y in range(q.n)
    )


def double_negation(q: Quantale) -> UnaryMap:
    """The map x ↦ ∼∼x."""
    return UnaryMap(q, tuple(int(q.neg_table[q.neg_table[x]]) for x in range(q.n)))


def check_nucleus_characterization(gamma: UnaryMap) -> bool:
    """γ(x) → γ(y) = x → γ(y) for all pairs."""
    q = gamma.base
    r = q.residual_table
    return all(
        r[gamma(x), gamma(y)] == r[x, gamma(y)] for x in range(q.n) for y in range(q.n)
    )


def fixed_point_quantale(gamma: UnaryMap) -> tuple[Quantale, tuple[int, ...]]:
    """The quantale Q_γ of fixed points with product γ(x·y).

    Meets are inherited from Q and joins become γ(x ∨ y); both follow from the
    restricted order, which the Quantale constructor recomputes.

    Returns:
        tuple: (Q_γ, embedding) where embedding[i] is the Q index of element i.
    """
    q = gamma.base
    fixed = tuple(gamma.fixed_points())
    position = {x: i for i, x in enumerate(fixed)}
    idx = np.array(fixed)
    leq = q.leq[np.ix_(idx, idx)]
    prod = [[position[gamma(int(q.prod[a, b]))] for b in fixed] for a in fixed]
    return Quantale([q.names[x] for x in fixed], leq, prod), fixed


@dataclass(frozen=True)
class NucleusFlags:
    """Exhaustively computed properties of a quantic nucleus."""

    idempotent_wrt_products: bool
    respects_implications: bool
    respects_bottom: bool

    @property
    def standard(self) -> bool:
        return self.idempotent_wrt_products and self.respects_implications and self.respects_bottom

    def failing(self) -> list[str]:
        names = ("idempotent_wrt_products", "respects_implications", "respects_bottom")
        return [name for name in names if not getattr(self, name)]

    def as_dict(self) -> dict:
        return {
            "idempotent_wrt_products": self.idempotent_wrt_products,
            "respects_implications": self.respects_implications,
            "respects_bottom": self.respects_bottom,
            "standard": self.standard,
        }


def nucleus_predicates(gamma: UnaryMap) -> NucleusFlags:
    q = gamma.base
    E = range(q.n)
    r = q.residual_table
    return NucleusFlags(
        idempotent_wrt_products=all(gamma(q.prod[x, x]) == gamma(x) for x in E),
        respects_implications=all(
            (gamma(r[x, y]) == q.top) == (r[gamma(x), gamma(y)] == q.top)
            for x in E
            for y in E
        ),
        respects_bottom=gamma(q.bottom) == q.bottom,
    )


def enumerate_quantic_nuclei(q: Quantale, bound: Optional[int] = None) -> list[UnaryMap]:
    """All quantic nuclei on q in lexicographic order of their tables.

    Candidates are built element by element; a partial map is abandoned as
    soon as it breaks expansivity or monotonicity.

    Raises:
        BoundExceededError: If q is larger than the enumeration bound.
    """
    limit = config.enumeration_bound if bound is None else bound
    if q.n > limit:
        raise BoundExceededError("Nucleus enumeration", q.n, limit)

    n, leq = q.n, q.leq
    table = [0] * n
    found: list[UnaryMap] = []

    def extend(x: int) -> None:
        if x == n:
            candidate = UnaryMap(q, tuple(table))
            if is_quantic_nucleus(candidate):
                found.append(candidate)
            return
        for v in range(n):
            if not leq[x, v]:
                continue
            if any(
                (leq[a, x] and not leq[table[a], v]) or (leq[x, a] and not leq[v, table[a]])
                for a in range(x)
            ):
                continue
            table[x] = v
            extend(x + 1)

    extend(0)
    logger.info(f"Found {len(found)} quantic nuclei on {q!r}")
    return found


# Filters


def is_filter(q: Quantale, members: Iterable[int]) -> bool:
    """Nonempty, upward closed and closed under products."""
    S = set(members)
    if not S:
        return False
    for x in S:
        if any(q.leq[x, y] and y not in S for y in range(q.n)):
            return False
        if any(int(q.prod[x, y]) not in S for y in S):
            return False
    return True


@dataclass(frozen=True)
class Filter:
    """A filter of a quantale."""

    base: Quantale
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(x) for x in self.members))
        if not is_filter(self.base, self.members):
            names = sorted(self.base.names[x] for x in self.members)
            raise ValueError(f"Not a filter: {names}")

    @property
    def proper(self) -> bool:
        return self.base.bottom not in self.members

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def describe(self) -> list[str]:
        return [self.base.names[x] for x in sorted(self.members)]


def generated_filter(q: Quantale, generators: Iterable[int]) -> Filter:
    """Least filter containing the generators (the trivial filter {1} if none)."""
    members = set(generators) | {q.top}
    while True:
        grown = set(members)
        for x in members:
            grown.update(int(q.prod[x, y]) for y in members)
        grown.update(y for x in list(grown) for y in range(q.n) if q.leq[x, y])
        if grown == members:
            return Filter(q, frozenset(members))
        members = grown


def dense_filter(gamma: UnaryMap) -> Filter:
    """F_γ = {x : γ(x) = 1}."""
    q = gamma.base
    return Filter(q, frozenset(x for x in range(q.n) if gamma(x) == q.top))


# Quotients


@dataclass(frozen=True)
class QuotientAlgebra:
    """Q/F: classes of ≈_F with the induced residuated-lattice structure.

    Classes are numbered in order of their minimum-index representative.
    """

    base: Quantale
    filter: Filter
    class_of: tuple[int, ...]
    representatives: tuple[int, ...]
    quotient: Quantale

    def cls(self, x: int) -> int:
        return self.class_of[x]

    def rep(self, c: int) -> int:
        return self.representatives[c]

    def members(self, c: int) -> list[int]:
        return [x for x, k in enumerate(self.class_of) if k == c]

    def class_table(self) -> dict:
        names = self.base.names
        return {
            self.quotient.names[c]: [names[x] for x in self.members(c)]
            for c in range(self.quotient.n)
        }


def quotient(q: Quantale, F: Filter) -> QuotientAlgebra:
    """Build Q/F and verify that the induced operations are well defined.

    Raises:
        InconsistencyError: If an induced operation depends on representatives.
    """
    r = q.residual_table
    inside = np.zeros((q.n, q.n), dtype=bool)
    for x in range(q.n):
        for y in range(q.n):
            inside[x, y] = int(r[x, y]) in F.members

    class_of = [-1] * q.n
    representatives: list[int] = []
    for x in range(q.n):
        if class_of[x] >= 0:
            continue
        c = len(representatives)
        representatives.append(x)
        for y in range(x, q.n):
            if inside[x, y] and inside[y, x]:
                class_of[y] = c

    reps = np.array(representatives)
    names = [f"[{q.names[x]}]" for x in representatives]
    leq = inside[np.ix_(reps, reps)]
    prod = [[class_of[int(q.prod[a, b])] for b in representatives] for a in representatives]
    induced = Quantale(names, leq, prod)

    for x in range(q.n):
        for y in range(q.n):
            cx, cy = class_of[x], class_of[y]
            if inside[x, y] != induced.leq[cx, cy]:
                raise InconsistencyError(f"Order on Q/F depends on representatives at {x},{y}")
            for label, table, induced_table in (
                ("product", q.prod, induced.prod),
                ("join", q.join_table, induced.join_table),
                ("meet", q.meet_table, induced.meet_table),
                ("residual", q.residual_table, induced.residual_table),
            ):
                if class_of[int(table[x, y])] != induced_table[cx, cy]:
                    raise InconsistencyError(
                        f"Induced {label} ill-defined at ({q.names[x]}, {q.names[y]})"
                    )

    logger.debug(f"Quotient of {q!r} by {F.describe()} has {induced.n} classes")
    return QuotientAlgebra(q, F, tuple(class_of), tuple(representatives), induced)


def induced_map(qa: QuotientAlgebra, gamma: UnaryMap) -> UnaryMap:
    """The map |x| ↦ |γ(x)| on Q/F."""
    return UnaryMap(
        qa.quotient,
        tuple(qa.class_of[gamma(qa.rep(c))] for c in range(qa.quotient.n)),
    )


# Fixed-point images


def nucleus_from_image(q: Quantale, image: Iterable[int]) -> UnaryMap:
    """The map x ↦ ⋀{a ∈ A : x ≤ a}."""
    A = sorted(set(image))
    return UnaryMap(q, tuple(q.meet_all(a for a in A if q.leq[x, a]) for x in range(q.n)))


def is_nucleus_image(q: Quantale, subset: Iterable[int]) -> bool:
    """Meet-closed (the empty meet included) and x → a ∈ A for a ∈ A."""
    A = set(subset)
    if q.top not in A:
        return False
    if any(int(q.meet_table[a, b]) not in A for a in A for b in A):
        return False
    return all(int(q.residual_table[x, a]) in A for x in range(q.n) for a in A)


# Law reports


def verify_nucleus_laws(gamma: UnaryMap) -> LawReport:
    """Identities every quantic nucleus satisfies."""
    q = gamma.base
    report = LawReport(f"nucleus {list(gamma.table)} on {q!r}")
    prod, r, leq = q.prod, q.residual_table, q.leq
    g = gamma
    pairs = list(itertools.product(range(q.n), repeat=2))
    names = q.names

    def first(predicate):
        for x, y in pairs:
            if not predicate(x, y):
                return {"x": names[x], "y": names[y]}
        return None

    report.add(check("is-quantic-nucleus", is_quantic_nucleus(g)))
    for name, predicate in (
        ("closure-absorbs-product", lambda x, y: g(prod[x, y]) == g(prod[g(x), g(y)])),
        ("closure-absorbs-left", lambda x, y: g(prod[x, y]) == g(prod[g(x), y])),
        ("closure-absorbs-right", lambda x, y: g(prod[x, y]) == g(prod[x, g(y)])),
        ("closure-below-residual", lambda x, y: leq[g(r[x, y]), r[x, g(y)]]),
        ("characterization", lambda x, y: r[g(x), g(y)] == r[x, g(y)]),
    ):
        witness = first(predicate)
        report.add(check(name, witness is None, witness))
    return report


def verify_nucleus_image_characterization(q: Quantale, bound: int = 5) -> LawReport:
    """Fixed-point sets of nuclei are exactly the meet- and residual-closed subsets."""
    report = LawReport(f"nucleus images on {q!r}")
    if q.n > bound:
        raise BoundExceededError("Image characterization", q.n, bound)

    images = {frozenset(g.fixed_points()) for g in enumerate_quantic_nuclei(q, bound=bound)}
    closed = {
        frozenset(s)
        for k in range(q.n + 1)
        for s in itertools.combinations(range(q.n), k)
        if is_nucleus_image(q, s)
    }
    extra = sorted(sorted(q.names[x] for x in s) for s in closed - images)
    missing = sorted(sorted(q.names[x] for x in s) for s in images - closed)
    report.add(check("closed-subset-is-image", not extra, {"subsets": extra}))
    report.add(check("image-is-closed-subset", not missing, {"subsets": missing}))

    rebuilt = [nucleus_from_image(q, s) for s in closed]
    bad = [
        sorted(q.names[x] for x in s)
        for s, g in zip(closed, rebuilt)
        if not is_quantic_nucleus(g) or set(g.fixed_points()) != set(s)
    ]
    report.add(check("image-determines-nucleus", not bad, {"subsets": sorted(bad)}))
    return report


def verify_quotient_theorems(
    q: Quantale,
    gamma: UnaryMap,
    seed: Optional[int] = None,
    subset_bound: Optional[int] = None,
) -> LawReport:
    """Check the quotient theorems for Q/F_γ under their stated hypotheses.

    Checks whose hypothesis fails for this γ are marked hypothesis-unmet.
    """
    report = LawReport(f"quotient by nucleus {list(gamma.table)} on {q!r}")
    flags = nucleus_predicates(gamma)
    F = dense_filter(gamma)
    qa = quotient(q, F)
    H = qa.quotient
    cls = qa.class_of
    r = q.residual_table
    neg = q.neg_table
    names = q.names
    E = range(q.n)
    g = gamma

    def gated(name: str, hypothesis: bool, needs: str, holds, witness) -> None:
        if not hypothesis:
            report.add(CheckResult(name, HYPOTHESIS_UNMET, detail=f"requires {needs}"))
        else:
            report.add(check(name, holds, witness))

    report.add(check("dense-filter-is-filter", is_filter(q, F.members)))

    pair = next(
        ((x, y) for x in E for y in E if (cls[x] == cls[y]) != (g(x) == g(y))), None
    )
    gated(
        "same-class-iff-same-closure",
        flags.respects_implications,
        "respects_implications",
        pair is None,
        pair and {"x": names[pair[0]], "y": names[pair[1]]},
    )

    single = next((x for x in E if cls[g(x)] != cls[x]), None)
    gated(
        "closure-same-class",
        flags.respects_implications,
        "respects_implications",
        single is None,
        None if single is None else {"x": names[single]},
    )

    gated(
        "quotient-is-heyting",
        flags.idempotent_wrt_products and flags.respects_implications,
        "idempotent_wrt_products and respects_implications",
        is_idempotent(H),
        {"classes": qa.class_table()},
    )

    fams = list(families(q.n, subset_bound=subset_bound, seed=seed))
    bad_family = next(
        (f for f in fams if cls[q.join_all(f)] != H.join_all(cls[x] for x in f)), None
    )
    report.add(
        check(
            "class-of-join",
            bad_family is None,
            bad_family is not None and {"X": [names[x] for x in bad_family]},
        )
    )

    bad_meet = next(
        (
            (f, y)
            for y in E
            for f in fams
            if (g(q.meet_all(r[x, y] for x in f)) == q.top)
            != (q.meet_all(g(r[x, y]) for x in f) == q.top)
        ),
        None,
    )
    gated(
        "closure-of-meet-of-residuals",
        flags.respects_implications,
        "respects_implications",
        bad_meet is None,
        bad_meet and {"X": [names[x] for x in bad_meet[0]], "y": names[bad_meet[1]]},
    )

    def nng(x: int) -> int:
        return int(neg[neg[g(x)]])

    bad_nng = next((x for x in E if nng(nng(x)) != nng(x)), None)
    gated(
        "double-negated-closure-idempotent",
        flags.respects_bottom,
        "respects_bottom",
        bad_nng is None,
        None if bad_nng is None else {"x": names[bad_nng]},
    )
    return report
