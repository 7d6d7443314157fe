"""The set-theoretic hierarchy over P* and its Heyting-valued companion.

Level α+1 adds every γ-regular, extensional function from R_α to truth
values. The Kripke side takes values in P* and reads membership through
forcing sets; the Heyting side takes values in H = P*/F_γ. Membership between
two elements depends only on the levels at which they were created.
"""

import hashlib
import itertools
import json
import logging
import os
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from algebra import Quantale, families, is_idempotent
from config import config
from forcing import KripkeModel, ForcingSet, forced_worlds
from frames import (
    Conucleus,
    PStarLattice,
    SOMonoid,
    conucleus_predicates,
    describe_mask,
    enumerate_p_star,
    gamma_delta,
    is_strongly_hereditary,
)
from logic import (
    Const,
    Diamond,
    Exists,
    Formula,
    Imp,
    Member,
    Neg,
    RevImp,
    Var,
    enumerate_sentences,
    equality_formula,
    render,
)
from nuclei import QuotientAlgebra, UnaryMap, dense_filter, quotient
from reports import LawReport, check
from valuations import HeytingValues, PStarValues

logger = logging.getLogger(__name__)


class HierarchyError(Exception):
    """Base exception for hierarchy construction."""

    pass


class BudgetExceededError(HierarchyError):
    """A level needs more candidate functions than the budget allows."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"Level needs {required} candidates, budget is {budget}")


class PreconditionError(HierarchyError):
    """The conucleus lacks a flag the Heyting side needs."""

    def __init__(self, flag: str):
        self.flag = flag
        super().__init__(f"Conucleus is not standard: {flag} fails")


class TheoremViolation(HierarchyError):
    """A construction guaranteed to succeed did not (a bug, not bad input)."""

    pass


@dataclass(frozen=True)
class Element:
    """A function from the previous level to truth values.

    Attributes:
        id: Constant name used in sentences.
        level: Level at which the element first appears.
        domain: Ids of R_{level-1}, in level order.
        values: Truth value of each domain element.
    """

    id: str
    level: int
    domain: tuple[str, ...]
    values: tuple[int, ...]

    def __call__(self, x: str) -> int:
        return self.values[self.domain.index(x)]

    @property
    def graph(self) -> dict[str, int]:
        return dict(zip(self.domain, self.values))


@dataclass(frozen=True)
class KElement(Element):
    """Element of the Kripke side; values are P* indices."""

    pass


@dataclass(frozen=True)
class HElement(Element):
    """Element of the Heyting side; values are classes of H."""

    pass


def _graph_key(domain: Sequence[str], values: Sequence[int]) -> frozenset:
    return frozenset(zip(domain, values))


def _element_key(element: Element) -> frozenset:
    return _graph_key(element.domain, element.values)


def _extensional_flags(args: tuple) -> list[bool]:
    candidates, equality, combine, leq = args
    k = len(equality)
    out = []
    for f in candidates:
        out.append(
            all(
                leq[combine[f[i], equality[i][j]], f[j]]
                for i in range(k)
                for j in range(k)
            )
        )
    return out


class _Levels(ABC):
    """Shared level construction for both sides of the hierarchy."""

    prefix = "e"
    side = "base"
    element_class = Element

    def __init__(
        self,
        frame: SOMonoid,
        delta: Conucleus,
        budget: Optional[int] = None,
        jobs: Optional[int] = None,
        reading: Optional[str] = None,
        cache_dir: Optional[str] = None,
    ):
        self.frame = frame
        self.delta = delta
        self.budget = config.budget if budget is None else budget
        self.jobs = config.jobs if jobs is None else jobs
        self.reading = config.equality if reading is None else reading
        self.cache_dir = config.cache_dir if cache_dir is None else cache_dir
        self.levels: list[tuple[str, ...]] = [()]
        self.elements: dict[str, Element] = {}
        self._membership: dict[tuple[str, str], int] = {}
        self._equality: dict[int, list[list[int]]] = {}
        self._valuations: dict = {}

    @property
    @abstractmethod
    def algebra(self) -> Quantale:
        """Truth-value algebra of this side."""
        pass

    @property
    @abstractmethod
    def regular(self) -> list[int]:
        """Truth values a hierarchy function may take."""
        pass

    @abstractmethod
    def _new_membership(self, f: Element, g: Element) -> int:
        """Membership value when f is not older than g."""
        pass

    @abstractmethod
    def _equality_value(self, alpha: int, g: str, h: str) -> int:
        """Value of the equality of two elements of R_alpha."""
        pass

    @abstractmethod
    def valuation(self, alpha: int):
        """Evaluator for sentences over the constants of R_alpha."""
        pass

    @property
    def combine_table(self) -> np.ndarray:
        return self.algebra.prod

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def level_of(self, x: str) -> int:
        try:
            return self.elements[x].level
        except KeyError:
            raise ValueError(f"Unknown {self.side} element: {x}") from None

    def membership(self, f: str, g: str) -> int:
        """Truth value of f ∈ g.

        An older f takes g's value at f; otherwise the value is assembled
        from memberships one level below f.
        """
        key = (f, g)
        hit = self._membership.get(key)
        if hit is not None:
            return hit
        ef, eg = self.elements[f], self.elements[g]
        if ef.level < eg.level:
            value = eg(f)
        else:
            value = self._new_membership(ef, eg)
        self._membership[key] = value
        return value

    def equality(self, alpha: int) -> list[list[int]]:
        """Equality values between all pairs of R_alpha."""
        hit = self._equality.get(alpha)
        if hit is None:
            ids = self.levels[alpha]
            hit = [[self._equality_value(alpha, g, h) for h in ids] for g in ids]
            self._equality[alpha] = hit
        return hit

    def is_extensional(self, values: Sequence[int], alpha: int) -> bool:
        """f(g) combined with (g = h) stays below f(h) for all g, h in R_alpha."""
        task = ([tuple(values)], self.equality(alpha), self.combine_table, self.algebra.leq)
        flags = _extensional_flags(task)
        return flags[0]

    def candidates(self, alpha: int) -> list[tuple[int, ...]]:
        """All regular-valued functions on R_alpha, within the budget.

        Raises:
            BudgetExceededError: If there are more candidates than the budget.
        """
        regular = self.regular
        required = len(regular) ** len(self.levels[alpha])
        if required > self.budget:
            raise BudgetExceededError(required, self.budget)
        return list(itertools.product(regular, repeat=len(self.levels[alpha])))

    def _filter(self, candidates: list, alpha: int) -> list[tuple[int, ...]]:
        equality = self.equality(alpha)
        table, leq = self.combine_table, self.algebra.leq
        if self.jobs <= 1 or len(candidates) < 2 * self.jobs:
            flags = _extensional_flags((candidates, equality, table, leq))
        else:
            size = -(-len(candidates) // self.jobs)
            chunks = [candidates[i : i + size] for i in range(0, len(candidates), size)]
            flags = []
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                tasks = [(c, equality, table, leq) for c in chunks]
                for part in pool.map(_extensional_flags, tasks):
                    flags.extend(part)
        return [c for c, keep in zip(candidates, flags) if keep]

    def build_next(self) -> list[Element]:
        """Build R_{α+1} from R_α and return the new elements."""
        alpha = self.height
        domain = self.levels[alpha]
        if alpha >= 2 and self.reading == "verbatim":
            logger.warning(
                f"Building {self.side} level {alpha + 1} with the verbatim equality reading"
            )

        new = self._load(alpha + 1)
        if new is None:
            kept = self._filter(self.candidates(alpha), alpha)
            existing = {_graph_key(e.domain, e.values) for e in self.elements.values()}
            new = []
            for values in kept:
                if _graph_key(domain, values) in existing:
                    continue
                element_id = f"{self.prefix}{alpha + 1}_{len(new)}"
                new.append(self.element_class(element_id, alpha + 1, domain, values))
            self._save(alpha + 1, new)

        for e in new:
            self.elements[e.id] = e
        self.levels.append(domain + tuple(e.id for e in new))
        logger.info(
            f"Built {self.side} level {alpha + 1}: {len(self.levels[-1])} elements ({len(new)} new)"
        )
        return new

    # Disk cache

    def cache_key(self, level: int) -> str:
        payload = json.dumps(
            [self.frame.fingerprint, list(self.delta.table), level, self.reading, self.side]
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _cache_path(self, level: int) -> Optional[str]:
        if not self.cache_dir:
            return None
        return os.path.join(self.cache_dir, f"{self.cache_key(level)}.json")

    def _load(self, level: int) -> Optional[list[Element]]:
        path = self._cache_path(level)
        if path is None or not os.path.exists(path):
            return None
        domain = self.levels[level - 1]
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            new = [
                self.element_class(item["id"], level, domain, tuple(item["values"]))
                for item in data["elements"]
            ]
        except (OSError, ValueError, KeyError, TypeError) as e:
            logger.warning(f"Ignoring unreadable cache file {path}: {e}")
            return None
        logger.debug(f"Loaded {self.side} level {level} from {path}")
        return new

    def _save(self, level: int, new: list[Element]) -> None:
        path = self._cache_path(level)
        if path is None:
            return
        try:
            os.makedirs(self.cache_dir, exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                json.dump({"elements": [{"id": e.id, "values": list(e.values)} for e in new]}, fh)
        except OSError as e:
            logger.warning(f"Could not write cache file {path}: {e}")


class KripkeLevels(_Levels):
    """Levels of V^P*: functions into the γ-regular elements of P*."""

    prefix = "v"
    side = "kripke"
    element_class = KElement

    def __init__(self, frame: SOMonoid, delta: Conucleus, pstar: PStarLattice, **kwargs):
        super().__init__(frame, delta, **kwargs)
        self.pstar = pstar
        self.gamma = gamma_delta(delta, pstar)

    @property
    def algebra(self) -> Quantale:
        return self.pstar.as_quantale

    def closure(self, x: int) -> int:
        """∼∼γ(x) in P*."""
        q = self.algebra
        return q.neg(q.neg(self.gamma(x)))

    @property
    def regular(self) -> list[int]:
        return [x for x in range(self.algebra.n) if self.closure(x) == x]

    def _new_membership(self, f: Element, g: Element) -> int:
        q = self.algebra
        terms = []
        for h in g.domain:
            inside = q.top
            outside = q.top
            for x, fx in zip(f.domain, f.values):
                n = self.closure(self.membership(x, h))
                inside = q.meet(inside, q.residual(fx, n))
                outside = q.meet(outside, q.residual(n, fx))
            terms.append(q.product(g(h), q.product(inside, outside)))
        return q.join_all(terms)

    def valuation(self, alpha: int) -> PStarValues:
        hit = self._valuations.get(alpha)
        if hit is None:
            ids = self.levels[alpha]
            atoms = {Member(Const(a), Const(b)): self.membership(a, b) for a in ids for b in ids}
            hit = PStarValues(self.pstar, self.delta, ids, atoms)
            self._valuations[alpha] = hit
        return hit

    def _equality_value(self, alpha: int, g: str, h: str) -> int:
        formula = equality_formula(Const(g), Const(h), self.reading)
        return self.valuation(alpha).evaluate(formula)


class HeytingLevels(_Levels):
    """Levels of R^H: regular functions into H."""

    prefix = "w"
    side = "heyting"
    element_class = HElement

    def __init__(
        self,
        frame: SOMonoid,
        delta: Conucleus,
        heyting_algebra: QuotientAlgebra,
        gamma: UnaryMap,
        **kwargs,
    ):
        super().__init__(frame, delta, **kwargs)
        self.heyting_algebra = heyting_algebra
        self.gamma = gamma

    @property
    def algebra(self) -> Quantale:
        return self.heyting_algebra.quotient

    @property
    def combine_table(self) -> np.ndarray:
        return self.algebra.meet_table

    @property
    def regular(self) -> list[int]:
        H = self.algebra
        return [c for c in range(H.n) if H.neg(H.neg(c)) == c]

    def _new_membership(self, f: Element, g: Element) -> int:
        H = self.algebra
        terms = []
        for h in g.domain:
            agree = H.top
            for x, fx in zip(f.domain, f.values):
                n = H.neg(H.neg(self.membership(x, h)))
                agree = H.meet(agree, H.equiv(fx, n))
            terms.append(H.meet(g(h), agree))
        return H.join_all(terms)

    def valuation(self, alpha: int, constants: Optional[dict[str, str]] = None) -> HeytingValues:
        """Heyting evaluator at a level; ``constants`` renames sentence constants to element ids."""
        key = (alpha, None if constants is None else tuple(sorted(constants.items())))
        hit = self._valuations.get(key)
        if hit is None:
            ids = self.levels[alpha]
            names = {x: x for x in ids} if constants is None else constants
            atoms = {
                Member(Const(a), Const(b)): self.membership(names[a], names[b])
                for a in names
                for b in names
            }
            hit = HeytingValues(self.heyting_algebra, self.gamma, list(names), atoms)
            self._valuations[key] = hit
        return hit

    def _equality_value(self, alpha: int, g: str, h: str) -> int:
        x = Var("x")

        def bounded(body: Formula) -> Formula:
            return Neg(Exists(x.name, Neg(body)))

        valuation = self.valuation(alpha)
        forward = valuation.evaluate(bounded(Imp(Member(x, Const(g)), Member(x, Const(h)))))
        backward = valuation.evaluate(bounded(RevImp(Member(x, Const(g)), Member(x, Const(h)))))
        return self.algebra.meet(forward, backward)


# Heyting algebra H


def build_heyting_algebra(
    frame: SOMonoid, delta: Conucleus, pstar: Optional[PStarLattice] = None
) -> QuotientAlgebra:
    """H = P*/F_γ for a standard conucleus.

    Raises:
        PreconditionError: If δ is not standard.
        TheoremViolation: If the quotient is not a Heyting algebra.
    """
    flags = conucleus_predicates(delta)
    if not flags.standard:
        raise PreconditionError(flags.failing()[0])
    pstar = pstar or enumerate_p_star(frame)
    gamma = gamma_delta(delta, pstar)
    qa = quotient(pstar.as_quantale, dense_filter(gamma))
    if not is_idempotent(qa.quotient):
        raise TheoremViolation("P*/F_γ has a non-idempotent product")
    logger.info(f"Heyting algebra H has {qa.quotient.n} classes over {len(pstar)} P* elements")
    return qa


def verify_heyting_algebra(
    qa: QuotientAlgebra, gamma: UnaryMap, seed: Optional[int] = None
) -> LawReport:
    """Class identities relating P* and H."""
    report = LawReport(f"H = P*/F_gamma ({qa.quotient.n} classes)")
    q, H, cls = qa.base, qa.quotient, qa.class_of
    E = range(q.n)
    pairs = list(itertools.product(E, repeat=2))

    def first_pair(predicate):
        for a, b in pairs:
            if not predicate(a, b):
                return {"A": q.names[a], "B": q.names[b]}
        return None

    report.add(check("is-heyting", is_idempotent(H)))
    found = first_pair(lambda a, b: H.meet(cls[a], cls[b]) == cls[q.product(a, b)])
    report.add(check("class-meet-is-product", found is None, found))
    found = first_pair(lambda a, b: H.meet(cls[a], cls[b]) == cls[q.meet(a, b)])
    report.add(check("class-meet-is-meet", found is None, found))
    bad = next((a for a in E if cls[q.neg(a)] != H.neg(cls[a])), None)
    report.add(check("class-of-negation", bad is None, bad is not None and {"A": q.names[bad]}))
    bad = next((a for a in E if cls[gamma(a)] != cls[a]), None)
    report.add(check("class-of-closure", bad is None, bad is not None and {"A": q.names[bad]}))
    fam = next(
        (
            f
            for f in families(q.n, seed=seed)
            if cls[q.join_all(f)] != H.join_all(cls[i] for i in f)
        ),
        None,
    )
    witness = None if fam is None else {"family": [q.names[i] for i in fam]}
    report.add(check("class-of-join", fam is None, witness))
    top_class = set(qa.members(cls[q.top]))
    report.add(check("dense-filter-is-top-class", top_class == set(qa.filter.members)))
    return report


# The hierarchy


class Hierarchy:
    """Both sides of the hierarchy over one frame and conucleus.

    The Heyting side is present only for a standard conucleus.
    """

    def __init__(
        self,
        frame: SOMonoid,
        delta: Conucleus,
        pstar: Optional[PStarLattice] = None,
        budget: Optional[int] = None,
        jobs: Optional[int] = None,
        reading: Optional[str] = None,
        cache_dir: Optional[str] = None,
        heyting: bool = True,
    ):
        self.frame = frame
        self.delta = delta
        self.pstar = pstar or enumerate_p_star(frame)
        options = {"budget": budget, "jobs": jobs, "reading": reading, "cache_dir": cache_dir}
        self.kripke = KripkeLevels(frame, delta, self.pstar, **options)
        self.gamma = self.kripke.gamma
        self.heyting_algebra: Optional[QuotientAlgebra] = None
        self.heyting: Optional[HeytingLevels] = None
        if heyting:
            self.heyting_algebra = build_heyting_algebra(frame, delta, self.pstar)
            self.heyting = HeytingLevels(frame, delta, self.heyting_algebra, self.gamma, **options)
        self._prime: dict[str, str] = {}
        self._inverse: dict[str, str] = {}

    @property
    def height(self) -> int:
        return self.kripke.height

    def sizes(self) -> list[int]:
        return [len(level) for level in self.kripke.levels]

    @property
    def stabilized_at(self) -> Optional[int]:
        """First α with R_α = R_{α+1} among the built levels."""
        levels = self.kripke.levels
        for alpha in range(1, len(levels) - 1):
            if set(levels[alpha]) == set(levels[alpha + 1]):
                return alpha
        return None

    def require(self, alpha: int) -> None:
        if alpha > self.height:
            raise ValueError(f"Level {alpha} is not built (height {self.height})")

    def require_heyting(self) -> HeytingLevels:
        if self.heyting is None:
            flags = conucleus_predicates(self.delta)
            failing = flags.failing()
            raise PreconditionError(failing[0] if failing else "heyting side disabled")
        return self.heyting


def build_kripke_level(hierarchy: Hierarchy) -> list[KElement]:
    """Add the next Kripke level.

    Raises:
        BudgetExceededError: If the candidate count exceeds the budget.
    """
    return hierarchy.kripke.build_next()


def build_heyting_level(hierarchy: Hierarchy) -> list[HElement]:
    """Add the next Heyting level.

    Raises:
        PreconditionError: If δ is not standard.
        BudgetExceededError: If the candidate count exceeds the budget.
    """
    return hierarchy.require_heyting().build_next()


def build_hierarchy(
    frame: SOMonoid,
    delta: Conucleus,
    levels: int,
    budget: Optional[int] = None,
    pstar: Optional[PStarLattice] = None,
    jobs: Optional[int] = None,
    reading: Optional[str] = None,
    cache_dir: Optional[str] = None,
    heyting: Optional[bool] = None,
) -> Hierarchy:
    """Build R_0 .. R_levels on both sides.

    The Heyting side is built when δ is standard unless ``heyting`` says
    otherwise; asking for it with a non-standard δ raises PreconditionError.
    """
    if heyting is None:
        heyting = conucleus_predicates(delta).standard
    hierarchy = Hierarchy(frame, delta, pstar, budget, jobs, reading, cache_dir, heyting)
    while hierarchy.height < levels:
        build_kripke_level(hierarchy)
        if hierarchy.heyting is not None:
            build_heyting_level(hierarchy)
    logger.info(f"Hierarchy sizes through level {levels}: {hierarchy.sizes()}")
    return hierarchy


def membership_forcing_set(hierarchy: Hierarchy, f: str, g: str) -> ForcingSet:
    """Forcing set of f ∈ g on the Kripke side."""
    kripke = hierarchy.kripke
    kripke.level_of(f)
    kripke.level_of(g)
    index = kripke.membership(f, g)
    return ForcingSet(Member(Const(f), Const(g)), hierarchy.pstar.element(index))


def heyting_membership(hierarchy: Hierarchy, f: str, g: str) -> int:
    """Class ⟦f ∈ g⟧ in H."""
    heyting = hierarchy.require_heyting()
    heyting.level_of(f)
    heyting.level_of(g)
    return heyting.membership(f, g)


def level_model(hierarchy: Hierarchy, alpha: int) -> KripkeModel:
    """Level α as a Kripke model whose constants are the elements of R_α."""
    hierarchy.require(alpha)
    kripke = hierarchy.kripke
    ids = kripke.levels[alpha]
    atomic = {
        Member(Const(a), Const(b)): hierarchy.pstar.masks[kripke.membership(a, b)]
        for a in ids
        for b in ids
    }
    return KripkeModel(hierarchy.frame, hierarchy.delta, ids, atomic, hierarchy.pstar)


def heyting_value(hierarchy: Hierarchy, alpha: int, formula: Formula) -> int:
    """⟦φ⟧ in H for a sentence over the Heyting elements of R^H_α."""
    hierarchy.require(alpha)
    return hierarchy.require_heyting().valuation(alpha).evaluate(formula)


def recompute_membership(hierarchy: Hierarchy, f: str, g: str) -> int:
    """Mask of f ∈ g recomputed from set operations and pointwise forcing.

    The ∼∼◇(x∈h) sets come from the definitional evaluator on the level below
    f, and joins use the union-of-meets description.
    """
    kripke, pstar = hierarchy.kripke, hierarchy.pstar
    ef, eg = kripke.elements[f], kripke.elements[g]
    masks = pstar.masks
    if ef.level < eg.level:
        return masks[eg(f)]

    model = level_model(hierarchy, ef.level - 1)
    memo: dict = {}
    terms = []
    for h in eg.domain:
        inside = []
        outside = []
        for x, fx in zip(ef.domain, ef.values):
            n = forced_worlds(model, Neg(Neg(Diamond(Member(Const(x), Const(h))))), memo)
            inside.append(pstar.mask_implies(masks[fx], n))
            outside.append(pstar.mask_left_implies(masks[fx], n))
        both = pstar.mask_product(pstar.big_meet(inside), pstar.big_meet(outside))
        terms.append(pstar.mask_product(masks[eg(h)], both))
    return pstar.big_join_definitional(terms)


def verify_membership(hierarchy: Hierarchy, alpha: int) -> LawReport:
    """Membership forcing sets at level α.

    Each must be strongly hereditary and equal to the pointwise recomputation.
    """
    hierarchy.require(alpha)
    report = LawReport(f"membership at level {alpha}")
    kripke, pstar = hierarchy.kripke, hierarchy.pstar
    ids = kripke.levels[alpha]
    mismatch = None
    for f in ids:
        for g in ids:
            algebraic = pstar.masks[kripke.membership(f, g)]
            pointwise = recompute_membership(hierarchy, f, g)
            if algebraic != pointwise:
                mismatch = {
                    "f": f,
                    "g": g,
                    "algebraic": describe_mask(hierarchy.frame, algebraic),
                    "pointwise": describe_mask(hierarchy.frame, pointwise),
                }
                break
        if mismatch:
            break
    hereditary = all(
        is_strongly_hereditary(hierarchy.frame, pstar.masks[kripke.membership(f, g)])
        for f in ids
        for g in ids
    )
    report.add(check("membership-strongly-hereditary", hereditary))
    detail = f"{len(ids) ** 2} pairs"
    report.add(check("membership-matches-pointwise", mismatch is None, mismatch, detail=detail))
    return report


# The bijection


@dataclass
class LevelPair:
    """Both sides of level α with the bijection between them."""

    level: int
    kripke_level: list[KElement]
    heyting_level: list[HElement]
    prime: dict[str, str]
    inverse: dict[str, str]
    heyting_algebra: QuotientAlgebra = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "size": len(self.kripke_level),
            "prime": dict(sorted(self.prime.items())),
        }


def build_bijection(hierarchy: Hierarchy, alpha: int) -> LevelPair:
    """g ↦ g' with g'(f') = |g(f)|, and its inverse through ∼∼γ of representatives.

    Raises:
        TheoremViolation: If either map leaves its target level, a
            representative choice matters, or the composites are not identities.
    """
    hierarchy.require(alpha)
    heyting = hierarchy.require_heyting()
    kripke = hierarchy.kripke
    qa = hierarchy.heyting_algebra
    prime, inverse = hierarchy._prime, hierarchy._inverse

    for beta in range(1, alpha + 1):
        k_new = [x for x in kripke.levels[beta] if x not in prime]
        h_new = [x for x in heyting.levels[beta] if x not in inverse]
        h_index = {_element_key(heyting.elements[w]): w for w in h_new}
        k_index = {_element_key(kripke.elements[v]): v for v in k_new}

        for v in k_new:
            e = kripke.elements[v]
            key = _graph_key([prime[x] for x in e.domain], [qa.class_of[a] for a in e.values])
            if key not in h_index:
                raise TheoremViolation(f"{v} has no Heyting counterpart at level {beta}")
            prime[v] = h_index[key]

        for w in h_new:
            e = heyting.elements[w]
            values = []
            for c in e.values:
                images = {kripke.closure(s) for s in qa.members(c)}
                if len(images) != 1:
                    raise TheoremViolation(
                        f"Representatives of class {qa.quotient.names[c]} disagree"
                    )
                values.append(kripke.closure(qa.rep(c)))
            key = _graph_key([inverse[x] for x in e.domain], values)
            if key not in k_index:
                raise TheoremViolation(f"{w} has no Kripke counterpart at level {beta}")
            inverse[w] = k_index[key]

        for v in k_new:
            if inverse[prime[v]] != v:
                raise TheoremViolation(f"Inverse of {v}' is {inverse[prime[v]]}")
        for w in h_new:
            if prime[inverse[w]] != w:
                raise TheoremViolation(f"Prime of the inverse of {w} is {prime[inverse[w]]}")

    ks = kripke.levels[alpha]
    hs = heyting.levels[alpha]
    return LevelPair(
        alpha,
        [kripke.elements[v] for v in ks],
        [heyting.elements[w] for w in hs],
        {v: prime[v] for v in ks},
        {w: inverse[w] for w in hs},
        qa,
    )


def verify_extensionality_transfer(hierarchy: Hierarchy, alpha: int) -> LawReport:
    """g extensional ⇔ g' extensional, for every regular function at levels up to α."""
    build_bijection(hierarchy, alpha)
    kripke, heyting = hierarchy.kripke, hierarchy.require_heyting()
    qa = hierarchy.heyting_algebra
    report = LawReport(f"extensionality transfer through level {alpha}")
    forward = backward = None
    total = 0
    for beta in range(alpha):
        k_ids = kripke.levels[beta]
        h_ids = [hierarchy._prime[x] for x in k_ids]
        h_position = {w: i for i, w in enumerate(heyting.levels[beta])}
        for values in kripke.candidates(beta):
            total += 1
            mapped = [0] * len(values)
            for x, v in zip(h_ids, values):
                mapped[h_position[x]] = qa.class_of[v]
            if kripke.is_extensional(values, beta) != heyting.is_extensional(mapped, beta):
                forward = forward or {"level": beta + 1, "graph": dict(zip(k_ids, values))}
        k_position = {v: i for i, v in enumerate(k_ids)}
        for values in heyting.candidates(beta):
            mapped = [0] * len(values)
            for w, c in zip(heyting.levels[beta], values):
                mapped[k_position[hierarchy._inverse[w]]] = kripke.closure(qa.rep(c))
            if heyting.is_extensional(values, beta) != kripke.is_extensional(mapped, beta):
                graph = dict(zip(heyting.levels[beta], values))
                backward = backward or {"level": beta + 1, "graph": graph}
    report.add(check("kripke-to-heyting", forward is None, forward, detail=f"{total} functions"))
    report.add(check("heyting-to-kripke", backward is None, backward))
    return report


# Translation sweeps


@dataclass
class _TranslationResult:
    count: int = 0
    translation: Optional[tuple[int, dict]] = None
    to_diamond: Optional[tuple[int, dict]] = None
    from_diamond: Optional[tuple[int, dict]] = None

    def merge(self, other: "_TranslationResult") -> None:
        self.count += other.count
        for name in ("translation", "to_diamond", "from_diamond"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if theirs is not None and (mine is None or theirs[0] < mine[0]):
                setattr(self, name, theirs)


def _translation_sweep(args: tuple) -> _TranslationResult:
    hierarchy, alpha, depth, part, parts = args
    pair = build_bijection(hierarchy, alpha)
    kripke = hierarchy.kripke
    qa = hierarchy.heyting_algebra
    P, H = kripke.algebra, qa.quotient
    ids = kripke.levels[alpha]
    kval = kripke.valuation(alpha)
    hval = hierarchy.heyting.valuation(alpha, {v: pair.prime[v] for v in ids})
    kcache: dict = {}
    hcache: dict = {}
    result = _TranslationResult()
    stream = enumerate_sentences(ids, depth, universal=False)
    for index, sentence in enumerate(stream):
        if index % parts != part:
            continue
        result.count += 1
        k = kval.evaluate(sentence, kcache)
        h = hval.evaluate(sentence, hcache)
        if result.translation is None and qa.class_of[k] != h:
            result.translation = (
                index,
                {
                    "sentence": render(sentence),
                    "forcing_set": P.names[k],
                    "class": H.names[qa.class_of[k]],
                    "heyting": H.names[h],
                },
            )
        valid = h == H.top
        diamond_valid = kripke.gamma(k) == P.top
        if valid and not diamond_valid and result.to_diamond is None:
            result.to_diamond = (index, {"sentence": render(sentence)})
        if diamond_valid and not valid and result.from_diamond is None:
            result.from_diamond = (index, {"sentence": render(sentence)})
    return result


def _run_sweep(
    hierarchy: Hierarchy, alpha: int, depth: int, jobs: Optional[int]
) -> _TranslationResult:
    hierarchy.require(alpha)
    hierarchy.require_heyting()
    build_bijection(hierarchy, alpha)
    jobs = config.jobs if jobs is None else jobs
    if jobs <= 1:
        result = _translation_sweep((hierarchy, alpha, depth, 0, 1))
    else:
        result = _TranslationResult()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            tasks = [(hierarchy, alpha, depth, k, jobs) for k in range(jobs)]
            for partial in pool.map(_translation_sweep, tasks):
                result.merge(partial)
    logger.info(f"Swept {result.count} sentences at level {alpha}, depth {depth}")
    return result


def verify_translation(
    hierarchy: Hierarchy, alpha: int, depth: int, jobs: Optional[int] = None
) -> LawReport:
    """|forcing set of φ| = ⟦φ'⟧ for every ∀-free sentence up to a depth over R_α."""
    result = _run_sweep(hierarchy, alpha, depth, jobs)
    report = LawReport(f"translation at level {alpha}, depth {depth}")
    found = result.translation
    report.add(
        check(
            "class-of-forcing-set-is-heyting-value",
            found is None,
            found and found[1],
            detail=f"{result.count} sentences",
        )
    )
    return report


def verify_diamond_corollary(
    hierarchy: Hierarchy, alpha: int, depth: int, jobs: Optional[int] = None
) -> LawReport:
    """⟦φ⟧ = 1_H exactly when ◇φ is forced everywhere, for ∀-free sentences."""
    result = _run_sweep(hierarchy, alpha, depth, jobs)
    report = LawReport(f"diamond corollary at level {alpha}, depth {depth}")
    detail = f"{result.count} sentences"
    for name, found in (
        ("heyting-valid-implies-diamond-valid", result.to_diamond),
        ("diamond-valid-implies-heyting-valid", result.from_diamond),
    ):
        report.add(check(name, found is None, found and found[1], detail=detail))
    return report


def heyting_truth(hierarchy: Hierarchy, alpha: int, formula: Formula) -> bool:
    """⟦φ⟧ = 1_H."""
    return heyting_value(hierarchy, alpha, formula) == hierarchy.heyting_algebra.quotient.top

