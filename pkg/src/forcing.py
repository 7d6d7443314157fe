"""Modal residuated Kripke models and their two evaluators.

``forces`` follows the forcing clauses literally, world by world, and serves
as the oracle. ``forcing_set`` computes the same sets bottom-up in P*.
``cross_check`` runs both over an enumerated sentence stream.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from algebra import families
from config import config
from frames import (
    Conucleus,
    PStarLattice,
    SOMonoid,
    StronglyHereditarySet,
    bits,
    describe_mask,
    enumerate_p_star,
    is_strongly_hereditary,
    to_mask,
)
from logic import (
    ALL_CONNECTIVES,
    Binary,
    Bot,
    Const,
    Diamond,
    Exists,
    Forall,
    Formula,
    Imp,
    Letter,
    Member,
    Or,
    Quantifier,
    RevImp,
    StrongAnd,
    Unary,
    WeakAnd,
    constants,
    desugar,
    enumerate_sentences,
    free_vars,
    is_sugar_free,
    letters,
    render,
    substitute,
)
from reports import LawReport, check
from valuations import PStarValues, ValuationError

logger = logging.getLogger(__name__)


class ModelError(Exception):
    """Invalid model data or a sentence the model cannot interpret."""

    pass


AtomicValue = Union[StronglyHereditarySet, int, Iterable[int]]


class KripkeModel:
    """A frame with a conucleus, a constant domain and atomic forcing sets.

    Memberships between domain constants that ``atomic`` leaves out are forced
    only at ∞. Letters must be listed.

    Args:
        frame: The frame P.
        delta: Conucleus on P interpreting ◇.
        domain: Constant names.
        atomic: Atomic sentence to forcing set (a StronglyHereditarySet, a
            bit mask, or an iterable of world indices).
        pstar: Precomputed P* of the frame, if available.

    Raises:
        ModelError: If an atomic set is not strongly hereditary or an atom
            mentions an unknown constant.
    """

    def __init__(
        self,
        frame: SOMonoid,
        delta: Conucleus,
        domain: Sequence[str] = (),
        atomic: Optional[Mapping[Formula, AtomicValue]] = None,
        pstar: Optional[PStarLattice] = None,
    ):
        if delta.frame != frame:
            raise ModelError("Conucleus belongs to a different frame")
        if len(set(domain)) != len(domain):
            raise ModelError("Domain constants must be distinct")
        if pstar is not None and pstar.frame != frame:
            raise ModelError("P* belongs to a different frame")

        self.frame = frame
        self.delta = delta
        self.domain = tuple(domain)
        self._pstar = pstar
        known = set(self.domain)

        masks: dict[Formula, int] = {}
        for atom, value in (atomic or {}).items():
            atom = desugar(atom)
            if isinstance(atom, Member):
                unknown = constants(atom) - known
                if unknown or free_vars(atom):
                    raise ModelError(f"Atom {render(atom)} must relate domain constants")
            elif not isinstance(atom, Letter):
                raise ModelError(f"Not an atomic sentence: {render(atom)}")
            mask = self._to_mask(value)
            if not is_strongly_hereditary(frame, mask):
                raise ModelError(
                    f"Forcing set of {render(atom)} is not strongly hereditary: "
                    f"{describe_mask(frame, mask)}"
                )
            masks[atom] = mask

        self.bottom_mask = 1 << frame.top
        for a in self.domain:
            for b in self.domain:
                masks.setdefault(Member(Const(a), Const(b)), self.bottom_mask)
        self.atomic = masks

    def _to_mask(self, value: AtomicValue) -> int:
        if isinstance(value, StronglyHereditarySet):
            return value.mask
        n = self.frame.n
        if isinstance(value, int):
            if not 0 <= value < 1 << n:
                raise ModelError(f"Mask {value} has bits outside the {n} worlds of the frame")
            return value
        try:
            worlds = [self.frame.index(v) if isinstance(v, str) else int(v) for v in value]
        except (TypeError, ValueError) as e:
            raise ModelError(f"Invalid atomic forcing set {value!r}: {e}") from e
        outside = [w for w in worlds if not 0 <= w < n]
        if outside:
            raise ModelError(f"World indices out of range 0..{n - 1}: {outside}")
        return to_mask(worlds)

    @property
    def pstar(self) -> PStarLattice:
        if self._pstar is None:
            self._pstar = enumerate_p_star(self.frame)
        return self._pstar

    @property
    def letters(self) -> list[str]:
        return sorted(atom.name for atom in self.atomic if isinstance(atom, Letter))

    @cached_property
    def valuation(self) -> PStarValues:
        pstar = self.pstar
        atoms = {atom: pstar.position[mask] for atom, mask in self.atomic.items()}
        return PStarValues(pstar, self.delta, self.domain, atoms)

    def __repr__(self) -> str:
        return (
            f"KripkeModel({self.frame!r}, delta={list(self.delta.table)}, "
            f"domain={list(self.domain)}, atoms={len(self.atomic)})"
        )


@dataclass(frozen=True)
class ForcingSet:
    """The worlds forcing a sentence."""

    sentence: Formula
    members: StronglyHereditarySet

    @property
    def mask(self) -> int:
        return self.members.mask

    def __contains__(self, p: int) -> bool:
        return p in self.members

    def describe(self) -> str:
        return self.members.describe()


def _prepare(model: KripkeModel, formula: Formula) -> Formula:
    if not is_sugar_free(formula):
        formula = desugar(formula)
    open_vars = free_vars(formula)
    if open_vars:
        raise ModelError(f"Not a sentence; free variables: {', '.join(sorted(open_vars))}")
    unknown = constants(formula) - set(model.domain)
    if unknown:
        raise ModelError(f"Unknown constants: {', '.join(sorted(unknown))}")
    missing = letters(formula) - set(model.letters)
    if missing:
        raise ModelError(f"No forcing set for letters: {', '.join(sorted(missing))}")
    return formula


# Definitional evaluator


def _forced_mask(model: KripkeModel, node: Formula, memo: dict) -> int:
    hit = memo.get(node)
    if hit is not None:
        return hit

    P = model.frame
    up, prod = P.up_masks, P.prod

    if isinstance(node, Bot):
        out = model.bottom_mask
    elif isinstance(node, (Letter, Member)):
        out = model.atomic[node]
    elif isinstance(node, StrongAnd):
        # some q, r with p ≥ q·r, q forcing the left and r the right conjunct
        left, right = _forced_mask(model, node.left, memo), _forced_mask(model, node.right, memo)
        out = 0
        for q in bits(left):
            for r in bits(right):
                out |= up[int(prod[q, r])]
    elif isinstance(node, Or):
        # some q, r with p ≥ q∧r, each forcing one of the disjuncts
        either = _forced_mask(model, node.left, memo) | _forced_mask(model, node.right, memo)
        witnesses = bits(either)
        out = 0
        for q in witnesses:
            for r in witnesses:
                out |= up[int(P.meet_table[q, r])]
    elif isinstance(node, WeakAnd):
        out = _forced_mask(model, node.left, memo) & _forced_mask(model, node.right, memo)
    elif isinstance(node, (Imp, RevImp)):
        if isinstance(node, Imp):
            antecedent, consequent = node.left, node.right
        else:
            antecedent, consequent = node.right, node.left
        a = _forced_mask(model, antecedent, memo)
        b = _forced_mask(model, consequent, memo)
        # p forces it iff every r ≥ p·q with q forcing the antecedent forces the consequent
        out = 0
        for p in range(P.n):
            if all(up[int(prod[p, q])] & ~b == 0 for q in bits(a)):
                out |= 1 << p
    elif isinstance(node, Exists):
        # a family of instance witnesses with meet below p; the least meet
        # comes from all witnesses at once, and the empty family meets to ∞
        witnesses = 0
        for d in model.domain:
            witnesses |= _forced_mask(model, substitute(node.body, node.var, d), memo)
        least = P.meet_all(bits(witnesses))
        out = up[least]
    elif isinstance(node, Forall):
        out = P.full_mask
        for d in model.domain:
            out &= _forced_mask(model, substitute(node.body, node.var, d), memo)
    elif isinstance(node, Diamond):
        body = _forced_mask(model, node.body, memo)
        out = 0
        for q in bits(body):
            out |= up[model.delta(q)]
    else:
        raise ModelError(f"Cannot force {type(node).__name__}")

    memo[node] = out
    return out


def forced_worlds(model: KripkeModel, formula: Formula, memo: Optional[dict] = None) -> int:
    """Mask of the worlds forcing a sentence, by the pointwise clauses."""
    formula = _prepare(model, formula)
    return _forced_mask(model, formula, {} if memo is None else memo)


def forces(model: KripkeModel, p: int, formula: Formula, memo: Optional[dict] = None) -> bool:
    """Whether world p forces a sentence (definitional clauses).

    Raises:
        ModelError: Unknown constant or letter, or p not a world.
    """
    if not 0 <= p < model.frame.n:
        raise ModelError(f"Unknown world index: {p}")
    return bool(forced_worlds(model, formula, memo) >> p & 1)


# Algebraic evaluator


def forcing_set(model: KripkeModel, formula: Formula, cache: Optional[dict] = None) -> ForcingSet:
    """Forcing set of a sentence computed with the P* operations.

    Raises:
        ModelError: Unknown constant or letter.
    """
    formula = _prepare(model, formula)
    try:
        index = model.valuation.evaluate(formula, cache)
    except ValuationError as e:
        raise ModelError(str(e)) from e
    return ForcingSet(formula, model.pstar.element(index))


def forcing_sets(model: KripkeModel, formula: Formula) -> dict[Formula, ForcingSet]:
    """Forcing sets of the sentence and of every closed instance evaluated on the way."""
    formula = _prepare(model, formula)
    cache: dict = {}
    model.valuation.evaluate(formula, cache)
    pstar = model.pstar
    return {node: ForcingSet(node, pstar.element(index)) for node, index in cache.items()}


def is_true(model: KripkeModel, formula: Formula) -> bool:
    """Forced at every world."""
    return forcing_set(model, formula).mask == model.frame.full_mask


# Verification


def verify_monotone_transfer(
    model: KripkeModel, formula: Formula, seed: Optional[int] = None
) -> LawReport:
    """Forced at each world of a family and the family's meet below q ⇒ forced at q."""
    report = LawReport(f"monotone transfer of {render(formula)}")
    P = model.frame
    forced = forced_worlds(model, formula)
    members = bits(forced)
    found = None
    for family in families(len(members), seed=seed):
        if not family:
            continue
        worlds = [members[i] for i in family]
        below = P.up_masks[P.meet_all(worlds)]
        if below & ~forced:
            escaped = bits(below & ~forced)[0]
            found = {"family": [P.names[w] for w in worlds], "q": P.names[escaped]}
            break
    report.add(check("monotone-transfer", found is None, found))
    return report


_CONGRUENCE_NAMES = {
    StrongAnd: "strong-and-is-product",
    Or: "or-is-join",
    WeakAnd: "weak-and-is-meet",
    Imp: "implication-is-arrow",
    RevImp: "reverse-implication-is-left-arrow",
    Exists: "exists-is-big-join",
    Forall: "forall-is-big-meet",
    Diamond: "diamond-is-gamma",
}


def verify_congruence(model: KripkeModel, formula: Formula) -> LawReport:
    """Pointwise forcing sets against the P* operation for every compound subformula.

    Each connective is compared on the definitional sets of its immediate
    parts, so a failure pins down the offending clause.
    """
    formula = _prepare(model, formula)
    report = LawReport(f"congruence of {render(formula)}")
    pstar = model.pstar
    gamma = model.valuation.gamma
    P = model.frame
    memo: dict = {}
    _forced_mask(model, formula, memo)
    found: dict[str, Optional[dict]] = {}

    def expected(node: Formula) -> int:
        if isinstance(node, Binary):
            a, b = memo[node.left], memo[node.right]
            if isinstance(node, StrongAnd):
                return pstar.mask_product(a, b)
            if isinstance(node, Or):
                return pstar.mask_join(a, b)
            if isinstance(node, WeakAnd):
                return pstar.mask_meet(a, b)
            if isinstance(node, Imp):
                return pstar.mask_implies(a, b)
            return pstar.mask_left_implies(a, b)
        if isinstance(node, Quantifier):
            instances = [memo[substitute(node.body, node.var, d)] for d in model.domain]
            if isinstance(node, Exists):
                return pstar.big_join(instances)
            return pstar.big_meet(instances)
        return pstar.masks[gamma(pstar.position[memo[node.body]])]

    for node, mask in list(memo.items()):
        if not isinstance(node, (Binary, Quantifier, Unary)):
            continue
        name = _CONGRUENCE_NAMES[type(node)]
        if isinstance(node, Imp) and isinstance(node.right, Bot):
            name = "negation-is-pstar-negation"
        if found.get(name) is not None:
            continue
        want = expected(node)
        found[name] = (
            None
            if want == mask
            else {
                "sentence": render(node),
                "pointwise": describe_mask(P, mask),
                "algebraic": describe_mask(P, want),
            }
        )

    for name in sorted(found):
        report.add(check(name, found[name] is None, found[name]))
    hereditary = all(is_strongly_hereditary(P, m) for m in memo.values())
    report.add(check("strongly-hereditary", hereditary))
    return report


@dataclass
class _SweepResult:
    count: int = 0
    mismatch: Optional[tuple[int, dict]] = None
    not_hereditary: Optional[tuple[int, dict]] = None
    diamond: Optional[tuple[int, dict]] = None

    def merge(self, other: "_SweepResult") -> None:
        self.count += other.count
        for name in ("mismatch", "not_hereditary", "diamond"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if theirs is not None and (mine is None or theirs[0] < mine[0]):
                setattr(self, name, theirs)


def _sweep(
    model: KripkeModel,
    depth: int,
    connectives: Sequence[str],
    membership: bool,
    quantifiers: bool,
    part: int,
    parts: int,
) -> _SweepResult:
    result = _SweepResult()
    P = model.frame
    pstar = model.pstar
    valuation = model.valuation
    memo: dict = {}
    cache: dict = {}
    stream = enumerate_sentences(
        model.domain,
        depth,
        letters=model.letters,
        connectives=connectives,
        quantifiers=quantifiers,
        membership=membership,
    )
    for index, sentence in enumerate(stream):
        if index % parts != part:
            continue
        result.count += 1
        pointwise = _forced_mask(model, sentence, memo)
        algebraic = pstar.masks[valuation.evaluate(sentence, cache)]
        if pointwise != algebraic and result.mismatch is None:
            result.mismatch = (
                index,
                {
                    "sentence": render(sentence),
                    "pointwise": describe_mask(P, pointwise),
                    "algebraic": describe_mask(P, algebraic),
                },
            )
        if result.not_hereditary is None and not is_strongly_hereditary(P, pointwise):
            result.not_hereditary = (
                index,
                {"sentence": render(sentence), "set": describe_mask(P, pointwise)},
            )
        if isinstance(sentence, Diamond) and result.diamond is None:
            inner = pstar.position.get(_forced_mask(model, sentence.body, memo))
            if inner is None or pstar.masks[valuation.gamma(inner)] != pointwise:
                result.diamond = (index, {"sentence": render(sentence)})
    return result


def _sweep_worker(args: tuple) -> _SweepResult:
    return _sweep(*args)


def cross_check(
    model: KripkeModel,
    depth: int,
    connectives: Sequence[str] = ALL_CONNECTIVES,
    membership: bool = True,
    quantifiers: bool = True,
    jobs: Optional[int] = None,
) -> LawReport:
    """Compare both evaluators on every sentence up to a depth.

    The sentence stream is split round-robin across ``jobs`` worker processes;
    the first mismatch reported is the earliest in stream order.
    """
    jobs = config.jobs if jobs is None else jobs
    report = LawReport(f"cross-check of {model!r} at depth {depth}")
    # P* and the valuation are built once before any fork
    _ = model.valuation

    if jobs <= 1:
        result = _sweep(model, depth, connectives, membership, quantifiers, 0, 1)
    else:
        result = _SweepResult()
        tasks = [
            (model, depth, list(connectives), membership, quantifiers, k, jobs) for k in range(jobs)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for partial in pool.map(_sweep_worker, tasks):
                result.merge(partial)

    logger.info(f"Cross-checked {result.count} sentences at depth {depth} on {model!r}")
    detail = f"{result.count} sentences"
    for name, found in (
        ("definitional-equals-algebraic", result.mismatch),
        ("forcing-sets-strongly-hereditary", result.not_hereditary),
        ("diamond-is-gamma", result.diamond),
    ):
        report.add(check(name, found is None, found and found[1], detail=detail))
    return report

