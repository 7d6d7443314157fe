"""Finite commutative integral quantales.

A Quantale holds a read-only boolean order matrix and a product table over
dense integer indices. Lattice operations, residuals, negation and equivalence
are precomputed at construction; every constructor validates eagerly and
rejects near-quantales instead of repairing them.
"""

import hashlib
import itertools
import logging
import random
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from config import config
from formats import AlgebraDocument, parse_text
from reports import LawReport, check

logger = logging.getLogger(__name__)


class QuantaleError(Exception):
    """Base exception for invalid algebras."""

    pass


class MalformedAlgebraError(QuantaleError):
    """The document does not have the algebra file shape."""

    pass


class NotALatticeError(QuantaleError):
    """The order is not a partial order, or some pair lacks a meet or join."""

    pass


class NonAssociativeError(QuantaleError):
    """The product is not commutative or not associative."""

    pass


class UnitViolationError(QuantaleError):
    """The top element is not the unit of the product."""

    pass


class DistributivityError(QuantaleError):
    """The product is not monotone or does not distribute over joins."""

    pass


class BoundExceededError(QuantaleError):
    """A search was refused because the carrier is too large."""

    def __init__(self, what: str, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(f"{what}: carrier size {size} exceeds bound {bound}")


def readonly(array: np.ndarray) -> np.ndarray:
    """Return a read-only copy of an array."""
    out = np.array(array, copy=True)
    out.flags.writeable = False
    return out


def lattice_tables(leq: np.ndarray, names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Compute meet and join tables of a finite partial order.

    Raises:
        NotALatticeError: If the relation is not a partial order or some pair
            has no greatest lower bound / least upper bound.
    """
    n = leq.shape[0]
    if not np.all(np.diag(leq)):
        i = int(np.flatnonzero(~np.diag(leq))[0])
        raise NotALatticeError(f"Order is not reflexive at {names[i]}")
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise NotALatticeError(f"Order is not antisymmetric: {names[i]} and {names[j]}")
    # leq[i,k] and leq[k,j] imply leq[i,j]
    composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    if (composed & ~leq).any():
        i, j = map(int, np.argwhere(composed & ~leq)[0])
        raise NotALatticeError(f"Order is not transitive: {names[i]} ≤ ... ≤ {names[j]}")

    meet = np.zeros((n, n), dtype=np.int64)
    join = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            lower = np.flatnonzero(leq[:, a] & leq[:, b])
            greatest = [c for c in lower if leq[lower, c].all()]
            upper = np.flatnonzero(leq[a, :] & leq[b, :])
            least = [c for c in upper if leq[c, upper].all()]
            if not greatest:
                raise NotALatticeError(f"No meet for {names[a]} and {names[b]}")
            if not least:
                raise NotALatticeError(f"No join for {names[a]} and {names[b]}")
            meet[a, b] = meet[b, a] = greatest[0]
            join[a, b] = join[b, a] = least[0]
    return meet, join


class Quantale:
    """Finite commutative integral quantale over indices 0..n-1.

    Attributes:
        n: Carrier size.
        names: Element labels (metadata only).
        leq: Read-only boolean matrix, leq[i, j] iff i ≤ j.
        prod: Read-only product table.
        top, bottom: Indices of 1 and 0.
        meet_table, join_table, residual_table: Precomputed binary operations.
        neg_table: neg_table[x] = x → 0.
    """

    def __init__(self, names: Sequence[str], leq, prod):
        names = [str(name) for name in names]
        leq = np.asarray(leq, dtype=bool)
        prod = np.asarray(prod, dtype=np.int64)
        n = len(names)
        if n == 0:
            raise MalformedAlgebraError("Carrier must be nonempty")
        if leq.shape != (n, n) or prod.shape != (n, n):
            raise MalformedAlgebraError(f"Tables must be {n}x{n}")
        if len(set(names)) != n:
            raise MalformedAlgebraError("Element names must be distinct")
        if prod.min() < 0 or prod.max() >= n:
            raise MalformedAlgebraError("Product table contains a non-element")

        self.n = n
        self.names = tuple(names)
        self.leq = readonly(leq)
        self.prod = readonly(prod)

        meet, join = lattice_tables(self.leq, self.names)
        self.meet_table = readonly(meet)
        self.join_table = readonly(join)
        self.top = int(np.flatnonzero(self.leq.all(axis=0))[0])
        self.bottom = int(np.flatnonzero(self.leq.all(axis=1))[0])

        self._validate_product()
        self.residual_table = readonly(self._compute_residuals())
        self.neg_table = readonly(self.residual_table[:, self.bottom])

    def _validate_product(self) -> None:
        prod, leq, join = self.prod, self.leq, self.join_table
        name = self.names

        if not np.array_equal(prod, prod.T):
            x, y = map(int, np.argwhere(prod != prod.T)[0])
            raise NonAssociativeError(f"Product not commutative at ({name[x]}, {name[y]})")

        # left[x,y,z] = (x·y)·z and right[x,y,z] = x·(y·z)
        left = prod[prod, :]
        right = prod[:, prod]
        if not np.array_equal(left, right):
            x, y, z = map(int, np.argwhere(left != right)[0])
            raise NonAssociativeError(
                f"Product not associative at ({name[x]}, {name[y]}, {name[z]})"
            )

        units = prod[self.top, :] != np.arange(self.n)
        if units.any():
            x = int(np.flatnonzero(units)[0])
            raise UnitViolationError(
                f"Top {name[self.top]} is not a unit: {name[self.top]}·{name[x]} = "
                f"{name[prod[self.top, x]]}"
            )

        # mono[x,y,z] = x·z ≤ y·z
        mono = leq[prod[:, None, :], prod[None, :, :]]
        bad = leq[:, :, None] & ~mono
        if bad.any():
            x, y, z = map(int, np.argwhere(bad)[0])
            raise DistributivityError(
                f"Product not monotone: {name[x]} ≤ {name[y]} but "
                f"{name[x]}·{name[z]} ≰ {name[y]}·{name[z]}"
            )

        zero = prod[:, self.bottom] != self.bottom
        if zero.any():
            x = int(np.flatnonzero(zero)[0])
            raise DistributivityError(f"{name[x]}·{name[self.bottom]} is not the bottom")

        # dist[x,a,b] compares x·(a∨b) with x·a ∨ x·b
        lhs = prod[:, join]
        rhs = join[prod[:, :, None], prod[:, None, :]]
        if not np.array_equal(lhs, rhs):
            x, a, b = map(int, np.argwhere(lhs != rhs)[0])
            raise DistributivityError(
                f"Product does not distribute over joins at "
                f"{name[x]}·({name[a]} ∨ {name[b]})"
            )

    def _compute_residuals(self) -> np.ndarray:
        n = self.n
        table = np.zeros((n, n), dtype=np.int64)
        for x in range(n):
            for y in range(n):
                candidates = np.flatnonzero(self.leq[self.prod[x, :], y])
                table[x, y] = self.join_all(candidates)
        return table

    # Element access

    def _check(self, *elements: int) -> None:
        for x in elements:
            if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
                raise ValueError(f"Element index out of range: {x} (carrier size {self.n})")

    def index(self, name: str) -> int:
        """Index of the element with the given label."""
        try:
            return self.names.index(str(name))
        except ValueError:
            raise ValueError(f"Unknown element: {name}") from None

    def name(self, x: int) -> str:
        self._check(x)
        return self.names[x]

    @property
    def elements(self) -> range:
        return range(self.n)

    # Operations

    def le(self, x: int, y: int) -> bool:
        self._check(x, y)
        return bool(self.leq[x, y])

    def product(self, x: int, y: int) -> int:
        self._check(x, y)
        return int(self.prod[x, y])

    def meet(self, x: int, y: int) -> int:
        self._check(x, y)
        return int(self.meet_table[x, y])

    def join(self, x: int, y: int) -> int:
        self._check(x, y)
        return int(self.join_table[x, y])

    def residual(self, x: int, y: int) -> int:
        """x → y, the join of all z with x·z ≤ y."""
        self._check(x, y)
        return int(self.residual_table[x, y])

    def neg(self, x: int) -> int:
        """∼x = x → 0."""
        self._check(x)
        return int(self.neg_table[x])

    def equiv(self, x: int, y: int) -> int:
        """x ≡ y = (x → y)·(y → x)."""
        self._check(x, y)
        r = self.residual_table
        return int(self.prod[r[x, y], r[y, x]])

    def power(self, x: int, k: int) -> int:
        """x to the k-th power; x⁰ = 1."""
        self._check(x)
        if k < 0:
            raise ValueError(f"Exponent must be non-negative, got {k}")
        result = self.top
        for _ in range(k):
            result = int(self.prod[x, result])
        return result

    def meet_all(self, elements: Iterable[int]) -> int:
        """Meet of a family; the empty meet is the top."""
        result = self.top
        for x in elements:
            result = int(self.meet_table[result, x])
        return result

    def join_all(self, elements: Iterable[int]) -> int:
        """Join of a family; the empty join is the bottom."""
        result = self.bottom
        for x in elements:
            result = int(self.join_table[result, x])
        return result

    def product_all(self, elements: Iterable[int]) -> int:
        result = self.top
        for x in elements:
            result = int(self.prod[result, x])
        return result

    @cached_property
    def fingerprint(self) -> str:
        """Stable SHA-256 of the order and product tables."""
        digest = hashlib.sha256()
        digest.update(str(self.n).encode())
        digest.update(np.ascontiguousarray(self.leq, dtype=np.uint8).tobytes())
        digest.update(np.ascontiguousarray(self.prod, dtype=np.int64).tobytes())
        return digest.hexdigest()

    def as_document(self) -> dict:
        """Return the algebra file representation."""
        return {
            "names": list(self.names),
            "leq": self.leq.tolist(),
            "prod": self.prod.tolist(),
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quantale):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.prod, other.prod)
        )

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        return f"Quantale({list(self.names)})"


# Constructors


def chain_labels(n: int) -> list[str]:
    """Labels 0, 1/(n-1), ..., 1 for an n-element chain."""
    return [str(Fraction(i, n - 1)) for i in range(n)]


def _chain_order(n: int) -> np.ndarray:
    idx = np.arange(n)
    return idx[:, None] <= idx[None, :]


def make_godel_chain(n: int) -> Quantale:
    """n-element chain with product min."""
    if n < 2:
        raise ValueError(f"Chain size must be at least 2, got {n}")
    idx = np.arange(n)
    return Quantale(chain_labels(n), _chain_order(n), np.minimum(idx[:, None], idx[None, :]))


def make_lukasiewicz_chain(n: int) -> Quantale:
    """n-element chain with product max(0, x + y - 1)."""
    if n < 2:
        raise ValueError(f"Chain size must be at least 2, got {n}")
    idx = np.arange(n)
    prod = np.maximum(0, idx[:, None] + idx[None, :] - (n - 1))
    return Quantale(chain_labels(n), _chain_order(n), prod)


def make_boolean() -> Quantale:
    """The two-element Boolean algebra."""
    return make_godel_chain(2)


def make_trivial() -> Quantale:
    """The one-element quantale (0 = 1)."""
    return Quantale(["1"], [[True]], [[0]])


def make_product(first: Quantale, second: Quantale) -> Quantale:
    """Componentwise direct product; element (a, b) has index a * second.n + b."""
    pairs = list(itertools.product(first.elements, second.elements))
    names = [f"({first.names[a]},{second.names[b]})" for a, b in pairs]
    m = len(pairs)
    leq = np.zeros((m, m), dtype=bool)
    prod = np.zeros((m, m), dtype=np.int64)
    for i, (a, b) in enumerate(pairs):
        for j, (c, d) in enumerate(pairs):
            leq[i, j] = first.leq[a, c] and second.leq[b, d]
            prod[i, j] = first.prod[a, c] * second.n + second.prod[b, d]
    return Quantale(names, leq, prod)


def quantale_from_document(doc: AlgebraDocument) -> Quantale:
    """Build a quantale from a validated document."""
    if doc.chain is not None:
        if doc.chain.kind == "godel":
            return make_godel_chain(doc.chain.size)
        return make_lukasiewicz_chain(doc.chain.size)
    return Quantale(doc.names, doc.leq, doc.prod)


def load_quantale(text: str) -> Quantale:
    """Parse and validate algebra file text.

    Raises:
        MalformedAlgebraError: Text is not a well-shaped algebra document.
        QuantaleError: The tables violate a quantale invariant.
    """
    data, error = parse_text(text)
    if error:
        raise MalformedAlgebraError(error)
    try:
        doc = AlgebraDocument.model_validate(data)
    except ValidationError as e:
        raise MalformedAlgebraError(str(e)) from e
    return quantale_from_document(doc)


def dump_quantale(q: Quantale) -> dict:
    return q.as_document()


def is_isomorphic(first: Quantale, second: Quantale) -> bool:
    """Brute-force order-and-product isomorphism test (small carriers only)."""
    if first.n != second.n:
        return False
    for perm in itertools.permutations(range(second.n)):
        p = np.array(perm)
        if np.array_equal(first.leq, second.leq[np.ix_(p, p)]) and np.array_equal(
            p[first.prod], second.prod[np.ix_(p, p)]
        ):
            return True
    return False


def is_idempotent(q: Quantale) -> bool:
    """True iff x·x = x for every x."""
    return bool(np.array_equal(np.diag(q.prod), np.arange(q.n)))


# Family iteration


def families(
    n: int,
    subset_bound: Optional[int] = None,
    sample_size: Optional[int] = None,
    seed: Optional[int] = None,
) -> Iterator[tuple[int, ...]]:
    """Index families for the indexed-family laws.

    All subsets (including the empty one) when n ≤ subset_bound; otherwise the
    empty family, all singletons and pairs, and a seeded random sample.
    """
    bound = config.subset_bound if subset_bound is None else subset_bound
    if n <= bound:
        for k in range(n + 1):
            yield from itertools.combinations(range(n), k)
        return

    size = config.sample_size if sample_size is None else sample_size
    rng = random.Random(config.seed if seed is None else seed)
    logger.warning(f"Carrier size {n} above subset bound {bound}: sampling {size} families")
    yield ()
    for k in (1, 2):
        yield from itertools.combinations(range(n), k)
    for _ in range(size):
        yield tuple(x for x in range(n) if rng.random() < 0.5)


# Law verification


def _first(tuples: Iterable[tuple], predicate) -> Optional[tuple]:
    for t in tuples:
        if not predicate(*t):
            return t
    return None


def _witness(q: Quantale, labels: str, values: Optional[tuple]) -> Optional[dict]:
    if values is None:
        return None
    return {label: _render(q, value) for label, value in zip(labels, values)}


def _render(q: Quantale, value) -> object:
    if isinstance(value, tuple):
        return [q.names[v] for v in value]
    return q.names[value]


def verify_quantale_laws(
    q: Quantale,
    seed: Optional[int] = None,
    subset_bound: Optional[int] = None,
    subject: Optional[str] = None,
) -> LawReport:
    """Exhaustively check the residuated-lattice laws on q.

    Every law is checked over all element tuples; the indexed-family laws over
    all subsets (or a seeded sample above the subset bound). Checks marked
    ``info`` are recorded observations and do not fail the report.

    Returns:
        LawReport: One check per law, with the first counterexample if any.
    """
    report = LawReport(subject or repr(q))
    n = q.n
    E = range(n)
    pairs = list(itertools.product(E, repeat=2))
    triples = list(itertools.product(E, repeat=3))
    leq, prod, r, neg = q.leq, q.prod, q.residual_table, q.neg_table
    meet, join = q.meet_table, q.join_table
    one, zero = q.top, q.bottom

    def law(name, labels, tuples, predicate, asserted=True):
        found = _first(tuples, predicate)
        report.add(check(name, found is None, _witness(q, labels, found), asserted=asserted))

    singles = [(x,) for x in E]

    law("adjunction", "xyz", triples, lambda x, y, z: leq[prod[x, z], y] == leq[z, r[x, y]])
    law("order-residual", "xy", pairs, lambda x, y: leq[x, y] == (r[x, y] == one))
    law("modus-ponens", "xy", pairs, lambda x, y: leq[prod[x, r[x, y]], y])
    law("unit-residual", "y", singles, lambda y: r[one, y] == y)
    law("bottom-absorbing", "x", singles, lambda x: prod[x, zero] == zero)
    law("bottom-residual", "y", singles, lambda y: r[zero, y] == one)
    law(
        "product-monotone",
        "xyz",
        triples,
        lambda x, y, z: not leq[x, y] or leq[prod[x, z], prod[y, z]],
    )
    law("product-below-meet", "xy", pairs, lambda x, y: leq[prod[x, y], meet[x, y]])
    law(
        "residual-antitone",
        "xyz",
        triples,
        lambda x, y, z: not leq[x, y] or leq[r[y, z], r[x, z]],
    )
    law(
        "residual-monotone",
        "xyz",
        triples,
        lambda x, y, z: not leq[x, y] or leq[r[z, x], r[z, y]],
    )
    law("currying", "xyz", triples, lambda x, y, z: r[prod[x, y], z] == r[x, r[y, z]])

    fams = list(families(n, subset_bound=subset_bound, seed=seed))
    with_x = [(x, f) for x in E for f in fams]
    law(
        "product-meet-family",
        "xY",
        with_x,
        lambda x, f: leq[prod[x, q.meet_all(f)], q.meet_all(prod[x, y] for y in f)],
    )
    law(
        "residual-meet-family",
        "xY",
        with_x,
        lambda x, f: r[x, q.meet_all(f)] == q.meet_all(r[x, y] for y in f),
    )
    law(
        "join-residual-family",
        "yX",
        with_x,
        lambda y, f: r[q.join_all(f), y] == q.meet_all(r[x, y] for x in f),
    )
    law(
        "negation-join-family",
        "X",
        [(f,) for f in fams],
        lambda f: neg[q.join_all(f)] == q.meet_all(neg[x] for x in f),
    )

    law("negation-contradiction", "x", singles, lambda x: prod[x, neg[x]] == zero)
    law("double-negation-expansive", "x", singles, lambda x: leq[x, neg[neg[x]]])
    law("de-morgan", "xy", pairs, lambda x, y: neg[join[x, y]] == meet[neg[x], neg[y]])
    law(
        "de-morgan-product",
        "xy",
        pairs,
        lambda x, y: neg[join[x, y]] == prod[neg[x], neg[y]],
        asserted=False,
    )
    law(
        "negation-antitone",
        "xy",
        pairs,
        lambda x, y: not leq[x, y] or (leq[neg[y], neg[x]] and leq[neg[neg[x]], neg[neg[y]]]),
    )
    report.add(
        check(
            "negation-constants",
            neg[zero] == one and neg[one] == zero,
            {"neg(0)": q.names[neg[zero]], "neg(1)": q.names[neg[one]]},
        )
    )
    law("equivalence-identity", "xy", pairs, lambda x, y: (x == y) == (q.equiv(x, y) == one))
    law(
        "double-negation-product",
        "xy",
        pairs,
        lambda x, y: leq[prod[neg[neg[x]], neg[neg[y]]], neg[neg[prod[x, y]]]],
    )
    law("triple-negation", "x", singles, lambda x: neg[neg[neg[x]]] == neg[x])
    law("involution", "x", singles, lambda x: neg[neg[x]] == x, asserted=False)

    idempotent = is_idempotent(q)
    law(
        "idempotent-product-is-meet",
        "xy",
        pairs,
        lambda x, y: not idempotent or prod[x, y] == meet[x, y],
    )

    logger.info(
        f"Checked {len(report.checks)} laws on {report.subject}: "
        f"{len(report.failures)} failing"
    )
    return report
