"""Modal residuated first-order formulas over the membership signature.

Concrete syntax, tightest first:

    ~  <>                    negation, possibility (prefix)
    in  =                    membership, equality
    &                        strong conjunction
    /\\                       weak conjunction
    \\/                       disjunction
    ->  <-                   implications (right associative)
    <->                      equivalence
    exists x . / forall x .  quantifiers, scoping as far right as possible

Unicode spellings (∼ ¬ ◇ ∧ ∨ → ← ↔ ∃ ∀ ∈ ⊥ ⊤) are accepted as well.
"""

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, VisitError

from config import config

logger = logging.getLogger(__name__)


class FormulaParseError(Exception):
    """A formula could not be parsed.

    Attributes:
        kind: One of 'lexical', 'syntax', 'unbound-variable', 'arity'.
        position: Character offset into the text (None if unknown).
        line, column: 1-based location (None if unknown).
    """

    def __init__(
        self,
        message: str,
        kind: str,
        position: Optional[int] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.kind = kind
        self.position = position
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


# Formulas


@dataclass(frozen=True)
class Formula:
    """Base class of formula nodes; spans do not take part in equality."""

    span: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Letter(Formula):
    name: str


@dataclass(frozen=True)
class Member(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class StrongAnd(Binary):
    pass


@dataclass(frozen=True)
class WeakAnd(Binary):
    pass


@dataclass(frozen=True)
class Or(Binary):
    pass


@dataclass(frozen=True)
class Imp(Binary):
    pass


@dataclass(frozen=True)
class RevImp(Binary):
    """left ← right, which means right → left."""

    pass


@dataclass(frozen=True)
class Equiv(Binary):
    pass


@dataclass(frozen=True)
class Unary(Formula):
    body: Formula


@dataclass(frozen=True)
class Neg(Unary):
    pass


@dataclass(frozen=True)
class Diamond(Unary):
    pass


@dataclass(frozen=True)
class Quantifier(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Quantifier):
    pass


@dataclass(frozen=True)
class Forall(Quantifier):
    pass


ATOMS = (Bot, Top, Letter, Member, Eq)
SUGAR = (Neg, Equiv, Top, Eq)

STRONG = "&"
WEAK = "/\\"
OR = "\\/"
IMP = "->"
REVIMP = "<-"
DIAMOND = "<>"
ALL_CONNECTIVES = (STRONG, WEAK, OR, IMP, REVIMP, DIAMOND)

BINARY_SYMBOLS = {
    StrongAnd: STRONG,
    WeakAnd: WEAK,
    Or: OR,
    Imp: IMP,
    RevImp: REVIMP,
    Equiv: "<->",
}
SYMBOL_NODES = {symbol: node for node, symbol in BINARY_SYMBOLS.items()}


# Parsing

GRAMMAR = r"""
?start: formula

?formula: eq_c | eq_o

?eq_c: eq_c ("<->" | "↔") imp_c      -> equiv
     | imp_c
?eq_o: eq_c ("<->" | "↔") imp_o      -> equiv
     | imp_o

?imp_c: or_c ("->" | "→") imp_c      -> imp
      | or_c ("<-" | "←") imp_c      -> revimp
      | or_c
?imp_o: or_c ("->" | "→") imp_o      -> imp
      | or_c ("<-" | "←") imp_o      -> revimp
      | or_o

?or_c: or_c ("\\/" | "∨") wand_c     -> or_
     | wand_c
?or_o: or_c ("\\/" | "∨") wand_o     -> or_
     | wand_o

?wand_c: wand_c ("/\\" | "∧") sand_c -> weak_and
       | sand_c
?wand_o: wand_c ("/\\" | "∧") sand_o -> weak_and
       | sand_o

?sand_c: sand_c "&" unary_c          -> strong_and
       | unary_c
?sand_o: sand_c "&" unary_o          -> strong_and
       | unary_o

?unary_c: ("~" | "∼" | "¬") unary_c  -> neg
        | ("<>" | "◇") unary_c       -> diamond
        | atom
?unary_o: ("~" | "∼" | "¬") unary_o  -> neg
        | ("<>" | "◇") unary_o       -> diamond
        | quantified

quantified: ("exists" | "∃") NAME "." formula  -> exists
          | ("forall" | "∀") NAME "." formula  -> forall

?atom: term ("in" | "∈") term        -> member
     | term "=" term                 -> eq
     | ("bot" | "⊥")                 -> bot
     | ("top" | "⊤")                 -> top
     | NAME                          -> letter
     | "(" formula ")"

term: NAME

NAME: /[A-Za-z_][A-Za-z0-9_']*/
COMMENT: "#" /[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


@v_args(meta=True)
class _FormulaBuilder(Transformer):
    """Builds AST nodes; every name starts out as a constant."""

    def _span(self, meta) -> Optional[tuple[int, int]]:
        if getattr(meta, "empty", True):
            return None
        return (meta.start_pos, meta.end_pos)

    def term(self, meta, children):
        token = children[0]
        return (str(token), token.start_pos, token.line, token.column)

    def member(self, meta, children):
        return Member(_const(children[0]), _const(children[1]), span=self._span(meta))

    def eq(self, meta, children):
        return Eq(_const(children[0]), _const(children[1]), span=self._span(meta))

    def bot(self, meta, children):
        return Bot(span=self._span(meta))

    def top(self, meta, children):
        return Top(span=self._span(meta))

    def letter(self, meta, children):
        return Letter(str(children[0]), span=self._span(meta))

    def neg(self, meta, children):
        return Neg(children[0], span=self._span(meta))

    def diamond(self, meta, children):
        return Diamond(children[0], span=self._span(meta))

    def strong_and(self, meta, children):
        return StrongAnd(children[0], children[1], span=self._span(meta))

    def weak_and(self, meta, children):
        return WeakAnd(children[0], children[1], span=self._span(meta))

    def or_(self, meta, children):
        return Or(children[0], children[1], span=self._span(meta))

    def imp(self, meta, children):
        return Imp(children[0], children[1], span=self._span(meta))

    def revimp(self, meta, children):
        return RevImp(children[0], children[1], span=self._span(meta))

    def equiv(self, meta, children):
        return Equiv(children[0], children[1], span=self._span(meta))

    def exists(self, meta, children):
        return Exists(str(children[0]), children[1], span=self._span(meta))

    def forall(self, meta, children):
        return Forall(str(children[0]), children[1], span=self._span(meta))


def _const(term_info) -> Const:
    return Const(term_info[0])


_PARSER = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=False)


def _line_col(text: str, position: int) -> tuple[int, int]:
    line = text.count("\n", 0, position) + 1
    column = position - (text.rfind("\n", 0, position) + 1) + 1
    return line, column


def parse(text: str, constants: Optional[Iterable[str]] = None) -> Formula:
    """Parse formula text into an AST.

    Names bound by an enclosing quantifier become variables; all other names in
    term position are constants. When ``constants`` is given, a free name
    outside it is an unbound variable.

    Raises:
        FormulaParseError: Lexical, syntax, unbound-variable or arity errors,
            each with its position.
    """
    try:
        tree = _PARSER.parse(text)
        raw = _FormulaBuilder().transform(tree)
    except UnexpectedCharacters as e:
        raise FormulaParseError(
            f"Unexpected character {text[e.pos_in_stream]!r}",
            "lexical",
            e.pos_in_stream,
            e.line,
            e.column,
        ) from None
    except UnexpectedInput as e:
        token = getattr(e, "token", None)
        found = f"{str(token)!r}" if token is not None and str(token) else "end of input"
        raise FormulaParseError(
            f"Unexpected {found}",
            "syntax",
            getattr(e, "pos_in_stream", None),
            getattr(e, "line", None),
            getattr(e, "column", None),
        ) from None
    except VisitError as e:
        raise FormulaParseError(str(e.orig_exc), "syntax") from None

    known = None if constants is None else set(constants)
    letters: set[str] = set()
    terms: set[str] = set()
    resolved = _resolve(raw, frozenset(), known, text, letters, terms)
    clash = letters & terms
    if clash:
        name = sorted(clash)[0]
        position = _find_name(text, name)
        line, column = _line_col(text, position) if position is not None else (None, None)
        raise FormulaParseError(
            f"'{name}' is used both as a propositional letter and as a term",
            "arity",
            position,
            line,
            column,
        )
    return resolved


def _find_name(text: str, name: str) -> Optional[int]:
    match = re.search(rf"(?<![A-Za-z0-9_']){re.escape(name)}(?![A-Za-z0-9_'])", text)
    return match.start() if match else None


def _resolve(
    node: Formula,
    bound: frozenset,
    known: Optional[set],
    text: str,
    letters: set,
    terms: set,
) -> Formula:
    def term(t: Term) -> Term:
        if t.name in bound:
            return Var(t.name)
        if known is not None and t.name not in known:
            position = node.span[0] if node.span else _find_name(text, t.name)
            line, column = _line_col(text, position) if position is not None else (None, None)
            raise FormulaParseError(
                f"Unbound variable '{t.name}'", "unbound-variable", position, line, column
            )
        terms.add(t.name)
        return Const(t.name)

    if isinstance(node, (Member, Eq)):
        return replace(node, left=term(node.left), right=term(node.right))
    if isinstance(node, Letter):
        if node.name in bound:
            position = node.span[0] if node.span else None
            line, column = _line_col(text, position) if position is not None else (None, None)
            raise FormulaParseError(
                f"Variable '{node.name}' used as a propositional letter",
                "arity",
                position,
                line,
                column,
            )
        letters.add(node.name)
        return node
    if isinstance(node, Quantifier):
        body = _resolve(node.body, bound | {node.var}, known, text, letters, terms)
        return replace(node, body=body)
    if isinstance(node, Unary):
        return replace(node, body=_resolve(node.body, bound, known, text, letters, terms))
    if isinstance(node, Binary):
        return replace(
            node,
            left=_resolve(node.left, bound, known, text, letters, terms),
            right=_resolve(node.right, bound, known, text, letters, terms),
        )
    return node


def parse_lines(text: str, constants: Optional[Iterable[str]] = None) -> list[Formula]:
    """Parse one formula per line, skipping blank lines and '#' comments."""
    formulas = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            formulas.append(parse(stripped, constants))
        except FormulaParseError as e:
            raise FormulaParseError(
                f"line {number}: {e}", e.kind, e.position, number, e.column
            ) from None
    return formulas


# Rendering

_QUANT, _EQUIV, _IMP, _OR, _WEAK, _STRONG, _UNARY, _ATOM = range(8)

_PRECEDENCE = {
    Equiv: _EQUIV,
    Imp: _IMP,
    RevImp: _IMP,
    Or: _OR,
    WeakAnd: _WEAK,
    StrongAnd: _STRONG,
}
_RIGHT_ASSOCIATIVE = (Imp, RevImp)


def _precedence(node: Formula) -> int:
    if isinstance(node, Quantifier):
        return _QUANT
    if isinstance(node, Unary):
        return _UNARY
    if isinstance(node, Binary):
        return _PRECEDENCE[type(node)]
    return _ATOM


def render(node: Formula) -> str:
    """ASCII text that parses back to the same AST.

    Quantifiers below the top level are always parenthesized.
    """
    if isinstance(node, Bot):
        return "bot"
    if isinstance(node, Top):
        return "top"
    if isinstance(node, Letter):
        return node.name
    if isinstance(node, Member):
        return f"{node.left} in {node.right}"
    if isinstance(node, Eq):
        return f"{node.left} = {node.right}"
    if isinstance(node, Quantifier):
        keyword = "exists" if isinstance(node, Exists) else "forall"
        return f"{keyword} {node.var} . {render(node.body)}"
    if isinstance(node, Unary):
        symbol = "~" if isinstance(node, Neg) else "<>"
        return f"{symbol}{_wrap(node.body, _UNARY)}"

    level = _precedence(node)
    right_assoc = isinstance(node, _RIGHT_ASSOCIATIVE)
    left = _wrap(node.left, level + 1 if right_assoc else level)
    right = _wrap(node.right, level if right_assoc else level + 1)
    return f"{left} {BINARY_SYMBOLS[type(node)]} {right}"


def _wrap(node: Formula, required: int) -> str:
    text = render(node)
    if _precedence(node) < required:
        return f"({text})"
    return text


# Structural operations


def fresh_variable(avoid: Iterable[str], base: str = "x") -> str:
    taken = set(avoid)
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def equality_formula(left: Term, right: Term, reading: Optional[str] = None) -> Formula:
    """The desugared equality abbreviation for left = right.

    The verbatim reading keeps the second conjunct's body as x∈h ← x∈g; the
    symmetric reading uses x∈g ← x∈h, so that the two conjuncts express the
    two inclusions.
    """
    reading = config.equality if reading is None else reading
    x = Var(fresh_variable({left.name, right.name}))
    g_member = Member(x, left)
    h_member = Member(x, right)

    def bounded(body: Formula) -> Formula:
        return Diamond(Imp(Exists(x.name, Imp(body, Bot())), Bot()))

    first = bounded(Imp(g_member, h_member))
    if reading == "symmetric":
        second = bounded(RevImp(g_member, h_member))
    elif reading == "verbatim":
        second = bounded(RevImp(h_member, g_member))
    else:
        raise ValueError(f"Unknown equality reading: {reading}")
    return StrongAnd(first, second)


def desugar(node: Formula, reading: Optional[str] = None) -> Formula:
    """Eliminate Neg, Equiv, Top and Eq."""
    if isinstance(node, Top):
        return Imp(Bot(), Bot())
    if isinstance(node, Eq):
        return equality_formula(node.left, node.right, reading)
    if isinstance(node, Neg):
        return Imp(desugar(node.body, reading), Bot())
    if isinstance(node, Equiv):
        left, right = desugar(node.left, reading), desugar(node.right, reading)
        return StrongAnd(Imp(left, right), Imp(right, left))
    if isinstance(node, Quantifier):
        return type(node)(node.var, desugar(node.body, reading))
    if isinstance(node, Unary):
        return type(node)(desugar(node.body, reading))
    if isinstance(node, Binary):
        return type(node)(desugar(node.left, reading), desugar(node.right, reading))
    return replace(node, span=None)


def depth(node: Formula) -> int:
    """Connective depth; atoms (including unexpanded Eq and Top) have depth 0."""
    if isinstance(node, (Quantifier, Unary)):
        return 1 + depth(node.body)
    if isinstance(node, Binary):
        return 1 + max(depth(node.left), depth(node.right))
    return 0


def is_universal_free(node: Formula) -> bool:
    if isinstance(node, Forall):
        return False
    if isinstance(node, (Quantifier, Unary)):
        return is_universal_free(node.body)
    if isinstance(node, Binary):
        return is_universal_free(node.left) and is_universal_free(node.right)
    return True


def is_sugar_free(node: Formula) -> bool:
    if isinstance(node, SUGAR):
        return False
    if isinstance(node, (Quantifier, Unary)):
        return is_sugar_free(node.body)
    if isinstance(node, Binary):
        return is_sugar_free(node.left) and is_sugar_free(node.right)
    return True


def free_vars(node: Formula) -> frozenset[str]:
    if isinstance(node, (Member, Eq)):
        return frozenset(t.name for t in (node.left, node.right) if isinstance(t, Var))
    if isinstance(node, Quantifier):
        return free_vars(node.body) - {node.var}
    if isinstance(node, Unary):
        return free_vars(node.body)
    if isinstance(node, Binary):
        return free_vars(node.left) | free_vars(node.right)
    return frozenset()


def constants(node: Formula) -> frozenset[str]:
    if isinstance(node, (Member, Eq)):
        return frozenset(t.name for t in (node.left, node.right) if isinstance(t, Const))
    if isinstance(node, (Quantifier, Unary)):
        return constants(node.body)
    if isinstance(node, Binary):
        return constants(node.left) | constants(node.right)
    return frozenset()


def letters(node: Formula) -> frozenset[str]:
    if isinstance(node, Letter):
        return frozenset({node.name})
    if isinstance(node, (Quantifier, Unary)):
        return letters(node.body)
    if isinstance(node, Binary):
        return letters(node.left) | letters(node.right)
    return frozenset()


def substitute(node: Formula, var: str, const: str) -> Formula:
    """Replace the free occurrences of a variable by a constant."""
    if isinstance(node, (Member, Eq)):

        def swap(t: Term) -> Term:
            return Const(const) if isinstance(t, Var) and t.name == var else t

        return replace(node, left=swap(node.left), right=swap(node.right))
    if isinstance(node, Quantifier):
        if node.var == var:
            return node
        return replace(node, body=substitute(node.body, var, const))
    if isinstance(node, Unary):
        return replace(node, body=substitute(node.body, var, const))
    if isinstance(node, Binary):
        return replace(
            node, left=substitute(node.left, var, const), right=substitute(node.right, var, const)
        )
    return node


def is_sentence(node: Formula) -> bool:
    return not free_vars(node)


# Enumeration


def enumerate_sentences(
    domain: Sequence[str],
    max_depth: int,
    letters: Sequence[str] = (),
    connectives: Sequence[str] = ALL_CONNECTIVES,
    quantifiers: bool = True,
    universal: bool = True,
    variables: Sequence[str] = ("x",),
    membership: bool = True,
) -> Iterator[Formula]:
    """All sugar-free sentences up to a connective depth, in a fixed order.

    Atoms are ⊥, the letters and (when ``membership`` is set) every t ∈ t'
    over the domain constants and the variables. Quantifiers bind a variable
    that occurs free in their body. Open formulas are kept only as material
    for quantifiers; the stream contains sentences only and no duplicates.
    """
    if max_depth < 0:
        raise ValueError(f"Depth must be non-negative, got {max_depth}")
    unknown = set(connectives) - set(ALL_CONNECTIVES)
    if unknown:
        raise ValueError(f"Unknown connectives: {sorted(unknown)}")

    names = list(variables) if quantifiers else []
    terms: list[Term] = [Const(d) for d in domain] + [Var(v) for v in names]
    atoms: list[Formula] = [Bot()] + [Letter(a) for a in letters]
    if membership:
        atoms += [Member(a, b) for a in terms for b in terms]

    binary = [SYMBOL_NODES[c] for c in connectives if c in SYMBOL_NODES]
    modal = DIAMOND in connectives
    kinds = [Exists] + ([Forall] if universal else []) if quantifiers else []

    # layers[k] holds (formula, free variables) pairs of depth exactly k
    layers: list[list[tuple[Formula, frozenset]]] = [[(a, free_vars(a)) for a in atoms]]
    for phi, free in layers[0]:
        if not free:
            yield phi

    for k in range(1, max_depth + 1):
        last = k == max_depth
        below = [item for layer in layers[: k - 1] for item in layer]
        upto = below + layers[k - 1]
        previous = layers[k - 1]
        new: list[tuple[Formula, frozenset]] = []

        def emit(phi: Formula, free: frozenset):
            if last:
                if not free:
                    yield phi
            else:
                new.append((phi, free))
                if not free:
                    yield phi

        if modal:
            for phi, free in previous:
                if last and free:
                    continue
                yield from emit(Diamond(phi), free)

        for node in binary:
            for left, lfree in previous:
                if last and lfree:
                    continue
                for right, rfree in upto:
                    if last and rfree:
                        continue
                    yield from emit(node(left, right), lfree | rfree)
            for left, lfree in below:
                if last and lfree:
                    continue
                for right, rfree in previous:
                    if last and rfree:
                        continue
                    yield from emit(node(left, right), lfree | rfree)

        for kind in kinds:
            for phi, free in previous:
                for v in names:
                    if v in free:
                        yield from emit(kind(v, phi), free - {v})

        if not last:
            layers.append(new)
            logger.debug(f"Sentence layer {k}: {len(new)} formulas")
