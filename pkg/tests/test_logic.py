"""Tests for formula parsing, rendering and enumeration."""

import os
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from logic import (  # noqa: E402
    Bot,
    Const,
    Diamond,
    Equiv,
    Exists,
    Forall,
    FormulaParseError,
    Imp,
    Letter,
    Member,
    Neg,
    Or,
    RevImp,
    StrongAnd,
    Top,
    Var,
    WeakAnd,
    constants,
    depth,
    desugar,
    enumerate_sentences,
    equality_formula,
    free_vars,
    fresh_variable,
    is_sentence,
    is_sugar_free,
    is_universal_free,
    letters,
    parse,
    parse_lines,
    render,
    substitute,
)

a, b, c = Letter("a"), Letter("b"), Letter("c")


class TestParse:
    """Tests for the concrete syntax."""

    def test_precedence(self):
        assert parse("a & b -> c") == Imp(StrongAnd(a, b), c)
        assert parse("a \\/ b /\\ c") == Or(a, WeakAnd(b, c))
        assert parse("a /\\ b & c") == WeakAnd(a, StrongAnd(b, c))

    def test_implication_is_right_associative(self):
        assert parse("a -> b -> c") == Imp(a, Imp(b, c))
        assert parse("a <- b") == RevImp(a, b)

    def test_prefix_operators(self):
        assert parse("~ <> a") == Neg(Diamond(a))
        assert parse("<>(a & b)") == Diamond(StrongAnd(a, b))

    def test_unicode_spellings(self):
        assert parse("◇a → ⊥") == Imp(Diamond(a), Bot())
        assert parse("¬a ∧ b ↔ ⊤") == Equiv(WeakAnd(Neg(a), b), Top())

    def test_quantifier_scope(self):
        phi = parse("exists x . x in s -> bot", constants=["s"])
        assert phi == Exists("x", Imp(Member(Var("x"), Const("s")), Bot()))

    def test_quantifier_after_binary(self):
        phi = parse("a -> forall y . y in y")
        assert phi == Imp(a, Forall("y", Member(Var("y"), Var("y"))))

    def test_free_names_are_constants(self):
        assert parse("s in t") == Member(Const("s"), Const("t"))

    def test_spans_do_not_affect_equality(self):
        phi = parse("  a & b")
        assert phi.span == (2, 7)
        assert phi == StrongAnd(a, b)

    def test_comments_ignored(self):
        assert parse("a # trailing") == a


class TestParseErrors:
    """Tests for error kinds and positions."""

    def test_lexical(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("a $ b")
        assert excinfo.value.kind == "lexical"
        assert excinfo.value.column == 3

    def test_syntax(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("a &")
        assert excinfo.value.kind == "syntax"

    def test_unbalanced_parenthesis(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("(a -> b")
        assert excinfo.value.kind == "syntax"

    def test_unbound_variable(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("x in s", constants=["s"])
        assert excinfo.value.kind == "unbound-variable"
        assert excinfo.value.position == 0

    def test_letter_and_term_clash(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("a & s in a")
        assert excinfo.value.kind == "arity"
        assert excinfo.value.position == 0

    def test_variable_as_letter(self):
        with pytest.raises(FormulaParseError) as excinfo:
            parse("exists x . x")
        assert excinfo.value.kind == "arity"

    def test_parse_lines(self):
        assert parse_lines("a\n\n# note\nb & c\n") == [a, StrongAnd(b, c)]
        with pytest.raises(FormulaParseError) as excinfo:
            parse_lines("a\n\n# note\nb &\n")
        assert excinfo.value.line == 4
        assert "line 4" in str(excinfo.value)


class TestRender:
    """Tests for rendering back to text."""

    @pytest.mark.parametrize(
        "text",
        [
            "a & b -> c",
            "a -> b -> c",
            "(a -> b) -> c",
            "a & (b & c)",
            "~<>a",
            "<>(a \\/ b)",
            "exists x . x in s",
            "a -> (forall x . x in s)",
            "a <-> b <-> c",
            "top /\\ bot",
        ],
    )
    def test_render_is_canonical(self, text):
        assert render(parse(text)) == text

    @settings(max_examples=200, deadline=None)
    @given(
        st.recursive(
            st.sampled_from([a, b, c, Bot(), Top()]),
            lambda inner: st.one_of(
                st.builds(Neg, inner),
                st.builds(Diamond, inner),
                *[
                    st.builds(node, inner, inner)
                    for node in (StrongAnd, WeakAnd, Or, Imp, RevImp, Equiv)
                ],
            ),
            max_leaves=8,
        )
    )
    def test_render_parses_back(self, phi):
        assert parse(render(phi)) == phi


class TestStructure:
    """Tests for structural operations."""

    def test_desugar(self):
        assert desugar(parse("~a")) == Imp(a, Bot())
        assert desugar(Top()) == Imp(Bot(), Bot())
        assert desugar(parse("a <-> b")) == StrongAnd(Imp(a, b), Imp(b, a))
        assert is_sugar_free(desugar(parse("~(a <-> top)")))

    def test_equality_readings(self):
        g, h = Const("g"), Const("h")
        verbatim = equality_formula(g, h, "verbatim")
        symmetric = equality_formula(g, h, "symmetric")
        x = Var("x")
        assert verbatim.left == symmetric.left
        assert symmetric.right == Diamond(
            Imp(Exists("x", Imp(RevImp(Member(x, g), Member(x, h)), Bot())), Bot())
        )
        assert verbatim.right != symmetric.right

    def test_equality_unknown_reading(self):
        with pytest.raises(ValueError, match="Unknown equality reading"):
            equality_formula(Const("g"), Const("h"), "loose")

    def test_equality_avoids_constant_names(self):
        phi = equality_formula(Const("x"), Const("y"), "symmetric")
        assert phi.left.body.left.var == "x1"

    def test_fresh_variable(self):
        assert fresh_variable([]) == "x"
        assert fresh_variable(["x", "x1"]) == "x2"

    def test_depth(self):
        assert depth(a) == 0
        assert depth(parse("s = t")) == 0
        assert depth(parse("<>(a -> b)")) == 2
        assert depth(parse("exists x . x in s & a")) == 2

    def test_variables_constants_letters(self):
        phi = parse("a & exists x . x in s \\/ x in y", constants=["s", "y"])
        assert free_vars(phi) == frozenset()
        assert constants(phi) == {"s", "y"}
        assert letters(phi) == {"a"}
        assert is_sentence(phi)

    def test_substitute_respects_binding(self):
        body = Member(Var("x"), Var("x"))
        assert substitute(body, "x", "s") == Member(Const("s"), Const("s"))
        bound = Exists("x", body)
        assert substitute(bound, "x", "s") == bound

    def test_universal_free(self):
        assert is_universal_free(parse("exists x . x in x"))
        assert not is_universal_free(parse("a -> forall x . x in x"))


class TestEnumeration:
    """Tests for the sentence stream."""

    def test_depth_zero(self):
        assert list(enumerate_sentences(["s"], 0)) == [Bot(), Member(Const("s"), Const("s"))]

    def test_letters_only(self):
        out = list(
            enumerate_sentences(
                [], 1, letters=["p"], connectives=["&"], quantifiers=False, membership=False
            )
        )
        p = Letter("p")
        assert out[:2] == [Bot(), p]
        assert set(out[2:]) == {
            StrongAnd(Bot(), Bot()),
            StrongAnd(Bot(), p),
            StrongAnd(p, Bot()),
            StrongAnd(p, p),
        }
        assert len(out) == 6

    def test_quantifiers_bind_free_variables(self):
        out = list(enumerate_sentences(["s"], 1, connectives=[]))
        assert len(out) == 8
        assert Exists("x", Member(Var("x"), Var("x"))) in out
        assert Forall("x", Member(Const("s"), Var("x"))) in out

    def test_existential_only(self):
        out = list(enumerate_sentences(["s"], 2, connectives=["->"], universal=False))
        assert all(is_universal_free(phi) for phi in out)
        assert any(isinstance(phi, Exists) for phi in out)

    def test_stream_properties(self):
        out = list(enumerate_sentences(["s"], 2, letters=["p"], connectives=["&", "<>"]))
        assert len(out) == len(set(out))
        assert all(is_sentence(phi) and depth(phi) <= 2 for phi in out)
        assert Diamond(Diamond(Letter("p"))) in out

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="Unknown connectives"):
            list(enumerate_sentences([], 1, connectives=["<=>"]))
        with pytest.raises(ValueError, match="non-negative"):
            list(enumerate_sentences([], -1))
