"""Tests for nuclei, filters and quotients."""

import os
import sys

import pytest

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from algebra import (  # noqa: E402
    BoundExceededError,
    is_isomorphic,
    make_boolean,
    make_godel_chain,
    make_lukasiewicz_chain,
    verify_quantale_laws,
)
from nuclei import (  # noqa: E402
    Filter,
    UnaryMap,
    check_nucleus_characterization,
    dense_filter,
    double_negation,
    enumerate_quantic_nuclei,
    fixed_point_quantale,
    generated_filter,
    induced_map,
    is_closure_operator,
    is_filter,
    is_nucleus_image,
    is_quantic_nucleus,
    nucleus_from_image,
    nucleus_predicates,
    quotient,
    verify_nucleus_image_characterization,
    verify_nucleus_laws,
    verify_quotient_theorems,
)
from reports import HYPOTHESIS_UNMET, PASS  # noqa: E402


def _chain_param(kind, n):
    make = make_godel_chain if kind == "godel" else make_lukasiewicz_chain
    marks = [pytest.mark.slow] if n == 5 else []
    return pytest.param(make(n), id=f"{kind}{n}", marks=marks)


SWEEP = [pytest.param(make_boolean(), id="boolean2")] + [
    _chain_param(kind, n) for kind in ("godel", "lukasiewicz") for n in range(2, 6)
]


class TestUnaryMap:
    def test_wrong_length(self, godel3):
        with pytest.raises(ValueError, match="3 entries"):
            UnaryMap(godel3, (0, 1))

    def test_value_out_of_range(self, godel3):
        with pytest.raises(ValueError, match="element indices"):
            UnaryMap(godel3, (0, 1, 3))

    def test_compose_and_fixed_points(self, godel3):
        gamma = double_negation(godel3)
        assert gamma.compose(gamma) == gamma
        assert gamma.fixed_points() == [0, 2]
        assert gamma.describe() == {"0": "0", "1/2": "1", "1": "1"}


class TestEnumeration:
    """Tests for enumerating quantic nuclei."""

    def test_boolean_has_two_nuclei(self, boolean2):
        nuclei = enumerate_quantic_nuclei(boolean2)
        assert [g.table for g in nuclei] == [(0, 1), (1, 1)]

    def test_godel3_has_four_nuclei(self, godel3):
        nuclei = enumerate_quantic_nuclei(godel3)
        assert len(nuclei) == 4
        assert double_negation(godel3) in nuclei
        assert all(is_quantic_nucleus(g) for g in nuclei)

    def test_enumeration_bound(self):
        with pytest.raises(BoundExceededError, match="exceeds bound 3"):
            enumerate_quantic_nuclei(make_godel_chain(4), bound=3)

    def test_non_nucleus_rejected(self, godel3):
        assert not is_quantic_nucleus(UnaryMap(godel3, (1, 1, 1)))
        assert not is_quantic_nucleus(UnaryMap(godel3, (0, 0, 2)))


class TestPredicates:
    def test_double_negation_on_godel_is_standard(self, godel3):
        flags = nucleus_predicates(double_negation(godel3))
        assert flags.standard
        assert flags.failing() == []

    def test_constant_top_fails_bottom(self, godel3):
        flags = nucleus_predicates(UnaryMap.constant(godel3, godel3.top))
        assert not flags.respects_bottom
        assert "respects_bottom" in flags.failing()
        assert flags.as_dict()["standard"] is False

    def test_closure_operators(self, godel3):
        assert is_closure_operator(UnaryMap.constant(godel3, godel3.top))
        assert not is_closure_operator(UnaryMap.constant(godel3, godel3.bottom))

    def test_residual_characterization(self, lukasiewicz3):
        for gamma in enumerate_quantic_nuclei(lukasiewicz3):
            assert check_nucleus_characterization(gamma)
        assert not check_nucleus_characterization(
            UnaryMap.constant(lukasiewicz3, lukasiewicz3.bottom)
        )


class TestFilters:
    """Tests for filters and dense filters."""

    def test_is_filter(self, godel3):
        assert is_filter(godel3, {2})
        assert is_filter(godel3, {1, 2})
        assert not is_filter(godel3, {1})

    def test_invalid_filter_raises(self, godel3):
        with pytest.raises(ValueError, match="Not a filter"):
            Filter(godel3, frozenset({1}))

    def test_generated_filter_closes_under_product(self, lukasiewicz3):
        F = generated_filter(lukasiewicz3, [1])
        assert F.members == frozenset({0, 1, 2})
        assert not F.proper

    def test_trivial_generated_filter(self, lukasiewicz3):
        assert generated_filter(lukasiewicz3, []).members == frozenset({2})

    def test_dense_filter_of_double_negation(self, godel3):
        F = dense_filter(double_negation(godel3))
        assert F.describe() == ["1/2", "1"]
        assert F.proper


class TestQuotient:
    """Tests for quotient algebras."""

    def test_godel3_by_double_negation_is_boolean(self, godel3):
        qa = quotient(godel3, dense_filter(double_negation(godel3)))
        assert qa.quotient.n == 2
        assert is_isomorphic(qa.quotient, make_boolean())
        assert qa.class_table() == {"[0]": ["0"], "[1/2]": ["1/2", "1"]}
        assert qa.cls(2) == qa.cls(1)
        assert qa.rep(1) == 1

    def test_lukasiewicz_double_negation_is_identity(self, lukasiewicz3):
        gamma = double_negation(lukasiewicz3)
        assert gamma == UnaryMap.identity(lukasiewicz3)
        qa = quotient(lukasiewicz3, dense_filter(gamma))
        assert qa.quotient.n == 3

    def test_quotient_by_whole_algebra(self, godel3):
        qa = quotient(godel3, Filter(godel3, frozenset({0, 1, 2})))
        assert qa.quotient.n == 1

    def test_induced_map(self, godel3):
        gamma = double_negation(godel3)
        qa = quotient(godel3, dense_filter(gamma))
        assert induced_map(qa, gamma) == UnaryMap.identity(qa.quotient)

    def test_fixed_point_quantale(self, godel3):
        fixed, embedding = fixed_point_quantale(double_negation(godel3))
        assert embedding == (0, 2)
        assert is_isomorphic(fixed, make_boolean())


class TestImages:
    def test_image_rebuilds_nucleus(self, godel3):
        assert nucleus_from_image(godel3, [0, 2]) == double_negation(godel3)

    def test_image_needs_top(self, godel3):
        assert not is_nucleus_image(godel3, [0, 1])
        assert is_nucleus_image(godel3, [1, 2])

    @pytest.mark.parametrize("q", SWEEP)
    def test_characterization_sweep(self, q):
        report = verify_nucleus_image_characterization(q)
        assert report.passed, report.first_failure

    def test_characterization_bound(self):
        with pytest.raises(BoundExceededError):
            verify_nucleus_image_characterization(make_godel_chain(6), bound=5)


class TestLawReports:
    """Tests for the nucleus and quotient law suites."""

    @pytest.mark.parametrize("q", SWEEP)
    def test_every_nucleus_passes(self, q):
        for gamma in enumerate_quantic_nuclei(q):
            report = verify_nucleus_laws(gamma)
            assert report.passed, report.first_failure

    @pytest.mark.parametrize("q", SWEEP)
    def test_quotient_theorems_sweep(self, q):
        for gamma in enumerate_quantic_nuclei(q):
            report = verify_quotient_theorems(q, gamma)
            assert report.passed, report.first_failure

    @pytest.mark.parametrize("q", SWEEP)
    def test_fixed_points_form_quantale(self, q):
        for gamma in enumerate_quantic_nuclei(q):
            fixed, embedding = fixed_point_quantale(gamma)
            assert embedding == tuple(gamma.fixed_points())
            report = verify_quantale_laws(fixed)
            assert report.passed, report.first_failure

    def test_quotient_theorems_double_negation(self, godel3):
        report = verify_quotient_theorems(godel3, double_negation(godel3))
        assert report.passed
        assert report["quotient-is-heyting"].status == PASS
        assert report["same-class-iff-same-closure"].status == PASS

    def test_quotient_theorems_gate_hypotheses(self, godel3):
        report = verify_quotient_theorems(godel3, UnaryMap.constant(godel3, godel3.top))
        assert report["double-negated-closure-idempotent"].status == HYPOTHESIS_UNMET
        assert report.passed
