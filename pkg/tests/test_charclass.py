"""Exact identities of the characteristic-class algebra.

Expected values are either written out by hand, taken from the first few
Chern/Segre conversion formulas, or computed by independent oracles
(recursive partition enumeration, elementary/power-sum evaluation on random
rational Chern roots).
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cherncurrents import charclass as cc
from cherncurrents.charclass import CharClassPoly


def oracle_partitions(k):
    """Independent enumeration: multisets built smallest-part-first."""
    if k == 0:
        return {()}
    out = set()

    def build(remaining, minimum, acc):
        if remaining == 0:
            out.add(tuple(sorted(acc, reverse=True)))
            return
        for part in range(minimum, remaining + 1):
            build(remaining - part, part, acc + [part])

    build(k, 1, [])
    return out


def elementary_symmetric(roots, i):
    from itertools import combinations

    return sum(
        (Fraction(1) if not combo else _prod(combo))
        for combo in combinations(roots, i)
    )


def _prod(values):
    acc = Fraction(1)
    for v in values:
        acc *= v
    return acc


def power_sum(roots, k):
    return sum(r ** k for r in roots)


def chern_assignment(roots):
    return {("", "c", i): elementary_symmetric(roots, i) for i in range(1, len(roots) + 1)}


class TestPartitions:
    def test_zero_gives_empty_partition(self):
        assert cc.partitions(0) == [cc.Partition(())]

    def test_three_by_hand(self):
        assert [p.parts for p in cc.partitions(3)] == [(3,), (2, 1), (1, 1, 1)]

    @pytest.mark.parametrize("k", range(0, 9))
    def test_matches_recursive_oracle(self, k):
        got = [p.parts for p in cc.partitions(k)]
        assert set(got) == oracle_partitions(k)
        assert len(got) == len(set(got))

    def test_reverse_lexicographic_order(self):
        for k in range(1, 9):
            parts = [p.parts for p in cc.partitions(k)]
            assert parts == sorted(parts, reverse=True)

    def test_weights(self):
        for p in cc.partitions(6):
            assert p.weight == 6

    def test_invalid_partition_rejected(self):
        with pytest.raises(ValueError):
            cc.Partition((1, 2))
        with pytest.raises(ValueError):
            cc.Partition((0,))


class TestSegreChernConversion:
    def test_first_three_segre(self):
        c1 = CharClassPoly.variable("c", 1)
        c2 = CharClassPoly.variable("c", 2)
        c3 = CharClassPoly.variable("c", 3)
        assert cc.segre_to_chern(1) == -c1
        assert cc.segre_to_chern(2) == c1 * c1 - c2
        assert cc.segre_to_chern(3) == -(c1 ** 3) + 2 * (c1 * c2) - c3

    def test_first_three_chern(self):
        s1 = CharClassPoly.variable("s", 1)
        s2 = CharClassPoly.variable("s", 2)
        s3 = CharClassPoly.variable("s", 3)
        assert cc.chern_to_segre(1) == -s1
        assert cc.chern_to_segre(2) == s1 * s1 - s2
        assert cc.chern_to_segre(3) == -(s1 ** 3) + 2 * (s1 * s2) - s3

    @pytest.mark.parametrize("k", range(1, 11))
    def test_round_trip_both_ways(self, k):
        into_c = {("", "s", i): cc.segre_to_chern(i) for i in range(1, k + 1)}
        into_s = {("", "c", i): cc.chern_to_segre(i) for i in range(1, k + 1)}
        assert cc.chern_to_segre(k).substitute(into_c) == CharClassPoly.variable("c", k)
        assert cc.segre_to_chern(k).substitute(into_s) == CharClassPoly.variable("s", k)

    def test_total_class_inverse_mod_high_grade(self):
        n = 10
        total_c = CharClassPoly.constant(1)
        total_s = CharClassPoly.constant(1)
        for i in range(1, n + 1):
            total_c = total_c + CharClassPoly.variable("c", i)
            total_s = total_s + cc.segre_to_chern(i)
        assert (total_c * total_s).truncate(n) == CharClassPoly.constant(1)

    @pytest.mark.parametrize("k", range(1, 11))
    def test_integer_coefficients(self, k):
        for poly in (cc.segre_to_chern(k), cc.chern_to_segre(k)):
            assert all(c.denominator == 1 for c in poly.terms.values())

    @pytest.mark.parametrize("k", range(1, 11))
    def test_homogeneous_of_grade_k(self, k):
        assert cc.segre_to_chern(k).is_homogeneous(k)
        assert cc.chern_to_segre(k).is_homogeneous(k)

    def test_degree_overflow(self):
        with pytest.raises(cc.DegreeOverflowError):
            cc.segre_to_chern(11)
        with pytest.raises(cc.DegreeOverflowError):
            cc.chern_to_segre(7, max_degree=6)


class TestChernCharacter:
    def test_rank_at_degree_zero(self):
        assert cc.chern_character(0, 3) == CharClassPoly.constant(3)

    def test_degree_one_and_two(self):
        c1 = CharClassPoly.variable("c", 1)
        c2 = CharClassPoly.variable("c", 2)
        assert cc.chern_character(1, 5) == c1
        assert cc.chern_character(2, 5) == Fraction(1, 2) * (c1 * c1) - c2

    @given(
        roots=st.lists(
            st.fractions(min_value=-4, max_value=4, max_denominator=8),
            min_size=1,
            max_size=4,
        ),
        k=st.integers(min_value=1, max_value=6),
    )
    @settings(max_examples=60, deadline=None)
    def test_newton_identities_on_random_roots(self, roots, k):
        # ch_k evaluated at c_i = e_i(roots) must equal p_k(roots)/k!
        assignment = chern_assignment(roots)
        for i in range(1, k + 1):
            assignment.setdefault(("", "c", i), Fraction(0))
        factorial = 1
        for i in range(2, k + 1):
            factorial *= i
        got = cc.chern_character(k, len(roots)).evaluate(assignment)
        assert got == Fraction(power_sum(roots, k), factorial)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_denominators_divide_k_factorial(self, k):
        factorial = 1
        for i in range(2, k + 1):
            factorial *= i
        for coeff in cc.chern_character(k, 2).terms.values():
            assert factorial % coeff.denominator == 0

    @pytest.mark.parametrize("k", range(1, 7))
    def test_homogeneous(self, k):
        assert cc.chern_character(k, 3).is_homogeneous(k)


class TestWhitneyDualTensor:
    E = cc.BundleSlot("E", 2)
    F = cc.BundleSlot("F", 3)

    def test_whitney_k0_k1(self):
        assert cc.whitney_sum(0, self.E, self.F) == CharClassPoly.constant(1)
        expected = CharClassPoly.variable("c", 1, "E") + CharClassPoly.variable("c", 1, "F")
        assert cc.whitney_sum(1, self.E, self.F) == expected

    def test_whitney_k2_matches_stated_formula(self):
        c1E = CharClassPoly.variable("c", 1, "E")
        c2E = CharClassPoly.variable("c", 2, "E")
        c1F = CharClassPoly.variable("c", 1, "F")
        c2F = CharClassPoly.variable("c", 2, "F")
        assert cc.whitney_sum(2, self.E, self.F) == c2E + c1E * c1F + c2F

    @pytest.mark.parametrize("k", range(0, 7))
    def test_whitney_symmetric_in_slots(self, k):
        ab = cc.whitney_sum(k, self.E, self.F)
        ba = cc.whitney_sum(k, self.F, self.E)
        assert ab == ba

    def test_dual_class_signs(self):
        c1 = CharClassPoly.variable("c", 1)
        c2 = CharClassPoly.variable("c", 2)
        assert cc.dual_class(0) == CharClassPoly.constant(1)
        assert cc.dual_class(1) == -c1
        assert cc.dual_class(2) == c2

    def test_ch_tensor_rank_product(self):
        assert cc.ch_tensor(0, self.E, self.F) == CharClassPoly.constant(6)

    def test_ch_tensor_k1(self):
        expected = 3 * CharClassPoly.variable("c", 1, "E") + 2 * CharClassPoly.variable("c", 1, "F")
        assert cc.ch_tensor(1, self.E, self.F) == expected

    def test_ch_tensor_k2_via_per_slot_ch2(self):
        c1E = CharClassPoly.variable("c", 1, "E")
        c2E = CharClassPoly.variable("c", 2, "E")
        c1F = CharClassPoly.variable("c", 1, "F")
        c2F = CharClassPoly.variable("c", 2, "F")
        ch2E = Fraction(1, 2) * (c1E * c1E) - c2E
        ch2F = Fraction(1, 2) * (c1F * c1F) - c2F
        expected = 3 * ch2E + c1E * c1F + 2 * ch2F
        assert cc.ch_tensor(2, self.E, self.F) == expected

    @given(k=st.integers(min_value=0, max_value=6))
    @settings(max_examples=20, deadline=None)
    def test_outputs_homogeneous(self, k):
        assert cc.whitney_sum(k, self.E, self.F).is_homogeneous(k)
        assert cc.ch_tensor(k, self.E, self.F).is_homogeneous(k)


class TestPolynomialPlumbing:
    def test_no_zero_coefficients_stored(self):
        c1 = CharClassPoly.variable("c", 1)
        assert (c1 - c1).terms == {}

    def test_float_coefficients_rejected(self):
        with pytest.raises(TypeError):
            CharClassPoly.constant(0.5)
        with pytest.raises(TypeError):
            CharClassPoly.variable("c", 1) * 0.5

    def test_render_canonical(self):
        assert cc.segre_to_chern(2).render() == "c1^2 - c2"
        assert cc.segre_to_chern(1).render() == "-c1"
        assert cc.chern_character(2, 2).render() == "1/2*c1^2 - c2"
        assert CharClassPoly.zero().render() == "0"

    def test_partition_coefficient_tables(self):
        a3 = cc.chern_in_segre_coefficients(3)
        assert {tuple(p.parts): c for p, c in a3.items()} == {
            (3,): -1,
            (2, 1): 2,
            (1, 1, 1): -1,
        }
        b2 = cc.chern_character_coefficients(2)
        assert {tuple(p.parts): c for p, c in b2.items()} == {
            (2,): -1,
            (1, 1): Fraction(1, 2),
        }
