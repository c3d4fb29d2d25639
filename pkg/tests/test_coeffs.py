"""Tests for the exact coefficient engine: closed forms, oracle, recurrences."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.coeffs import (
    ALPHA_TABLE,
    BETA_TABLE,
    CoeffKind,
    CoeffTable,
    alpha,
    alpha_float_row,
    alpha_mantissa,
    alpha_mantissa_row,
    alpha_ratio,
    alpha_recurrence_check,
    alpha_tail_envelope,
    alpha_zero_convention,
    accelerated_alternating_sum,
    beta,
    beta_recurrence_check,
    boundary_tail_envelope,
    diff_tail_envelope,
    dpsi_pow_at_minus_one,
    iterated_average,
    oracle_alpha,
    oracle_beta,
    psi_eval,
    psi_partial_sum,
    psi_pow_at_minus_one,
    sqrt_one_minus_x_series,
    sum_alpha,
    xi_series,
)
from artifact.arith import parse_rational

ROOT2 = math.sqrt(2.0)


class TestFrozenValues:
    """Hand-checked coefficient values pinned as regression anchors."""

    def test_alpha_anchors(self):
        assert alpha(1, 0) == Fraction(1, 2)
        assert alpha(1, 1) == Fraction(1, 8)
        assert alpha(1, 2) == Fraction(1, 16)
        assert alpha(2, 0) == Fraction(1, 4)
        assert alpha(2, 1) == Fraction(1, 8)
        assert alpha(2, 2) == Fraction(5, 64)
        assert alpha(2, 3) == Fraction(7, 128)
        assert alpha(5, 0) == Fraction(1, 32)

    def test_alpha_at_zero_is_two_to_minus_n(self):
        for n in range(1, 80):
            assert alpha(n, 0) == Fraction(1, 2**n)

    def test_beta_anchors(self):
        assert beta(1, 1) == Fraction(1, 2)
        assert beta(1, 2) == Fraction(1, 8)
        assert beta(3, 2) == 0
        assert beta(2, 2) == Fraction(1, 4)

    def test_beta_vanishes_below_diagonal(self):
        for n in range(1, 12):
            for p in range(n):
                assert beta(n, p) == 0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            alpha(0, 0)
        with pytest.raises(ValueError):
            alpha(1, -1)
        with pytest.raises(ValueError):
            beta(0, 0)


class TestMantissa:
    def test_matches_alpha(self):
        for n in range(1, 15):
            for p in range(0, 25):
                assert Fraction(alpha_mantissa(n, p), 2 ** (n + 2 * p)) == alpha(n, p)

    def test_row_recurrence_agrees_with_direct(self):
        for n in (1, 2, 7, 23):
            row = alpha_mantissa_row(n, 60)
            for p in range(61):
                assert row[p] == alpha_mantissa(n, p)

    def test_mantissas_are_positive(self):
        for n in range(1, 30):
            assert all(a > 0 for a in alpha_mantissa_row(n, 50))

    def test_float_row_tracks_exact(self):
        for n in (1, 5, 12):
            frow = alpha_float_row(n, 200)
            for p in (0, 1, 50, 200):
                exact = float(alpha(n, p))
                assert frow[p] == pytest.approx(exact, rel=1e-11)


class TestOracle:
    """The convolution oracle shares no code with the closed forms."""

    def test_sqrt_series_anchors(self):
        s = sqrt_one_minus_x_series(4)
        assert s.coeffs == [
            Fraction(1),
            Fraction(-1, 2),
            Fraction(-1, 8),
            Fraction(-1, 16),
            Fraction(-5, 128),
        ]

    def test_xi_series_is_one_minus_sqrt(self):
        s = xi_series(6)
        assert s[0] == 0
        assert s[1] == Fraction(1, 2)
        assert s[2] == Fraction(1, 8)

    def test_beta_oracle_equality(self):
        for n in range(1, 9):
            series = oracle_beta(n, 24)
            for p in range(25):
                assert series[p] == beta(n, p), (n, p)

    def test_alpha_oracle_equality(self):
        for n in range(1, 9):
            series = oracle_alpha(n, 20)
            for p in range(21):
                assert series[p] == alpha(n, p), (n, p)

    def test_shift_identity(self):
        for n in range(1, 12):
            for p in range(0, 30):
                assert beta(n, p + n) == alpha(n, p)

    def test_series_poly_validates_length(self):
        from artifact.coeffs import SeriesPoly

        with pytest.raises(ValueError):
            SeriesPoly([Fraction(1)], 3)


class TestRecurrences:
    def test_alpha_recurrence(self):
        for n in range(2, 12):
            for p in range(0, 40):
                assert alpha_recurrence_check(n, p)

    def test_beta_recurrence(self):
        for n in range(2, 12):
            for p in range(0, 40):
                assert beta_recurrence_check(n, p)

    def test_recurrence_anchor_guard(self):
        with pytest.raises(ValueError):
            alpha_recurrence_check(1, 0)
        with pytest.raises(ValueError):
            beta_recurrence_check(1, 0)

    def test_ratio_formula(self):
        for n in range(1, 10):
            for p in range(0, 30):
                assert alpha_ratio(n, p) == alpha(n, p + 1) / alpha(n, p)

    @given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=200))
    @settings(max_examples=60)
    def test_ratio_is_positive_and_below_one_eventually(self, n, p):
        r = alpha_ratio(n, p)
        assert r > 0
        if 6 * p > n * n - 3 * n - 4:
            assert r < 1


class TestSums:
    def test_closed_form_matches_direct_sum(self):
        for N in range(1, 12):
            for p in range(0, 25):
                direct = sum(alpha(n, p) for n in range(1, N + 1))
                assert sum_alpha(N, p) == direct, (N, p)

    def test_telescoping_step(self):
        for N in range(1, 20):
            for p in (0, 3, 11):
                assert sum_alpha(N + 1, p) - sum_alpha(N, p) == alpha(N + 1, p)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sum_alpha(0, 0)
        with pytest.raises(ValueError):
            sum_alpha(1, -1)


class TestPsiEval:
    def test_values(self):
        assert psi_eval(0.0, 1) == 0.5
        assert psi_eval(0.0, 3) == 0.125
        assert psi_eval(1.0, 1) == 1.0
        assert psi_eval(1.0, 7) == 1.0
        assert psi_eval(-1.0, 1) == pytest.approx(ROOT2 - 1.0, rel=1e-15)

    def test_matches_naive_form_away_from_zero(self):
        for x in (0.2, 0.5, -0.7, 0.99, -1.0):
            naive = ((1.0 - math.sqrt(1.0 - x)) / x) ** 3
            assert psi_eval(x, 3) == pytest.approx(naive, rel=1e-13)

    def test_matches_exact_series_near_zero(self):
        """No cancellation at tiny x: compare against the exact rational series."""
        for exp in (10, 26, 40):
            x = Fraction(1, 2**exp)
            exact = sum(alpha(1, p) * x**p for p in range(6))
            assert psi_eval(float(x), 1) == pytest.approx(float(exact), rel=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            psi_eval(1.5, 1)
        with pytest.raises(ValueError):
            psi_eval(0.0, 0)

    def test_partial_sum_converges_from_below(self):
        x, n = 0.8, 2
        full = psi_eval(x, n)
        prev = 0.0
        for P in (4, 16, 64, 256):
            cur = psi_partial_sum(x, n, P)
            assert prev <= cur <= full + 1e-12
            prev = cur
        assert full - psi_partial_sum(x, n, 256) < 1e-12

    def test_partial_sum_domain(self):
        with pytest.raises(ValueError):
            psi_partial_sum(1.5, 1, 10)


class TestTailEnvelopes:
    def test_alpha_tail_envelope_dominates_true_tail(self):
        for n in (1, 3, 10):
            for P in (10, 100, 1000):
                row = alpha_float_row(n, P + 4000)
                observed = sum(row[P + 1 :])
                assert observed < alpha_tail_envelope(n, P)

    def test_envelope_monotone_in_P(self):
        assert alpha_tail_envelope(2, 400) < alpha_tail_envelope(2, 100)

    def test_boundary_envelope_is_n1_shape(self):
        assert boundary_tail_envelope(100) == pytest.approx(
            alpha_tail_envelope(2, 100), rel=1e-12
        )

    def test_diff_tail_envelope_exact_perfect_square(self):
        assert diff_tail_envelope(10000) == Fraction(1, 50)
        assert diff_tail_envelope(100) == Fraction(1, 5)

    def test_diff_tail_envelope_dominates(self):
        P = 400
        for n in (1, 4, 9):
            row_n = alpha_float_row(n, P + 6000)
            row_n1 = alpha_float_row(n + 1, P + 6000)
            observed = sum(abs(a - b) for a, b in zip(row_n[P + 1 :], row_n1[P + 1 :]))
            assert observed < float(diff_tail_envelope(P))

    def test_envelope_domain(self):
        with pytest.raises(ValueError):
            alpha_tail_envelope(1, 0)
        with pytest.raises(ValueError):
            boundary_tail_envelope(0)


class TestBoundarySeries:
    """Alternating series at x = -1 against independently derived closed forms."""

    def test_iterated_average_geometric(self):
        # partial sums of sum (-1/2)^k = 2/3: averaging nails it fast
        parts = []
        acc = Fraction(0)
        for k in range(12):
            acc += Fraction(-1, 2) ** k
            parts.append(acc)
        assert abs(iterated_average(parts) - Fraction(2, 3)) < Fraction(1, 10**6)

    def test_accelerated_sum_of_known_series(self):
        # sum_{p>=1} (-1)^(p+1)/p = ln 2
        value = accelerated_alternating_sum(
            lambda p: Fraction((-1) ** (p + 1), p), 1, window=40
        )
        assert abs(float(value) - math.log(2.0)) < 1e-12

    def test_psi_pow_at_minus_one(self):
        for n in (1, 2, 3, 8, 20):
            closed = (ROOT2 - 1.0) ** n
            assert psi_pow_at_minus_one(n) == pytest.approx(closed, rel=1e-12)

    def test_dpsi_pow_at_minus_one(self):
        dpsi1 = ROOT2 - 1.0 - 1.0 / (2.0 * ROOT2)
        for n in (1, 2, 3, 8, 20):
            closed = n * (ROOT2 - 1.0) ** (n - 1) * dpsi1
            assert dpsi_pow_at_minus_one(n) == pytest.approx(closed, rel=1e-11)

    def test_boundary_series_equals_psi_eval(self):
        for n in (1, 4):
            assert psi_pow_at_minus_one(n) == pytest.approx(
                psi_eval(-1.0, n), rel=1e-12
            )


class TestCoeffTable:
    def test_memoization_and_extent(self):
        table = CoeffTable(CoeffKind.ALPHA)
        v1 = table.get(3, 4)
        v2 = table.get(3, 4)
        assert v1 == v2 == alpha(3, 4)
        assert len(table) == 1
        assert table.n_max == 3 and table.p_max == 4

    def test_csv_round_trip(self, tmp_path):
        table = CoeffTable(CoeffKind.ALPHA)
        for n in range(1, 4):
            for p in range(0, 5):
                table.get(n, p)
        path = tmp_path / "coeffs.csv"
        table.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "n,p,value"
        for line in lines[1:]:
            n_s, p_s, val = line.split(",")
            assert parse_rational(val) == alpha(int(n_s), int(p_s))

    def test_module_tables_kinds(self):
        assert ALPHA_TABLE.kind is CoeffKind.ALPHA
        assert BETA_TABLE.kind is CoeffKind.BETA

    def test_zero_power_convention(self):
        assert alpha_zero_convention(0) == 1
        assert alpha_zero_convention(5) == 0


class TestMonotonicityInN:
    """Normalized coefficients fall in n; plain coefficients are subadditive."""

    def test_normalized_decreasing_in_n(self):
        for n in range(1, 25):
            for p in range(0, 40):
                assert alpha(n + 1, p) / (n + 1) <= alpha(n, p) / n

    def test_weighted_difference_nonnegative(self):
        for n in range(1, 25):
            for p in range(0, 40):
                assert (n + 1) * alpha(n, p) - n * alpha(n + 1, p) >= 0

    def test_subadditive_in_n(self):
        for m in range(1, 13):
            for n in range(1, 13):
                for p in range(0, 25):
                    assert alpha(m + n, p) <= alpha(m, p) + alpha(n, p)

    @given(
        st.integers(min_value=1, max_value=40),
        st.integers(min_value=1, max_value=40),
        st.integers(min_value=0, max_value=80),
    )
    @settings(max_examples=80)
    def test_subadditivity_property(self, m, n, p):
        assert alpha(m + n, p) <= alpha(m, p) + alpha(n, p)
