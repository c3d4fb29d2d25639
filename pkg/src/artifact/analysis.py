"""Thresholds and inequality verification for the psi-power coefficients.

Everything here is about the coefficients alpha(n, p) of psi(x)^n, where
psi(x) = (1 - sqrt(1-x))/x.  Three exact rational thresholds in p organize
their behavior:

    I(n) = (n^2 - 3n - 4)/6     alpha(n, p) <= alpha(n, p+1)  iff  p <= I(n)
    J(n) = (n^2 + n)/2          alpha(n, p) >= alpha(n+1, p)  iff  p <= J(n)
    K(n) = (n^4 - 2n^3 - 13n^2 - 10n) / (12n^2 + 12n - 24)

K(n) is refined by the roots of the exact quadratic

    f_n(p) = -12 p^2 + 12 (n^2 + n - 1) p - (n^4 - 2n^3 - 13n^2 - 10n):

the successive differences alpha(n, p) - alpha(n+1, p) are nondecreasing in p
exactly where f_n(p) <= 0 (outside the roots) and decreasing strictly between
them.  All claims are checked as full equivalences in exact arithmetic;
transcendental bounds are evaluated as directed-rounding intervals and the
comparison must clear the unfavorable endpoint.

The module ends with a registry of named verification suites producing
deterministic VerifyReports over finite parameter rectangles.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .arith import Rational, binomial, iv, iv_float_down, iv_float_up, rational_str
from .coeffs import (
    alpha,
    alpha_zero_convention,
    alpha_mantissa_row,
    alpha_recurrence_check,
    beta,
    beta_recurrence_check,
    oracle_alpha,
    sum_alpha,
)
from .report import VerifyReport


@dataclass(frozen=True)
class BoundConstants:
    """Constants appearing in the difference-sum and mean-bound theorems."""

    C_sum: Rational = Fraction(33, 2)
    C_meanbound: Rational = Fraction(99, 2)

    @staticmethod
    def stirling_slack() -> float:
        """Upper endpoint of e^(1/12), the Stirling correction factor."""
        return iv_float_up(iv.exp(iv.mpf(1) / 12))

    @staticmethod
    def majorant(p: int) -> float:
        """M_p: 1 at p = 0, else e^(1/(24p)) / (2(1+p) sqrt(pi p))."""
        if p == 0:
            return 1.0
        return math.exp(1.0 / (24 * p)) / (2 * (1 + p) * math.sqrt(math.pi * p))


@dataclass(frozen=True)
class Thresholds:
    """The monotonicity thresholds for one n (quadratic roots when present)."""

    n: int
    I: Rational
    J: Rational
    K: Optional[Rational]
    K_lower: Optional[float]
    K_upper: Optional[float]


def _quartic_q(n: int) -> int:
    return n ** 4 - 2 * n ** 3 - 13 * n ** 2 - 10 * n


def _discriminant(n: int) -> tuple[int, int]:
    """(A, D) with roots of f_n at (A -+ sqrt(D))/24; D > 0 for all n >= 1."""
    A = 12 * (n * n + n - 1)
    D = A * A - 48 * _quartic_q(n)
    return A, D


def thresholds(n: int) -> Thresholds:
    """Exact I, J, K plus the quadratic roots when both are nonnegative.

    K has denominator 12(n^2 + n - 2), which vanishes at n = 1; K is absent
    there.  The roots are absent until both are nonnegative, which a scan
    shows first happens at n = 5.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    I = Fraction(n * n - 3 * n - 4, 6)
    J = Fraction(n * n + n, 2)
    K = None if n == 1 else Fraction(_quartic_q(n), 12 * n * n + 12 * n - 24)
    if roots_exist(n):
        A, D = _discriminant(n)
        lo = (A - math.sqrt(D)) / 24
        hi = (A + math.sqrt(D)) / 24
    else:
        lo = hi = None
    return Thresholds(n=n, I=I, J=J, K=K, K_lower=lo, K_upper=hi)


def roots_exist(n: int) -> bool:
    """Both roots nonnegative iff the quartic q(n) >= 0 (A^2 - D = 48 q)."""
    return _quartic_q(n) >= 0


# ---------------------------------------------------------------------------
# threshold equivalences (exact)
# ---------------------------------------------------------------------------

def check_I_equivalence(n: int, p: int) -> bool:
    """[alpha(n,p) <= alpha(n,p+1)] iff [p <= I(n)], both sides exact."""
    lhs = alpha(n, p) <= alpha(n, p + 1)
    rhs = 6 * p <= n * n - 3 * n - 4
    return lhs == rhs


def check_J_equivalence(n: int, p: int) -> bool:
    """[alpha(n,p) >= alpha(n+1,p)] iff [p <= J(n)], both sides exact."""
    lhs = alpha(n, p) >= alpha(n + 1, p)
    rhs = 2 * p <= n * n + n
    return lhs == rhs


def check_K_appendix_equivalence(n: int, p: int) -> bool:
    """Difference-step comparison against the exact quadratic criterion.

    [alpha(n,p) - alpha(n+1,p) <= alpha(n,p+1) - alpha(n+1,p+1)]
        iff  [12 p (n^2 + n - 1) - 12 p^2 <= n^4 - 2n^3 - 13n^2 - 10n].
    """
    if n < 2:
        raise ValueError("quadratic criterion needs n >= 2")
    lhs = alpha(n, p) - alpha(n + 1, p) <= alpha(n, p + 1) - alpha(n + 1, p + 1)
    rhs = 12 * p * (n * n + n - 1) - 12 * p * p <= _quartic_q(n)
    return lhs == rhs


def check_upper_lower_K(n: int, p: int) -> Optional[bool]:
    """Three-region classification of the difference steps by the two roots.

    Below the lower root or above the upper one the successive differences
    alpha(n,p) - alpha(n+1,p) are nondecreasing in p; strictly between the
    roots they decrease.  Classification is exact integer arithmetic; p that
    hits a root exactly, or sits within 1e-9 of one, reports None
    (indeterminate tie) rather than pass/fail.
    """
    if not roots_exist(n):
        raise ValueError(f"n = {n} does not have two nonnegative roots")
    A, D = _discriminant(n)
    t = A - 24 * p
    if t * t == D:
        return None
    s = math.sqrt(D)
    if min(abs(p - (A - s) / 24), abs(p - (A + s) / 24)) < 1e-9:
        return None
    nondecreasing = alpha(n, p) - alpha(n + 1, p) <= alpha(n, p + 1) - alpha(n + 1, p + 1)
    outside = t * t > D
    return nondecreasing == outside


def check_quotient_identity(n: int, p: int) -> Optional[bool]:
    """Exact ratio of successive difference columns.

    For n >= 2, away from the guard set alpha(n-1,p) = alpha(n,p) (equivalently
    n(n-1) - 2p = 0 plus the p = J-type equalities):

        (alpha(n,p) - alpha(n+1,p)) / (alpha(n-1,p) - alpha(n,p))
            = (n^2 + n - 2p)(n + 2p - 1) / (2 (n+p+1) (n(n-1) - 2p)).

    For n = 1 the previous power is psi^0 = 1, whose coefficients are 1 at
    p = 0 and 0 otherwise; the ratio then reduces to (p-1)/(p+2) for p >= 1.
    Returns None when the denominator guard n(n-1) - 2p = 0 fails (for n = 1
    that is exactly p = 0, where the reduced formula does not apply either).
    """
    if n < 1 or p < 0:
        raise ValueError("need n >= 1, p >= 0")
    if n == 1:
        if p == 0:
            return None
        denom = alpha_zero_convention(p) - alpha(1, p)
        if denom == 0:
            return None
        lhs = (alpha(1, p) - alpha(2, p)) / denom
        return lhs == Fraction(p - 1, p + 2)
    if n * (n - 1) - 2 * p == 0:
        return None
    denom = alpha(n - 1, p) - alpha(n, p)
    if denom == 0:
        return None
    lhs = (alpha(n, p) - alpha(n + 1, p)) / denom
    rhs = Fraction(
        (n * n + n - 2 * p) * (n + 2 * p - 1),
        2 * (n + p + 1) * (n * (n - 1) - 2 * p),
    )
    return lhs == rhs


# ---------------------------------------------------------------------------
# bound checks (exact LHS vs outward-rounded transcendental RHS)
# ---------------------------------------------------------------------------

_eq8_cache: dict[int, Fraction] = {}
_sean_cache: dict[int, Fraction] = {}


def _eq8_bound_down(p: int) -> Fraction:
    """Rounded-down e^(1/(24p)) / (2(1+p) sqrt(pi p)): passing it certifies."""
    got = _eq8_cache.get(p)
    if got is None:
        bound = iv.exp(iv.mpf(1) / (24 * p)) / (2 * (1 + p) * iv.sqrt(iv.pi * p))
        got = _eq8_cache.setdefault(p, Fraction(iv_float_down(bound)))
    return got


def _sean_bound_down(p: int) -> Fraction:
    """Rounded-down e^(1/12) / sqrt(pi p)."""
    got = _sean_cache.get(p)
    if got is None:
        bound = iv.exp(iv.mpf(1) / 12) / iv.sqrt(iv.pi * p)
        got = _sean_cache.setdefault(p, Fraction(iv_float_down(bound)))
    return got


def _in_bound_M_down() -> Fraction:
    """Rounded-down 6 sqrt(2/pi) e^(1/12)."""
    return Fraction(iv_float_down(6 * iv.sqrt(iv.mpf(2) / iv.pi) * iv.exp(iv.mpf(1) / 12)))


def technical_C_down() -> Fraction:
    """Rounded-down 6 e^(7/12) sqrt(2 pi) / (2 - sqrt(2))."""
    c = 6 * iv.exp(iv.mpf(7) / 12) * iv.sqrt(2 * iv.pi) / (2 - iv.sqrt(iv.mpf(2)))
    return Fraction(iv_float_down(c))


def check_uniform_p_estimate(n: int, p: int) -> bool:
    """|alpha(n+1,p) - alpha(n,p)| against its three upper bounds.

    The sharp one is e^(1/(24p)) / (2(1+p) sqrt(pi p)); the intermediate one
    is alpha(1, p); the weak one is p^(-3/2).  All three must hold; the
    transcendental bound is rounded down before comparing, so a pass is a
    certificate.
    """
    if n < 1 or p < 1:
        raise ValueError("need n >= 1, p >= 1")
    d = abs(alpha(n + 1, p) - alpha(n, p))
    if d > _eq8_bound_down(p):
        return False
    if d > alpha(1, p):
        return False
    return d * d * p ** 3 <= 1


def check_alpha0_difference(n: int) -> bool:
    """Identity for the p = 0 column of n-normalized coefficients.

    alpha(n, 0) = 2^-n exactly, so

        |alpha(n+1,0)/(n+1) - alpha(n,0)/n| = 2^-(n+1) (2+n) / (n(1+n)),

    and that value is at most 1.  Checked as an exact identity.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = abs(alpha(n + 1, 0) / (n + 1) - alpha(n, 0) / n)
    rhs = Fraction(2 + n, (1 << (n + 1)) * n * (1 + n))
    return lhs == rhs and rhs <= 1


def check_majorant_summability(P: int) -> float:
    """Partial sum of the majorant sequence M_p through p = P (float)."""
    if P < 1:
        raise ValueError("P must be >= 1")
    return sum(BoundConstants.majorant(p) for p in range(P + 1))


def check_sum_coefficient_bound(n: int, P_tail: int = 10 ** 4) -> bool:
    """sum_p |alpha(n+1,p) - alpha(n,p)| <= 33/(2n), certified.

    The partial sum through P_tail is exact (the differences share the dyadic
    denominator 2^(n+1+2p), so the sum is one big-integer Horner pass); the
    discarded tail is covered by the exact envelope 2/isqrt(P_tail) derived
    from the termwise bound p^(-3/2) and the integral test.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    row_lo = alpha_mantissa_row(n, P_tail)
    row_hi = alpha_mantissa_row(n + 1, P_tail)
    return _sum_bound_from_rows(n, row_lo, row_hi, P_tail)


def _sum_bound_from_rows(n: int, row_lo: list[int], row_hi: list[int], P_tail: int) -> bool:
    num = 0
    for p in range(P_tail + 1):
        num = (num << 2) + abs(row_hi[p] - 2 * row_lo[p])
    total = Fraction(num, 1 << (n + 1 + 2 * P_tail)) + Fraction(2, math.isqrt(P_tail))
    return total <= Fraction(33, 2 * n)


def check_sean_lemma(n: int, p: int) -> bool:
    """2^(-n-2p) C(n+2p, p) <= e^(1/12)/sqrt(pi p), RHS rounded down."""
    if n < 1 or p < 1:
        raise ValueError("need n >= 1, p >= 1")
    lhs = Fraction(binomial(n + 2 * p, p), 1 << (n + 2 * p))
    return lhs <= _sean_bound_down(p)


def check_In_bound(n: int) -> bool:
    """alpha(n, floor(I(n))) <= M / floor(I(n)) with M = 6 sqrt(2/pi) e^(1/12)."""
    if n < 6:
        raise ValueError("floor(I(n)) may be nonpositive below n = 6")
    i = (n * n - 3 * n - 4) // 6
    return alpha(n, i) <= _in_bound_M_down() / i


def c_np(n: int, p: int) -> float:
    """(1 + n/2p)^(2p+n) / (1 + n/p)^(n+p), evaluated in log space."""
    if n < 1 or p < 1:
        raise ValueError("need n >= 1, p >= 1")
    return math.exp(
        (2 * p + n) * math.log1p(n / (2.0 * p)) - (n + p) * math.log1p(n / float(p))
    )


def check_gamma_K(n: int, p: int, K: float) -> Optional[bool]:
    """e^(-K/2) <= c(n,p) <= 1 on the region n^2 <= pK (slack 1e-12).

    The lower constant is e^(-K/2): on n^2 <= pK the exponent of c(n,p) is
    bounded below by -n^2/(2p) >= -K/2.
    """
    if n * n > p * K:
        return None
    c = c_np(n, p)
    slack = 1e-12
    return math.exp(-K / 2.0) - slack <= c <= 1.0 + slack


def check_technical_lemma(N: int) -> bool:
    """1/N <= (C/r) sum_{j=1}^{r} alpha(j, k) for every k in [0, N], r = isqrt(N).

    C = 6 e^(7/12) sqrt(2 pi)/(2 - sqrt(2)) is rounded down, so a pass
    certifies the inequality with the true constant.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    r = math.isqrt(N)
    C = technical_C_down()
    lhs = Fraction(1, N)
    for k in range(N + 1):
        if lhs > C / r * sum_alpha(r, k):
            return False
    return True


def check_S_monotone(N: int, k: int) -> bool:
    """S(k) = sum_{n<=isqrt(N)} alpha(n, k) is nonincreasing: S(k+1) <= S(k)."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1, k >= 0")
    r = math.isqrt(N)
    return sum_alpha(r, k + 1) <= sum_alpha(r, k)


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _suite_oracle(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 30)
    p_max = rect.get("p_max", 30)
    shift_n_max = rect.get("shift_n_max", 40)
    shift_p_max = rect.get("shift_p_max", 100)
    report = VerifyReport(
        suite="oracle",
        rectangle={"n_max": n_max, "p_max": p_max,
                   "shift_n_max": shift_n_max, "shift_p_max": shift_p_max},
    )
    for n in range(1, n_max + 1):
        series = oracle_alpha(n, p_max)
        for p in range(p_max + 1):
            expected = series[p]
            got = alpha(n, p)
            report.record({"check": "oracle", "n": n, "p": p},
                          got == expected, got, expected)
    for n in range(1, shift_n_max + 1):
        for p in range(shift_p_max + 1):
            lhs = beta(n, p + n)
            rhs = alpha(n, p)
            report.record({"check": "shift", "n": n, "p": p}, lhs == rhs, lhs, rhs)
    return report


def _suite_recurrences(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 40)
    beta_p_max = rect.get("beta_p_max", 120)
    alpha_p_max = rect.get("alpha_p_max", 200)
    report = VerifyReport(
        suite="recurrences",
        rectangle={"n_max": n_max, "beta_p_max": beta_p_max,
                   "alpha_p_max": alpha_p_max},
    )
    for n in range(2, n_max + 1):
        for p in range(beta_p_max + 1):
            report.record({"check": "beta", "N": n, "p": p},
                          beta_recurrence_check(n, p))
        for p in range(alpha_p_max + 1):
            report.record({"check": "alpha", "n": n, "p": p},
                          alpha_recurrence_check(n, p))
    return report


def _suite_monotonicity(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 40)
    p_max = rect.get("p_max", 600)
    report = VerifyReport(suite="monotonicity",
                          rectangle={"n_max": n_max, "p_max": p_max})
    for n in range(1, n_max + 1):
        for p in range(p_max + 1):
            report.record({"check": "I", "n": n, "p": p}, check_I_equivalence(n, p))
            report.record({"check": "J", "n": n, "p": p}, check_J_equivalence(n, p))
    return report


def _suite_k_regions(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 40)
    p_max = rect.get("p_max", 600)
    report = VerifyReport(suite="k_regions",
                          rectangle={"n_max": n_max, "p_max": p_max})
    for n in range(2, n_max + 1):
        has_roots = roots_exist(n)
        for p in range(p_max + 1):
            report.record({"check": "quadratic", "n": n, "p": p},
                          check_K_appendix_equivalence(n, p))
            if has_roots:
                report.record({"check": "regions", "n": n, "p": p},
                              check_upper_lower_K(n, p))
    return report


def _suite_quotient(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 30)
    p_max = rect.get("p_max", 200)
    report = VerifyReport(suite="quotient",
                          rectangle={"n_max": n_max, "p_max": p_max})
    for n in range(1, n_max + 1):
        for p in range(p_max + 1):
            report.record({"n": n, "p": p}, check_quotient_identity(n, p))
    return report


def _suite_bounds(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 60)
    p_max = rect.get("p_max", 400)
    sean_n_max = rect.get("sean_n_max", 100)
    in_n_max = rect.get("in_n_max", 200)
    report = VerifyReport(
        suite="bounds",
        rectangle={"n_max": n_max, "p_max": p_max,
                   "sean_n_max": sean_n_max, "in_n_max": in_n_max},
    )
    for n in range(1, n_max + 1):
        for p in range(1, p_max + 1):
            report.record({"check": "uniform", "n": n, "p": p},
                          check_uniform_p_estimate(n, p))
    for n in range(1, sean_n_max + 1):
        for p in range(1, p_max + 1):
            report.record({"check": "stirling", "n": n, "p": p},
                          check_sean_lemma(n, p))
    for n in range(6, in_n_max + 1):
        report.record({"check": "peak", "n": n}, check_In_bound(n))
    return report


def _suite_alpha0(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 60)
    report = VerifyReport(suite="alpha0", rectangle={"n_max": n_max})
    for n in range(1, n_max + 1):
        report.record({"n": n}, check_alpha0_difference(n))
    return report


def _suite_majorant(rect: dict) -> VerifyReport:
    P = rect.get("P", 10 ** 4)
    report = VerifyReport(suite="majorant", rectangle={"P": P})
    total = check_majorant_summability(P)
    report.record({"check": "envelope", "P": P}, total <= 3.613, total, 3.613)
    report.record({"check": "cap", "P": P}, total <= 4.0, total, 4.0)
    prev = 0.0
    ok = True
    for P_step in sorted({s for s in (1, 10, 100, 1000, P) if s <= P}):
        cur = check_majorant_summability(P_step)
        ok = ok and cur >= prev
        prev = cur
    report.record({"check": "monotone", "P": P}, ok)
    return report


def _suite_sum_bound(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 40)
    P_tail = rect.get("P_tail", 10 ** 4)
    report = VerifyReport(suite="sum_bound",
                          rectangle={"n_max": n_max, "P_tail": P_tail})
    row_prev = alpha_mantissa_row(1, P_tail)
    for n in range(1, n_max + 1):
        row_next = alpha_mantissa_row(n + 1, P_tail)
        report.record({"n": n}, _sum_bound_from_rows(n, row_prev, row_next, P_tail))
        row_prev = row_next
    return report


def _suite_gamma(rect: dict) -> VerifyReport:
    n_max = rect.get("n_max", 60)
    Ks = rect.get("K_values", (1, 2, 4))
    report = VerifyReport(suite="gamma",
                          rectangle={"n_max": n_max, "K_values": list(Ks)})
    for K in Ks:
        for n in range(1, n_max + 1):
            p_min = max(1, -(-(n * n) // K))
            ps = list(range(p_min, p_min + 40)) + [p_min * 4, p_min * 16]
            for p in sorted(set(ps)):
                report.record({"K": K, "n": n, "p": p}, check_gamma_K(n, p, K))
    return report


def _suite_technical(rect: dict) -> VerifyReport:
    N_max = rect.get("N_max", 400)
    report = VerifyReport(suite="technical", rectangle={"N_max": N_max})
    C = technical_C_down()
    rhs_cache: dict[tuple[int, int], Fraction] = {}
    for N in range(1, N_max + 1):
        r = math.isqrt(N)
        lhs = Fraction(1, N)
        for k in range(N + 1):
            rhs = rhs_cache.get((r, k))
            if rhs is None:
                rhs = rhs_cache.setdefault((r, k), C / r * sum_alpha(r, k))
            report.record({"N": N, "k": k}, lhs <= rhs)
    return report


def _suite_s_monotone(rect: dict) -> VerifyReport:
    N_max = rect.get("N_max", 100)
    k_max = rect.get("k_max", 120)
    report = VerifyReport(suite="s_monotone",
                          rectangle={"N_max": N_max, "k_max": k_max})
    sums: dict[int, list[Fraction]] = {}
    for N in range(1, N_max + 1):
        r = math.isqrt(N)
        if r not in sums:
            sums[r] = [sum_alpha(r, k) for k in range(k_max + 2)]
        row = sums[r]
        for k in range(k_max + 1):
            report.record({"N": N, "k": k}, row[k + 1] <= row[k])
    return report


def _suite_sums(rect: dict) -> VerifyReport:
    N_max = rect.get("N_max", 40)
    p_max = rect.get("p_max", 100)
    report = VerifyReport(suite="sums",
                          rectangle={"N_max": N_max, "p_max": p_max})
    for p in range(p_max + 1):
        direct = Fraction(0)
        for N in range(1, N_max + 1):
            direct += alpha(N, p)
            closed = sum_alpha(N, p)
            report.record({"N": N, "p": p}, closed == direct, closed, direct)
    return report


SUITES: dict[str, Callable[[dict], VerifyReport]] = {
    "oracle": _suite_oracle,
    "recurrences": _suite_recurrences,
    "monotonicity": _suite_monotonicity,
    "k_regions": _suite_k_regions,
    "quotient": _suite_quotient,
    "bounds": _suite_bounds,
    "alpha0": _suite_alpha0,
    "majorant": _suite_majorant,
    "sum_bound": _suite_sum_bound,
    "gamma": _suite_gamma,
    "technical": _suite_technical,
    "s_monotone": _suite_s_monotone,
    "sums": _suite_sums,
}


class UnknownSuiteError(KeyError):
    pass


def run_suite(name: str, **rectangle) -> VerifyReport:
    """Run one registered suite; deterministic for a fixed rectangle."""
    key = name.replace("-", "_")
    fn = SUITES.get(key)
    if fn is None:
        raise UnknownSuiteError(
            f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}"
        )
    start = time.perf_counter()
    report = fn({k: v for k, v in rectangle.items() if v is not None})
    report.elapsed_s = time.perf_counter() - start
    return report


def run_all_suites(**rectangle) -> list[VerifyReport]:
    """Every registered suite with its default rectangle, in sorted name order."""
    return [run_suite(name) for name in sorted(SUITES)]
