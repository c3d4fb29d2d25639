"""Taylor coefficients of powers of psi(x) = (1 - sqrt(1-x))/x.

Let xi(x) = 1 - sqrt(1-x), so psi(x) = xi(x)/x.  This module computes, in
exact rational arithmetic,

    beta(n, p)  = p-th Taylor coefficient of xi(x)^n,
    alpha(n, p) = p-th Taylor coefficient of psi(x)^n,

related by the index shift beta(n, p+n) = alpha(n, p).  Closed forms:

    beta(n, p)  = 0 for p < n, else (n/2p) * 2^(n+1-2p) * C(2p-n-1, p-1)
    alpha(n, p) = (n/(n+p)) * 2^(-n-2p) * C(n+2p-1, p)

Internally alpha(n, p) is handled as an integer mantissa over a power of two:

    alpha(n, p) = (C(n+2p-1, p) - C(n+2p-1, p-1)) / 2^(n+2p)

(the two binomials difference equals n/(n+p) times the first one), which lets
large verification sweeps run on plain big-integer adds and shifts.

An independent convolution oracle builds the same coefficients from the
binomial series of sqrt(1-x) with no shared code path, and float-side helpers
evaluate psi(x)^n and its truncated series, including accelerated summation of
the conditionally convergent alternating series that appear at x = -1.
"""

from __future__ import annotations

import csv
import enum
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .arith import Rational, binomial, iv, iv_float_up, pow2, rational_str


class CoeffKind(enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"


def alpha_mantissa(n: int, p: int) -> int:
    """Integer a with alpha(n, p) = a / 2^(n+2p)."""
    return binomial(n + 2 * p - 1, p) - binomial(n + 2 * p - 1, p - 1)


def alpha_mantissa_row(n: int, p_max: int) -> list[int]:
    """Mantissas of alpha(n, 0..p_max) by the exact ratio recurrence.

    a(n, p+1) = a(n, p) * (n+2p+1)(n+2p) / ((p+1)(n+p+1)); the division is
    exact at every step, so each entry costs one big-int multiply and divmod.
    """
    row = [1] * (p_max + 1)
    a = 1
    for p in range(p_max):
        a = a * ((n + 2 * p + 1) * (n + 2 * p)) // ((p + 1) * (n + p + 1))
        row[p + 1] = a
    return row


def alpha_float_row(n: int, p_max: int) -> list[float]:
    """Float alpha(n, 0..p_max) by the same ratio recurrence.

    Relative error grows like p_max * ulp; fine for plotting and for partial
    sums whose tolerance is far above 1e-10.
    """
    row = [0.0] * (p_max + 1)
    a = 2.0 ** (-n) if n < 1074 else 0.0
    row[0] = a
    for p in range(p_max):
        a *= (n + 2 * p + 1) * (n + 2 * p) / (4.0 * (p + 1) * (n + p + 1))
        row[p + 1] = a
    return row


class CoeffTable:
    """Memoized table of exact coefficients, safe for concurrent readers.

    Fills are synchronized with a lock; every entry is a pure function of its
    index, so the table contents are deterministic under any interleaving.
    """

    def __init__(self, kind: CoeffKind):
        self.kind = kind
        self._entries: dict[tuple[int, int], Rational] = {}
        self._lock = threading.Lock()
        self.n_max = 0
        self.p_max = 0

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, n: int, p: int) -> Rational:
        key = (n, p)
        value = self._entries.get(key)
        if value is None:
            if self.kind is CoeffKind.ALPHA:
                value = _alpha_uncached(n, p)
            else:
                value = _beta_uncached(n, p)
            with self._lock:
                self._entries.setdefault(key, value)
                self.n_max = max(self.n_max, n)
                self.p_max = max(self.p_max, p)
        return value

    def to_csv(self, path) -> None:
        """Write the filled entries as `n,p,value` with exact rational strings."""
        rows = sorted(self._entries.items())
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "p", "value"])
            for (n, p), value in rows:
                writer.writerow([n, p, rational_str(value)])


def _alpha_uncached(n: int, p: int) -> Rational:
    if n < 1 or p < 0:
        raise ValueError(f"alpha requires n >= 1, p >= 0, got ({n}, {p})")
    return Fraction(alpha_mantissa(n, p), 1 << (n + 2 * p))


def _beta_uncached(n: int, p: int) -> Rational:
    if n < 1 or p < 0:
        raise ValueError(f"beta requires n >= 1, p >= 0, got ({n}, {p})")
    if p < n:
        return Fraction(0)
    return Fraction(n, 2 * p) * pow2(n + 1 - 2 * p) * binomial(2 * p - n - 1, p - 1)


ALPHA_TABLE = CoeffTable(CoeffKind.ALPHA)
BETA_TABLE = CoeffTable(CoeffKind.BETA)


def alpha(n: int, p: int) -> Rational:
    """Exact p-th Taylor coefficient of psi(x)^n (memoized)."""
    return ALPHA_TABLE.get(n, p)


def beta(n: int, p: int) -> Rational:
    """Exact p-th Taylor coefficient of xi(x)^n (memoized)."""
    return BETA_TABLE.get(n, p)


def alpha_ratio(n: int, p: int) -> Rational:
    """alpha(n, p+1)/alpha(n, p) by the closed ratio formula."""
    return Fraction((n + 2 * p + 1) * (n + 2 * p), 4 * (p + 1) * (n + p + 1))


def alpha_zero_convention(p: int) -> Rational:
    """Coefficients of psi(x)^0 = 1: 1 at p = 0, else 0 (inferred convention)."""
    return Fraction(1) if p == 0 else Fraction(0)


# ---------------------------------------------------------------------------
# independent convolution oracle
# ---------------------------------------------------------------------------

@dataclass
class SeriesPoly:
    """Truncated power series with exact coefficients for degrees 0..degree."""

    coeffs: list[Rational]
    degree: int

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coefficient vector length must be degree + 1")

    def __getitem__(self, p: int) -> Rational:
        return self.coeffs[p]

    def multiply(self, other: "SeriesPoly", degree: int) -> "SeriesPoly":
        """Exact Cauchy product truncated at `degree` (plain O(P^2))."""
        out = [Fraction(0)] * (degree + 1)
        for i, a in enumerate(self.coeffs[: degree + 1]):
            if not a:
                continue
            jmax = degree - i
            for j, b in enumerate(other.coeffs[: jmax + 1]):
                if b:
                    out[i + j] += a * b
        return SeriesPoly(out, degree)


def sqrt_one_minus_x_series(degree: int) -> SeriesPoly:
    """Binomial series of (1-x)^(1/2): sum_k C(1/2, k) (-x)^k, exact."""
    coeffs = [Fraction(1)]
    c = Fraction(1)  # falling product C(1/2, k) * (-1)^k
    for k in range(1, degree + 1):
        c *= Fraction(2 * k - 3, 2 * k)  # C(1/2,k)(-1)^k = C(1/2,k-1)(-1)^(k-1)*(k-3/2)/k
        coeffs.append(c)
    return SeriesPoly(coeffs, degree)


def xi_series(degree: int) -> SeriesPoly:
    """Series of xi(x) = 1 - sqrt(1-x)."""
    s = sqrt_one_minus_x_series(degree)
    coeffs = [-c for c in s.coeffs]
    coeffs[0] += 1
    return SeriesPoly(coeffs, degree)


def oracle_beta(n: int, p_max: int) -> SeriesPoly:
    """xi(x)^n by repeated exact convolution — no closed forms involved."""
    base = xi_series(p_max)
    acc = SeriesPoly([Fraction(1)] + [Fraction(0)] * p_max, p_max)
    for _ in range(n):
        acc = acc.multiply(base, p_max)
    return acc


def oracle_alpha(n: int, p_max: int) -> SeriesPoly:
    """psi(x)^n = xi(x)^n / x^n via the oracle series and an index shift."""
    shifted = oracle_beta(n, p_max + n)
    for p in range(n):
        if shifted[p] != 0:
            raise AssertionError(f"xi^{n} has a nonzero coefficient below x^{n}")
    return SeriesPoly(shifted.coeffs[n : n + p_max + 1], p_max)


# ---------------------------------------------------------------------------
# recurrences and closed-form sums
# ---------------------------------------------------------------------------

def alpha_recurrence_check(n: int, p: int) -> bool:
    """alpha(n+1, p) == 2*alpha(n, p+1) - alpha(n-1, p+1), exactly (n >= 2)."""
    if n < 2:
        raise ValueError("recurrence anchor needs n >= 2")
    return alpha(n + 1, p) == 2 * alpha(n, p + 1) - alpha(n - 1, p + 1)


def beta_recurrence_check(n: int, p: int) -> bool:
    """beta(n+1, p) == 2*beta(n, p) - beta(n-1, p-1), exactly (n >= 2)."""
    if n < 2:
        raise ValueError("recurrence anchor needs n >= 2")
    prev = beta(n - 1, p - 1) if p >= 1 else Fraction(0)
    return beta(n + 1, p) == 2 * beta(n, p) - prev


def sum_alpha(N: int, p: int) -> Rational:
    """Closed form of sum_{n=1}^{N} alpha(n, p)."""
    if N < 1 or p < 0:
        raise ValueError(f"sum_alpha requires N >= 1, p >= 0, got ({N}, {p})")
    return Fraction(
        (1 << N) * binomial(2 * p, p) - binomial(N + 2 * p, p), 1 << (N + 2 * p)
    )


# ---------------------------------------------------------------------------
# float evaluation
# ---------------------------------------------------------------------------

def psi_eval(x: float, n: int) -> float:
    """psi(x)^n in float, for x in [-1, 1].

    Uses the cancellation-free algebraic form psi(x) = 1/(1 + sqrt(1-x)),
    exact at the removable singularity x = 0 (value 2^-n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    return (1.0 / (1.0 + math.sqrt(1.0 - x))) ** n


def psi_partial_sum(x: float, n: int, P: int) -> float:
    """sum_{p=0}^{P} alpha(n, p) x^p in float."""
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    coeffs = alpha_float_row(n, P)
    total = 0.0
    xp = 1.0
    for p in range(P + 1):
        total += coeffs[p] * xp
        xp *= x
    return total


def alpha_tail_envelope(n: int, P: int) -> float:
    """Certified upper bound on sum_{p>P} alpha(n, p), rounded up.

    alpha(n, p) <= (n/(2p)) * e^(1/12)/sqrt(pi*p) <= (n e^(1/12)/(2 sqrt(pi)))
    p^(-3/2); the integral test turns the tail into <= e^(1/12) * n/sqrt(pi*P).
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    bound = iv.exp(iv.mpf(1) / 12) * n / iv.sqrt(iv.pi * P)
    return iv_float_up(bound)


def boundary_tail_envelope(P: int) -> float:
    """The documented n=1 boundary envelope (e^(1/12)/sqrt(pi)) * 2/sqrt(P)."""
    if P < 1:
        raise ValueError("P must be >= 1")
    bound = iv.exp(iv.mpf(1) / 12) / iv.sqrt(iv.pi) * 2 / iv.sqrt(iv.mpf(P))
    return iv_float_up(bound)


def diff_tail_envelope(P: int) -> Rational:
    """Exact bound on sum_{p>P} |alpha(n+1,p) - alpha(n,p)|, any n.

    Each difference is at most p^(-3/2); integral test gives 2/sqrt(P), which
    is rational whenever P is a perfect square (we keep it exact via isqrt).
    """
    r = math.isqrt(P)
    if r * r == P:
        return Fraction(2, r)
    # 2/sqrt(P) < 2/r is still a valid (slightly looser) exact envelope
    return Fraction(2, r)


# ---------------------------------------------------------------------------
# alternating series at the boundary x = -1
# ---------------------------------------------------------------------------

def iterated_average(parts: list[Fraction]) -> Fraction:
    """Repeatedly average neighboring partial sums down to a single value.

    For an alternating series whose term magnitudes are eventually smooth and
    decreasing, this is the classical acceleration that converges geometrically
    in the window size; exact arithmetic keeps the averaging itself error-free.
    """
    row = list(parts)
    while len(row) > 1:
        row = [(row[i] + row[i + 1]) / 2 for i in range(len(row) - 1)]
    return row[0]


def accelerated_alternating_sum(
    term: Callable[[int], Fraction], start: int, window: int = 64
) -> Fraction:
    """Sum of sum_{p>=start} term(p) for an alternating, eventually monotone tail."""
    parts = []
    acc = Fraction(0)
    for p in range(start, start + window):
        acc += term(p)
        parts.append(acc)
    return iterated_average(parts)


def _boundary_start(n: int) -> int:
    """First index where p*alpha(n,p) is decreasing: just past J(n) = (n^2+n)/2.

    (p+1) alpha(n,p+1) / (p alpha(n,p)) = (n+2p+1)(n+2p) / (4p(n+p+1)) < 1
    exactly when p > (n^2+n)/2, so acceleration windows must start there.
    """
    return max(320, (n * n + n) // 2 + 16)


def psi_pow_at_minus_one(n: int, window: int = 64) -> float:
    """sum_p alpha(n,p)(-1)^p = psi(-1)^n by direct + accelerated summation."""
    direct = _boundary_start(n)
    mant = alpha_mantissa_row(n, direct + window)
    total = Fraction(0)
    for p in range(direct):
        t = Fraction(mant[p], 1 << (n + 2 * p))
        total += t if p % 2 == 0 else -t
    def term(p: int) -> Fraction:
        t = Fraction(mant[p], 1 << (n + 2 * p))
        return t if p % 2 == 0 else -t
    return float(total + accelerated_alternating_sum(term, direct, window))


def dpsi_pow_at_minus_one(n: int, window: int = 64) -> float:
    """sum_p p*alpha(n,p)(-1)^(p-1) = (psi^n)'(-1) by direct + accelerated summation."""
    direct = _boundary_start(n)
    mant = alpha_mantissa_row(n, direct + window)
    total = Fraction(0)
    for p in range(direct):
        t = Fraction(p * mant[p], 1 << (n + 2 * p))
        total += -t if p % 2 == 0 else t
    def term(p: int) -> Fraction:
        t = Fraction(p * mant[p], 1 << (n + 2 * p))
        return -t if p % 2 == 0 else t
    return float(total + accelerated_alternating_sum(term, direct, window))
