"""Finite-dimensional evaluation of A(T) = sum_p alpha(1,p) T^p and its powers.

A^n(T) = sum_p alpha(n,p) T^p, truncated with a certified bound on the
discarded tail: sum_{p>P} alpha(n,p) <= e^(1/12) n / sqrt(pi P), multiplied by
the measured sup of ||T^p|| over a probe window (the power-boundedness of T is
a hypothesis probed empirically, not proved).

Two exact structures get a faster, far more accurate path:
  * scalar matrices a*I with |a| <= 1, where A^n = (psi(a)^n) I;
  * 2x2 Jordan blocks [[a, b], [0, a]] with |a| <= 1, where the diagonal is
    the series of psi(a)^n and the off-diagonal is b times its derivative
    series.  At a = -1 both series converge only conditionally and are
    evaluated by exact-arithmetic averaging acceleration.

The module also carries the theorem-scale checks (power-bounded and
mean-bounded difference bounds, Cesaro square-root domination), the worked
2x2 example with its alternating series S(n), and a Jacobi eigensolver used
as a spectral oracle for symmetric matrices.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .arith import binomial
from .coeffs import (
    accelerated_alternating_sum,
    alpha_tail_envelope,
    dpsi_pow_at_minus_one,
    psi_pow_at_minus_one,
)
from .analysis import technical_C_down
from .report import VerifyReport


class Norm(enum.Enum):
    OPINF = "opinf"
    FROBENIUS = "fro"
    MAX = "max"

    def compute(self, arr: np.ndarray) -> float:
        if self is Norm.OPINF:
            return float(np.abs(arr).sum(axis=1).max())
        if self is Norm.FROBENIUS:
            return float(np.sqrt((arr * arr).sum()))
        return float(np.abs(arr).max())


class SpectralExplosionError(RuntimeError):
    """Powers of T grew past the probe cutoff: T is not usably power-bounded."""


class MeanBoundProbeError(RuntimeError):
    """Cesaro averages of T grew past the probe cutoff."""


class NonConvergenceError(RuntimeError):
    """No truncation point within the cap certifies the requested tolerance."""


@dataclass
class DenseMatrix:
    """Square matrix of finite 64-bit floats."""

    dim: int
    array: np.ndarray

    def __post_init__(self):
        self.array = np.asarray(self.array, dtype=np.float64)
        if self.array.shape != (self.dim, self.dim):
            raise ValueError(f"expected shape ({self.dim}, {self.dim})")
        if not np.isfinite(self.array).all():
            raise ValueError("matrix entries must be finite")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "DenseMatrix":
        arr = np.asarray(rows, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("rows must form a square matrix")
        return cls(dim=arr.shape[0], array=arr)

    @classmethod
    def identity(cls, dim: int) -> "DenseMatrix":
        return cls(dim=dim, array=np.eye(dim))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "rows": self.array.tolist()}


def matrix_from_dict(data: dict) -> DenseMatrix:
    if not isinstance(data, dict) or "dim" not in data or "rows" not in data:
        raise ValueError('matrix JSON must be {"dim": d, "rows": [[...], ...]}')
    dim = data["dim"]
    rows = data["rows"]
    if not isinstance(dim, int) or dim < 1:
        raise ValueError("dim must be a positive integer")
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError("rows must be dim x dim")
    return DenseMatrix(dim=dim, array=np.asarray(rows, dtype=np.float64))


def load_matrix(path) -> DenseMatrix:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


APPENDIX_T = DenseMatrix.from_rows([[-1.0, 2.0], [0.0, -1.0]])


def matrix_power(T: DenseMatrix, k: int) -> DenseMatrix:
    """T^k by iterated multiplication; overflow to non-finite entries errs."""
    if k < 0:
        raise ValueError("k must be >= 0")
    acc = np.eye(T.dim)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            acc = acc @ T.array
            if not np.isfinite(acc).all():
                raise ValueError("matrix power overflowed to non-finite entries")
    return DenseMatrix(dim=T.dim, array=acc)


def cesaro(T: DenseMatrix, N: int) -> DenseMatrix:
    """(I + T + ... + T^(N-1)) / N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    acc = np.zeros((T.dim, T.dim))
    power = np.eye(T.dim)
    for _ in range(N):
        acc += power
        power = power @ T.array
    return DenseMatrix(dim=T.dim, array=acc / N)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

def probe_power_bound(
    T: DenseMatrix, probe_len: int = 2000, cutoff: float = 1e6,
    norm: Norm = Norm.OPINF,
) -> list[float]:
    """||T^p|| for p = 1..probe_len; errs if any norm passes the cutoff."""
    norms = []
    power = T.array.copy()
    for p in range(1, probe_len + 1):
        value = norm.compute(power)
        if not math.isfinite(value) or value > cutoff:
            raise SpectralExplosionError(
                f"||T^{p}|| = {value:g} exceeds the probe cutoff {cutoff:g}"
            )
        norms.append(value)
        if value == 0.0:
            break
        power = power @ T.array
    return norms


def probe_mean_bound(
    T: DenseMatrix, probe_len: int = 2000, cutoff: float = 1e6,
    norm: Norm = Norm.OPINF,
) -> float:
    """sup of ||(I + T + ... + T^(N-1))/N|| over N = 1..probe_len."""
    best = 0.0
    acc = np.zeros((T.dim, T.dim))
    power = np.eye(T.dim)
    for N in range(1, probe_len + 1):
        acc += power
        value = norm.compute(acc) / N
        if not math.isfinite(value) or value > cutoff:
            raise MeanBoundProbeError(
                f"||M_{N}|| = {value:g} exceeds the probe cutoff {cutoff:g}"
            )
        best = max(best, value)
        power = power @ T.array
    return best


# ---------------------------------------------------------------------------
# series evaluation
# ---------------------------------------------------------------------------

ACCEL_TAIL = 1e-13  # residual allowance for the exact-windowed accelerated sums


def _coeff_rows(n_list: Sequence[int], P: int) -> np.ndarray:
    """Stacked float rows alpha(n, 0..P) via the vectorized ratio recurrence."""
    p = np.arange(P, dtype=np.float64)
    out = np.empty((len(n_list), P + 1))
    for i, n in enumerate(n_list):
        ratios = (n + 2 * p + 1) * (n + 2 * p) / (4 * (p + 1) * (n + p + 1))
        out[i, 0] = 2.0 ** (-n)
        if P:
            out[i, 1:] = out[i, 0] * np.cumprod(ratios)
    return out


def _pick_P(n: int, M: float, eps: float, cap: int) -> int:
    """Smallest truncation with envelope(n, P) * M <= eps (within the cap)."""
    if M == 0.0:
        return 0
    P = max(16, math.ceil((1.0869 * n * M / eps) ** 2 / math.pi))
    while P <= cap and alpha_tail_envelope(n, P) * M > eps:
        P = P * 2
    if P > cap:
        raise NonConvergenceError(
            f"tail <= {eps:g} needs truncation beyond the cap {cap:g}"
        )
    return P


def _scalar_series(a: float, n: int, eps: float, cap: int) -> tuple[float, int, float]:
    """(value, P, tail) for sum_p alpha(n,p) a^p, |a| <= 1."""
    if a == 1.0:
        # psi(1)^n = 1; the series of positive terms converges up to it.
        if eps < 1e-15:
            raise NonConvergenceError(f"cannot certify below 1e-15, asked {eps:g}")
        return 1.0, 0, 1e-15
    if a == -1.0:
        if eps < ACCEL_TAIL:
            raise NonConvergenceError(
                f"boundary series certified only to {ACCEL_TAIL:g}, asked {eps:g}"
            )
        return psi_pow_at_minus_one(n), 0, ACCEL_TAIL
    r = abs(a)
    if r > 0 and eps * (1 - r) == 0.0:
        raise NonConvergenceError("tolerance underflows the geometric tail bound")
    # alpha(n,p) <= 1, so the tail is below the geometric tail r^(P+1)/(1-r)
    P = max(8, math.ceil(math.log(eps * (1 - r)) / math.log(r))) if r > 0 else 1
    if P > cap:
        raise NonConvergenceError(f"geometric tail needs P = {P} > cap {cap}")
    coeffs = _coeff_rows([n], P)[0]
    value = float(np.polynomial.polynomial.polyval(a, coeffs))
    tail = r ** (P + 1) / (1 - r)
    return value, P, tail


def _scalar_dseries(a: float, n: int, eps: float, cap: int) -> tuple[float, int, float]:
    """(value, P, tail) for sum_p p alpha(n,p) a^(p-1), |a| < 1 or a = -1."""
    if a == -1.0:
        if eps < ACCEL_TAIL:
            raise NonConvergenceError(
                f"boundary series certified only to {ACCEL_TAIL:g}, asked {eps:g}"
            )
        return dpsi_pow_at_minus_one(n), 0, ACCEL_TAIL
    if abs(a) >= 1.0:
        raise NonConvergenceError(
            "derivative series sum_p p alpha(n,p) diverges at a = 1"
        )
    r = abs(a)
    P = 64
    def tail_at(P: int) -> float:
        # sum_{p>P} p r^(p-1) = r^P ((P+1)(1-r) + r) / (1-r)^2, coeffs <= 1
        return r ** P * ((P + 1) * (1 - r) + r) / (1 - r) ** 2 if r > 0 else 0.0
    while tail_at(P) > eps:
        P *= 2
        if P > cap:
            raise NonConvergenceError(f"geometric tail needs P > cap {cap}")
    coeffs = _coeff_rows([n], P)[0]
    dcoeffs = coeffs[1:] * np.arange(1, P + 1)
    value = float(np.polynomial.polynomial.polyval(a, dcoeffs))
    return value, P, tail_at(P)


def _as_scalar(T: DenseMatrix) -> Optional[float]:
    a = T.array[0, 0]
    return a if np.array_equal(T.array, a * np.eye(T.dim)) else None


def _as_jordan2(T: DenseMatrix) -> Optional[tuple[float, float]]:
    if T.dim != 2:
        return None
    arr = T.array
    if arr[1, 0] == 0.0 and arr[0, 0] == arr[1, 1] and arr[0, 1] != 0.0:
        return float(arr[0, 0]), float(arr[0, 1])
    return None


def evaluate_powers(
    T: DenseMatrix,
    n_list: Sequence[int],
    eps: float,
    norm: Norm = Norm.OPINF,
    probe_len: int = 2000,
    cap: int = 10 ** 6,
) -> tuple[dict[int, tuple[np.ndarray, float]], int]:
    """Truncated A^n(T) for every n in n_list, sharing one pass over T^p.

    Returns ({n: (matrix, tail_bound)}, P).  tail_bound is measured in `norm`.
    """
    if not n_list or min(n_list) < 1:
        raise ValueError("n_list must contain positive integers")
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = T.dim

    a = _as_scalar(T)
    if a is not None and abs(a) <= 1.0:
        out = {}
        P_max = 0
        for n in n_list:
            value, P, tail = _scalar_series(a, n, eps, cap)
            scale = math.sqrt(d) if norm is Norm.FROBENIUS else 1.0
            out[n] = (value * np.eye(d), tail * scale)
            P_max = max(P_max, P)
        return out, P_max

    jordan = _as_jordan2(T)
    if jordan is not None and abs(jordan[0]) <= 1.0:
        a, b = jordan
        out = {}
        P_max = 0
        for n in n_list:
            dval, P1, dtail = _scalar_series(a, n, eps / 2, cap)
            oval, P2, otail = _scalar_dseries(a, n, eps / (2 * abs(b)), cap)
            mat = np.array([[dval, b * oval], [0.0, dval]])
            e1, e2 = dtail, abs(b) * otail
            if norm is Norm.MAX:
                tail = max(e1, e2)
            elif norm is Norm.FROBENIUS:
                tail = math.sqrt(2 * e1 * e1 + e2 * e2)
            else:
                tail = e1 + e2
            out[n] = (mat, tail)
            P_max = max(P_max, P1, P2)
        return out, P_max

    norms = probe_power_bound(T, probe_len, norm=norm)
    M = max(norms) if norms else 0.0
    if norms and norms[-1] == 0.0:
        # nilpotent: the series is a polynomial of degree < the zero index
        P = len(norms) - 1
        tails = {n: 0.0 for n in n_list}
    else:
        P = _pick_P(max(n_list), M, eps, cap)
        tails = {n: math.nextafter(alpha_tail_envelope(n, P) * M, math.inf)
                 for n in n_list}

    rows = _coeff_rows(list(n_list), P)
    X = np.empty((P + 1, d * d))
    power = np.eye(d)
    for p in range(P + 1):
        X[p] = power.reshape(-1)
        if p < P:
            power = power @ T.array
            if p % 1024 == 1023 and not np.isfinite(power).all():
                raise SpectralExplosionError("powers overflowed past the probe")
    flat = rows @ X
    out = {
        n: (flat[i].reshape(d, d), tails[n]) for i, n in enumerate(n_list)
    }
    return out, P


@dataclass
class BrunelResult:
    matrix: DenseMatrix
    truncation_P: int
    tail_bound: float
    norm_used: Norm


def brunel(
    T: DenseMatrix, n_power: int = 1, eps: float = 1e-8,
    norm: Norm = Norm.OPINF, probe_len: int = 2000, cap: int = 10 ** 6,
) -> BrunelResult:
    """A^n_power(T) with tail_bound <= eps (in `norm`), or a signalled failure."""
    powers, P = evaluate_powers(T, [n_power], eps, norm, probe_len, cap)
    mat, tail = powers[n_power]
    return BrunelResult(
        matrix=DenseMatrix(dim=T.dim, array=mat),
        truncation_P=P,
        tail_bound=tail,
        norm_used=norm,
    )


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------

MEAN_NORM_FACTOR = 4 * math.sqrt(6 / math.pi) + 2


def check_power_bound_theorem(
    T: DenseMatrix, n_max: int = 40, eps: float = 0.1,
    norm: Norm = Norm.OPINF, probe_len: int = 2000,
) -> VerifyReport:
    """n ||A^n - A^(n+1)|| <= 33M/2 and ||A^n|| <= 33M/2, M the probed power sup.

    Truncation slack is carried explicitly: each comparison allows the
    certified tail bounds plus 1e-9, so a pass is sound for the truncated
    quantities standing in for the true ones.
    """
    start = time.perf_counter()
    norms = probe_power_bound(T, probe_len, norm=norm)
    M = max([1.0] + norms)
    bound = 33.0 * M / 2.0
    powers, P = evaluate_powers(T, list(range(1, n_max + 2)), eps, norm, probe_len)
    report = VerifyReport(
        suite="power_bound",
        rectangle={"n_max": n_max, "eps": eps, "norm": norm.value,
                   "M": M, "P": P},
    )
    for n in range(1, n_max + 1):
        A_n, tail_n = powers[n]
        A_next, tail_next = powers[n + 1]
        lhs = norm.compute(A_n)
        report.record({"check": "norm", "n": n},
                      lhs <= bound + tail_n + 1e-9, lhs, bound)
        lhs = n * norm.compute(A_n - A_next)
        slack = n * (tail_n + tail_next) + 1e-9
        report.record({"check": "difference", "n": n},
                      lhs <= bound + slack, lhs, bound)
    report.elapsed_s = time.perf_counter() - start
    return report


def check_mean_bound_theorem(
    T: DenseMatrix, n_max: int = 30, eps: float = 0.1,
    norm: Norm = Norm.OPINF, probe_len: int = 2000,
) -> VerifyReport:
    """Mean-bounded variant: ||A^n|| <= M(4 sqrt(6/pi) + 2), n||A^(n+1)-A^n|| <= 99M/2."""
    start = time.perf_counter()
    M = probe_mean_bound(T, probe_len, norm=norm)
    M = max(M, 1.0)
    norm_bound = MEAN_NORM_FACTOR * M
    diff_bound = 99.0 * M / 2.0
    powers, P = evaluate_powers(T, list(range(1, n_max + 2)), eps, norm, probe_len)
    report = VerifyReport(
        suite="mean_bound",
        rectangle={"n_max": n_max, "eps": eps, "norm": norm.value,
                   "M": M, "P": P},
    )
    for n in range(1, n_max + 1):
        A_n, tail_n = powers[n]
        A_next, tail_next = powers[n + 1]
        lhs = norm.compute(A_n)
        report.record({"check": "norm", "n": n},
                      lhs <= norm_bound + tail_n + 1e-9, lhs, norm_bound)
        lhs = n * norm.compute(A_next - A_n)
        slack = n * (tail_n + tail_next) + 1e-9
        report.record({"check": "difference", "n": n},
                      lhs <= diff_bound + slack, lhs, diff_bound)
    report.elapsed_s = time.perf_counter() - start
    return report


def check_cesaro_domination(
    T: DenseMatrix, N_max: int = 200, eps: float = 0.05,
    slack: float = 1e-9, probe_len: int = 2000,
) -> VerifyReport:
    """(1/N) sum_{n<=N} T^n f <= (C/isqrt(N)) sum_{l<=isqrt(N)} A^l f entrywise.

    f runs over the standard basis (equivalently: the matrix inequality holds
    entrywise).  The A^l series are truncated, which only lowers the right
    side, and C is rounded down, so a pass certifies the displayed inequality.
    """
    start = time.perf_counter()
    if (T.array < 0).any():
        raise ValueError("domination check requires entrywise nonnegative T")
    probe_mean_bound(T, probe_len)
    C = float(technical_C_down())
    r_max = math.isqrt(N_max)
    powers, P = evaluate_powers(T, list(range(1, r_max + 1)), eps)
    report = VerifyReport(
        suite="cesaro_domination",
        rectangle={"N_max": N_max, "eps": eps, "slack": slack, "P": P},
    )
    rhs_partial = np.zeros((T.dim, T.dim))
    rhs_by_r = {0: rhs_partial.copy()}
    for ell in range(1, r_max + 1):
        rhs_partial = rhs_partial + powers[ell][0]
        rhs_by_r[ell] = rhs_partial.copy()
    lhs_sum = np.zeros((T.dim, T.dim))
    power = np.eye(T.dim)
    for N in range(1, N_max + 1):
        power = power @ T.array
        lhs_sum += power
        r = math.isqrt(N)
        gap = float((lhs_sum / N - (C / r) * rhs_by_r[r]).max())
        report.record({"N": N}, gap <= slack, gap, slack)
    report.elapsed_s = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# the worked 2x2 example
# ---------------------------------------------------------------------------

def S_value(n: int, window: int = 64) -> float:
    """S(n) = sum_p (-1/4)^p C(n+2p-1, p-1), summed exactly then accelerated.

    Terms decrease in magnitude exactly for p > J(n) = (n^2+n)/2, so the
    exact partial sum runs just past J(n) and the remaining alternating tail
    is collapsed by exact iterated averaging.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    start = (n * n + n) // 2 + 8

    def term(p: int) -> Fraction:
        t = Fraction(binomial(n + 2 * p - 1, p - 1), 4 ** p)
        return -t if p % 2 else t

    total = sum((term(p) for p in range(1, start)), Fraction(0))
    return float(total + accelerated_alternating_sum(term, start, window))


def S_remainder_at_J(n: int) -> float:
    """Alternating-series remainder bound for truncation at p = J(n)."""
    p = (n * n + n) // 2 + 1
    return binomial(n + 2 * p - 1, p - 1) / 4.0 ** p


@dataclass
class AppendixExample:
    """Closed form vs series evaluation of A^n for T = [[-1, 2], [0, -1]]."""

    n: int
    S_n: float
    closed_form: DenseMatrix
    series_matrix: DenseMatrix
    remainder_at_J: float

    @property
    def max_abs_difference(self) -> float:
        return float(np.abs(self.closed_form.array - self.series_matrix.array).max())


def appendix_example(n: int, eps: float = 1e-10) -> AppendixExample:
    """Both computations of A^n(T): diag (sqrt(2)-1)^n, off-diag -2^(1-n) n S(n)."""
    S_n = S_value(n)
    diag = (math.sqrt(2.0) - 1.0) ** n
    off = -(2.0 ** (1 - n)) * n * S_n
    closed = DenseMatrix.from_rows([[diag, off], [0.0, diag]])
    series = brunel(APPENDIX_T, n, eps=eps).matrix
    return AppendixExample(
        n=n,
        S_n=S_n,
        closed_form=closed,
        series_matrix=series,
        remainder_at_J=S_remainder_at_J(n),
    )


# ---------------------------------------------------------------------------
# spectral oracle and test-matrix helpers
# ---------------------------------------------------------------------------

def symmetric_eigenvalues(S: DenseMatrix, tol: float = 1e-12) -> list[float]:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted."""
    arr = S.array
    if not np.allclose(arr, arr.T, atol=1e-12):
        raise ValueError("Jacobi oracle requires a symmetric matrix")
    A = arr.copy()
    d = S.dim
    for _ in range(100):
        off = math.sqrt(max(0.0, (A * A).sum() - (np.diag(A) ** 2).sum()))
        if off <= tol:
            break
        for i in range(d - 1):
            for j in range(i + 1, d):
                if abs(A[i, j]) <= tol / (d * d):
                    continue
                theta = 0.5 * math.atan2(2 * A[i, j], A[j, j] - A[i, i])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(d)
                rot[i, i] = rot[j, j] = c
                rot[i, j] = s
                rot[j, i] = -s
                A = rot.T @ A @ rot
    return sorted(float(x) for x in np.diag(A))


def random_stochastic(
    dim: int, seed: int, doubly: bool = False, sinkhorn_iters: int = 200
) -> DenseMatrix:
    """Seeded random row-stochastic (or Sinkhorn doubly stochastic) matrix."""
    rng = np.random.default_rng(seed)
    arr = rng.random((dim, dim)) + 0.1
    if doubly:
        for _ in range(sinkhorn_iters):
            arr /= arr.sum(axis=1, keepdims=True)
            arr /= arr.sum(axis=0, keepdims=True)
        # one extra row pass so rows sum to 1 within float rounding
        arr /= arr.sum(axis=1, keepdims=True)
    else:
        arr /= arr.sum(axis=1, keepdims=True)
    return DenseMatrix(dim=dim, array=arr)


def rotation_matrix(angle: float = 1.0) -> DenseMatrix:
    c, s = math.cos(angle), math.sin(angle)
    return DenseMatrix.from_rows([[c, -s], [s, c]])
