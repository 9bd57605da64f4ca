"""Large-n predictions for the disk counting statistics.

The log-MGF expands as C1 n + C2 sqrt(n) + C3 + C4/sqrt(n) + o(1).  All four
coefficients are built from the two kernel functions

    F(t, s) = log(1 + (s-1) erfc(t)/2),      G(t, s) = dF/dt,

integrated against low-degree polynomials.  Bulk disks (r inside the
equilibrium support), one optional edge disk (radius pinned to the support
edge at scale s/sqrt(n)), and outside disks each contribute their own terms.

Cumulant coefficients need u-derivatives of F and G at u = 0 (s = e^u).
Those derivatives are exact: F(t, e^u) and G(t, e^u) are rational/log
compositions of e^u - 1, so their Taylor coefficients in u follow from
truncated power-series arithmetic, with no numerical differentiation.

Semi-infinite integrals are truncated at T = sqrt(-log tol) + 2 with
tol = 1e-16: every integrand here is O(e^{-t^2}) (F decays like erfc, G
carries an explicit Gaussian), so the discarded tail is below
poly(T) e^{-T^2} ~ 1e-24, far under the 1e-12 quadrature budget.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .exact import DiskSystem, EnsembleParams
from .specfun import ZETA_PRIME_MINUS_ONE, log_barnes_g

__all__ = [
    "CumulantSeries",
    "DiskContribution",
    "ExpansionCoefficients",
    "F_func",
    "G_func",
    "ZnExpansion",
    "bulk_cumulant_coeffs",
    "edge_cumulant_coeffs",
    "edge_mean_coeffs",
    "edge_var_coeffs",
    "outside_cumulant_coeffs",
    "predict_log_mgf",
    "theorem_coefficients",
    "zn_expansion",
]

ORDER_MAX = 6
QUAD_EPSABS = 1e-12
TAIL_T = math.sqrt(-math.log(1e-16)) + 2.0  # ~8.07

_SQRT_PI = math.sqrt(math.pi)
_FACT = (1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0)
# Taylor coefficients of e^u - 1
_EXPM1_COEF = np.array([0.0, 1.0, 0.5, 1.0 / 6, 1.0 / 24, 1.0 / 120, 1.0 / 720])


def F_func(t: float, s: float) -> float:
    """F(t, s) = log(1 + (s-1) erfc(t)/2) for s > 0."""
    if not s > 0:
        raise ValueError(f"F_func requires s > 0, got {s!r}")
    return math.log1p((s - 1.0) * math.erfc(t) / 2.0)


def G_func(t: float, s: float) -> float:
    """G(t, s) = dF/dt = (1-s)/(1 + (s-1) erfc(t)/2) * e^{-t^2}/sqrt(pi)."""
    if not s > 0:
        raise ValueError(f"G_func requires s > 0, got {s!r}")
    return (1.0 - s) / (1.0 + (s - 1.0) * math.erfc(t) / 2.0) * math.exp(-t * t) / _SQRT_PI


# ---------------------------------------------------------------------------
# exact u-derivatives of F(t, e^{+-u}) and G(t, e^u) at u = 0


def _f_series(c: float, sign: float) -> np.ndarray:
    """Taylor coefficients in u of log(1 + c (e^{sign u} - 1)), orders 0..6."""
    q = np.empty(ORDER_MAX + 1)
    q[0] = 1.0
    sgn = 1.0
    for k in range(1, ORDER_MAX + 1):
        sgn *= sign
        q[k] = c * _EXPM1_COEF[k] * sgn
    ell = np.zeros(ORDER_MAX + 1)
    # from L' Q = Q':  (k+1) l_{k+1} = (k+1) q_{k+1} - sum_i (i+1) l_{i+1} q_{k-i}
    for k in range(ORDER_MAX):
        acc = (k + 1) * q[k + 1]
        for i in range(k):
            acc -= (i + 1) * ell[i + 1] * q[k - i]
        ell[k + 1] = acc / (k + 1)
    return ell


def _g_series(c: float, g0: float) -> np.ndarray:
    """Taylor coefficients in u of G(t, e^u) = g0 (1 - e^u)/(1 + c(e^u - 1))."""
    q = np.empty(ORDER_MAX + 1)
    q[0] = 1.0
    q[1:] = c * _EXPM1_COEF[1:]
    r = np.zeros(ORDER_MAX + 1)
    for k in range(ORDER_MAX + 1):
        acc = -_EXPM1_COEF[k]
        for i in range(k):
            acc -= r[i] * q[k - i]
        r[k] = acc
    return g0 * r


class _UDerivatives:
    """Order-j u-derivatives at u=0 of the F/G kernels for one t."""

    __slots__ = ("f_plus", "f_minus", "g", "g_sq")

    def __init__(self, t: float):
        c = math.erfc(t) / 2.0
        lp = _f_series(c, 1.0)
        lm = _f_series(c, -1.0)
        gs = _g_series(c, math.exp(-t * t) / _SQRT_PI)
        g2 = np.convolve(gs, gs)[: ORDER_MAX + 1]
        fact = np.asarray(_FACT)
        self.f_plus = lp * fact  # d^j/du^j F(t, e^u)
        self.f_minus = lm * fact  # d^j/du^j F(t, e^{-u})
        self.g = gs * fact  # d^j/du^j G(t, e^u)
        self.g_sq = g2 * fact  # d^j/du^j G(t, e^u)^2


# ---------------------------------------------------------------------------
# quadrature plumbing


class _QuadAccumulator:
    """Sums scipy.integrate.quad results and their error estimates."""

    def __init__(self) -> None:
        self.error = 0.0

    def __call__(self, f, lo: float, hi: float, knots: tuple[float, ...] = ()) -> float:
        if lo == hi:
            return 0.0
        sign = 1.0
        if hi < lo:
            lo, hi = hi, lo
            sign = -1.0
        points = sorted({lo, hi, *(k for k in knots if lo < k < hi)})
        total = 0.0
        for a, b in zip(points, points[1:]):
            val, err = quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=0.0, limit=200)
            total += val
            self.error += err
        return sign * total


# ---------------------------------------------------------------------------
# log-MGF expansion coefficients C1..C4


@dataclass(frozen=True)
class DiskContribution:
    index: int
    kind: str
    C1: float
    C2: float
    C3: float
    C4: float


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Coefficients of n, sqrt(n), 1, 1/sqrt(n) in the log-MGF expansion."""

    C1: float
    C2: float
    C3: float
    C4: float
    quad_error: float
    per_disk: tuple[DiskContribution, ...] = ()

    def evaluate(self, n: int) -> float:
        rn = math.sqrt(n)
        return self.C1 * n + self.C2 * rn + self.C3 + self.C4 / rn


def _flag_extreme_s(s_frak: float) -> None:
    if abs(s_frak) > 6.0:
        warnings.warn(
            f"edge parameter s = {s_frak} is far outside the Gaussian window; "
            "the e^(-s^2) factors underflow and the returned coefficients are "
            "effectively their saturated limits",
            RuntimeWarning,
            stacklevel=3,
        )


def _bulk_contribution(b: float, alpha: float, r: float, u: float, acc) -> tuple[float, ...]:
    C1 = b * r ** (2.0 * b) * u
    if u == 0.0:
        return C1, 0.0, 0.0, 0.0
    s, si = math.exp(u), math.exp(-u)
    rb = r**b
    C2 = math.sqrt(2.0) * b * rb * acc(lambda t: F_func(t, s) + F_func(t, si), 0.0, TAIL_T)
    C3 = (
        -(0.5 + alpha) * u
        + 4.0 * b * acc(lambda t: t * (F_func(t, s) - F_func(t, si)), 0.0, TAIL_T)
        + b * acc(lambda t: G_func(t, s) * (5.0 * t * t - 1.0) / 3.0, -TAIL_T, TAIL_T, knots=(0.0,))
    )
    C4 = (
        6.0 * math.sqrt(2.0) * b / rb * acc(lambda t: t * t * (F_func(t, s) + F_func(t, si)), 0.0, TAIL_T)
        - b / (math.sqrt(2.0) * rb)
        * acc(
            lambda t: G_func(t, s) * (21.0 * t - 193.0 * t**3 + 50.0 * t**5) / 18.0,
            -TAIL_T,
            TAIL_T,
            knots=(0.0,),
        )
        - b / (2.0 * math.sqrt(2.0) * rb)
        * acc(
            lambda t: (G_func(t, s) * (5.0 * t * t - 1.0) / 3.0) ** 2,
            -TAIL_T,
            TAIL_T,
            knots=(0.0,),
        )
    )
    return C1, C2, C3, C4


def _edge_contribution(b: float, alpha: float, s_frak: float, u: float, acc) -> tuple[float, ...]:
    C1 = u
    if u == 0.0:
        return C1, 0.0, 0.0, 0.0
    _flag_extreme_s(s_frak)
    se, sei = math.exp(u), math.exp(-u)
    lo = -(TAIL_T + abs(s_frak))
    C2 = (
        math.sqrt(2.0 * b) * acc(lambda t: F_func(t, sei), 0.0, TAIL_T)
        + math.sqrt(2.0 * b) * s_frak * u
        + math.sqrt(2.0 * b) * acc(lambda t: F_func(t, se), 0.0, -s_frak)
    )
    C3 = (
        (0.5 + alpha) * F_func(s_frak, sei)
        - 2.0 * b * acc(lambda t: (2.0 * t - s_frak) * F_func(t, sei), 0.0, TAIL_T)
        + 2.0 * b * acc(lambda t: (2.0 * t + s_frak) * F_func(t, se), 0.0, -s_frak)
        + b
        * acc(
            lambda t: G_func(t, se) * (5.0 * t * t + 3.0 * s_frak * t - 1.0) / 3.0,
            lo,
            -s_frak,
            knots=(0.0,),
        )
    )
    b32 = (2.0 * b) ** 1.5

    def poly_e(t: float) -> float:
        return (
            21.0 * t
            - 193.0 * t**3
            + 50.0 * t**5
            + 6.0 * s_frak * (1.0 - 29.0 * t * t + 10.0 * t**4)
            - 9.0 * s_frak * s_frak * (3.0 * t - 2.0 * t**3)
        ) / 18.0

    C4 = (
        b32 * acc(lambda t: (3.0 * t * t - 2.0 * s_frak * t) * F_func(t, sei), 0.0, TAIL_T)
        + b32 * acc(lambda t: (3.0 * t * t + 2.0 * s_frak * t) * F_func(t, se), 0.0, -s_frak)
        - b**1.5 / math.sqrt(2.0) * acc(lambda t: G_func(t, se) * poly_e(t), lo, -s_frak, knots=(0.0,))
        - b**1.5
        / (2.0 * math.sqrt(2.0))
        * acc(
            lambda t: (G_func(t, se) * (5.0 * t * t + 3.0 * s_frak * t - 1.0) / 3.0) ** 2,
            lo,
            -s_frak,
            knots=(0.0,),
        )
        + (
            (0.5 + alpha) * (2.0 * s_frak * s_frak - 1.0) / (3.0 * math.sqrt(2.0)) * math.sqrt(b)
            + (1.0 + 6.0 * alpha + 6.0 * alpha * alpha) / (12.0 * math.sqrt(2.0 * b))
        )
        * G_func(-s_frak, se)
    )
    return C1, C2, C3, C4


def theorem_coefficients(params: EnsembleParams, disks: DiskSystem) -> ExpansionCoefficients:
    """C1..C4 for the given disk configuration (independent of params.n)."""
    b, alpha = params.b, params.alpha
    kinds, s_frak = disks.classify(b)
    acc = _QuadAccumulator()
    per_disk = []
    for idx, (disk, kind) in enumerate(zip(disks.disks, kinds)):
        if kind == "bulk":
            contrib = _bulk_contribution(b, alpha, disk.r, disk.u, acc)
        elif kind == "edge":
            contrib = _edge_contribution(b, alpha, s_frak, disk.u, acc)
        else:
            contrib = (disk.u, 0.0, 0.0, 0.0)
        per_disk.append(DiskContribution(idx, kind, *contrib))
    return ExpansionCoefficients(
        C1=math.fsum(d.C1 for d in per_disk),
        C2=math.fsum(d.C2 for d in per_disk),
        C3=math.fsum(d.C3 for d in per_disk),
        C4=math.fsum(d.C4 for d in per_disk),
        quad_error=acc.error,
        per_disk=tuple(per_disk),
    )


def predict_log_mgf(params: EnsembleParams, disks: DiskSystem) -> float:
    """C1 n + C2 sqrt(n) + C3 + C4/sqrt(n) at n = params.n."""
    disks.resolve(params)  # surfaces ordering/resolvability errors early
    return theorem_coefficients(params, disks).evaluate(params.n)


# ---------------------------------------------------------------------------
# cumulant coefficient series (bulk / edge / outside)


@dataclass(frozen=True)
class CumulantSeries:
    """kappa_j ~ leading*n + c*sqrt(n) + d + e/sqrt(n) for one regime."""

    regime: str
    order: int
    leading: float
    c: float
    d: float
    e: float
    quad_error: float = 0.0

    def evaluate(self, n: int) -> float:
        rn = math.sqrt(n)
        return self.leading * n + self.c * rn + self.d + self.e / rn


def _check_order(j: int) -> None:
    if not (isinstance(j, int) and 1 <= j <= ORDER_MAX):
        raise ValueError(f"cumulant order must be an integer in 1..{ORDER_MAX}, got {j!r}")


def bulk_cumulant_coeffs(j: int, b: float, alpha: float, r: float) -> CumulantSeries:
    """Coefficients (c_j, d_j, e_j) for a fixed disk strictly inside the bulk."""
    _check_order(j)
    rstar = b ** (-1.0 / (2.0 * b))
    if not 0 < r < rstar:
        raise ValueError(f"bulk radius must satisfy 0 < r < {rstar}, got {r!r}")
    acc = _QuadAccumulator()
    fj = _FACT[j]

    def dF_sum(t: float) -> float:
        d = _UDerivatives(t)
        return d.f_plus[j] + d.f_minus[j]

    def dF_diff(t: float) -> float:
        d = _UDerivatives(t)
        return d.f_plus[j] - d.f_minus[j]

    def dG(t: float) -> float:
        return _UDerivatives(t).g[j]

    def dG2(t: float) -> float:
        return _UDerivatives(t).g_sq[j]

    rb = r**b
    c = math.sqrt(2.0) * b * rb * acc(dF_sum, 0.0, TAIL_T)
    d = (
        (-0.5 - alpha if j == 1 else 0.0)
        + 4.0 * b * acc(lambda t: t * dF_diff(t), 0.0, TAIL_T)
        + b * acc(lambda t: dG(t) * (5.0 * t * t - 1.0) / 3.0, -TAIL_T, TAIL_T, knots=(0.0,))
    )
    e = (
        6.0 * math.sqrt(2.0) * b / rb * acc(lambda t: t * t * dF_sum(t), 0.0, TAIL_T)
        - b / rb
        * acc(
            lambda t: dG(t) * (21.0 * t - 193.0 * t**3 + 50.0 * t**5) / (18.0 * math.sqrt(2.0)),
            -TAIL_T,
            TAIL_T,
            knots=(0.0,),
        )
        - b
        / (2.0 * math.sqrt(2.0) * rb)
        * acc(lambda t: dG2(t) * ((5.0 * t * t - 1.0) / 3.0) ** 2, -TAIL_T, TAIL_T, knots=(0.0,))
    )
    leading = b * r ** (2.0 * b) if j == 1 else 0.0
    return CumulantSeries("bulk", j, leading, c, d, e, acc.error)


def edge_cumulant_coeffs(j: int, b: float, alpha: float, s_frak: float) -> CumulantSeries:
    """Coefficients (c_j, d_j, e_j) for the edge disk at parameter s."""
    _check_order(j)
    _flag_extreme_s(s_frak)
    acc = _QuadAccumulator()
    lo = -(TAIL_T + abs(s_frak))

    def dFm(t: float) -> float:
        return _UDerivatives(t).f_minus[j]

    def dFp(t: float) -> float:
        return _UDerivatives(t).f_plus[j]

    def dG(t: float) -> float:
        return _UDerivatives(t).g[j]

    def dG2(t: float) -> float:
        return _UDerivatives(t).g_sq[j]

    c = (
        (math.sqrt(2.0 * b) * s_frak if j == 1 else 0.0)
        + math.sqrt(2.0 * b) * acc(dFm, 0.0, TAIL_T)
        + math.sqrt(2.0 * b) * acc(dFp, 0.0, -s_frak)
    )
    d = (
        (0.5 + alpha) * _UDerivatives(s_frak).f_minus[j]
        - 2.0 * b * acc(lambda t: (2.0 * t - s_frak) * dFm(t), 0.0, TAIL_T)
        + 2.0 * b * acc(lambda t: (2.0 * t + s_frak) * dFp(t), 0.0, -s_frak)
        + b
        * acc(
            lambda t: dG(t) * (5.0 * t * t + 3.0 * s_frak * t - 1.0) / 3.0,
            lo,
            -s_frak,
            knots=(0.0,),
        )
    )
    b32 = (2.0 * b) ** 1.5

    def poly_e(t: float) -> float:
        return (
            21.0 * t
            - 193.0 * t**3
            + 50.0 * t**5
            + 6.0 * s_frak * (1.0 - 29.0 * t * t + 10.0 * t**4)
            - 9.0 * s_frak * s_frak * (3.0 * t - 2.0 * t**3)
        ) / 18.0

    e = (
        b32 * acc(lambda t: (3.0 * t * t - 2.0 * s_frak * t) * dFm(t), 0.0, TAIL_T)
        + b32 * acc(lambda t: (3.0 * t * t + 2.0 * s_frak * t) * dFp(t), 0.0, -s_frak)
        - b**1.5 / math.sqrt(2.0) * acc(lambda t: dG(t) * poly_e(t), lo, -s_frak, knots=(0.0,))
        - b**1.5
        / (2.0 * math.sqrt(2.0))
        * acc(
            lambda t: dG2(t) * ((5.0 * t * t + 3.0 * s_frak * t - 1.0) / 3.0) ** 2,
            lo,
            -s_frak,
            knots=(0.0,),
        )
        + (
            (0.5 + alpha) * (2.0 * s_frak * s_frak - 1.0) / (3.0 * math.sqrt(2.0)) * math.sqrt(b)
            + (1.0 + 6.0 * alpha + 6.0 * alpha * alpha) / (12.0 * math.sqrt(2.0 * b))
        )
        * _UDerivatives(-s_frak).g[j]
    )
    leading = 1.0 if j == 1 else 0.0
    return CumulantSeries("edge", j, leading, c, d, e, acc.error)


def outside_cumulant_coeffs(j: int) -> CumulantSeries:
    """Cumulants for a disk strictly outside the bulk: kappa_1 = n + o(1), rest o(1)."""
    _check_order(j)
    return CumulantSeries("outside", j, 1.0 if j == 1 else 0.0, 0.0, 0.0, 0.0)


def edge_mean_coeffs(b: float, alpha: float, s: float) -> tuple[float, float, float]:
    """Closed forms (c1, d1, e1) of the edge mean expansion, via erfc."""
    E = math.erfc(s)
    gaus = math.exp(-s * s)
    c1 = math.sqrt(b) * s / math.sqrt(2.0) * E - math.sqrt(b) / math.sqrt(2.0 * math.pi) * gaus
    d1 = -0.5 * (0.5 + alpha - b / 2.0) * E - b * s / (3.0 * _SQRT_PI) * gaus
    e1 = (
        gaus
        / math.sqrt(2.0 * math.pi)
        * (
            (b * (2.0 + 4.0 * alpha) - 1.0 - 6.0 * alpha - 6.0 * alpha * alpha) / (12.0 * math.sqrt(b))
            + (3.0 * b - 2.0 - 4.0 * alpha) * s * s / 6.0 * math.sqrt(b)
            - 2.0 * s**4 / 9.0 * b**1.5
        )
    )
    return c1, d1, e1


def edge_var_coeffs(b: float, alpha: float, s: float) -> tuple[float, float, float]:
    """Closed forms (c2, d2, e2) of the edge variance expansion, via erfc."""
    E = math.erfc(s)
    E2 = math.erfc(math.sqrt(2.0) * s)
    gaus = math.exp(-s * s)
    c2 = (
        math.sqrt(b) / (2.0 * _SQRT_PI) * E2
        + math.sqrt(b) * gaus / math.sqrt(2.0 * math.pi) * (1.0 - E)
        + math.sqrt(b) * s / math.sqrt(2.0) * E * (0.5 * E - 1.0)
    )
    d2 = (
        -b / (12.0 * math.pi) * gaus * gaus
        + b * s / (2.0 * math.sqrt(2.0 * math.pi)) * E2
        + b * s / (3.0 * _SQRT_PI) * gaus * (1.0 - E)
        + (b - 1.0 - 2.0 * alpha) / 4.0 * E * (0.5 * E - 1.0)
    )
    e2 = (
        gaus
        / (12.0 * math.sqrt(2.0 * math.pi * b))
        * (
            1.0
            - 2.0 * b
            + 6.0 * alpha
            - 4.0 * b * alpha
            + 6.0 * alpha * alpha
            + 2.0 * (2.0 - 3.0 * b + 4.0 * alpha) * b * s * s
            + 8.0 * b * b / 3.0 * s**4
        )
        * (1.0 - E)
        - b**1.5 * s / (72.0 * math.sqrt(2.0) * math.pi) * gaus * gaus
        - b**1.5 * (1.0 + 4.0 * s * s) / (32.0 * _SQRT_PI) * E2
    )
    return c2, d2, e2


# ---------------------------------------------------------------------------
# partition function expansion


@dataclass(frozen=True)
class ZnExpansion:
    """log Z_n expansion; `constant` is the b-rational Barnes-G constant."""

    value: float
    includes_constant: bool
    constant: float | None
    n1: int | None
    n2: int | None


def _rationalize(b: float, cap: int) -> tuple[int, int] | None:
    frac = Fraction(b).limit_denominator(cap)
    if frac.numerator < 1 or frac.numerator > cap:
        return None
    if abs(float(frac) - b) > 1e-9 * max(1.0, abs(b)):
        return None
    return frac.numerator, frac.denominator


def zn_constant(b: float, alpha: float, n1: int, n2: int) -> float:
    """The constant term for rational b = n1/n2, via zeta'(-1) and Barnes G."""
    total = n1 * n2 * ZETA_PRIME_MINUS_ONE
    total += (b * (n2 - n1) + 2.0 * n1 * alpha) / (4.0 * b) * math.log(2.0 * math.pi)
    total -= (
        (1.0 - 3.0 * b + b * b + 6.0 * alpha - 6.0 * b * alpha + 6.0 * alpha * alpha)
        / (12.0 * b)
        * math.log(n1)
    )
    for jj in range(1, n2 + 1):
        for kk in range(1, n1 + 1):
            total -= log_barnes_g((jj + alpha / b - 1.0) / n2 + kk / n1)
    return total


def zn_expansion(params: EnsembleParams, max_denominator: int = 64) -> ZnExpansion:
    """Asymptotic log Z_n through O(1/n).

    The 1/n coefficient (2a-b+1)(2a^2-2ab+2a-b)/(24b) comes from carrying the
    Euler-Maclaurin expansion of sum_j log Gamma((j+alpha)/b) one order past
    the constant; it vanishes at (b, alpha) = (1, 0).  For b not expressible
    as n1/n2 with n1, n2 <= max_denominator the Barnes-G constant is omitted
    and `includes_constant` is False.
    """
    b, alpha, n = params.b, params.alpha, params.n
    logn = math.log(n)
    value = (
        -(3.0 + 2.0 * math.log(b)) / (4.0 * b) * n * n
        - 0.5 * n * logn
        + (
            math.log(2.0 * math.pi) / 2.0
            + (b - 2.0 * alpha - 1.0) * (1.0 + math.log(b)) / (2.0 * b)
            + math.log(math.pi / b)
        )
        * n
        + (1.0 - 3.0 * b + b * b + 6.0 * alpha - 6.0 * b * alpha + 6.0 * alpha * alpha)
        / (12.0 * b)
        * logn
    )
    value += (
        (2.0 * alpha - b + 1.0)
        * (2.0 * alpha * alpha - 2.0 * alpha * b + 2.0 * alpha - b)
        / (24.0 * b)
        / n
    )
    rat = _rationalize(b, max_denominator)
    if rat is None:
        return ZnExpansion(value, False, None, None, None)
    n1, n2 = rat
    g = zn_constant(b, alpha, n1, n2)
    return ZnExpansion(value + g, True, g, n1, n2)
