"""High-accuracy scalar special functions.

Everything the rest of the package needs reduces to five scalar primitives:
the complementary error function, log-gamma, the regularized lower incomplete
gamma function P(a, z) = gamma(a, z)/Gamma(a), the transformation
eta(lambda) with eta^2/2 = lambda - 1 - log(lambda), and log of Barnes' G.

P(a, z) is evaluated by one of four regimes selected deterministically from
(a, z):

* ``SERIES_SMALL_Z``      -- lower power series, z < a + 1, a below A_TEMME
* ``CONTINUED_FRACTION``  -- Legendre continued fraction for Q = 1 - P
* ``FIXED_A_LARGE_Z``     -- z so far above a that Q underflows; P = 1
* ``TEMME_UNIFORM``       -- large-a uniform asymptotics
                             P = erfc(-eta sqrt(a/2))/2 - R_a(eta)

The uniform regime keeps two correction terms, R_a(eta) ~
exp(-a eta^2/2)/sqrt(2 pi a) * (c0(eta) + c1(eta)/a), which caps its accuracy
at ~|c2|/(a^2 sqrt(2 pi a)); A_TEMME = 20000 keeps that below 3e-14 absolute.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "A_TEMME",
    "EtaValue",
    "GammaRegime",
    "erfc",
    "eta_of_lambda",
    "gamma_regime",
    "log_barnes_g",
    "log_gamma",
    "reg_lower_gamma",
    "temme_R",
]

# Uniform-asymptotics threshold.  Tunable; must stay high enough that the
# truncated two-term R_a meets the 1e-13 absolute budget (error ~ a^-2.5).
A_TEMME = 20000.0

# Below this |lambda - 1| the defining formula for eta loses ~half its digits
# to cancellation; switch to the power series.
_ETA_SERIES_CUTOFF = 1e-3

# Below this |eta| the closed forms for c0, c1 cancel badly; switch to their
# Taylor expansions about eta = 0.
_C_TAYLOR_CUTOFF = 1e-2

# exp(x) for x below this cannot move P away from {0, 1} at 1e-13 absolute.
_EXP_NEGLIGIBLE = -60.0

# zeta'(-1); 30 digits, mpmath dps=60 (scripts/derive_frozen_constants.py).
ZETA_PRIME_MINUS_ONE = -0.165421143700450929213919066243

# eta = x * (1 - x/3 + 7x^2/36 - ...), x = lambda - 1.  Exact rationals from
# the series reversion of eta^2/2 = x - log(1+x)
# (scripts/derive_frozen_constants.py); first three match the classical ones.
_ETA_SERIES = (
    1.0,
    -1.0 / 3.0,
    7.0 / 36.0,
    -73.0 / 540.0,
    1331.0 / 12960.0,
    -22409.0 / 272160.0,
)

# Taylor coefficients about eta = 0 of c0(eta) = 1/(lambda-1) - 1/eta and
# c1(eta) = 1/eta^3 - 1/(lambda-1)^3 - 1/(lambda-1)^2 - 1/(12(lambda-1)),
# with lambda(eta) the inverse of the eta mapping.  Generated at 60-digit
# precision by scripts/derive_frozen_constants.py; c0(0) = -1/3,
# c1(0) = -1/540 are the removable-singularity limits.
_C0_TAYLOR = (
    -1.0 / 3.0,
    1.0 / 12.0,
    -2.0 / 135.0,
    1.0 / 864.0,
    1.0 / 2835.0,
    -1.7875514403292181e-04,
    3.9192631785224378e-05,
    -2.1854485106799922e-06,
    -1.8540622107151600e-06,
    8.2967113409530860e-07,
    -1.7665952736826079e-07,
    6.7078535434014986e-09,
)
_C1_TAYLOR = (
    -1.0 / 540.0,
    -1.0 / 288.0,
    1.0 / 378.0,
    -9.9022633744855967e-04,
    2.0576131687242798e-04,
    -4.0187757201646091e-07,
    -1.8098550334489978e-05,
    7.6491609160811101e-06,
    -1.6120900894563446e-06,
    4.6471278028074343e-09,
    1.3786334469157210e-07,
    -5.7525456035177050e-08,
)


class GammaRegime(enum.Enum):
    """Evaluation regime for ``reg_lower_gamma``; exactly one per (a, z)."""

    SERIES_SMALL_Z = "series_small_z"
    CONTINUED_FRACTION = "continued_fraction"
    TEMME_UNIFORM = "temme_uniform"
    FIXED_A_LARGE_Z = "fixed_a_large_z"


@dataclass(frozen=True)
class EtaValue:
    """The Temme variable eta together with the ratio lambda = z/a.

    sign(eta) = sign(lambda - 1) and eta^2/2 = lambda - 1 - log(lambda).
    """

    eta: float
    lam: float


def erfc(t: float) -> float:
    """Complementary error function (2/sqrt(pi)) int_t^inf exp(-x^2) dx."""
    if not math.isfinite(t):
        raise ValueError(f"erfc requires finite t, got {t!r}")
    return math.erfc(t)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _log1p_minus(x: float) -> float:
    """x - log(1+x) for x > -1, accurate through the cancellation region."""
    ax = abs(x)
    if ax >= 0.5:
        return x - math.log1p(x)
    # x - log(1+x) = x^2 * sum_{k>=0} (-x)^k / (k+2)
    term = 1.0
    total = 0.5
    k = 1
    while True:
        term *= -x
        contrib = term / (k + 2.0)
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total):
            break
        k += 1
    return x * x * total


def eta_of_lambda(lam: float) -> EtaValue:
    """Map lambda = z/a to eta with eta^2/2 = lambda - 1 - log(lambda)."""
    if not lam > 0:
        raise ValueError(f"eta_of_lambda requires lambda > 0, got {lam!r}")
    x = lam - 1.0
    if abs(x) < _ETA_SERIES_CUTOFF:
        acc = _ETA_SERIES[-1]
        for c in reversed(_ETA_SERIES[:-1]):
            acc = acc * x + c
        eta = x * acc
    else:
        eta = math.copysign(math.sqrt(2.0 * _log1p_minus(x)), x)
    return EtaValue(eta=eta, lam=lam)


# Stirling correction log Gamma(a) - [(a-1/2) log a - a + log(2pi)/2],
# usable at a >= 30 (next term is ~1e-19 there).
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
)


def _stirling_correction(a: float) -> float:
    inv2 = 1.0 / (a * a)
    total = 0.0
    power = 1.0 / a
    for c in _STIRLING:
        total += c * power
        power *= inv2
    return total


def _log_prefactor(a: float, z: float) -> float:
    """log(z^a e^-z / Gamma(a)).

    The direct expression cancels ~a log a against lgamma(a); for large a it
    is rewritten as -a(lambda-1-log lambda) + log(a/2pi)/2 - stirling(a),
    which keeps absolute accuracy ~1e-15 where the prefactor matters.
    """
    if a < 30.0:
        return a * math.log(z) - z - math.lgamma(a)
    x = z / a - 1.0
    return -a * _log1p_minus(x) + 0.5 * math.log(a / (2.0 * math.pi)) - _stirling_correction(a)


def _c0_c1(ev: EtaValue) -> tuple[float, float]:
    eta = ev.eta
    if abs(eta) < _C_TAYLOR_CUTOFF:
        c0 = _C0_TAYLOR[-1]
        c1 = _C1_TAYLOR[-1]
        for k in range(len(_C0_TAYLOR) - 2, -1, -1):
            c0 = c0 * eta + _C0_TAYLOR[k]
            c1 = c1 * eta + _C1_TAYLOR[k]
        return c0, c1
    x = ev.lam - 1.0
    c0 = 1.0 / x - 1.0 / eta
    c1 = 1.0 / eta**3 - 1.0 / x**3 - 1.0 / x**2 - 1.0 / (12.0 * x)
    return c0, c1


def temme_R(a: float, eta: EtaValue) -> float:
    """Two-term correction R_a(eta) of the uniform large-a expansion."""
    if a < A_TEMME:
        raise ValueError(f"temme_R requires a >= {A_TEMME}, got {a!r}")
    c0, c1 = _c0_c1(eta)
    arg = -0.5 * a * eta.eta * eta.eta
    if arg < -745.0:
        return 0.0
    return math.exp(arg) / math.sqrt(2.0 * math.pi * a) * (c0 + c1 / a)


def gamma_regime(a: float, z: float) -> GammaRegime:
    """Deterministic regime selection for ``reg_lower_gamma``."""
    if not a > 0:
        raise ValueError(f"gamma_regime requires a > 0, got {a!r}")
    if not z >= 0:
        raise ValueError(f"gamma_regime requires z >= 0, got {z!r}")
    if a >= A_TEMME:
        return GammaRegime.TEMME_UNIFORM
    if z < a + 1.0:
        return GammaRegime.SERIES_SMALL_Z
    if _log_prefactor(a, z) < _EXP_NEGLIGIBLE:
        return GammaRegime.FIXED_A_LARGE_Z
    return GammaRegime.CONTINUED_FRACTION


def _p_series(a: float, z: float) -> float:
    # P = z^a e^-z / Gamma(a) * sum_{k>=0} z^k / (a (a+1) ... (a+k))
    if z == 0.0:
        return 0.0
    logpre = _log_prefactor(a, z)
    if logpre < -745.0:
        return 0.0
    term = 1.0 / a
    total = term
    k = 1
    while k < 10_000_000:
        term *= z / (a + k)
        total += term
        if term <= 1e-17 * total:
            break
        k += 1
    return min(math.exp(logpre) * total, 1.0)


def _q_contfrac(a: float, z: float) -> float:
    # Q = z^a e^-z / Gamma(a) * CF, modified Lentz on the Legendre fraction.
    logpre = _log_prefactor(a, z)
    if logpre < -745.0:
        return 0.0
    tiny = 1e-300
    b_k = z + 1.0 - a
    c_k = 1.0 / tiny
    d_k = 1.0 / b_k if b_k != 0.0 else 1.0 / tiny
    h = d_k
    for i in range(1, 10_000_000):
        a_k = -i * (i - a)
        b_k += 2.0
        d_k = a_k * d_k + b_k
        if d_k == 0.0:
            d_k = tiny
        c_k = b_k + a_k / c_k
        if c_k == 0.0:
            c_k = tiny
        d_k = 1.0 / d_k
        delta = d_k * c_k
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(logpre) * h


def _p_temme(a: float, z: float) -> float:
    ev = eta_of_lambda(z / a)
    half_erfc = 0.5 * math.erfc(-ev.eta * math.sqrt(0.5 * a))
    p = half_erfc - temme_R(a, ev)
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def reg_lower_gamma(a: float, z: float) -> float:
    """Regularized lower incomplete gamma P(a, z) = gamma(a, z)/Gamma(a)."""
    regime = gamma_regime(a, z)  # also validates the domain
    if z == 0.0:
        return 0.0
    if regime is GammaRegime.TEMME_UNIFORM:
        return _p_temme(a, z)
    if regime is GammaRegime.SERIES_SMALL_Z:
        return _p_series(a, z)
    if regime is GammaRegime.FIXED_A_LARGE_Z:
        return 1.0
    return 1.0 - _q_contfrac(a, z)


# Barnes G.  log G(1+w) = (w^2/2) log w - 3w^2/4 + (w/2) log 2pi
#   - (1/12) log w + zeta'(-1) + sum_k B_{2k+2}/(4k(k+1)) w^{-2k};
# the tail below lists B_{2k+2}/(4k(k+1)) for k = 1..6 as exact rationals.
_BARNES_TAIL = (
    -1.0 / 240.0,
    1.0 / 1008.0,
    -1.0 / 1440.0,
    1.0 / 1056.0,
    -691.0 / 327600.0,
    1.0 / 144.0,
)
_BARNES_MIN_W = 9.0


def _log_barnes_g_asymptotic(w: float) -> float:
    lw = math.log(w)
    total = (0.5 * w * w - 1.0 / 12.0) * lw - 0.75 * w * w
    total += 0.5 * w * math.log(2.0 * math.pi)
    total += ZETA_PRIME_MINUS_ONE
    w2 = w * w
    p = 1.0
    for coeff in _BARNES_TAIL:
        p *= w2
        total += coeff / p
    return total


def log_barnes_g(z: float) -> float:
    """log G(z) for z > 0, G the Barnes G-function (G(z+1) = Gamma(z) G(z))."""
    if not z > 0:
        raise ValueError(f"log_barnes_g requires z > 0, got {z!r}")
    shift = 0
    w = z - 1.0
    while w < _BARNES_MIN_W:
        shift += 1
        w += 1.0
    # G(z) = G(z + shift) / (Gamma(z) Gamma(z+1) ... Gamma(z+shift-1))
    total = _log_barnes_g_asymptotic(w)
    for i in range(shift):
        total -= math.lgamma(z + i)
    return total
