"""Arbitrary-precision reference evaluations for diagnostics and tests.

Nothing here runs on the production path; mpmath is imported lazily so the
core package works without it.  ``reference_reg_lower_gamma`` is the
brute-force series/continued-fraction evaluation used to validate
``specfun.reg_lower_gamma`` (mpmath's own gammainc stalls for a >~ 1e4).
"""

from __future__ import annotations

__all__ = ["accuracy_map", "reference_reg_lower_gamma"]


def reference_reg_lower_gamma(a: float, z: float, dps: int = 50) -> float:
    """P(a, z) summed in dps-digit arithmetic; returned as float."""
    from mpmath import mp, mpf

    with mp.workdps(dps):
        aa, zz = mpf(a), mpf(z)
        if zz == 0:
            return 0.0
        tol = mpf(10) ** (-dps - 5)
        if zz < aa + 1:
            # lower series
            term = 1 / aa
            total = term
            k = 1
            while True:
                term *= zz / (aa + k)
                total += term
                if term <= tol * total:
                    break
                k += 1
            p = mp.e ** (aa * mp.log(zz) - zz - mp.loggamma(aa)) * total
            return float(p)
        # Legendre continued fraction for Q, modified Lentz
        tiny = mpf(10) ** (-2 * dps - 50)
        b_k = zz + 1 - aa
        c_k = 1 / tiny
        d_k = 1 / b_k if b_k != 0 else 1 / tiny
        h = d_k
        i = 1
        while True:
            a_k = -i * (i - aa)
            b_k += 2
            d_k = a_k * d_k + b_k
            if d_k == 0:
                d_k = tiny
            c_k = b_k + a_k / c_k
            if c_k == 0:
                c_k = tiny
            d_k = 1 / d_k
            delta = d_k * c_k
            h *= delta
            if abs(delta - 1) < tol:
                break
            i += 1
        logq = aa * mp.log(zz) - zz - mp.loggamma(aa) + mp.log(h)
        return float(1 - mp.e**logq)


def accuracy_map(a_values, lam_values, dps: int = 50):
    """Rows (a, lambda, regime, abs_err_vs_oracle) for the specfun-test dump."""
    from .specfun import gamma_regime, reg_lower_gamma

    rows = []
    for a in a_values:
        for lam in lam_values:
            z = lam * a
            mine = reg_lower_gamma(a, z)
            truth = reference_reg_lower_gamma(a, z, dps=dps)
            rows.append((a, lam, gamma_regime(a, z).value, abs(mine - truth)))
    return rows
