#!/usr/bin/env python3
"""Derive the frozen constants in mlcounts.specfun at 60-digit precision.

Prints, for pasting into specfun.py after review:

* the eta(lambda) power series about lambda = 1 (series reversion of
  eta^2/2 = x - log(1+x), x = lambda - 1), as exact rationals;
* the Taylor coefficients about eta = 0 of the uniform-asymptotics
  correction functions c0(eta) = 1/(lambda-1) - 1/eta and
  c1(eta) = 1/eta^3 - 1/(lambda-1)^3 - 1/(lambda-1)^2 - 1/(12(lambda-1));
* zeta'(-1), cross-checked against the Glaisher-Kinkelin relation
  log A = 1/12 - zeta'(-1);
* the Barnes-G asymptotic tail coefficients B_{2k+2}/(4k(k+1)).
"""

from fractions import Fraction

from mpmath import bernoulli, exp, glaisher, mp, mpf, nstr, zeta

mp.dps = 60
N = 18


def series_mul(A, B):
    C = [mpf(0)] * N
    for i in range(N):
        if A[i] == 0:
            continue
        for j in range(N - i):
            C[i + j] += A[i] * B[j]
    return C


def series_inv(A):
    B = [mpf(0)] * N
    B[0] = 1 / A[0]
    for n in range(1, N):
        B[n] = -sum(A[i] * B[n - i] for i in range(1, n + 1)) / A[0]
    return B


def series_compose(A, B):
    C = [mpf(0)] * N
    C[0] = A[0]
    P = [mpf(0)] * N
    P[0] = mpf(1)
    for k in range(1, N):
        P = series_mul(P, B)
        for j in range(N):
            if P[j]:
                C[j] += A[k] * P[j]
    return C


def main() -> None:
    # eta = x * H(x): H = sqrt(2 (x - log(1+x))/x^2)
    g = [mpf(2) * (-1) ** k / k for k in range(2, 2 + N)]
    h = [mpf(1)] + [mpf(0)] * (N - 1)
    for n in range(1, N):
        h[n] = (g[n] - sum(h[i] * h[n - i] for i in range(1, n))) / 2
    print("eta series (coefficients of (lambda-1)^k inside the parentheses):")
    for k in range(6):
        print(f"  {k}: {Fraction(str(nstr(h[k], 40))).limit_denominator(10**9)}  = {nstr(h[k], 20)}")

    # reversion: lambda - 1 = eta * B(eta)
    E = [mpf(0)] * N
    for k in range(N - 1):
        E[k + 1] = h[k]
    t = [mpf(0)] * N
    t[1] = mpf(1)
    X = [mpf(0)] * N
    X[1] = mpf(1)
    Ep = [mpf(0)] * N
    for k in range(1, N):
        Ep[k - 1] = k * E[k]
    for _ in range(12):
        EX = series_compose(E, X)
        EpX = series_compose(Ep, X)
        corr = series_mul([EX[i] - t[i] for i in range(N)], series_inv(EpX))
        X = [X[i] - corr[i] for i in range(N)]
    B = [mpf(0)] * N
    for k in range(N - 1):
        B[k] = X[k + 1]

    Binv = series_inv(B)
    B2inv = series_mul(Binv, Binv)
    B3inv = series_mul(B2inv, Binv)
    c0 = [Binv[k + 1] for k in range(N - 1)] + [mpf(0)]
    one_minus_B3inv = [(mpf(1) if k == 0 else mpf(0)) - B3inv[k] for k in range(N)]
    c1 = [mpf(0)] * N
    for m in range(N - 3):
        c1[m] = one_minus_B3inv[m + 3] - B2inv[m + 2] - Binv[m + 1] / 12
    assert abs(one_minus_B3inv[1] - B2inv[0]) < mpf(10) ** -50
    assert abs(one_minus_B3inv[2] - B2inv[1] - Binv[0] / 12) < mpf(10) ** -50
    print("\nc0 Taylor coefficients about eta=0:")
    for k in range(12):
        print(f"  {nstr(c0[k], 20)}")
    print("c1 Taylor coefficients about eta=0:")
    for k in range(12):
        print(f"  {nstr(c1[k], 20)}")

    zp = zeta(-1, derivative=1)
    print("\nzeta'(-1) =", nstr(zp, 35))
    glaisher_check = exp(mpf(1) / 12 - zp)
    print("exp(1/12 - zeta'(-1)) =", nstr(glaisher_check, 30), " (Glaisher A =", nstr(glaisher, 30), ")")

    print("\nBarnes-G tail B_{2k+2}/(4k(k+1)):")
    for k in range(1, 7):
        num = bernoulli(2 * k + 2)
        frac = Fraction(str(nstr(num, 40))).limit_denominator(10**12) / (4 * k * (k + 1))
        print(f"  k={k}: {frac}")


if __name__ == "__main__":
    main()
