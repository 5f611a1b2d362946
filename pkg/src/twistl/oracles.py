"""Independent reference computations used to cross-check the main code paths.

Nothing here is used by the production paths; every function re-derives its
result by a different (usually slower) route.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def euler_product_coefficients(n_max: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) through q^n_max (pentagonal theorem)."""
    c = [0] * (n_max + 1)
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e <= n_max:
                c[e] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return c


def tau_pentagonal(n_max: int) -> list[int]:
    """Ramanujan tau(1..n_max) from the pentagonal series raised to the 24th power.

    Uses the J.C.P. Miller recurrence for powers of a power series,
    n F_n = sum_j ((m+1) j - n) P_j F_{n-j}, which only touches the sparse
    nonzero pentagonal coefficients.
    """
    m = 24
    deg = n_max - 1
    p = euler_product_coefficients(deg)
    support = [j for j in range(1, deg + 1) if p[j]]
    f = [0] * (deg + 1)
    f[0] = 1
    for n in range(1, deg + 1):
        acc = 0
        for j in support:
            if j > n:
                break
            acc += ((m + 1) * j - n) * p[j] * f[n - j]
        q, r = divmod(acc, n)
        assert r == 0
        f[n] = q
    return f[:n_max]


def smallest_primitive_root_bruteforce(q: int) -> int:
    for g in range(2, q):
        seen = set()
        x = 1
        for _ in range(q - 1):
            x = x * g % q
            seen.add(x)
        if len(seen) == q - 1:
            return g
    raise ValueError(q)


def legendre_symbol(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if any((x * x - a) % q == 0 for x in range(1, q)) else -1


def gauss_sum_direct(values: np.ndarray, q: int) -> complex:
    """q^{-1/2} sum_a chi(a) e(a/q) by a plain Python loop over residues."""
    total = 0j
    for a in range(1, q):
        total += complex(values[a]) * cmath.exp(2j * math.pi * a / q)
    return total / math.sqrt(q)


def divisor_sum_square_zeta(sigma: float, terms: int = 200000) -> float:
    """zeta(sigma)^2 - 1 = sum_{n>=2} d(n) n^{-sigma}, summed directly."""
    n = np.arange(1, terms + 1, dtype=float)
    z = float(np.sum(n ** -sigma))
    # Euler-Maclaurin tail of the zeta sum
    z += terms ** (1 - sigma) / (sigma - 1) - 0.5 * terms ** -sigma
    return z * z - 1.0


def upper_gamma_quadrature(w: complex, x: float) -> complex:
    """int_x^inf e^{-y} y^{w-1} dy by adaptive quadrature (real and imaginary parts)."""
    from scipy.integrate import quad

    def re(y):
        return math.exp(-y) * (y ** (w - 1)).real

    def im(y):
        return math.exp(-y) * (y ** (w - 1)).imag

    upper = x + 60.0 + 4.0 * abs(w)
    kw = dict(limit=800, epsabs=0.0, epsrel=1e-13)
    a = quad(re, x, upper, **kw)[0]
    b = quad(im, x, upper, **kw)[0]
    return complex(a, b)


def diagonal_tuple_sum(lam_p, primes, q: int, t: float, n: int) -> complex:
    """(q-1) sum over 2n-tuples p_1..p_2n with p_1..p_n = p_{n+1}..p_{2n} (mod q)
    of the weight prod lam / sqrt(prod p) * (p_{n+1}..p_{2n} / p_1..p_n)^{it}.

    Brute force over all 2n-tuples; only for tiny inputs.
    """
    import itertools

    total = 0j
    k = len(primes)
    for left in itertools.product(range(k), repeat=n):
        for right in itertools.product(range(k), repeat=n):
            pl = 1
            pr = 1
            wl = 1.0
            for i in left:
                pl *= int(primes[i])
                wl *= lam_p[i]
            for i in right:
                pr *= int(primes[i])
                wl *= lam_p[i]
            if (pl - pr) % q:
                continue
            total += wl / math.sqrt(pl * pr) * cmath.exp(1j * t * math.log(pr / pl))
    return (q - 1) * total
