"""Elementary arithmetic tables: sieves, divisor counts, von Mangoldt."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def smallest_prime_factor(n_max: int) -> np.ndarray:
    spf = np.zeros(n_max + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, n_max + 1):
        if spf[p] == 0:
            spf[p] = p
            if p * p <= n_max:
                block = spf[p * p :: p]
                block[block == 0] = p
    spf.setflags(write=False)
    return spf


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    spf = smallest_prime_factor(int(n))
    idx = np.arange(len(spf))
    return idx[(spf == idx) & (idx >= 2)]


def factorize(n: int, spf: np.ndarray | None = None) -> dict[int, int]:
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    if spf is not None and n < len(spf):
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int, spf: np.ndarray | None = None) -> tuple[int, int] | None:
    """(p, m) with n = p**m, or None."""
    if n < 2:
        return None
    f = factorize(n, spf)
    if len(f) != 1:
        return None
    ((p, m),) = f.items()
    return p, m


def divisor_count_table(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for i in range(1, n_max + 1):
        d[i::i] += 1
    return d


def von_mangoldt_table(n_max: int) -> np.ndarray:
    lam = np.zeros(n_max + 1)
    for p in primes_upto(n_max):
        p = int(p)
        lp = math.log(p)
        pk = p
        while pk <= n_max:
            lam[pk] = lp
            pk *= p
    return lam


def prime_power_table(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays base[n], expo[n]: n = base**expo for prime powers, zeros elsewhere."""
    base = np.zeros(n_max + 1, dtype=np.int64)
    expo = np.zeros(n_max + 1, dtype=np.int64)
    for p in primes_upto(n_max):
        p = int(p)
        pk, m = p, 1
        while pk <= n_max:
            base[pk] = p
            expo[pk] = m
            pk *= p
            m += 1
    return base, expo


def primitive_root(q: int) -> int:
    """Smallest primitive root modulo the prime q."""
    if q == 2:
        return 1
    fac = factorize(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // ell, q) != 1 for ell in fac):
            return g
    raise ValueError(f"no primitive root mod {q}")


def dirichlet_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a * b)(n) for 1 <= n < len(a); index 0 is ignored."""
    n_max = min(len(a), len(b)) - 1
    out = np.zeros(n_max + 1, dtype=np.result_type(a, b))
    for d in range(1, n_max + 1):
        if a[d] == 0:
            continue
        out[d::d] += a[d] * b[1 : n_max // d + 1]
    return out
