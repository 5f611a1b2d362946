"""Hecke eigenform coefficient data.

The built-in form is the discriminant function (weight 12, level 1).  Its
integer coefficients come from the eighth power of Jacobi's series for
eta^3, multiplied with Kronecker substitution on GMP integers.  Other forms
are ingested from a JSON file listing a(p) and extended multiplicatively.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import gmpy2
import numpy as np

from .arith import factorize, is_prime, primes_upto, smallest_prime_factor
from .errors import ResourceError, ValidationError

log = logging.getLogger(__name__)

# bytes per stored coefficient, Python big int plus list slot, rough upper bound
_BYTES_PER_COEFF = 96
DEFAULT_MEMORY_CAP = 2 * 1024**3


# -- integer series -----------------------------------------------------------

def _pack(coeffs: list[int], width: int) -> int:
    """Evaluate a nonnegative-coefficient polynomial at 2**width."""
    nbytes = width // 8
    buf = b"".join(c.to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(buf, "little")


def _encode(coeffs: list[int], width: int) -> gmpy2.mpz:
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return gmpy2.mpz(_pack(pos, width)) - gmpy2.mpz(_pack(neg, width))


def _decode(value: gmpy2.mpz, length: int, width: int) -> list[int]:
    """Inverse of _encode for signed slots with |c| < 2**(width-1)."""
    nbytes = width // 8
    half = 1 << (width - 1)
    offset = _pack([half] * length, width)
    raw = int(gmpy2.f_mod_2exp(value + offset, width * length))
    data = raw.to_bytes(length * nbytes, "little")
    out = []
    for i in range(length):
        c = int.from_bytes(data[i * nbytes : (i + 1) * nbytes], "little")
        out.append(c - half)
    return out


def _slot_width(bound: int) -> int:
    bits = bound.bit_length() + 2
    return ((bits + 7) // 8) * 8


def series_mul(a: list[int], b: list[int], length: int) -> list[int]:
    """Truncated product of integer power series (Kronecker substitution)."""
    a = a[:length]
    b = b[:length]
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    width = _slot_width(max(bound, 1))
    prod = _encode(a, width) * _encode(b, width)
    return _decode(prod, length, width)


def jacobi_eta_cube(length: int) -> list[int]:
    """Coefficients of sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}, i.e. prod (1-q^n)^3."""
    c = [0] * length
    k = 0
    while k * (k + 1) // 2 < length:
        c[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return c


def generate_delta_coefficients(n_max: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> list[int]:
    """Ramanujan tau(1), ..., tau(n_max), exact.

    tau(n) is the coefficient of q^(n-1) in (prod (1-q^n)^3)^8.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    need = n_max * _BYTES_PER_COEFF * 4
    if need > memory_cap:
        raise ResourceError(
            f"coefficient table for n_max={n_max} needs ~{need} bytes, cap is {memory_cap}"
        )
    s = jacobi_eta_cube(n_max)
    for _ in range(3):
        s = series_mul(s, s, n_max)
    return s


def _pentagonal_support(limit: int) -> list[tuple[int, int]]:
    """Nonzero (exponent, coefficient) pairs of prod (1 - q^n) up to q^limit."""
    out = []
    k = 1
    while k * (3 * k - 1) // 2 <= limit:
        sign = -1 if k % 2 else 1
        out.append((k * (3 * k - 1) // 2, sign))
        if k * (3 * k + 1) // 2 <= limit:
            out.append((k * (3 * k + 1) // 2, sign))
        k += 1
    out.sort()
    return out


def extend_delta_coefficients(prefix: list[int], n_max: int) -> list[int]:
    """Extend tau(1..len(prefix)) to tau(1..n_max) without redoing the series.

    Composite n come from multiplicativity and the Hecke recursion; only
    primes need the power-series recurrence k F_k = sum_j (25 j - k) P_j F_{k-j}
    for F = prod (1 - q^n)^24, F_k = tau(k + 1).
    """
    tau = [0] + list(prefix)
    start = len(prefix)
    if n_max <= start:
        return list(prefix[:n_max])
    spf = smallest_prime_factor(n_max)
    support = _pentagonal_support(n_max)
    for n in range(start + 1, n_max + 1):
        p = int(spf[n])
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        if m > 1:
            tau.append(tau[m] * tau[n // m])
        elif e >= 2:
            pe = n // p
            tau.append(tau[p] * tau[pe] - p**11 * tau[pe // p])
        else:
            k = n - 1
            acc = 0
            for j, c in support:
                if j > k:
                    break
                acc += (25 * j - k) * c * tau[k - j + 1]
            tau.append(acc // k)
    return tau[1:]


# -- forms ----------------------------------------------------------------------

@dataclass(eq=False)
class HeckeForm:
    """A holomorphic newform with trivial nebentypus.

    ``raw_coeffs[n]`` is the arithmetically normalised a(n) (index 0 unused);
    ``lam[n] = a(n) / n^((k-1)/2)``.
    """

    weight: int
    level: int
    raw_coeffs: list[int]
    lam: np.ndarray
    ap: dict[int, int]
    root_number: complex = 1.0
    name: str = "form"
    source: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return len(self.lam) - 1

    @property
    def kappa(self) -> float:
        return (self.weight - 1) / 2

    def nebentypus(self, n: int) -> int:
        return 1 if math.gcd(n, self.level) == 1 else 0

    def lam_at(self, n: int) -> float:
        if n <= self.n_max:
            return float(self.lam[n])
        return hecke_extend(self, n)


def normalize(a: int, n: int, weight: int) -> float:
    # int / int is correctly rounded; one more rounding in sqrt
    val = math.sqrt((a * a) / (n ** (weight - 1)))
    return -val if a < 0 else val


def _normalized_table(raw: list[int], weight: int) -> np.ndarray:
    lam = np.zeros(len(raw))
    for n in range(1, len(raw)):
        lam[n] = normalize(raw[n], n, weight)
    lam.setflags(write=False)
    return lam


def _prime_power_raw(ap: int, p: int, e: int, weight: int, chi_r: int) -> int:
    """a(p^e) from a(p) by a(p^{m+1}) = a(p) a(p^m) - chi_r(p) p^{k-1} a(p^{m-1})."""
    pk = p ** (weight - 1)
    prev, cur = 1, ap
    if e == 0:
        return 1
    for _ in range(e - 1):
        prev, cur = cur, ap * cur - chi_r * pk * prev
    return cur


def _raw_from_ap(ap: dict[int, int], n_max: int, weight: int, level: int) -> list[int]:
    spf = smallest_prime_factor(max(n_max, 2))
    raw = [0] * (n_max + 1)
    if n_max >= 1:
        raw[1] = 1
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        if p not in ap:
            raise ValidationError(f"missing a(p) for prime p={p}")
        chi_r = 1 if level % p else 0
        raw[n] = _prime_power_raw(ap[p], p, e, weight, chi_r) * raw[m]
    return raw


def hecke_extend(form: HeckeForm, n: int) -> float:
    """lambda_f(n) from the stored a(p), by multiplicativity and the Hecke recursion."""
    if n < 1:
        raise ValidationError("n must be positive")
    if n == 1:
        return 1.0
    total = 1
    for p, e in sorted(factorize(n).items()):
        if p not in form.ap:
            raise ValidationError(f"missing a(p) for prime p={p}")
        if form.level % p == 0:
            total *= form.ap[p] ** e
        else:
            total *= _prime_power_raw(form.ap[p], p, e, form.weight, 1)
    return normalize(total, n, form.weight)


def check_deligne(form: HeckeForm, upto: int | None = None) -> int | None:
    """First n violating a(n)^2 <= d(n)^2 n^(k-1), or None.  Exact integers."""
    upto = form.n_max if upto is None else min(upto, form.n_max)
    d = np.zeros(upto + 1, dtype=np.int64)
    for i in range(1, upto + 1):
        d[i::i] += 1
    k1 = form.weight - 1
    for n in range(1, upto + 1):
        a = form.raw_coeffs[n]
        if a * a > int(d[n]) ** 2 * n**k1:
            return n
    return None


def delta_form(n_max: int = 20000, cache_dir: str | os.PathLike | None = None) -> HeckeForm:
    if cache_dir is not None:
        from .cache import cached_delta_coefficients

        raw = cached_delta_coefficients(n_max, cache_dir)
    else:
        raw = generate_delta_coefficients(n_max)
    raw = [0] + list(raw[:n_max])
    ap = {int(p): raw[int(p)] for p in primes_upto(n_max)}
    return HeckeForm(
        weight=12,
        level=1,
        raw_coeffs=raw,
        lam=_normalized_table(raw, 12),
        ap=ap,
        root_number=1.0,
        name="delta",
        source={"builtin": "delta", "n_max": n_max},
    )


def load_form(path: str | os.PathLike, n_max: int | None = None, cache_dir=None) -> HeckeForm:
    """Load a form from a JSON form file, or the built-in ``"delta"``.

    File schema::

        {"weight": 12, "level": 1, "nebentypus": "trivial",
         "normalization": "arithmetic", "ap": [[2, -24], [3, 252], ...],
         "root_number": 1, "n_max": 100}

    ``n_max`` defaults to the largest listed prime.  All primes up to n_max
    must be present.
    """
    if str(path) == "delta":
        return delta_form(n_max or 20000, cache_dir=cache_dir)
    text = Path(path).read_bytes()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("weight", "level", "ap"):
        if key not in spec:
            raise ValidationError(f"{path}: missing field '{key}'")
    weight, level = int(spec["weight"]), int(spec["level"])
    if weight <= 0 or weight % 2:
        raise ValidationError(f"weight must be even and positive, got {weight}")
    if level < 1:
        raise ValidationError(f"level must be positive, got {level}")
    neb = spec.get("nebentypus", "trivial")
    if neb != "trivial":
        raise ValidationError(f"nebentypus: only 'trivial' is supported, got {neb!r}")
    norm = spec.get("normalization", "arithmetic")
    if norm != "arithmetic":
        raise ValidationError(f"normalization: only 'arithmetic' is supported, got {norm!r}")

    ap: dict[int, int] = {}
    for i, entry in enumerate(spec["ap"]):
        p, a = int(entry[0]), int(entry[1])
        if not is_prime(p):
            raise ValidationError(f"ap[{i}]: {p} is not prime")
        bound = 4 * p ** (weight - 1) if level % p else p ** (weight - 2)
        if a * a > bound:
            raise ValidationError(f"ap[{i}]: a({p})={a} violates the Deligne bound")
        ap[p] = a
    if not ap:
        raise ValidationError("ap list is empty")
    limit = int(spec.get("n_max", n_max or max(ap)))
    for p in primes_upto(limit):
        if int(p) not in ap:
            raise ValidationError(f"ap: missing prime p={int(p)} below n_max={limit}")

    raw = _raw_from_ap(ap, limit, weight, level)
    form = HeckeForm(
        weight=weight,
        level=level,
        raw_coeffs=raw,
        lam=_normalized_table(raw, weight),
        ap=ap,
        root_number=complex(spec.get("root_number", 1)),
        name=spec.get("name", Path(path).stem),
        source={"path": str(path), "sha256": hashlib.sha256(text).hexdigest(), "n_max": limit},
    )
    bad = check_deligne(form)
    if bad is not None:
        raise ValidationError(f"Deligne bound fails at n={bad}")
    if abs(abs(form.root_number) - 1) > 1e-12:
        raise ValidationError("root_number must have modulus 1")
    return form


# -- derived arithmetic functions ------------------------------------------------

@dataclass(frozen=True, eq=False)
class ArithmeticFunctionTable:
    kind: str  # "mu_f", "C_f" or "Lambda"
    values: np.ndarray


def mu_f(form: HeckeForm, n: int) -> float:
    """Dirichlet-convolution inverse of lambda_f at n."""
    if n > form.n_max:
        raise ValidationError(f"n={n} beyond table range {form.n_max}")
    out = 1.0
    for p, e in factorize(n).items():
        if e == 1:
            out *= -form.lam[p]
        elif e == 2:
            out *= form.nebentypus(p)
        else:
            return 0.0
    return float(out)


def cf_coefficient(form: HeckeForm, n: int) -> float:
    """C_f(n): alpha^m + beta^m at n = p^m, else 0 (Newton power sums)."""
    if n > form.n_max:
        raise ValidationError(f"n={n} beyond table range {form.n_max}")
    f = factorize(n) if n > 1 else {}
    if len(f) != 1:
        return 0.0
    ((p, m),) = f.items()
    e1 = float(form.lam[p])
    e2 = form.nebentypus(p)
    prev, cur = 2.0, e1
    for _ in range(m - 1):
        prev, cur = cur, e1 * cur - e2 * prev
    return cur


def mu_table(form: HeckeForm, n_max: int | None = None) -> ArithmeticFunctionTable:
    n_max = form.n_max if n_max is None else n_max
    if n_max > form.n_max:
        raise ValidationError(f"n_max={n_max} beyond table range {form.n_max}")
    spf = smallest_prime_factor(max(n_max, 2))
    mu = np.zeros(n_max + 1)
    if n_max >= 1:
        mu[1] = 1.0
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, e = n // p, 1
        while m % p == 0:
            m //= p
            e += 1
        if e == 1:
            mu[n] = -form.lam[p] * mu[m]
        elif e == 2:
            mu[n] = form.nebentypus(p) * mu[m]
    return ArithmeticFunctionTable("mu_f", mu)


def cf_table(form: HeckeForm, n_max: int | None = None) -> ArithmeticFunctionTable:
    n_max = form.n_max if n_max is None else n_max
    if n_max > form.n_max:
        raise ValidationError(f"n_max={n_max} beyond table range {form.n_max}")
    c = np.zeros(n_max + 1)
    for p in primes_upto(n_max):
        p = int(p)
        e1 = float(form.lam[p])
        e2 = form.nebentypus(p)
        prev, cur = 2.0, e1
        pk = p
        while pk <= n_max:
            c[pk] = cur
            prev, cur = cur, e1 * cur - e2 * prev
            pk *= p
    return ArithmeticFunctionTable("C_f", c)


def von_mangoldt(n_max: int) -> ArithmeticFunctionTable:
    from .arith import von_mangoldt_table

    return ArithmeticFunctionTable("Lambda", von_mangoldt_table(n_max))
