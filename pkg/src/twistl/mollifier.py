"""Mollifier M(s, f x chi) = sum_{l <= L} x_l chi(l) l^-s built from mu_f, and
the character average of |LM - 1|^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import DirichletCharacter
from .errors import DomainError, TwistlError, ValidationError
from .forms import HeckeForm, mu_table
from .lfunc import TwistSweep

C_MAX = 1 / 360


def taper(x: float) -> float:
    """P(x) = 2x on [0, 1/2] and 1 on [1/2, 1]."""
    if not 0 <= x <= 1:
        raise DomainError(f"taper argument {x} outside [0, 1]")
    return 2 * x if x <= 0.5 else 1.0


@dataclass(frozen=True)
class MollifierSpec:
    q: int
    c: float
    L: float  # effective length actually used
    coeffs: np.ndarray  # x_l for l = 0..floor(L), index 0 unused
    override: bool = False

    @property
    def nominal_length(self) -> float:
        return self.q ** self.c

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.coeffs)[0]


def mollifier_spec(form: HeckeForm, q: int, c: float = 0.002, length: float | None = None) -> MollifierSpec:
    """x_l = mu_f(l) P(log(L/l)/log L) for l <= L coprime to the level.

    ``length`` overrides L = q^c; without it c must lie in (0, 1/360)."""
    if length is None:
        if not 0 < c < C_MAX:
            raise ValidationError(f"c={c} outside (0, 1/360); pass a length override")
        L = q**c
    else:
        if length < 1:
            raise ValidationError("mollifier length must be >= 1")
        L = float(length)
    n = int(math.floor(L + 1e-9))
    if n > form.n_max:
        raise ValidationError(f"mollifier length {n} beyond coefficient table {form.n_max}")
    mu = mu_table(form, n).values
    x = np.zeros(n + 1)
    x[1] = 1.0
    if L > 1:
        logL = math.log(L)
        for l in range(2, n + 1):
            if mu[l] == 0 or math.gcd(l, form.level) > 1:
                continue
            x[l] = mu[l] * taper(min(max(math.log(L / l) / logL, 0.0), 1.0))
    x.setflags(write=False)
    return MollifierSpec(q=q, c=c, L=L, coeffs=x, override=length is not None)


def _weights(spec: MollifierSpec, s: complex) -> np.ndarray:
    n = np.arange(len(spec.coeffs), dtype=float)
    n[0] = 1.0
    w = spec.coeffs * np.exp(-complex(s) * np.log(n))
    w[0] = 0
    return w


def m_value(spec: MollifierSpec, chi: DirichletCharacter, s: complex) -> complex:
    w = _weights(spec, s)
    return complex(np.sum(chi.values(np.arange(len(w))) * w))


def m_values(spec: MollifierSpec, sweep: TwistSweep, s: complex) -> np.ndarray:
    """M(s, f x chi_j) for j = 1..q-2."""
    return sweep.char_sums(_weights(spec, s))


@dataclass
class DeviationAverage:
    q: int
    sigma: float
    t: float
    L_effective: float
    average: float
    samples: int


def lm_deviation_average(spec: MollifierSpec, sweep: TwistSweep, sigma: float, t: float) -> DeviationAverage:
    """(1/phi*(q)) sum over primitive chi of |L M (sigma + it) - 1|^2."""
    q = sweep.q
    if spec.q != q:
        raise ValidationError("mollifier and sweep moduli differ")
    if sigma < 0.5 - 1 / math.log(q):
        raise DomainError(f"sigma={sigma} below 1/2 - 1/log q")
    s = complex(sigma, t)
    Lv = sweep.l_values(s)
    bad = np.nonzero(~np.isfinite(Lv))[0]
    if len(bad):
        raise TwistlError(f"L evaluation failed for j={int(sweep.indices[bad[0]])}")
    dev = np.abs(Lv * m_values(spec, sweep, s) - 1) ** 2
    return DeviationAverage(q, sigma, t, spec.L, float(np.mean(dev)), len(dev))


def lm_tail_bound(spec: MollifierSpec, sigma: float) -> float:
    """|LM - 1| <= zeta(sigma)^2 sum_{l >= 2}|x_l| l^-sigma + zeta(sigma)^2 - 1 for sigma > 1,
    from |L| <= zeta^2 and |L - 1| <= zeta^2 - 1."""
    from scipy.special import zeta

    if sigma <= 1:
        raise DomainError("tail bound needs sigma > 1")
    z2 = float(zeta(sigma)) ** 2
    n = np.arange(len(spec.coeffs), dtype=float)
    n[0] = 1.0
    tail = float(np.sum(np.abs(spec.coeffs[2:]) * n[2:] ** -sigma))
    return z2 * tail + z2 - 1
