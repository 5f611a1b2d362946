"""Gamma-type special functions with complex order.

``upper_gamma(w, x)`` evaluates Gamma(w, x) for one complex ``w`` and an
array of positive reals ``x``.  Two regimes:

* x >= |w| + 1: Legendre continued fraction, modified Lentz iteration;
* otherwise: Gamma(w) minus the lower series
  gamma(w, x) = x^w e^-x sum_k x^k / (w (w+1) ... (w+k)).
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp

from .errors import DomainError

EPS = 1e-15
_TINY = 1e-300
MAX_ITER = 5000


def log_gamma(w):
    return sp.loggamma(w)


def gamma(w):
    return np.exp(sp.loggamma(w))


def digamma(w):
    return sp.psi(w)


def _check_order(w: complex) -> None:
    if abs(w.imag) < 1e-3 and w.real <= 0 and abs(w.real - round(w.real)) < 1e-3:
        raise DomainError(f"incomplete gamma order {w} too close to a pole of Gamma")


def _continued_fraction(w: complex, x: np.ndarray) -> np.ndarray:
    b = x + 1.0 - w
    c = np.full(x.shape, 1.0 / _TINY, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, MAX_ITER):
        an = -i * (i - w)
        b = b + 2.0
        dn = an * d + b
        dn = np.where(np.abs(dn) < _TINY, _TINY, dn)
        cn = b + an / c
        cn = np.where(np.abs(cn) < _TINY, _TINY, cn)
        dn = 1.0 / dn
        delta = cn * dn
        h = np.where(active, h * delta, h)
        d = np.where(active, dn, d)
        c = np.where(active, cn, c)
        active &= np.abs(delta - 1.0) > EPS
        if not active.any():
            break
    else:
        raise DomainError(f"continued fraction for Gamma({w}, x) did not converge")
    return np.exp(w * np.log(x) - x) * h


def _lower_series(w: complex, x: np.ndarray) -> np.ndarray:
    term = np.full(x.shape, 1.0 / w, dtype=complex)
    total = term.copy()
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        if k > MAX_ITER:
            raise DomainError(f"lower series for gamma({w}, x) did not converge")
        term = term * (x / (w + k))
        total = total + np.where(active, term, 0)
        # the ratio x/|w+k| is only guaranteed < 1 once k exceeds x and -Re w
        done = (np.abs(term) <= EPS * np.abs(total)) & (k > x) & (k > -w.real)
        active &= ~done
    return np.exp(w * np.log(x) - x) * total


def lower_gamma(w: complex, x) -> np.ndarray:
    w = complex(w)
    _check_order(w)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _lower_series(w, x)


def upper_gamma(w: complex, x) -> np.ndarray:
    """Gamma(w, x) for complex w and an array of x > 0."""
    w = complex(w)
    _check_order(w)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise DomainError("upper_gamma needs x > 0")
    out = np.empty(x.shape, dtype=complex)
    cf = x >= abs(w) + 1.0
    if cf.any():
        out[cf] = _continued_fraction(w, x[cf])
    if (~cf).any():
        out[~cf] = gamma(w) - _lower_series(w, x[~cf])
    return out


def upper_gamma_real_bound(a: float, x) -> np.ndarray:
    """Gamma(a, x) for real a > 0; bounds |Gamma(a + ib, x)| from above."""
    x = np.asarray(x, dtype=float)
    return sp.gammaincc(a, x) * sp.gamma(a)
