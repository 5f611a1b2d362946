"""Evaluation of L(s, f x chi) and its completion.

Lambda(s) = Q^s Gamma(s + kappa) L(s), Q = q sqrt(r) / (2 pi), kappa = (k-1)/2,
is computed by the balanced smoothed approximate functional equation

    Lambda(s) = sum_n lam(n) chi(n) (Q/n)^s Gamma(s+kappa, n/Q)
              + eps * sum_n lam(n) conj(chi(n)) (Q/n)^(1-s) Gamma(1-s+kappa, n/Q).

The kernels do not depend on chi, so ``TwistSweep`` evaluates every
character modulo q at once: the n-sum collapses onto discrete-log classes
and one FFT of length q-1 finishes the job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import special
from .arith import divisor_count_table
from .characters import (
    CharacterTable,
    DirichletCharacter,
    char_value,
    gauss_sum,
    gauss_sums_all,
)
from .errors import DomainError, ResourceError
from .forms import HeckeForm

DEFAULT_ACCURACY = 1e-10
HEIGHT_CAP = 60.0
# Re(s) at or beyond which L is summed directly from its Dirichlet series
DIRECT_SIGMA = 5.0
# incomplete-gamma orders are kept at real part >= this in the AFE
_MIN_ORDER = 0.25
_ROUNDOFF = 4 * np.finfo(float).eps
MP_SWITCH = 1e-6
MP_DPS = 40


def conductor_parameter(q: int, level: int) -> float:
    return q * math.sqrt(level) / (2 * math.pi)


def root_number(form: HeckeForm, chi: DirichletCharacter) -> complex:
    """epsilon(f x chi) = epsilon(f) chi(r) eps_chi^2."""
    if math.gcd(chi.modulus, form.level) != 1:
        raise DomainError(f"q={chi.modulus} and level r={form.level} are not coprime")
    if not chi.primitive:
        raise DomainError("root number needs a primitive character")
    eps_chi = gauss_sum(chi)
    return complex(form.root_number) * char_value(chi, form.level) * eps_chi**2


@dataclass(frozen=True, eq=False)
class TwistedL:
    form: HeckeForm
    chi: DirichletCharacter
    Q: float
    kappa: float
    eps: complex
    target_accuracy: float = DEFAULT_ACCURACY
    height_cap: float = HEIGHT_CAP
    # "double", "mp" or "auto" (double, redone in mpmath when cancellation
    # eats more than MP_SWITCH of the relative accuracy)
    precision: str = "auto"

    def conj(self) -> "TwistedL":
        return twist(self.form, self.chi.conj(), self.target_accuracy, self.height_cap,
                     self.precision)

    @property
    def q(self) -> int:
        return self.chi.modulus


def twist(form: HeckeForm, chi: DirichletCharacter, target_accuracy: float = DEFAULT_ACCURACY,
          height_cap: float = HEIGHT_CAP, precision: str = "auto") -> TwistedL:
    if precision not in ("double", "mp", "auto"):
        raise ValueError(f"unknown precision {precision!r}")
    return TwistedL(
        form=form,
        chi=chi,
        Q=conductor_parameter(chi.modulus, form.level),
        kappa=form.kappa,
        eps=root_number(form, chi),
        target_accuracy=target_accuracy,
        height_cap=height_cap,
        precision=precision,
    )


# -- kernels --------------------------------------------------------------------

def _term_bounds(form: HeckeForm, Q: float, sigma: float, n: np.ndarray) -> np.ndarray:
    """Upper bounds (without the coefficient) for |term_n| of both AFE sums."""
    x = n / Q
    b = special.upper_gamma_real_bound(sigma + form.kappa, x) * x ** (-sigma)
    return b + special.upper_gamma_real_bound(1.0 - sigma + form.kappa, x) * x ** (sigma - 1.0)


def _scan_length(form: HeckeForm, Q: float) -> int:
    # beyond 80 Q every term carries a factor below e^-80
    return min(form.n_max, int(80 * Q) + 64)


def _beyond(form: HeckeForm, Q: float, sigma: float, start: int) -> float:
    """Bound for the AFE tail over n > start using |lam(n)| <= d(n) <= 2 sqrt(n)."""
    n = np.arange(start + 1, start + 1 + int(80 * Q) + 64, dtype=float)
    return float(np.sum(2 * np.sqrt(n) * _term_bounds(form, Q, sigma, n)))


@lru_cache(maxsize=4096)
def _cutoff_at(form_ref, Q: float, sigma: float, target: float) -> int:
    form = form_ref()
    M = _scan_length(form, Q)
    n = np.arange(1, M + 1, dtype=float)
    terms = np.abs(form.lam[1 : M + 1]) * _term_bounds(form, Q, sigma, n)
    tail = np.cumsum(terms[::-1])[::-1]  # tail[i] = sum over n >= i + 1
    beyond = _beyond(form, Q, sigma, M)
    ok = np.nonzero(tail + beyond <= target)[0]
    if beyond > target or len(ok) == 0:
        raise ResourceError(
            f"AFE needs about N={_needed(form, Q, sigma, target, M)} coefficients for "
            f"accuracy {target:g}, table has {form.n_max}"
        )
    return max(int(ok[0]), 1)


def _needed(form, Q, sigma, target, start) -> int:
    n = start
    while _beyond(form, Q, sigma, n) > target and n < 10**9:
        n *= 2
    return n


class _Ref:
    """Identity-hashed handle so lru_cache can key on a form object."""

    def __init__(self, obj):
        self.obj = obj

    def __call__(self):
        return self.obj

    def __hash__(self):
        return id(self.obj)

    def __eq__(self, other):
        return isinstance(other, _Ref) and other.obj is self.obj


SIGMA_GRID = 1 / 32


def afe_cutoff(form: HeckeForm, Q: float, sigma: float, target: float) -> int:
    """Smallest N (up to sigma quantisation) with rigorous AFE truncation tail
    below ``target``.

    Each term bound x^-sigma Gamma(sigma + kappa, x) is log-convex in sigma, so
    on a grid cell the tail is at most its value at one of the two endpoints;
    the larger endpoint cutoff is therefore valid for the whole cell.
    """
    lo = math.floor(sigma / SIGMA_GRID) * SIGMA_GRID
    hi = lo + SIGMA_GRID
    ref = _Ref(form)
    return max(_cutoff_at(ref, float(Q), lo, float(target)), _cutoff_at(ref, float(Q), hi, float(target)))


def afe_kernels(form: HeckeForm, Q: float, s: complex, N: int):
    """Weights w1[n], w2[n] (n = 0..N, index 0 zero) so that
    Lambda = sum chi(n) w1[n] + eps sum conj(chi(n)) w2[n]."""
    n = np.arange(1, N + 1, dtype=float)
    x = n / Q
    logq = np.log(Q / n)
    lam = form.lam[1 : N + 1]
    w1 = np.zeros(N + 1, dtype=complex)
    w2 = np.zeros(N + 1, dtype=complex)
    w1[1:] = lam * np.exp(s * logq) * special.upper_gamma(s + form.kappa, x)
    w2[1:] = lam * np.exp((1 - s) * logq) * special.upper_gamma(1 - s + form.kappa, x)
    return w1, w2


def gamma_factor(Q: float, kappa: float, s: complex) -> complex:
    return complex(np.exp(s * math.log(Q) + special.log_gamma(s + kappa)))


def _in_afe_domain(s: complex, kappa: float) -> bool:
    return (s.real + kappa >= _MIN_ORDER) and (1 - s.real + kappa >= _MIN_ORDER)


def _check_height(TL, s: complex) -> None:
    if abs(s.imag) > TL.height_cap:
        raise DomainError(f"|Im s| = {abs(s.imag):g} exceeds the height cap {TL.height_cap:g}")


# -- single character -------------------------------------------------------------

def _chi_on_range(chi: DirichletCharacter, N: int) -> np.ndarray:
    res = chi.residue_values
    return res[np.arange(N + 1) % chi.modulus]


@dataclass
class Evaluation:
    value: complex
    est_error: float
    cutoff: int = 0
    method: str = "afe"


def completed_lambda_eval(TL: TwistedL, s: complex) -> Evaluation:
    s = complex(s)
    _check_height(TL, s)
    if _in_afe_domain(s, TL.kappa):
        N = afe_cutoff(TL.form, TL.Q, s.real, TL.target_accuracy)
        if TL.precision == "mp":
            return _afe_mp(TL, s)
        w1, w2 = afe_kernels(TL.form, TL.Q, s, N)
        chi = _chi_on_range(TL.chi, N)
        a = np.dot(chi, w1)
        b = np.dot(np.conj(chi), w2)
        val = complex(a + TL.eps * b)
        err = TL.target_accuracy + _ROUNDOFF * float(np.sum(np.abs(w1) + np.abs(w2)))
        # compare with the natural size |Q^s Gamma(s + kappa)| rather than |val|,
        # which is small near every zero without any loss of accuracy
        if TL.precision == "auto" and err > MP_SWITCH * abs(gamma_factor(TL.Q, TL.kappa, s)):
            return _afe_mp(TL, s)
        return Evaluation(val, err, N, "afe")
    if s.real > 0.5:
        L, tail = dirichlet_series_value(TL, s, TL.form.n_max)
        g = gamma_factor(TL.Q, TL.kappa, s)
        return Evaluation(g * L, abs(g) * tail, TL.form.n_max, "series")
    # reflect: Lambda(s, chi) = eps conj(Lambda(1 - conj(s), chi))
    ev = completed_lambda_eval(TL, 1 - s.conjugate())
    return Evaluation(TL.eps * ev.value.conjugate(), ev.est_error, ev.cutoff, "reflected")


def _afe_mp(TL: TwistedL, s: complex) -> Evaluation:
    """The same AFE in mpmath; for large |Im s| where the double-precision
    sum cancels catastrophically.  Working precision grows with the e^(pi|t|/2)
    cancellation and the truncation target is taken relative to |Q^s Gamma(s+kappa)|."""
    import mpmath

    scale = abs(gamma_factor(TL.Q, TL.kappa, s))
    target = min(TL.target_accuracy, 1e-13 * scale)
    N = afe_cutoff(TL.form, TL.Q, s.real, target)
    dps = MP_DPS + int(0.7 * abs(s.imag))
    with mpmath.workdps(dps):
        q = TL.q
        order = q - 1
        j = TL.chi.index
        dlog = TL.chi.table.dlog
        Q = mpmath.mpf(q) * mpmath.sqrt(TL.form.level) / (2 * mpmath.pi)
        kappa = mpmath.mpf(TL.form.weight - 1) / 2
        sm = mpmath.mpc(s.real, s.imag)
        # root number rebuilt at full precision
        g = mpmath.fsum(
            mpmath.expjpi(mpmath.mpf(2 * ((j * int(dlog[a])) % order)) / order)
            * mpmath.expjpi(mpmath.mpf(2 * a) / q)
            for a in range(1, q)
        ) / mpmath.sqrt(q)
        eps = mpmath.mpc(complex(TL.form.root_number)) * g**2
        if TL.form.level % q:
            r_ind = int(dlog[TL.form.level % q])
            eps *= mpmath.expjpi(mpmath.mpf(2 * ((j * r_ind) % order)) / order)
        a_sum = mpmath.mpc(0)
        b_sum = mpmath.mpc(0)
        for n in range(1, N + 1):
            k = int(dlog[n % q])
            raw = TL.form.raw_coeffs[n]
            if k < 0 or raw == 0:
                continue
            lam = mpmath.mpf(raw) / mpmath.mpf(n) ** kappa
            c = mpmath.expjpi(mpmath.mpf(2 * ((j * k) % order)) / order)
            x = mpmath.mpf(n) / Q
            lq = mpmath.log(Q / n)
            a_sum += lam * c * mpmath.exp(sm * lq) * mpmath.gammainc(sm + kappa, x)
            b_sum += lam * mpmath.conj(c) * mpmath.exp((1 - sm) * lq) * mpmath.gammainc(1 - sm + kappa, x)
        val = complex(a_sum + eps * b_sum)
    return Evaluation(val, target + _ROUNDOFF * abs(val), N, "afe-mp")


def completed_lambda(TL: TwistedL, s: complex) -> complex:
    return completed_lambda_eval(TL, s).value


def divisor_tail_bound(sigma: float, N: int, table_max: int | None = None) -> float:
    """Upper bound for sum_{n > N} d(n) n^-sigma."""
    if sigma <= 1:
        return math.inf
    total = 0.0
    M = N
    if table_max is not None and table_max > N:
        d = divisor_count_table(table_max)
        n = np.arange(N + 1, table_max + 1, dtype=float)
        total += float(np.sum(d[N + 1 :] * n ** (-sigma)))
        M = table_max
    # sum_{n>M} d(n) n^-s <= int_M^inf (log u + 2) u^-s du (+ boundary term)
    s1 = sigma - 1
    integral = M ** (-s1) * (math.log(M) / s1 + 1 / s1**2 + 2 / s1)
    return total + 2 * integral + (math.log(M) + 2) * M ** (-sigma)


@lru_cache(maxsize=64)
def _divisor_tail_cached(sigma: float, N: int) -> float:
    return divisor_tail_bound(sigma, N, table_max=min(4 * N, N + 200000))


def dirichlet_series_value(TL: TwistedL, s: complex, N: int | None = None):
    """Partial sum of sum lam(n) chi(n) n^-s over n <= N and a tail bound."""
    s = complex(s)
    if s.real < 1.5:
        raise DomainError("Dirichlet series oracle needs Re(s) >= 1.5")
    N = TL.form.n_max if N is None else int(N)
    if N > TL.form.n_max:
        raise ResourceError(f"N={N} beyond coefficient table {TL.form.n_max}")
    n = np.arange(1, N + 1, dtype=float)
    chi = _chi_on_range(TL.chi, N)[1:]
    val = complex(np.sum(TL.form.lam[1 : N + 1] * chi * np.exp(-s * np.log(n))))
    return val, _divisor_tail_cached(round(s.real, 12), N)


def l_value_eval(TL: TwistedL, s: complex) -> Evaluation:
    s = complex(s)
    _check_height(TL, s)
    if s.real >= DIRECT_SIGMA:
        L, tail = dirichlet_series_value(TL, s)
        return Evaluation(L, tail, TL.form.n_max, "series")
    ev = completed_lambda_eval(TL, s)
    g = gamma_factor(TL.Q, TL.kappa, s)
    return Evaluation(ev.value / g, ev.est_error / abs(g), ev.cutoff, ev.method)


def l_value(TL: TwistedL, s: complex) -> complex:
    return l_value_eval(TL, s).value


def _contour_derivative(f, s: complex, h: float, m: int = 8):
    k = np.arange(m)
    omega = np.exp(2j * np.pi * k / m)
    vals = np.array([f(s + h * w) for w in omega])
    deriv = np.sum(vals * np.conj(omega)) / (m * h)
    center = np.mean(vals)
    return complex(deriv), complex(center), float(np.max(np.abs(vals)))


def lambda_log_derivative(TL: TwistedL, s: complex, h: float | None = None):
    """Lambda'/Lambda at s by trapezoidal contour differences at radii h and h/2.

    Returns (value, error estimate)."""
    s = complex(s)
    h = 0.05 if h is None else h
    f = lambda z: completed_lambda(TL, z)  # noqa: E731
    center = completed_lambda(TL, s)
    d1, _, scale = _contour_derivative(f, s, h)
    d2, _, _ = _contour_derivative(f, s, h / 2)
    if abs(center) < 1e-9 * scale:
        raise DomainError(f"s={s} is too close to a zero of L for a log-derivative")
    return d2 / center, abs(d2 - d1) / abs(center)


def log_derivative(TL: TwistedL, s: complex, h: float | None = None, zeros=None,
                   exclusion: float = 1e-3) -> complex:
    """L'/L(s, f x chi)."""
    s = complex(s)
    if zeros is not None:
        for rho in zeros:
            if abs(s - rho) <= exclusion:
                raise DomainError(f"s={s} within {exclusion} of the zero {rho}")
    dl, _ = lambda_log_derivative(TL, s, h)
    return dl - math.log(TL.Q) - complex(special.digamma(s + TL.kappa))


def log_derivative_series(TL: TwistedL, s: complex, N: int | None = None) -> complex:
    """-sum_{n<=N} Lambda(n) C_f(n) chi(n) n^-s (valid for Re s > 1)."""
    from .forms import cf_table
    from .arith import von_mangoldt_table

    N = TL.form.n_max if N is None else N
    cf = cf_table(TL.form, N).values
    vm = von_mangoldt_table(N)
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    chi = _chi_on_range(TL.chi, N)
    terms = vm * cf * chi * np.exp(-complex(s) * np.log(n))
    return -complex(np.sum(terms[1:]))


# -- every character at once ------------------------------------------------------

@dataclass(eq=False)
class TwistSweep:
    """Evaluates L(s, f x chi_j) for all primitive j = 1..q-2 simultaneously."""

    form: HeckeForm
    table: CharacterTable
    target_accuracy: float = DEFAULT_ACCURACY
    height_cap: float = HEIGHT_CAP
    Q: float = field(init=False)
    kappa: float = field(init=False)
    eps: np.ndarray = field(init=False)

    def __post_init__(self):
        q = self.table.modulus
        if math.gcd(q, self.form.level) != 1:
            raise DomainError(f"q={q} and level r={self.form.level} are not coprime")
        self.Q = conductor_parameter(q, self.form.level)
        self.kappa = self.form.kappa
        n = np.arange(self.form.n_max + 1)
        self._ind = self.table.index_of(n)
        self._ind[0] = -1
        g = gauss_sums_all(self.table)
        r_ind = self.table.ind(self.form.level)
        chi_r = self.table.roots[(np.arange(q - 1) * r_ind) % (q - 1)]
        self.eps = (complex(self.form.root_number) * chi_r * g**2)[1:]

    @property
    def q(self) -> int:
        return self.table.modulus

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, self.q - 1)

    def _classes(self, w: np.ndarray) -> np.ndarray:
        N = len(w) - 1
        ind = self._ind[: N + 1]
        keep = ind >= 0
        h = np.bincount(ind[keep], weights=w[keep].real, minlength=self.q - 1).astype(complex)
        h += 1j * np.bincount(ind[keep], weights=w[keep].imag, minlength=self.q - 1)
        return h

    def char_sums(self, w: np.ndarray) -> np.ndarray:
        """sum_n chi_j(n) w[n] for j = 1..q-2."""
        h = self._classes(w)
        return ((self.q - 1) * np.fft.ifft(h))[1:]

    def conj_char_sums(self, w: np.ndarray) -> np.ndarray:
        """sum_n conj(chi_j(n)) w[n] for j = 1..q-2."""
        return np.fft.fft(self._classes(w))[1:]

    def lambda_values(self, s: complex) -> np.ndarray:
        s = complex(s)
        if abs(s.imag) > self.height_cap:
            raise DomainError(f"|Im s| exceeds the height cap {self.height_cap:g}")
        if _in_afe_domain(s, self.kappa):
            N = afe_cutoff(self.form, self.Q, s.real, self.target_accuracy)
            w1, w2 = afe_kernels(self.form, self.Q, s, N)
            return self.char_sums(w1) + self.eps * self.conj_char_sums(w2)
        if s.real > 0.5:
            return gamma_factor(self.Q, self.kappa, s) * self.series_values(s)
        return self.eps * np.conj(self.lambda_values(1 - s.conjugate()))

    def series_values(self, s: complex) -> np.ndarray:
        n = np.arange(self.form.n_max + 1, dtype=float)
        n[0] = 1.0
        w = self.form.lam * np.exp(-complex(s) * np.log(n))
        w[0] = 0
        return self.char_sums(w)

    def l_values(self, s: complex) -> np.ndarray:
        s = complex(s)
        if s.real >= DIRECT_SIGMA:
            return self.series_values(s)
        return self.lambda_values(s) / gamma_factor(self.Q, self.kappa, s)

    def twisted(self, j: int, precision: str = "auto") -> TwistedL:
        chi = DirichletCharacter(self.table, int(j))
        return twist(self.form, chi, self.target_accuracy, self.height_cap, precision)
