"""The argument S(t, f x chi), its prime-sum main term, and the smoothed
explicit formula with weights Lambda_x(n)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .arith import primes_upto, von_mangoldt_table
from .contour import MIN_STEP, track_phase
from .errors import CoverageError, DomainError, PathError
from .forms import cf_table
from .lfunc import TwistedL, TwistSweep, l_value, log_derivative
from .zeros import ZeroList

SIGMA0 = 3.0
ARG_STEP = 0.05
TRIVIAL_TERMS = 50


def cube_limit(x: float) -> int:
    """floor(x^3), robust to x = n^(1/3) round-off."""
    return int(math.floor(x**3 + 1e-9))


# -- S(t) ---------------------------------------------------------------------------

@dataclass
class ArgTrack:
    S: np.ndarray
    failed: np.ndarray
    where: list
    evaluations: int


def _arg_path(t: float):
    return lambda u: np.asarray(u) + 1j * t


def _s_arg_track(func, t: float, sigma0: float, step: float, min_step: float) -> ArgTrack:
    if t == 0:
        raise DomainError("S(t) is defined here for t != 0")
    start = np.asarray(func(np.array([complex(sigma0, t)])))[0]
    start = np.atleast_1d(start)
    tr = track_phase(func, _arg_path(t), sigma0, 0.5, step, min_step=min_step)
    S = (np.angle(start) + tr.change) / math.pi
    return ArgTrack(S, tr.failed, tr.where, tr.evaluations)


def s_arg(TL: TwistedL, t: float, sigma0: float = SIGMA0, step: float = ARG_STEP,
          min_step: float = MIN_STEP, zeros: ZeroList | None = None, exclusion: float = 1e-6) -> float:
    """S(t) = arg L(1/2 + it) / pi, continued from sigma0 + it leftwards.

    At sigma0 >= 3, |L - 1| <= zeta(3)^2 - 1 < 1 so the principal value is the
    right branch to start from."""
    if zeros is not None and np.any(np.abs(zeros.ordinates - t) <= exclusion):
        raise DomainError(f"t={t} within {exclusion} of a zero ordinate")

    def func(pts):
        return np.array([l_value(TL, complex(z)) for z in np.atleast_1d(pts)])

    tr = _s_arg_track(func, t, sigma0, step, min_step)
    if tr.failed[0]:
        raise PathError(f"phase jump unresolved near {tr.where[0]}", where=tr.where[0].real)
    return float(tr.S[0])


def s_arg_all(sweep: TwistSweep, t: float, sigma0: float = SIGMA0, step: float = ARG_STEP,
              min_step: float = MIN_STEP) -> ArgTrack:
    """S(t) for every primitive character j = 1..q-2 on one shared path."""

    def func(pts):
        return np.array([sweep.l_values(complex(z)) for z in np.atleast_1d(pts)])

    return _s_arg_track(func, t, sigma0, step, min_step)


# -- prime sums ----------------------------------------------------------------------

def _prime_weights(TL_or_form, x3: int, t: float, sigma: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    form = TL_or_form.form if hasattr(TL_or_form, "form") else TL_or_form
    if x3 > form.n_max:
        raise DomainError(f"x^3 = {x3} exceeds the coefficient table ({form.n_max})")
    p = primes_upto(x3)
    w = form.lam[p] * np.exp(-complex(sigma, t) * np.log(p.astype(float)))
    return p, w


def m_sum(TL: TwistedL, t: float, x: float | None = None, x_cubed: int | None = None) -> float:
    """M(t) = (1/pi) Im sum_{p <= x^3} C_f(p) chi(p) p^(-1/2-it), with C_f(p) = lam(p)."""
    x3 = _resolve_x3(x, x_cubed)
    p, w = _prime_weights(TL, x3, t)
    chi = TL.chi.values(p)
    return float(np.sum(chi * w).imag / math.pi)


def m_sum_all(sweep: TwistSweep, t: float, x: float | None = None, x_cubed: int | None = None) -> np.ndarray:
    x3 = _resolve_x3(x, x_cubed)
    p, w = _prime_weights(sweep.form, x3, t)
    full = np.zeros(x3 + 1, dtype=complex)
    full[p] = w
    return sweep.char_sums(full).imag / math.pi


def _resolve_x3(x, x_cubed) -> int:
    if x_cubed is not None:
        return int(x_cubed)
    if x is None:
        raise DomainError("give x or x_cubed")
    return cube_limit(x)


# -- Lambda_x -------------------------------------------------------------------------

def _taper_weight(n, x: float):
    """Lambda_x(n) / Lambda(n) as a function of u = log n / log x."""
    n = np.asarray(n, dtype=float)
    u = np.log(n) / math.log(x)
    out = np.where(u <= 1, 1.0, 0.0)
    mid = (u > 1) & (u <= 2)
    out = np.where(mid, (np.log(x**3 / n) ** 2 - 2 * np.log(x**2 / n) ** 2) / (2 * math.log(x) ** 2), out)
    hi = (u > 2) & (u < 3)
    out = np.where(hi, np.log(x**3 / n) ** 2 / (2 * math.log(x) ** 2), out)
    return out


def lambda_x_weight(n: int, x: float) -> float:
    """Selberg's smoothed von Mangoldt weight Lambda_x(n)."""
    if n < 1:
        raise DomainError("n must be positive")
    if n >= x**3:
        return 0.0
    vm = von_mangoldt_table(n)[n]
    if vm == 0:
        return 0.0
    return float(vm * _taper_weight(n, x))


def lambda_x_table(x: float, n_max: int | None = None) -> np.ndarray:
    """Lambda_x(n) for n = 0..n_max (default floor(x^3))."""
    n_max = cube_limit(x) if n_max is None else n_max
    vm = von_mangoldt_table(n_max)
    n = np.arange(n_max + 1, dtype=float)
    n[0] = 1.0
    w = vm * _taper_weight(n, x)
    w[n >= x**3] = 0.0
    w[0] = 0.0
    return w


def _explicit_weights(TL_or_form, x: float, s: complex, divide_log: bool = False) -> np.ndarray:
    """C_f(n) Lambda_x(n) n^-s (optionally / log n) for n <= x^3."""
    form = TL_or_form.form if hasattr(TL_or_form, "form") else TL_or_form
    N = cube_limit(x)
    if N > form.n_max:
        raise DomainError(f"x^3 = {N} exceeds the coefficient table ({form.n_max})")
    lx = lambda_x_table(x, N)
    cf = cf_table(form, N).values
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    w = cf * lx * np.exp(-complex(s) * np.log(n))
    if divide_log:
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(lx != 0, w / np.log(n), 0)
    w[0] = 0
    return w


def explicit_sum(TL: TwistedL, s: complex, x: float, divide_log: bool = False) -> complex:
    w = _explicit_weights(TL, x, s, divide_log)
    chi = TL.chi.values(np.arange(len(w)))
    return complex(np.sum(chi * w))


# -- sigma_x --------------------------------------------------------------------------

def coverage_radius(x: float) -> float:
    """Largest reach x^(3/2)/log x of the zero condition |t - gamma| <= x^(3|beta-1/2|)/log x."""
    return x**1.5 / math.log(x)


def sigma_x_estimate(TL: TwistedL, t: float, x: float, zeros: ZeroList, tol: float = 1e-6) -> float:
    """1/2 + 2 max(|beta - 1/2|, 5/log x) over zeros with
    |t - gamma| <= x^(3|beta-1/2|)/log x."""
    W = coverage_radius(x)
    if not zeros.covers(t - W, t + W):
        raise CoverageError(
            f"zero list window {zeros.window} does not cover [{t - W:.4g}, {t + W:.4g}]"
        )
    dev = 5 / math.log(x)
    for rho in zeros.offline:
        d = abs(rho.real - 0.5)
        if d <= tol:
            continue
        if abs(t - rho.imag) <= x ** (3 * d) / math.log(x):
            dev = max(dev, d)
    return 0.5 + 2 * dev


# -- decomposition --------------------------------------------------------------------

@dataclass
class ArgDecomposition:
    t: float
    S: float
    M: float
    R: float
    x: float
    sigma_x: float
    main: float
    err1: float
    err2: float
    majorants: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.S - self.main)


def _error_majorants(TL: TwistedL, t: float, x: float, sigma_x: float) -> dict:
    form = TL.form
    N = cube_limit(x)
    p = primes_upto(N).astype(int)
    pf = p.astype(float)
    chi_p = TL.chi.values(p)
    lam_p = form.lam[p]
    lx_p = lambda_x_table(x, N)[p]
    vm_p = np.log(pf)
    t1 = abs(np.sum(lam_p * (lx_p - vm_p) * chi_p * pf ** complex(-0.5, -t) / np.log(pf)).imag)
    # squares of primes up to x^(3/2)
    p2 = p[p * p <= N]
    cf2 = cf_table(form, N).values[p2 * p2]
    lx2 = lambda_x_table(x, N)[p2 * p2]
    chi2 = TL.chi.values(p2 * p2)
    p2f = p2.astype(float)
    t2 = abs(np.sum(cf2 * lx2 * chi2 * p2f ** complex(-1.0, -2 * t) / np.log(p2f)).imag)

    def integrand(sig):
        v = np.sum(lam_p * lx_p * chi_p * np.log(x * pf) * pf ** complex(-sig, -t))
        return x ** (0.5 - sig) * abs(v)

    upper = 0.5 + 60 / math.log(x)
    integral = quad(integrand, 0.5, upper, limit=200)[0]
    t3 = (sigma_x - 0.5) * x ** (sigma_x - 0.5) * integral
    t4 = (sigma_x - 0.5) * math.log(TL.q * (abs(t) + 3))
    return {"G1": float(t1), "G2": float(t2), "G3": float(t3), "G4": float(t4), "G5": 1.0}


def approx_s_decomposition(TL: TwistedL, t: float, x: float, zeros: ZeroList,
                           S: float | None = None) -> ArgDecomposition:
    if t == 0:
        raise DomainError("t must be nonzero")
    if x < 4:
        raise DomainError("x must be at least 4")
    sx = sigma_x_estimate(TL, t, x, zeros)
    if S is None:
        S = s_arg(TL, t)
    s = complex(sx, t)
    main = explicit_sum(TL, s, x, divide_log=True).imag / math.pi
    err1 = (sx - 0.5) * abs(explicit_sum(TL, s, x))
    err2 = (sx - 0.5) * math.log(TL.q * (abs(t) + 3))
    M = m_sum(TL, t, x=x)
    maj = _error_majorants(TL, t, x, sx)
    R = S - M
    return ArgDecomposition(
        t=t, S=S, M=M, R=R, x=x, sigma_x=sx, main=main, err1=err1, err2=err2,
        majorants=maj,
        diagnostics={
            "residual_over_errors": abs(S - main) / (err1 + err2 + 1),
            "R_over_majorants": abs(R) / sum(maj.values()),
        },
    )


def grh_ratio(S: float, q: int, t: float) -> float:
    """S / (log(q(|t|+3)) / loglog(q(|t|+3)))."""
    c = math.log(q * (abs(t) + 3))
    return S / (c / math.log(c))


def grh_cutoff(q: int, t: float) -> float:
    """x = (log(q(|t|+3)))^(2/3)."""
    return math.log(q * (abs(t) + 3)) ** (2 / 3)


# -- explicit formula -------------------------------------------------------------------

def _kernel(u: complex, x: float) -> complex:
    xu = cmath.exp(u * math.log(x))
    return xu * (1 - xu) ** 2 / u**3


def zero_density_bound(Q: float, height: float) -> float:
    """Generous zeros-per-unit-height majorant (2/pi)(log(Q(|T|+6)) + 1)."""
    return (2 / math.pi) * (math.log(Q * (abs(height) + 6)) + 1)


@dataclass
class ExplicitFormulaCheck:
    residual: float
    tail_estimate: float
    lhs: complex
    rhs: complex
    zeros_used: int
    window: float
    trivial_terms: int = TRIVIAL_TERMS


def explicit_formula_residual(TL: TwistedL, s: complex, x: float, zeros: ZeroList,
                              window: float = 10.0, trivial_terms: int = TRIVIAL_TERMS) -> ExplicitFormulaCheck:
    """|L'/L(s) - RHS| for the smoothed explicit formula with the zero sum cut
    to |gamma - Im s| <= window, and an a-priori bound for the omitted zeros."""
    s = complex(s)
    if s.real < 1.5:
        raise DomainError("explicit-formula check needs Re(s) >= 1.5")
    lo, hi = s.imag - window, s.imag + window
    if not zeros.covers(lo, hi):
        raise CoverageError(f"zero list window {zeros.window} does not cover [{lo:.4g}, {hi:.4g}]")
    lx2 = math.log(x) ** 2
    rhs = -explicit_sum(TL, s, x)
    used = 0
    for rho in zeros.zeros():
        if lo <= rho.imag <= hi:
            rhs -= _kernel(rho - s, x) / lx2
            used += 1
    for m in range(trivial_terms + 1):
        rhs -= _kernel(complex(-m - TL.kappa) - s, x) / lx2
    lhs = log_derivative(TL, s)
    sig = s.real
    amp = x ** (1 - sig) * (1 + x ** (1 - sig)) ** 2 / lx2

    def density_over_cube(d):
        return (zero_density_bound(TL.Q, abs(s.imag) + d)) / d**3

    tail = amp * 2 * quad(density_over_cube, window, np.inf)[0]
    return ExplicitFormulaCheck(abs(lhs - rhs), tail, lhs, rhs, used, window, trivial_terms)
