"""Zeros of L(s, f x chi): line scans, rectangle counts, density averages."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .contour import rectangle_winding
from .errors import AuditError, DomainError, PathError
from .lfunc import TwistedL, TwistSweep, completed_lambda, completed_lambda_eval

log = logging.getLogger(__name__)

DELTA_AUDIT = 0.05
SIGMA_MAX = 3.0
BOX_STEP = 0.05
# box nudges tried, in order, when a zero sits on the boundary
_NUDGES = [(0.0, 0.0, 0.0), (-1e-3, -1e-3, 1e-3), (1e-3, 1e-3, -1e-3), (-2.3e-3, 1.7e-3, 2.9e-3)]


@dataclass
class ZeroList:
    chi_index: int
    window: tuple[float, float]
    ordinates: np.ndarray
    rect_count: dict = field(default_factory=dict)  # sigma -> count in [sigma, 3] x window
    offline: list = field(default_factory=list)  # certified zeros with beta != 1/2
    certification: dict = field(default_factory=dict)

    def in_window(self, lo: float, hi: float) -> np.ndarray:
        g = self.ordinates
        return g[(g >= lo) & (g <= hi)]

    def covers(self, lo: float, hi: float) -> bool:
        return self.window[0] <= lo and hi <= self.window[1]

    def zeros(self) -> list[complex]:
        """All located zeros as complex numbers (line and certified off-line)."""
        return [complex(0.5, g) for g in self.ordinates] + [complex(z) for z in self.offline]


def rotation(TL: TwistedL) -> complex:
    """e^(-i theta/2) with eps = e^(i theta), theta in (-pi, pi]."""
    theta = cmath.phase(TL.eps)
    if theta <= -math.pi:
        theta += 2 * math.pi
    return cmath.exp(-0.5j * theta)


def hardy_z(TL: TwistedL, t: float, diagnostic: bool = False):
    """Real rotated completed L-function on the critical line.

    With ``diagnostic=True`` returns (Z, imaginary part)."""
    ev = completed_lambda_eval(TL, complex(0.5, t))
    z = rotation(TL) * ev.value
    tol = 1e-8 * abs(ev.value) + 1e-12
    if abs(z.imag) > tol:
        raise DomainError(
            f"functional-equation inconsistency at t={t}: Im Z = {z.imag:.3e} > {tol:.3e}"
        )
    return (z.real, z.imag) if diagnostic else z.real


def hardy_z_values(TL: TwistedL, ts) -> np.ndarray:
    return np.array([hardy_z(TL, float(t)) for t in ts])


def _lambda_func(TL: TwistedL):
    return lambda pts: np.array([completed_lambda(TL, complex(z)) for z in np.atleast_1d(pts)])


def _scan(TL: TwistedL, t1: float, t2: float, step: float):
    n = max(int(math.ceil((t2 - t1) / step)), 1)
    ts = np.linspace(t1, t2, n + 1)
    zs = hardy_z_values(TL, ts)
    found = []
    brackets = []
    for i in range(n):
        a, b = zs[i], zs[i + 1]
        if a == 0.0:
            found.append(ts[i])
            continue
        if a * b < 0:
            g = brentq(lambda t: hardy_z(TL, t), ts[i], ts[i + 1], xtol=1e-11, maxiter=200)
            found.append(g)
            brackets.append(max(abs(a), abs(b)))
    if zs[-1] == 0.0:
        found.append(ts[-1])
    return np.array(sorted(found)), brackets


@dataclass
class RectCount:
    count: int
    raw: float
    nudge: tuple = (0.0, 0.0, 0.0)
    evaluations: int = 0
    box: tuple = ()


def _rect_once(func, sigma, sigma_max, t1, t2, step):
    raw, failed, tracks = rectangle_winding(func, sigma, sigma_max, t1, t2, step)
    ev = sum(tr.evaluations for tr in tracks)
    return raw, failed, tracks, ev


def count_zeros_rectangle_detail(TL: TwistedL, sigma: float, sigma_max: float, t1: float, t2: float,
                                 step: float = BOX_STEP, nudges=None) -> RectCount:
    if not (sigma < sigma_max and t1 < t2):
        raise DomainError("degenerate rectangle")
    func = _lambda_func(TL)
    last = None
    for ds, d1, d2 in (nudges or _NUDGES):
        box = (sigma + ds, sigma_max, t1 + d1, t2 + d2)
        raw, failed, tracks, ev = _rect_once(func, *box, step)
        if failed[0]:
            last = next(tr.where[0] for tr in tracks if tr.failed[0])
            continue
        r = float(raw[0])
        if abs(r - round(r)) > 0.05:
            raise PathError(f"winding number {r:.4f} is not near an integer", where=box)
        if ds or d1 or d2:
            log.info("rectangle %s nudged by %s", (sigma, sigma_max, t1, t2), (ds, d1, d2))
        return RectCount(int(round(r)), r, (ds, d1, d2), ev, box)
    raise PathError("zero on the rectangle boundary could not be avoided", where=last)


def count_zeros_rectangle(TL: TwistedL, sigma: float, sigma_max: float, t1: float, t2: float,
                          step: float = BOX_STEP) -> int:
    """Number of zeros (with multiplicity) of L in [sigma, sigma_max] x [t1, t2]."""
    return count_zeros_rectangle_detail(TL, sigma, sigma_max, t1, t2, step).count


def count_zeros_rectangle_all(sweep: TwistSweep, sigma: float, sigma_max: float, t1: float,
                              t2: float, step: float = BOX_STEP):
    """Rectangle counts for every primitive character, j = 1..q-2.

    Returns (counts, nudges) where nudges maps j to the box nudge that was
    needed for characters with a zero on the shared boundary."""

    def func(pts):
        return np.array([sweep.lambda_values(complex(z)) for z in np.atleast_1d(pts)])

    raw, failed, _ = rectangle_winding(func, sigma, sigma_max, t1, t2, step)
    counts = np.zeros(len(raw), dtype=np.int64)
    nudges: dict[int, tuple] = {}
    ok = ~failed
    r = raw[ok]
    if np.any(np.abs(r - np.round(r)) > 0.05):
        raise PathError("winding number not near an integer in character sweep")
    counts[ok] = np.round(r).astype(np.int64)
    for col in np.nonzero(failed)[0]:
        j = int(sweep.indices[col])
        rc = count_zeros_rectangle_detail(sweep.twisted(j), sigma, sigma_max, t1, t2, step,
                                          nudges=_NUDGES[1:])
        counts[col] = rc.count
        nudges[j] = rc.nudge
    return counts, nudges


# -- locating zeros inside boxes -------------------------------------------------

def _winding(func, box, step):
    s1, s2, t1, t2 = box
    raw, failed, _ = rectangle_winding(func, s1, s2, t1, t2, step)
    if failed[0]:
        raise PathError("zero on a subdivision boundary", where=box)
    return int(round(float(raw[0])))


def _newton(func, z0: complex, h: float = 1e-6, iters: int = 40, tol: float = 1e-12) -> complex:
    z = complex(z0)
    for _ in range(iters):
        f0 = complex(func(np.array([z]))[0])
        fp = complex(func(np.array([z + h]))[0] - func(np.array([z - h]))[0]) / (2 * h)
        if fp == 0:
            break
        dz = f0 / fp
        z -= dz
        if abs(dz) < tol:
            break
    return z


def locate_zeros(func, box, count: int | None = None, step: float = BOX_STEP,
                 size: float = 1e-2, depth: int = 0) -> list[complex]:
    """All zeros of an analytic func inside box = (s1, s2, t1, t2), by recursive
    bisection on winding numbers and a final Newton polish (with multiplicity)."""
    if count is None:
        count = _winding(func, box, step)
    if count == 0:
        return []
    s1, s2, t1, t2 = box
    if max(s2 - s1, t2 - t1) <= size or depth > 40:
        z = _newton(func, complex(0.5 * (s1 + s2), 0.5 * (t1 + t2)))
        if not (s1 - size <= z.real <= s2 + size and t1 - size <= z.imag <= t2 + size):
            z = complex(0.5 * (s1 + s2), 0.5 * (t1 + t2))
        return [z] * count
    # split the longer side at a slightly off-centre point to dodge symmetric zeros
    if s2 - s1 >= t2 - t1:
        m = s1 + 0.5137 * (s2 - s1)
        parts = [(s1, m, t1, t2), (m, s2, t1, t2)]
    else:
        m = t1 + 0.5137 * (t2 - t1)
        parts = [(s1, s2, t1, m), (s1, s2, m, t2)]
    sub_step = min(step, 0.25 * max(s2 - s1, t2 - t1))
    first = _winding(func, parts[0], sub_step)
    out = locate_zeros(func, parts[0], first, sub_step, size, depth + 1)
    out += locate_zeros(func, parts[1], count - first, sub_step, size, depth + 1)
    return out


# -- line scan with audit ----------------------------------------------------------

def find_zeros_on_line(TL: TwistedL, t1: float, t2: float, step: float = 0.05,
                       delta: float = DELTA_AUDIT, audit: bool = True) -> ZeroList:
    """Critical-line zeros in [t1, t2] by sign changes of hardy_z, audited
    against the argument-principle count of [1/2 - delta, 3] x [t1, t2]."""
    if not t2 > t1:
        raise DomainError("need t2 > t1")
    if step <= 0:
        raise DomainError("step must be positive")
    found, brackets = _scan(TL, t1, t2, step)
    zl = ZeroList(chi_index=TL.chi.index, window=(t1, t2), ordinates=found)
    zl.certification = {
        "step": step,
        "max_abs_z_at_brackets": max(brackets) if brackets else 0.0,
        "max_abs_z_at_zeros": max((abs(hardy_z(TL, g)) for g in found), default=0.0),
        "audit": "skipped",
    }
    if not audit:
        return zl
    rc = count_zeros_rectangle_detail(TL, 0.5 - delta, SIGMA_MAX, t1, t2)
    zl.rect_count[0.5 - delta] = rc.count
    used = step
    for _ in range(2):
        if rc.count == len(zl.ordinates):
            break
        used /= 2
        zl.ordinates, brackets = _scan(TL, t1, t2, used)
        zl.certification["step"] = used
    if rc.count == len(zl.ordinates):
        zl.certification["audit"] = "pass"
        zl.certification["rect_nudge"] = rc.nudge
        return zl
    # look for zeros off the line, right of it; their mirror images 1 - beta
    # enter the audit box only when beta - 1/2 <= delta
    eta = 1e-4
    off = locate_zeros(_lambda_func(TL), (0.5 + eta, SIGMA_MAX, t1, t2))
    expected = len(zl.ordinates)
    for z in off:
        expected += 1 + (z.real - 0.5 <= delta)
    if expected == rc.count:
        zl.offline = off + [complex(1 - z.real, z.imag) for z in off]
        zl.certification["audit"] = "pass-offline"
        return zl
    raise AuditError(
        f"rectangle count {rc.count} vs {len(zl.ordinates)} line zeros and {len(off)} off-line",
        interval=(t1, t2),
    )


# -- density ------------------------------------------------------------------------

@dataclass
class DensityTable:
    q: int
    window: tuple[float, float]
    sigmas: np.ndarray
    n_avg: np.ndarray
    counts: np.ndarray  # (len(sigmas), q-2)
    nudges: dict
    slope: float | None
    intercept: float | None
    fit_points: int


def n_avg(sweep: TwistSweep, sigma: float, t1: float, t2: float, *, strict: bool = True,
          step: float = BOX_STEP) -> float:
    """Average over primitive chi of the number of zeros with beta >= sigma, t1 <= gamma <= t2."""
    _check_density_pre(sweep.q, sigma, t1, t2, strict)
    counts, _ = count_zeros_rectangle_all(sweep, sigma, SIGMA_MAX, t1, t2, step)
    return float(np.mean(counts))


def _check_density_pre(q, sigma, t1, t2, strict):
    if t2 - t1 < 1 / math.log(q):
        raise DomainError("window shorter than 1/log q")
    if strict and sigma < 0.5 + 1 / math.log(q):
        raise DomainError(f"sigma={sigma} below 1/2 + 1/log q = {0.5 + 1 / math.log(q):.4f}")


def density_table(sweep: TwistSweep, sigmas, t1: float, t2: float, *, strict: bool = True,
                  step: float = BOX_STEP) -> DensityTable:
    """n_avg on a sigma grid plus a least-squares fit of log n_avg against
    (sigma - 1/2) log q over the points where n_avg > 0."""
    sigmas = np.asarray(sorted(sigmas), dtype=float)
    for s in sigmas:
        _check_density_pre(sweep.q, s, t1, t2, strict)
    rows = []
    nudges = {}
    for s in sigmas:
        c, nd = count_zeros_rectangle_all(sweep, float(s), SIGMA_MAX, t1, t2, step)
        rows.append(c)
        if nd:
            nudges[float(s)] = nd
    counts = np.array(rows)
    avg = counts.mean(axis=1)
    pos = avg > 0
    slope = intercept = None
    if pos.sum() >= 2:
        xfit = (sigmas[pos] - 0.5) * math.log(sweep.q)
        slope, intercept = np.polyfit(xfit, np.log(avg[pos]), 1)
        slope, intercept = float(slope), float(intercept)
    return DensityTable(sweep.q, (t1, t2), sigmas, avg, counts, nudges, slope, intercept, int(pos.sum()))


# -- Selberg's weighted zero identity ----------------------------------------------

@dataclass
class TestFunction:
    """omega = 1 + dev(s), holomorphic, with |dev(beta + it)| <= dev_bound(beta)
    uniformly in t for beta past some abscissa.  ``zeros(box)`` returns the
    zeros in a box, or None to locate them by winding numbers."""

    name: str
    dev: object  # complex -> complex, omega - 1
    dev_bound: object  # real -> real (inf where no bound is known)
    zeros: object = None


def closed_form_omega(a: float, b: float) -> TestFunction:
    """omega(s) = 1 - a b^-s, zeros at log_b a + 2 pi i k / log b."""
    if not (a > 0 and b > 1):
        raise DomainError("need a > 0 and b > 1")
    lb = math.log(b)

    def dev(s):
        return -a * np.exp(-np.asarray(s, dtype=complex) * lb)

    def zeros(box):
        s1, s2, t1, t2 = box
        beta = math.log(a) / lb
        if not s1 <= beta <= s2:
            return []
        step = 2 * math.pi / lb
        ks = range(math.ceil(t1 / step), math.floor(t2 / step) + 1)
        return [complex(beta, k * step) for k in ks if t1 < k * step < t2]

    return TestFunction(f"1-{a:g}*{b:g}^-s", dev, lambda beta: a * b**-beta, zeros)


def mollified_omega(TL: TwistedL, spec) -> TestFunction:
    """omega = 1 - (L M - 1)^2 for one twist and a mollifier spec."""
    from .lfunc import l_value
    from .mollifier import lm_tail_bound, m_value

    def dev(s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty(s.shape, dtype=complex)
        for i, z in enumerate(s):
            z = complex(z)
            out[i] = -(l_value(TL, z) * m_value(spec, TL.chi, z) - 1) ** 2
        return out

    def bound(beta):
        return lm_tail_bound(spec, beta) ** 2 if beta > 1.05 else math.inf

    return TestFunction(f"1-(LM-1)^2 j={TL.chi.index} L={spec.L:g}", dev, bound)


@dataclass
class SelbergCheck:
    lhs: float
    rhs: float
    residual: float
    zeros: list
    beta_max: float
    rhs_parts: tuple


def _log_abs_omega(dev_values):
    z = np.asarray(dev_values, dtype=complex)
    return 0.5 * np.log1p(2 * z.real + np.abs(z) ** 2)


def _quad(f, a, b, what, **kw):
    from scipy.integrate import quad

    from .errors import QuadratureError

    out = quad(f, a, b, full_output=1, **kw)
    if len(out) > 3:
        raise QuadratureError(f"{what}: quadrature did not converge on [{a:.6g}, {b:.6g}]: {out[3]}")
    return out[0]


def selberg_identity_check(omega: TestFunction, sigma_p: float, t1: float, t2: float, *,
                           floor: float = 1e-12, beta_cap: float = 400.0,
                           epsabs: float = 1e-11, step: float = BOX_STEP) -> SelbergCheck:
    """Both sides of the sin-sinh weighted zero identity on [sigma', inf) x [t1, t2]."""
    if not t2 > t1:
        raise DomainError("need t2 > t1")
    H = t2 - t1

    def sh(beta):
        return math.sinh(math.pi * (beta - sigma_p) / H)

    def tail(beta):
        d = omega.dev_bound(beta)
        if not d < 0.5:
            return math.inf
        return sh(beta) * 2 * d  # |log|1 + z|| <= 2|z| for |z| <= 1/2

    # first abscissa past which the beta-integrand is below the floor for good;
    # the growth condition makes tail() eventually decreasing
    beta_free = None
    beta = max(sigma_p, 0.0)
    while beta < beta_cap:
        if beta_free is None and omega.dev_bound(beta) < 0.5:
            beta_free = beta
        if tail(beta) < floor and tail(beta + 1) < tail(beta):
            break
        beta += 0.25
    else:
        raise DomainError("test function violates the growth condition for this window")
    beta_max = beta

    box = (sigma_p, beta_free, t1, t2)
    if omega.zeros is not None:
        zs = omega.zeros(box)
    else:
        def fn(pts):
            return 1 + np.asarray(omega.dev(pts), dtype=complex)

        zs = locate_zeros(fn, box, step=step)
    zs = [z for z in zs if z.real >= sigma_p and t1 < z.imag < t2]
    lhs = 2 * H * sum(math.sin(math.pi * (z.imag - t1) / H) * sh(z.real) for z in zs)

    def ldev(s):
        return float(_log_abs_omega(omega.dev(np.array([s])))[0])

    line = _quad(lambda t: math.sin(math.pi * (t - t1) / H) * ldev(complex(sigma_p, t)),
                 t1, t2, "t-integral", epsabs=epsabs, limit=400)
    edges = _quad(lambda b: sh(b) * (ldev(complex(b, t1)) + ldev(complex(b, t2))),
                  sigma_p, beta_max, "beta-integral", epsabs=epsabs, limit=400)
    rhs = line + edges
    return SelbergCheck(lhs, rhs, abs(lhs - rhs), zs, beta_max, (line, edges))
