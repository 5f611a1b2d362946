"""Character averages of S, M and R = S - M, the orthogonality oracle for the
prime-sum moments, prime-sum constants and the Gaussian comparison of S."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .argument import m_sum, m_sum_all, s_arg, s_arg_all
from .arith import primes_upto
from .characters import CharacterTable
from .errors import DomainError, PathError, ResourceError, TwistlError
from .forms import HeckeForm
from .lfunc import TwistSweep

NUDGES = (1e-3, -1e-3)
TUPLE_GUARD = 10**8
DIRECT_GUARD = 10**4
CLT_VARIANCE = 1 / (2 * math.pi**2)


def moment_constant(n: int) -> float:
    """(2n)! / (n! (2 pi)^(2n)), the Gaussian 2n-th moment for variance 1/(2 pi^2)."""
    return math.factorial(2 * n) / (math.factorial(n) * (2 * math.pi) ** (2 * n))


def prime_square_sum(form: HeckeForm, x_cubed: int, exclude: int | None = None) -> float:
    """sum_{p <= x^3} lam(p)^2 / p."""
    p = primes_upto(x_cubed)
    if exclude is not None:
        p = p[p != exclude]
    return float(np.sum(form.lam[p] ** 2 / p))


# -- per-character sweep -------------------------------------------------------------

@dataclass
class SweepValues:
    q: int
    t: float
    x_cubed: int | None
    j: np.ndarray
    t_used: np.ndarray
    S: np.ndarray
    M: np.ndarray
    nudged: list  # (j, t_used)
    failures: list  # (j, message)

    @property
    def R(self) -> np.ndarray:
        return self.S - self.M

    @property
    def count(self) -> int:
        return len(self.j)


def sweep_values(sweep: TwistSweep, t: float, x_cubed: int | None = None) -> SweepValues:
    """S (and M when x_cubed is given) for every primitive character.
    Characters whose path hits a zero are retried at t +- 1e-3; nothing is
    dropped silently."""
    if not t > 0:
        raise DomainError("t must be positive")
    if x_cubed is not None and x_cubed > sweep.form.n_max:
        raise DomainError(f"x^3 = {x_cubed} exceeds the coefficient table ({sweep.form.n_max})")
    tr = s_arg_all(sweep, t)
    S = np.array(tr.S, dtype=float)
    if x_cubed is None:
        M = np.full(len(S), np.nan)
    else:
        M = np.array(m_sum_all(sweep, t, x_cubed=x_cubed), dtype=float)
    j = sweep.indices
    t_used = np.full(len(j), float(t))
    nudged, failures = [], []
    for col in np.nonzero(tr.failed)[0]:
        TL = sweep.twisted(int(j[col]))
        for dt in NUDGES:
            try:
                S[col] = s_arg(TL, t + dt)
            except PathError:
                continue
            t_used[col] = t + dt
            if x_cubed is not None:
                M[col] = m_sum(TL, t + dt, x_cubed=x_cubed)
            nudged.append((int(j[col]), t + dt))
            break
        else:
            failures.append((int(j[col]), f"phase path blocked near {tr.where[col]}"))
    if failures:
        raise TwistlError(f"S(t) failed for {len(failures)} characters: {failures}")
    return SweepValues(sweep.q, t, x_cubed, j, t_used, S, M, nudged, failures)


# -- moment report -------------------------------------------------------------------

@dataclass
class MomentReport:
    q: int
    t: float
    x_cubed: int
    n_list: list
    count: int
    s_moments: dict
    m_moments: dict
    r_moments: dict
    m_odd_moments: dict
    predictions: dict
    L1: dict
    identity: dict
    holder: dict
    nudges: list
    failures: list
    runtime: float
    config: dict = field(default_factory=dict)
    histogram: list | None = None
    ks_distance: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def holder_bound(m_2n: float, r_2n: float, n: int) -> float:
    """sum_{l=1}^{2n} C(2n, l) (avg M^2n)^((2n-l)/2n) (avg |R|^2n)^(l/2n):
    bounds |avg S^2n - avg M^2n| by expanding (M + R)^2n and Hoelder."""
    k = 2 * n
    return sum(math.comb(k, l) * m_2n ** ((k - l) / k) * r_2n ** (l / k) for l in range(1, k + 1))


def m_second_moment_identity(form: HeckeForm, table: CharacterTable, t: float, x_cubed: int) -> dict:
    """Exact avg over primitive chi of M^2 assembled from orthogonality.

    With A_chi = sum_p lam(p) chi(p) p^(-1/2-it), M = Im(A)/pi and
    Im(A)^2 = (|A|^2 - Re A^2)/2.  Summed over all chi mod q, |A|^2 keeps the
    pairs p1 = p2 (mod q) and A^2 the pairs p1 p2 = 1 (mod q); the principal
    character is then removed explicitly."""
    q = table.modulus
    p = primes_upto(x_cubed)
    p = p[p % q != 0]
    a = form.lam[p] * np.exp(-complex(0.5, t) * np.log(p.astype(float)))
    r = p % q
    same = r[:, None] == r[None, :]
    inverse = (r[:, None] * r[None, :]) % q == 1
    outer = a[:, None] * np.conj(a)[None, :]
    abs2 = (q - 1) * np.sum(outer[same]).real
    sq = (q - 1) * np.sum((a[:, None] * a[None, :])[inverse])
    principal = (np.sum(a).imag / math.pi) ** 2
    total = (abs2 - sq.real) / (2 * math.pi**2)
    diag = (q - 1) * float(np.sum(np.abs(a) ** 2)) / (2 * math.pi**2)
    return {
        "average": (total - principal) / (q - 2),
        "diagonal_prediction": prime_square_sum(form, x_cubed, exclude=q) / (2 * math.pi**2),
        "diagonal_part": diag / (q - 2),
        "offdiagonal_part": (total - diag) / (q - 2),
        "principal_correction": principal / (q - 2),
    }


def moments_from_values(vals: SweepValues, n_list, form: HeckeForm, table: CharacterTable,
                        runtime: float = 0.0, config: dict | None = None) -> MomentReport:
    if vals.count != table.modulus - 2:
        raise TwistlError(f"averaged over {vals.count} characters, expected {table.modulus - 2}")
    q = vals.q
    S, M, R = vals.S, vals.M, vals.R
    s_m = {n: float(np.mean(S ** (2 * n))) for n in n_list}
    m_m = {n: float(np.mean(M ** (2 * n))) for n in n_list}
    r_m = {n: float(np.mean(np.abs(R) ** (2 * n))) for n in n_list}
    odd = {n: float(np.mean(M ** (2 * n - 1))) for n in n_list}
    L1 = {"loglog_q": math.log(math.log(q)), "prime_sum": prime_square_sum(form, vals.x_cubed, exclude=q)}
    pred = {
        name: {n: moment_constant(n) * val**n for n in n_list} for name, val in L1.items()
    }
    holder = {}
    for n in n_list:
        b = holder_bound(m_m[n], r_m[n], n)
        holder[n] = {"lhs": abs(s_m[n] - m_m[n]), "bound": b, "holds": abs(s_m[n] - m_m[n]) <= b}
    identity = m_second_moment_identity(form, table, vals.t, vals.x_cubed) if not vals.nudged else {}
    return MomentReport(
        q=q, t=vals.t, x_cubed=vals.x_cubed, n_list=list(n_list), count=vals.count,
        s_moments=s_m, m_moments=m_m, r_moments=r_m, m_odd_moments=odd,
        predictions=pred, L1=L1, identity=identity, holder=holder,
        nudges=vals.nudged, failures=vals.failures, runtime=runtime, config=config or {},
    )


def sweep_moments(form: HeckeForm, table: CharacterTable, t: float, x_cubed: int, n_list=(1,),
                  config: dict | None = None, sweep: TwistSweep | None = None) -> MomentReport:
    t0 = time.perf_counter()
    sweep = sweep or TwistSweep(form, table)
    vals = sweep_values(sweep, t, x_cubed)
    return moments_from_values(vals, n_list, form, table, time.perf_counter() - t0, config)


# -- orthogonality oracle ------------------------------------------------------------

@dataclass
class OracleResult:
    direct: float
    orthogonal: float
    difference: float
    principal_term: float
    primitive_sum: float
    diagonal_closed_form: float | None


def _prime_weights(form: HeckeForm, q: int, x_cubed: int, t: float):
    p = primes_upto(x_cubed)
    p = p[p % q != 0]
    a = form.lam[p] * np.exp(-complex(0.5, t) * np.log(p.astype(float)))
    return p, a


def diagonal_oracle(form: HeckeForm, table: CharacterTable, x_cubed: int, t: float, n: int) -> OracleResult:
    """sum over all chi mod q of |sum_p lam(p) chi(p) p^(-1/2-it)|^(2n), two ways:
    (a) directly character by character, (b) by orthogonality, grouping the
    n-fold prime products by residue mod q."""
    q = table.modulus
    p, a = _prime_weights(form, q, x_cubed, t)
    if len(p) ** (2 * n) > TUPLE_GUARD:
        raise ResourceError(f"{len(p)}^{2 * n} prime tuples exceed the guard {TUPLE_GUARD}")
    if q - 1 > DIRECT_GUARD:
        raise ResourceError(f"q - 1 = {q - 1} exceeds the direct-sweep guard {DIRECT_GUARD}")
    # (a): chi_j(p) = e(j ind(p) / (q - 1)) for j = 0..q-2
    ind = table.dlog[p % q]
    j = np.arange(q - 1)
    chi = np.exp(2j * np.pi * np.outer(j, ind) / (q - 1))
    A = chi @ a
    direct = float(np.sum(np.abs(A) ** (2 * n)))
    # (b): (q - 1) sum_r |sum_{p1..pn = r} a_p1..a_pn|^2
    groups = np.zeros(q, dtype=complex)
    for tup in itertools.product(range(len(p)), repeat=n):
        r = 1
        w = 1.0 + 0j
        for i in tup:
            r = (r * int(p[i])) % q
            w *= a[i]
        groups[r] += w
    orth = float((q - 1) * np.sum(np.abs(groups) ** 2))
    principal = float(abs(np.sum(a)) ** (2 * n))
    closed = None
    if n == 1 and x_cubed < q:
        closed = (q - 1) * prime_square_sum(form, x_cubed)
    return OracleResult(direct, orth, abs(direct - orth), principal, direct - principal, closed)


# -- prime sums and the large sieve ---------------------------------------------------

def prime_sum_stats(form: HeckeForm, x: float) -> dict:
    p = primes_upto(int(x)).astype(float)
    if int(x) > form.n_max:
        raise DomainError("x beyond the coefficient table")
    lp = np.log(p)
    lam2 = form.lam[p.astype(int)] ** 2
    lx = math.log(x)
    out = {
        "x": x,
        "inv_p": float(np.sum(1 / p)),
        "log_p_over_p": float(np.sum(lp / p)),
        "log2_p_over_p": float(np.sum(lp**2 / p)),
        "lam2_over_p": float(np.sum(lam2 / p)),
        "loglog_x": math.log(lx),
        "log_x": lx,
        "log_x_sq": lx**2,
    }
    out["residual_inv_p"] = out["inv_p"] - out["loglog_x"]
    out["residual_log_p"] = out["log_p_over_p"] - lx
    out["ratio_log2_p"] = out["log2_p_over_p"] / lx**2
    out["residual_lam2"] = out["lam2_over_p"] - out["loglog_x"]
    return out


def large_sieve_ratio(sweep: TwistSweep, y: float, n: int, A: float = 1.0) -> float:
    """(1/q) sum over primitive chi of |sum_{p<y} a_p chi(p)/sqrt p|^(2n) with a_p = A log p / log y."""
    p = primes_upto(int(math.ceil(y)) - 1)
    p = p[p < y]
    w = np.zeros(int(p[-1]) + 1 if len(p) else 1, dtype=complex)
    w[p] = A * np.log(p) / math.log(y) / np.sqrt(p)
    return float(np.sum(np.abs(sweep.char_sums(w)) ** (2 * n)) / sweep.q)


# -- Gaussian comparison ------------------------------------------------------------

@dataclass
class CLTResult:
    q: int
    t: float
    count: int
    ks_distance: float
    edges: np.ndarray
    masses: np.ndarray
    gaussian_masses: np.ndarray
    nudges: list

    def rows(self):
        for i in range(len(self.masses)):
            yield self.edges[i], self.edges[i + 1], self.masses[i], self.gaussian_masses[i]


def clt_from_values(S: np.ndarray, q: int, t: float, bins: int = 40, nudges=()) -> CLTResult:
    xi = np.asarray(S, dtype=float) / math.sqrt(math.log(math.log(q)))
    sd = math.sqrt(CLT_VARIANCE)
    target = stats.norm(0.0, sd)
    ks = float(stats.kstest(xi, target.cdf).statistic)
    lim = max(4 * sd, float(np.max(np.abs(xi))) * (1 + 1e-9))
    edges = np.linspace(-lim, lim, bins + 1)
    counts, _ = np.histogram(xi, bins=edges)
    masses = counts / len(xi)
    gauss = np.diff(target.cdf(edges))
    return CLTResult(q, t, len(xi), ks, edges, masses, gauss, list(nudges))


def clt_distribution(form: HeckeForm, table: CharacterTable, t: float, bins: int = 40,
                     sweep: TwistSweep | None = None) -> CLTResult:
    if not t > 0:
        raise DomainError("t must be positive")
    sweep = sweep or TwistSweep(form, table)
    vals = sweep_values(sweep, t)
    return clt_from_values(vals.S, table.modulus, t, bins, vals.nudged)
