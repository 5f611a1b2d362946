"""Invariant and oracle suite behind ``twistl check``."""

from __future__ import annotations

import math

import numpy as np

from .arith import dirichlet_convolve
from .characters import CharacterTable, DirichletCharacter, gauss_sum, gauss_sums_all
from .forms import HeckeForm, check_deligne, mu_table
from .lfunc import completed_lambda, dirichlet_series_value, l_value, twist
from .moments import diagonal_oracle
from .oracles import tau_pentagonal
from .zeros import closed_form_omega, find_zeros_on_line, hardy_z, selberg_identity_check

SEED = 20240601


def _row(name, value, tolerance, ok=None):
    value = float(value)
    return {"name": name, "value": value, "tolerance": tolerance,
            "pass": bool(value <= tolerance) if ok is None else bool(ok)}


def character_checks(table: CharacterTable) -> list[dict]:
    q = table.modulus
    a = np.arange(1, q)
    ind = table.dlog[a]
    j = np.arange(q - 1)
    chi = np.exp(2j * np.pi * np.outer(j, ind) / (q - 1))  # rows: characters, cols: residues
    gram = chi @ chi.conj().T
    rows = np.max(np.abs(gram - (q - 1) * np.eye(q - 1)))
    cols = np.max(np.abs(chi.conj().T @ chi - (q - 1) * np.eye(q - 1)))
    g = gauss_sums_all(table)[1:]
    direct = np.array([gauss_sum(DirichletCharacter(table, int(k))) for k in range(1, q - 1)])
    return [
        _row("character orthogonality (rows)", rows, 1e-9),
        _row("character orthogonality (columns)", cols, 1e-9),
        _row("max ||eps_chi| - 1|", np.max(np.abs(np.abs(direct) - 1)), 1e-10),
        _row("Gauss sums FFT vs direct", np.max(np.abs(g - direct)), 1e-10),
    ]


def coefficient_checks(form: HeckeForm) -> list[dict]:
    out = []
    if form.name == "delta":
        n = min(1000, form.n_max)
        ref = tau_pentagonal(n)
        bad = sum(1 for i in range(1, n + 1) if form.raw_coeffs[i] != ref[i - 1])
        out.append(_row(f"tau(n) vs pentagonal oracle, n <= {n} (mismatches)", bad, 0))
    n = min(10**4, form.n_max)
    conv = dirichlet_convolve(form.lam[: n + 1], mu_table(form, n).values)
    delta = np.zeros(n + 1)
    delta[1] = 1
    out.append(_row(f"lambda * mu_f = delta, n <= {n}", np.max(np.abs(conv[1:] - delta[1:])), 1e-12))
    first = check_deligne(form)
    out.append(_row(f"Deligne bound, n <= {form.n_max} (first violation)", first or 0, 0, first is None))
    return out


def lfunction_checks(form: HeckeForm, table: CharacterTable, accuracy: float = 1e-10) -> list[dict]:
    rng = np.random.default_rng(SEED)
    js = sorted({1, table.order // 2, table.order - 1})
    fe, afe, hz = 0.0, 0.0, 0.0
    for j in js:
        TL = twist(form, DirichletCharacter(table, j), target_accuracy=accuracy)
        for _ in range(3):
            s = complex(rng.uniform(-0.5, 1.5), rng.uniform(-12, 12))
            lhs = completed_lambda(TL, s)
            rhs = TL.eps * completed_lambda(TL, 1 - s.conjugate()).conjugate()
            fe = max(fe, abs(lhs - rhs) / abs(lhs))
        for _ in range(2):
            s = complex(rng.uniform(3.0, 4.0), rng.uniform(-10, 10))
            ser, _ = dirichlet_series_value(TL, s)
            afe = max(afe, abs(l_value(TL, s) - ser))
        for _ in range(4):
            z, im = hardy_z(TL, rng.uniform(-12, 12), diagnostic=True)
            hz = max(hz, abs(im) / max(abs(complex(z, im)), 1e-300))
    return [
        _row("functional equation (relative)", fe, 1e-8),
        _row("AFE vs Dirichlet series at Re s in [3, 4]", afe, 1e-8),
        _row("hardy_z imaginary part (relative)", hz, 1e-8),
    ]


def selberg_checks(count: int = 5) -> list[dict]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(count):
        H = rng.uniform(3, 8)
        b = math.exp(rng.uniform(1.3 * math.pi / H, 3))
        a = rng.uniform(0.1, 10)
        sp = rng.uniform(-3, 1)
        t1 = rng.uniform(-5, 5)
        worst = max(worst, selberg_identity_check(closed_form_omega(a, b), sp, t1, t1 + H).residual)
    return [_row(f"weighted zero identity, closed-form family ({count} configs)", worst, 1e-6)]


def oracle_checks(form: HeckeForm, table: CharacterTable) -> list[dict]:
    out = []
    for n in (1, 2):
        r = diagonal_oracle(form, table, 20, 1.0, n)
        out.append(_row(f"orthogonality oracle x^3=20 n={n} (relative)", r.difference / r.direct, 1e-9))
    return out


def zero_checks(form: HeckeForm, table: CharacterTable, accuracy: float = 1e-10) -> list[dict]:
    TL = twist(form, DirichletCharacter(table, 1), target_accuracy=accuracy)
    zl = find_zeros_on_line(TL, 0.0, 5.0)
    ok = zl.certification.get("audit", "").startswith("pass")
    return [_row("line scan vs rectangle count, j=1, [0, 5]", 0 if ok else 1, 0, ok)]


def run_checks(form: HeckeForm, table: CharacterTable, accuracy: float = 1e-10) -> list[dict]:
    return (character_checks(table) + coefficient_checks(form) + lfunction_checks(form, table, accuracy)
            + selberg_checks() + oracle_checks(form, table) + zero_checks(form, table, accuracy))
