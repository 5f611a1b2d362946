import cmath
import math

import numpy as np
import pytest

from twistl.characters import (
    DirichletCharacter,
    build_table,
    char_value,
    enumerate_primitive,
    gauss_sum,
    gauss_sums_all,
    parity,
    principal,
    quadratic_character,
)
from twistl.errors import DomainError, ValidationError
from twistl.oracles import gauss_sum_direct, legendre_symbol, smallest_primitive_root_bruteforce


def test_table_q7():
    t = build_table(7)
    assert t.generator == 3
    assert t.ind(2) == 2
    assert sorted(t.dlog[1:]) == list(range(6))


@pytest.mark.parametrize("q", [9, 4, 1, 15])
def test_rejects_composite(q):
    with pytest.raises(ValidationError):
        build_table(q)


def test_generator_1009():
    assert build_table(1009).generator == smallest_primitive_root_bruteforce(1009) == 11


@pytest.mark.parametrize("q", [3, 5, 7, 101, 211])
def test_dlog_bijection(q):
    t = build_table(q)
    for a in range(1, q):
        assert pow(t.generator, t.ind(a), q) == a


def test_values():
    t = build_table(7)
    assert char_value(principal(t), 3) == 1
    assert char_value(DirichletCharacter(t, 1), 3) == pytest.approx(complex(0.5, math.sqrt(3) / 2))
    assert char_value(DirichletCharacter(t, 1), 14) == 0
    quad = DirichletCharacter(t, 3)
    for a in range(1, 7):
        v = char_value(quad, a)
        assert v == pytest.approx(legendre_symbol(a, 7), abs=1e-15)


def test_quadratic_matches_legendre():
    t = build_table(101)
    chi = quadratic_character(t)
    assert np.allclose(chi.values(np.arange(101)), [legendre_symbol(a, 101) for a in range(101)], atol=1e-14)


def test_gauss_sum_examples():
    t = build_table(5)
    assert gauss_sum(quadratic_character(t)) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        gauss_sum(principal(t))


@pytest.mark.parametrize("q", [3, 5, 7, 31, 101])
def test_gauss_sum_pairs(q):
    t = build_table(q)
    for chi in enumerate_primitive(t):
        g = gauss_sum(chi)
        assert g == pytest.approx(gauss_sum_direct(chi.residue_values, q), abs=1e-12)
        assert g * gauss_sum(chi.conj()) == pytest.approx(parity(chi), abs=1e-10)


@pytest.mark.parametrize("q", [101, 211, 401, 499])
def test_gauss_modulus_and_fft(q):
    t = build_table(q)
    direct = np.array([gauss_sum(c) for c in enumerate_primitive(t)])
    assert np.max(np.abs(np.abs(direct) - 1)) <= 1e-10
    assert np.max(np.abs(gauss_sums_all(t)[1:] - direct)) <= 1e-10


def test_enumeration():
    assert [c.index for c in enumerate_primitive(build_table(5))] == [1, 2, 3]
    assert len(enumerate_primitive(build_table(3))) == 1
    t = build_table(13)
    chars = enumerate_primitive(t)
    for c in chars:
        assert c.conj().index == t.order - c.index
        assert np.allclose(c.conj().residue_values, np.conj(c.residue_values))


@pytest.mark.parametrize("q", [101, 211, 499])
def test_orthogonality(q):
    t = build_table(q)
    rng = np.random.default_rng(q)
    vals = np.array([DirichletCharacter(t, j).residue_values for j in range(q - 1)])
    for _ in range(50):
        m, n = (int(v) for v in rng.integers(1, 10 * q, size=2))
        if m % q == 0 or n % q == 0:
            continue
        total = np.sum(vals[:, m % q] * np.conj(vals[:, n % q]))
        assert abs(total - (q - 1) * (m % q == n % q)) <= 1e-9


def test_multiplicativity():
    t = build_table(211)
    rng = np.random.default_rng(0)
    for j in (1, 17, 105, 209):
        chi = DirichletCharacter(t, j)
        a = rng.integers(1, 10**6, size=1000)
        b = rng.integers(1, 10**6, size=1000)
        lhs = chi.values(a * b)
        rhs = chi.values(a) * chi.values(b)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
