import math

import numpy as np
import pytest

from twistl.characters import DirichletCharacter
from twistl.errors import DomainError, ValidationError
from twistl.forms import mu_table
from twistl.lfunc import l_value, twist
from twistl.mollifier import (
    lm_deviation_average,
    lm_tail_bound,
    m_value,
    m_values,
    mollifier_spec,
    taper,
)


def test_taper():
    assert taper(0.25) == 0.5
    assert taper(0.5) == 1.0
    assert taper(1.0) == 1.0
    assert taper(0.0) == 0.0
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            taper(bad)


def test_default_length_is_trivial(delta, table101):
    spec = mollifier_spec(delta, 101)
    assert spec.L < 2 and not spec.override
    chi = DirichletCharacter(table101, 7)
    assert m_value(spec, chi, complex(0.5, 3.0)) == 1.0


def test_c_range(delta):
    with pytest.raises(ValidationError):
        mollifier_spec(delta, 101, c=0.01)
    with pytest.raises(ValidationError):
        mollifier_spec(delta, 101, c=0.0)
    assert mollifier_spec(delta, 101, c=0.01, length=30).override


def test_coefficients(delta):
    spec = mollifier_spec(delta, 101, length=200)
    x = spec.coeffs
    mu = mu_table(delta, 200).values
    assert x[1] == 1.0
    assert np.all(np.abs(x[1:]) <= np.abs(mu[1:201]) + 1e-15)
    for l in spec.support:
        assert all(l % (p**3) for p in (2, 3, 5))


def test_brute_force(delta, table101):
    spec = mollifier_spec(delta, 101, length=50)
    for j in (1, 13, 50, 99):
        chi = DirichletCharacter(table101, j)
        ref = sum(spec.coeffs[l] * chi.values(np.array([l]))[0] * l**-0.5 for l in range(1, 51))
        assert abs(m_value(spec, chi, 0.5) - ref) <= 1e-12


def test_sweep_agrees(delta, table101, sweep101):
    spec = mollifier_spec(delta, 101, length=50)
    s = complex(0.7, 2.0)
    all_ = m_values(spec, sweep101, s)
    for j in (1, 40, 99):
        assert abs(all_[j - 1] - m_value(spec, DirichletCharacter(table101, j), s)) <= 1e-12


def test_conjugate_symmetry(delta, table101):
    spec = mollifier_spec(delta, 101, length=80)
    s = complex(0.6, 4.5)
    for j in (3, 17, 64):
        a = m_value(spec, DirichletCharacter(table101, 100 - j), s.conjugate())
        b = m_value(spec, DirichletCharacter(table101, j), s)
        assert abs(a - b.conjugate()) <= 1e-12


def test_tail_bound(delta, table101):
    spec = mollifier_spec(delta, 101, length=100)
    rng = np.random.default_rng(3)
    for sigma in (2.0, 3.0):
        bound = lm_tail_bound(spec, sigma)
        for j in rng.integers(1, 100, size=10):
            chi = DirichletCharacter(table101, int(j))
            s = complex(sigma, rng.uniform(-10, 10))
            dev = abs(l_value(twist(delta, chi), s) * m_value(spec, chi, s) - 1)
            assert dev <= bound


def test_deviation_average(delta, sweep101):
    spec = mollifier_spec(delta, 101, length=50)
    big = lm_deviation_average(spec, sweep101, 2.0, 0.0)
    assert big.samples == 99 and big.L_effective == 50
    assert big.average <= lm_tail_bound(spec, 2.0) ** 2
    half = lm_deviation_average(spec, sweep101, 0.5, 1.0)
    assert math.isfinite(half.average)
    with pytest.raises(DomainError):
        lm_deviation_average(spec, sweep101, 0.5 - 1.5 / math.log(101), 0.0)
