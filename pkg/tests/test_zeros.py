import math

import numpy as np
import pytest

from twistl.characters import DirichletCharacter
from twistl.errors import DomainError
from twistl.lfunc import twist
from twistl.mollifier import mollifier_spec
from twistl.zeros import (
    closed_form_omega,
    count_zeros_rectangle,
    count_zeros_rectangle_detail,
    density_table,
    find_zeros_on_line,
    hardy_z,
    locate_zeros,
    mollified_omega,
    n_avg,
    selberg_identity_check,
)


@pytest.fixture(scope="module")
def zl10(TL101):
    return find_zeros_on_line(TL101, 0.0, 10.0)


def test_hardy_z_real(TL101):
    rng = np.random.default_rng(11)
    for t in rng.uniform(-15, 15, size=100):
        z, im = hardy_z(TL101, float(t), diagnostic=True)
        assert abs(im) <= 1e-8 * abs(complex(z, im)) + 1e-12


def test_line_zeros(TL101, zl10):
    g = zl10.ordinates
    assert len(g) > 0 and np.all(np.diff(g) > 0)
    assert zl10.certification["audit"] == "pass"
    assert zl10.rect_count[0.45] == len(g)
    for gamma in g:
        scale = max(abs(hardy_z(TL101, gamma - 0.05)), abs(hardy_z(TL101, gamma + 0.05)))
        assert abs(hardy_z(TL101, gamma)) <= 1e-7 * scale
        assert hardy_z(TL101, gamma - 1e-6) * hardy_z(TL101, gamma + 1e-6) < 0


def test_step_halving(TL101, zl10):
    again = find_zeros_on_line(TL101, 0.0, 10.0, step=0.025)
    assert len(again.ordinates) == len(zl10.ordinates)
    assert np.max(np.abs(again.ordinates - zl10.ordinates)) <= 1e-9


def test_empty_window(TL101, zl10):
    g = zl10.ordinates
    i = int(np.argmax(np.diff(g)))
    a, b = g[i] + 0.01, g[i + 1] - 0.01
    zl = find_zeros_on_line(TL101, a, b)
    assert len(zl.ordinates) == 0 and zl.certification["audit"] == "pass"


def test_preconditions(TL101):
    with pytest.raises(DomainError):
        find_zeros_on_line(TL101, 3.0, 1.0)
    with pytest.raises(DomainError):
        find_zeros_on_line(TL101, 1.0, 3.0, step=0)


def test_rectangles(TL101):
    assert count_zeros_rectangle(TL101, 1.5, 3.0, 0.0, 10.0) == 0
    assert count_zeros_rectangle(TL101, 1.01, 3.0, -12.0, 12.0) == 0
    rc = count_zeros_rectangle_detail(TL101, 0.45, 3.0, 0.0, 4.0)
    assert abs(rc.raw - rc.count) <= 0.05
    fine = count_zeros_rectangle(TL101, 0.45, 3.0, 0.0, 4.0, step=0.025)
    assert fine == rc.count


def test_locate_polynomial():
    roots = [complex(0.3, 0.2), complex(-0.4, 0.5), complex(0.1, -0.6)]
    f = lambda z: np.prod([np.asarray(z) - r for r in roots], axis=0)  # noqa: E731
    found = sorted(locate_zeros(f, (-1.0, 1.0, -1.0, 1.0)), key=lambda z: z.imag)
    assert np.allclose(found, sorted(roots, key=lambda z: z.imag), atol=1e-10)


def test_selberg_closed_form_example():
    r = selberg_identity_check(closed_form_omega(0.5, 2.0), -2.0, -3.0, 3.0)
    assert r.zeros == [complex(-1.0, 0.0)]
    assert r.lhs == pytest.approx(2 * 6 * math.sinh(math.pi / 6), rel=1e-14)
    assert r.residual <= 1e-6


def test_selberg_zero_free():
    # a < b^sigma' puts the only zero column left of sigma'
    r = selberg_identity_check(closed_form_omega(0.5, 3.0), 0.0, -2.0, 2.0)
    assert r.lhs == 0 and r.residual <= 1e-6


def test_selberg_growth_condition():
    # log b below pi / (t2 - t1): the weighted beta-integral diverges
    with pytest.raises(DomainError):
        selberg_identity_check(closed_form_omega(0.5, 2.0), -2.0, -1.0, 1.0)


def test_selberg_random_family():
    rng = np.random.default_rng(5)
    for _ in range(20):
        H = rng.uniform(3, 8)
        b = math.exp(rng.uniform(1.3 * math.pi / H, 3))
        a = rng.uniform(0.1, 10)
        sp = rng.uniform(-3, 1)
        t1 = rng.uniform(-5, 5)
        assert selberg_identity_check(closed_form_omega(a, b), sp, t1, t1 + H).residual <= 1e-6


@pytest.mark.slow
def test_selberg_mollified(delta, table101):
    TL = twist(delta, DirichletCharacter(table101, 1))
    spec = mollifier_spec(delta, 101, length=50)
    r = selberg_identity_check(mollified_omega(TL, spec), 0.4, 2.0, 6.0, epsabs=1e-8)
    assert len(r.zeros) > 0
    assert r.residual <= 1e-4


def test_density_small(sweep101):
    assert n_avg(sweep101, 0.9, 0.0, 2.0) == 0.0
    with pytest.raises(DomainError):
        n_avg(sweep101, 0.51, 0.0, 2.0)
    with pytest.raises(DomainError):
        n_avg(sweep101, 0.9, 0.0, 0.1)
    dt = density_table(sweep101, [0.3, 0.45, 0.6], 0.0, 2.0, strict=False)
    assert np.all(np.diff(dt.n_avg) <= 0)
    assert dt.counts.shape == (3, 99)
