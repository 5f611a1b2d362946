import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistl.arith import dirichlet_convolve, primes_upto
from twistl.errors import ResourceError, ValidationError
from twistl.forms import (
    cf_coefficient,
    cf_table,
    check_deligne,
    extend_delta_coefficients,
    generate_delta_coefficients,
    hecke_extend,
    load_form,
    mu_f,
    mu_table,
)
from twistl.oracles import tau_pentagonal


def test_first_values():
    assert generate_delta_coefficients(1) == [1]
    tau = generate_delta_coefficients(6)
    assert tau[1] == -24 and tau[2] == 252 and tau[4] == 4830
    assert tau[5] == -6048 == tau[1] * tau[2]


def test_matches_pentagonal_oracle():
    assert generate_delta_coefficients(1000) == tau_pentagonal(1000)


def test_extension_matches_fresh_generation():
    fresh = generate_delta_coefficients(3000)
    assert extend_delta_coefficients(fresh[:700], 3000) == fresh


def test_memory_cap():
    with pytest.raises(ResourceError):
        generate_delta_coefficients(10**6, memory_cap=1000)


def test_normalisation(delta):
    assert delta.lam[1] == 1.0
    assert delta.weight == 12 and delta.level == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 140), st.integers(1, 140))
def test_multiplicative(delta, m, n):
    if math.gcd(m, n) == 1:
        assert delta.lam[m * n] == pytest.approx(delta.lam[m] * delta.lam[n], rel=1e-12, abs=1e-12)


def test_hecke_recursion(delta):
    for p in (2, 3, 5, 7, 11):
        pk = [p**m for m in range(8) if p**m <= delta.n_max]
        for m in range(1, len(pk) - 1):
            lhs = delta.lam[pk[m + 1]]
            rhs = delta.lam[p] * delta.lam[pk[m]] - delta.lam[pk[m - 1]]
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_deligne(delta):
    assert check_deligne(delta) is None


def test_hecke_extend_examples(delta):
    assert hecke_extend(delta, 1) == 1.0
    assert hecke_extend(delta, 4) == pytest.approx(-1472 / 4**5.5, rel=1e-14)
    assert hecke_extend(delta, 4) == pytest.approx(-0.71875, rel=1e-12)
    assert hecke_extend(delta, 12) == pytest.approx(delta.lam[4] * delta.lam[3], rel=1e-13)


def test_mu_f_examples(delta):
    assert mu_f(delta, 1) == 1.0
    assert mu_f(delta, 4) == pytest.approx(1.0)
    assert mu_f(delta, 8) == 0.0
    table = mu_table(delta, 5000).values
    for n in (6, 12, 30, 49, 4999):
        assert table[n] == pytest.approx(mu_f(delta, n), abs=1e-15)


def test_convolution_identity(delta):
    n = 10**4
    conv = dirichlet_convolve(delta.lam[: n + 1], mu_table(delta, n).values)
    target = np.zeros(n + 1)
    target[1] = 1
    assert np.max(np.abs(conv[1:] - target[1:])) <= 1e-12


def test_cf_examples(delta):
    assert cf_coefficient(delta, 6) == 0.0
    assert cf_coefficient(delta, 4) == pytest.approx(delta.lam[2] ** 2 - 2, rel=1e-14)
    assert cf_coefficient(delta, 4) == pytest.approx(-1.71875, rel=1e-12)
    for p in (2, 3, 7):
        assert cf_coefficient(delta, p * p) == pytest.approx(delta.lam[p * p] - 1, abs=1e-14)


def test_cf_against_roots(delta):
    table = cf_table(delta).values
    for p in map(int, primes_upto(100)):
        lam = delta.lam[p]
        alpha, beta = np.roots([1, -lam, 1]).astype(complex)
        prev, cur = 2.0, lam
        for m in range(1, 13):
            direct = (alpha**m + beta**m).real
            assert cur == pytest.approx(direct, abs=1e-12)
            assert abs(cur) <= 2 + 1e-12
            if p**m <= delta.n_max:
                assert table[p**m] == pytest.approx(direct, abs=1e-12)
                assert cf_coefficient(delta, p**m) == pytest.approx(direct, abs=1e-12)
            prev, cur = cur, lam * cur - prev


def _write_form(tmp_path, ap, **extra):
    doc = {"weight": 12, "level": 1, "nebentypus": "trivial", "normalization": "arithmetic",
           "ap": ap, "root_number": 1}
    doc.update(extra)
    path = tmp_path / "form.json"
    path.write_text(json.dumps(doc))
    return path


def test_load_form_matches_builtin(tmp_path, delta):
    ap = [[int(p), int(delta.raw_coeffs[p])] for p in primes_upto(97)]
    f = load_form(_write_form(tmp_path, ap))
    assert f.n_max == 97
    assert f.lam[96] == pytest.approx(delta.lam[96], rel=1e-14)
    assert f.raw_coeffs[96] == delta.raw_coeffs[96]


def test_load_form_builtin():
    f = load_form("delta", n_max=50)
    assert (f.weight, f.level) == (12, 1)


def test_load_form_rejects_deligne_violation(tmp_path, delta):
    ap = [[int(p), int(delta.raw_coeffs[p])] for p in primes_upto(97)]
    ap[0][1] = 10**6  # a(2) far beyond 2 * 2^(11/2)
    with pytest.raises(ValidationError, match=r"ap\[0\]"):
        load_form(_write_form(tmp_path, ap))


def test_load_form_rejects_missing_prime(tmp_path, delta):
    ap = [[int(p), int(delta.raw_coeffs[p])] for p in primes_upto(97) if p != 13]
    with pytest.raises(ValidationError, match="p=13"):
        load_form(_write_form(tmp_path, ap))


def test_load_form_rejects_nebentypus(tmp_path, delta):
    ap = [[2, -24]]
    with pytest.raises(ValidationError, match="nebentypus"):
        load_form(_write_form(tmp_path, ap, nebentypus="quadratic"))
