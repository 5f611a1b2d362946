import numpy as np
import pytest

from twistl.errors import DomainError
from twistl.oracles import upper_gamma_quadrature
from twistl.special import gamma, upper_gamma


def test_small_x_limit():
    for w in (6.0 + 0j, 6.5 + 3j, 5.75 - 12j):
        assert abs(upper_gamma(w, 1e-12)[0] / gamma(w) - 1) <= 1e-10


@pytest.mark.filterwarnings("ignore")
def test_against_quadrature():
    rng = np.random.default_rng(3)
    for _ in range(10):
        w = complex(rng.uniform(5.5, 8.5), rng.uniform(-15, 15))
        x = float(rng.uniform(0.05, 40))
        got = upper_gamma(w, x)[0]
        ref = upper_gamma_quadrature(w, x)
        assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


def test_rejects_nonpositive_x():
    with pytest.raises(DomainError):
        upper_gamma(6.0, 0.0)
