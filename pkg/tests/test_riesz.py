import math

import numpy as np
import pytest

from plurienv.disc import AnalyticDisc, constant_disc, eval_disc, linear_disc
from plurienv.errors import DomainError, SingularCenterError
from plurienv.potentials import CurrentSpec, const, logabs, normsq
from plurienv.riesz import (QuadratureConfig, green_disc, pullback_density, riesz_area,
                            riesz_boundary, riesz_current)

from conftest import random_disc, random_psh


def test_green_value_at_origin():
    assert green_disc(0.0, 0.5) == pytest.approx(math.log(0.5) / (2 * math.pi), abs=1e-15)
    assert green_disc(0.0, 0.5) == pytest.approx(-0.110318, abs=1e-6)


def test_green_properties(rng):
    for _ in range(100):
        z = 0.999 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        w = 0.999 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        g = green_disc(z, w)
        assert g <= 0
        assert abs(g - green_disc(w, z)) <= 1e-12
        edge = (1 - 1e-14) * np.exp(2j * np.pi * rng.random())
        assert abs(green_disc(0.9 * z, edge)) <= 1e-12


def test_green_domain():
    assert green_disc(0.3, 0.3) == -np.inf
    with pytest.raises(DomainError):
        green_disc(1.0, 0.0)


def test_pullback_density_examples():
    f = linear_disc(0.2 + 0.1j, 0.3 - 0.2j)
    t = np.array([0.0, 0.5j, -0.7])
    np.testing.assert_allclose(pullback_density(normsq(), f, t), 4 * abs(0.3 - 0.2j) ** 2)
    np.testing.assert_allclose(pullback_density(logabs(1.0, -3.0), f, t), 0.0, atol=1e-15)


def _stencil(psi, f, t, h=1e-4):
    ts = np.array([t + h, t - h, t + 1j * h, t - 1j * h, t])
    v = psi.value(eval_disc(f, ts))
    return (v[0] + v[1] + v[2] + v[3] - 4 * v[4]) / h ** 2


def test_pullback_density_stencil_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(1, 3))
        psi = random_psh(rng, n)
        f = random_disc(rng, n, kind=rng.choice(["polynomial", "moebius"]))
        t = 0.6 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        exact = pullback_density(psi, f, t)
        assert exact >= -1e-12
        scale = max(abs(exact), 1.0)
        assert abs(_stencil(psi, f, t) - exact) <= 1e-6 * scale


def test_riesz_boundary_examples():
    f = linear_disc(0.2, 0.3)
    assert riesz_boundary(normsq(), f) == pytest.approx(-0.09, abs=1e-12)
    assert riesz_boundary(logabs(1.0, -3.0), f) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(SingularCenterError):
        riesz_boundary(logabs(1.0), linear_disc(0.0, 1.0))


def test_riesz_area_examples():
    q = QuadratureConfig(n_radial=64, n_angular=128)
    assert riesz_area(normsq(), linear_disc(0.2, 0.3), q) == pytest.approx(-0.09, abs=1e-3)
    assert riesz_area(logabs(1.0, -3.0), linear_disc(0.2, 0.3), q) == pytest.approx(0.0, abs=1e-15)


def test_two_routes_agree(rng):
    q = QuadratureConfig(n_radial=64, n_angular=128)
    for _ in range(20):
        n = int(rng.integers(1, 3))
        psi = random_psh(rng, n)
        f = random_disc(rng, n, max_degree=3)
        assert abs(riesz_area(psi, f, q) - riesz_boundary(psi, f, q)) <= 1e-3


def test_area_route_converges_at_least_first_order(rng):
    psi = random_psh(np.random.default_rng(7), 2)
    f = random_disc(np.random.default_rng(8), 2, max_degree=3)
    ref = riesz_boundary(psi, f)
    errs = [abs(riesz_area(psi, f, QuadratureConfig(n_radial=m, n_angular=2 * m)) - ref) for m in (16, 32, 64)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 1.0


def test_riesz_boundary_nonpositive_for_psh(rng):
    for _ in range(100):
        n = int(rng.integers(1, 3))
        psi = random_psh(rng, n)
        f = random_disc(rng, n, kind=rng.choice(["polynomial", "moebius"]))
        assert riesz_boundary(psi, f) <= 1e-8


def test_riesz_linearity(rng):
    for _ in range(30):
        a, b = random_psh(rng, 2), random_psh(rng, 2)
        lam = float(rng.uniform(0, 3))
        f = random_disc(rng, 2)
        lhs = riesz_boundary(lam * a + b, f)
        rhs = lam * riesz_boundary(a, f) + riesz_boundary(b, f)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_riesz_current_examples():
    f = linear_disc(0.2, 0.3)
    assert riesz_current(CurrentSpec(normsq(), const(0)), f).value == pytest.approx(riesz_boundary(normsq(), f))
    assert riesz_current(CurrentSpec(normsq(), normsq()), f).value == pytest.approx(0.0, abs=1e-15)
    assert riesz_current(CurrentSpec(const(0), normsq()), f).value == pytest.approx(0.09, abs=1e-12)
    with pytest.raises(SingularCenterError):
        riesz_current(CurrentSpec(logabs(1.0, -0.2), const(0)), f)


def test_boundary_singular_hit_is_rejected_and_refined():
    # log|z - 1| along f(t) = t is -inf at the node t = 1 only
    f = linear_disc(0.0, 1.0)
    r = riesz_boundary(logabs(1.0, -1.0), f, QuadratureConfig(n_circle=64))
    # log|t - 1| has circle mean 0 and value 0 at the center
    assert r == pytest.approx(0.0, abs=0.05)


def test_constant_disc_has_zero_potential():
    f = constant_disc([0.3, 0.1j])
    assert riesz_boundary(normsq(), f) == pytest.approx(0.0, abs=1e-15)
