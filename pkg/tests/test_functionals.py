import pytest

from plurienv.disc import constant_disc, linear_disc, moebius_disc
from plurienv.errors import SingularCenterError
from plurienv.functionals import (absorb_phi2, global_potential_shift, omega_functional,
                                  poisson_functional, potential_value)
from plurienv.potentials import CurrentSpec, Weight, const, logabs, normsq

from conftest import random_disc, random_psh


def test_constant_disc_returns_weight_at_center():
    w = Weight(const(1.0) - normsq())
    r = poisson_functional(w, constant_disc(0.4))
    assert r.value.value == pytest.approx(0.84, abs=1e-14)
    assert r.reliable


def test_moebius_disc_sees_boundary_values():
    w = Weight(const(1.0) - normsq())
    assert poisson_functional(w, moebius_disc(0.5)).value.value == pytest.approx(0.0, abs=1e-12)


def test_omega_functional_moebius_example():
    omega = CurrentSpec(const(0.0), normsq())
    v = omega_functional(omega, Weight(const(0.0)), moebius_disc(0.5)).value.value
    assert v == pytest.approx(-0.75, abs=1e-10)


def test_omega_functional_singular_center():
    omega = CurrentSpec(logabs(1.0, -0.3), const(0.0))
    with pytest.raises(SingularCenterError):
        omega_functional(omega, Weight(const(0.0)), linear_disc(0.3, 0.1))


def test_rejected_nodes_are_counted():
    # phi2 = log|z - 1| is -inf at f(1) = 1
    w = Weight(const(0.0), logabs(1.0, -1.0))
    r = poisson_functional(w, linear_disc(0.0, 1.0))
    assert r.n_rejected_boundary_nodes == 1
    assert r.reliable


def _random_pair(rng, n):
    omega = CurrentSpec(random_psh(rng, n), random_psh(rng, n))
    w = Weight(random_psh(rng, n) - random_psh(rng, n) + float(rng.normal()), random_psh(rng, n))
    return omega, w


def test_global_shift_identity(rng):
    for _ in range(50):
        n = int(rng.integers(1, 3))
        omega, w = _random_pair(rng, n)
        f = random_disc(rng, n, kind=rng.choice(["polynomial", "moebius"]))
        lhs = omega_functional(omega, w, f).value.value + potential_value(omega, f.center)
        omega0, w0 = global_potential_shift(omega, w)
        assert omega0.is_zero
        rhs = poisson_functional(w0, f).value.value
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_absorption_identity(rng):
    for _ in range(30):
        n = int(rng.integers(1, 3))
        omega, w = _random_pair(rng, n)
        f = random_disc(rng, n)
        om2, w2 = absorb_phi2(omega, w)
        phi2_x = float(w.phi2.value(f.center[None, :])[0])
        lhs = omega_functional(omega, w, f).value.value
        rhs = omega_functional(om2, w2, f).value.value - phi2_x
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_monotone_in_weight(rng):
    for _ in range(30):
        n = int(rng.integers(1, 3))
        omega, w = _random_pair(rng, n)
        w_big = Weight(w.phi1 + normsq() + const(abs(float(rng.normal()))), w.phi2)
        f = random_disc(rng, n)
        assert omega_functional(omega, w, f).value.value <= omega_functional(omega, w_big, f).value.value + 1e-12


def test_psh_minorant_below_functional(rng):
    # u = -psi is omega-psh and u <= phi when phi >= -psi; then u(f(0)) <= functional
    for _ in range(30):
        n = int(rng.integers(1, 3))
        psi1 = random_psh(rng, n)
        omega = CurrentSpec(psi1, const(0.0))
        w = Weight(const(2.0) - psi1 + normsq())
        f = random_disc(rng, n)
        u = -float(psi1.value(f.center[None, :])[0])
        assert u <= omega_functional(omega, w, f).value.value + 1e-10

