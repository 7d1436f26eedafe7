import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurienv.disc import (MOEBIUS, AnalyticDisc, DiscTemplate, boundary_samples, constant_disc,
                           disc_derivative, eval_disc, linear_disc, moebius_disc, parameter_pack,
                           parameter_unpack)
from plurienv.errors import DimensionMismatch, DomainError

from conftest import random_disc


def test_constant_disc():
    f = constant_disc([0.5, 0.0])
    np.testing.assert_array_equal(eval_disc(f, 0.3 + 0.2j), [0.5, 0.0])


def test_linear_evaluation():
    f = linear_disc(0.2, 0.3)
    assert eval_disc(f, 1.0)[0] == pytest.approx(0.5)


def test_moebius_center_is_warp():
    f = AnalyticDisc([[0.0], [1.0]], kind=MOEBIUS, warp=0.5)
    assert eval_disc(f, 0.0)[0] == pytest.approx(0.5)
    np.testing.assert_allclose(f.center, [0.5])


def test_moebius_center_is_polynomial_at_warp():
    f = AnalyticDisc([[0.1, 0.2], [0.3, -0.1j], [0.05, 0.2]], kind=MOEBIUS, warp=0.3 - 0.2j)
    c = 0.3 - 0.2j
    expected = f.coeffs[0] + f.coeffs[1] * c + f.coeffs[2] * c ** 2
    np.testing.assert_allclose(f.center, expected, atol=1e-15)


def test_derivatives():
    assert disc_derivative(linear_disc(0.2, 0.3 + 0.1j), 0.7j)[0] == pytest.approx(0.3 + 0.1j)
    sq = AnalyticDisc([[0.0], [0.0], [1.0]])
    assert disc_derivative(sq, 0.5)[0] == pytest.approx(1.0)
    warped = AnalyticDisc([[0.0], [1.0]], kind=MOEBIUS, warp=0.5)
    assert disc_derivative(warped, 0.0)[0] == pytest.approx(0.75)


def test_derivative_matches_difference_quotient(rng):
    for kind in ("polynomial", "moebius"):
        for _ in range(10):
            f = random_disc(rng, 2, kind=kind)
            t = 0.5 * rng.random() * np.exp(2j * np.pi * rng.random())
            h = 1e-6
            fd = (eval_disc(f, t + h) - eval_disc(f, t - h)) / (2 * h)
            np.testing.assert_allclose(disc_derivative(f, t), fd, rtol=1e-6, atol=1e-8)


def test_domain_error():
    f = linear_disc(0.0, 1.0, radius=1.05)
    with pytest.raises(DomainError):
        eval_disc(f, 1.06)
    with pytest.raises(DomainError):
        AnalyticDisc([[0.0]], radius=1.0)


def test_warp_shrinks_radius():
    f = AnalyticDisc([[0.0], [1.0]], kind=MOEBIUS, warp=0.99, radius=1.05)
    assert 1.0 < f.radius and 0.99 * f.radius < 1.0


def test_boundary_samples():
    x = np.array([0.1 + 0.2j])
    np.testing.assert_array_equal(boundary_samples(constant_disc(x), 8), np.repeat(x[None], 8, 0))
    np.testing.assert_allclose(boundary_samples(linear_disc(0, 1), 4)[:, 0], [1, 1j, -1, -1j], atol=1e-15)


def test_parseval_mean():
    f = linear_disc(0.2, 0.3)
    Z = boundary_samples(f, 64)
    assert np.mean(np.abs(Z) ** 2) == pytest.approx(0.13, abs=1e-15)


def test_quadrature_exactness_against_parseval(rng):
    # |f|^2 is a trigonometric polynomial of degree 2d; N > 2d nodes are exact
    for _ in range(20):
        f = random_disc(rng, 2, max_degree=5)
        exact = np.sum(np.abs(f.coeffs) ** 2)
        N = 2 * f.degree + 1
        N = max(N, 4)
        mean = np.mean(np.sum(np.abs(boundary_samples(f, N)) ** 2, axis=-1))
        assert mean == pytest.approx(exact, rel=1e-12)


def test_components_are_harmonic(rng):
    h = 1e-3
    for kind in ("polynomial", "moebius"):
        for _ in range(10):
            f = random_disc(rng, 2, kind=kind)
            t = 0.5 * rng.random() * np.exp(2j * np.pi * rng.random())
            lap = (eval_disc(f, t + h) + eval_disc(f, t - h) + eval_disc(f, t + 1j * h)
                   + eval_disc(f, t - 1j * h) - 4 * eval_disc(f, t))
            assert np.max(np.abs(lap)) / h ** 2 < 1e-3


def test_pack_linear_fixed_center():
    tpl = DiscTemplate(dim=1, degree=1, center=(0.2,))
    f = linear_disc(0.2, 0.3 - 0.1j)
    np.testing.assert_array_equal(parameter_pack(f, tpl), [0.3, -0.1])


@settings(max_examples=50, derandomize=True)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["polynomial", "moebius"]), st.integers(1, 3),
       st.booleans())
def test_pack_unpack_roundtrip(seed, kind, n, fixed):
    rng = np.random.default_rng(seed)
    f = random_disc(rng, n, max_degree=3, kind=kind)
    tpl = DiscTemplate(dim=n, kind=kind, degree=f.degree,
                       center=tuple(f.center) if fixed else None, radius=f.radius)
    g = parameter_unpack(parameter_pack(f, tpl), tpl)
    if fixed:
        # a_0 is re-solved from the center constraint
        np.testing.assert_allclose(g.coeffs, f.coeffs, atol=1e-14)
        assert g.warp == f.warp
    else:
        assert g == f


def test_unpack_clamps_warp():
    tpl = DiscTemplate(dim=1, kind=MOEBIUS, degree=1, center=(0.1,), radius=1.05)
    g = parameter_unpack([0.5, 0.0, 3.0, 4.0], tpl)
    assert abs(g.warp) <= 1 - 1e-6 + 1e-15
    assert abs(g.warp) * g.radius < 1 and g.radius > 1
    assert g.center[0] == pytest.approx(0.1)


def test_pack_dimension_mismatch():
    tpl = DiscTemplate(dim=2, degree=1)
    with pytest.raises(DimensionMismatch):
        parameter_pack(linear_disc(0, 1), tpl)
    with pytest.raises(DimensionMismatch):
        parameter_unpack(np.zeros(3), tpl)


def test_moebius_disc_maps_circle_to_circle():
    f = moebius_disc(0.5)
    np.testing.assert_allclose(np.abs(boundary_samples(f, 32)[:, 0]), 1.0, atol=1e-14)
