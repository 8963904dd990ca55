import math

import numpy as np
import pytest

from cpsglab.calculus_eval import bcalc_apply, dcalc_apply
from cpsglab.calculus_norms import b0_norm
from cpsglab.errors import SpectrumError
from cpsglab.kernels import (CayleyResolventKernel, ConstantKernel,
                             InverseSemigroupResolventKernel, OmegaSequence,
                             ProductKernel, ResolventKernel,
                             ResolventRatioKernel, w_kernel)
from cpsglab.norm_engine import operator_norm
from cpsglab.spectral_models import (crandall_pazy_spectrum, diagonal_model,
                                     matrix_model)


def test_halfplane_route_reproduces_scalar_resolvent():
    m = diagonal_model([1 + 1j])
    rep = bcalc_apply(m, ResolventKernel(2.0), np.array([1.0]), tol=1e-6)
    assert np.isclose(rep.reference_vector[0], 0.3 - 0.1j, rtol=1e-14)
    assert rep.max_componentwise_error <= 1e-6


def test_halfplane_route_reproduces_damped_cayley():
    m = diagonal_model([1.0])
    k = CayleyResolventKernel(1, 1.0, 1.0, OmegaSequence.constant(1.0, 1))
    rep = bcalc_apply(m, k, np.array([1.0]), tol=1e-6)
    assert np.isclose(rep.reference_vector[0], 1.0 / 9.0, rtol=1e-14)
    assert rep.max_componentwise_error <= 1e-6


def test_zero_vector_is_exact_and_free():
    m = diagonal_model([1.0])
    k = ResolventKernel(1.0)
    rep = bcalc_apply(m, k, np.array([0.0]), tol=1e-6)
    assert rep.result_vector[0] == 0.0
    assert rep.evaluations == 0


def test_halfplane_route_requires_diagonal_stable_model():
    mat = matrix_model(np.diag([1.0 + 0j, 2.0]))
    with pytest.raises(SpectrumError):
        bcalc_apply(mat, ResolventKernel(1.0), np.zeros(2), tol=1e-5)
    borderline = diagonal_model([-0.5 + 1j, 1.0])
    with pytest.raises(SpectrumError):
        bcalc_apply(borderline, ResolventKernel(1.0), np.zeros(2), tol=1e-5)


def test_reproduction_across_kernel_library():
    rng = np.random.default_rng(5)
    for gamma, K in ((1.0, 8), (2.0, 32)):
        m = crandall_pazy_spectrum(gamma, K)
        x = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        x /= np.linalg.norm(x)
        kernels = [
            ResolventKernel(2.0),
            CayleyResolventKernel(4, 1.0, 1.0, OmegaSequence.constant(1.0, 4)),
            InverseSemigroupResolventKernel(2.0, 1.0),
            w_kernel(1.5, 2.0),
        ]
        for k in kernels:
            rep = bcalc_apply(m, k, x, tol=1e-6)
            assert rep.max_componentwise_error <= 1e-5


def test_algebra_homomorphism_spot_check():
    m = crandall_pazy_spectrum(2.0, 8)
    x = np.ones(8, dtype=complex) / math.sqrt(8)
    r1, r2 = ResolventKernel(1.0), ResolventKernel(2.0)
    prod = bcalc_apply(m, ProductKernel(r1, r2), x, tol=1e-6)
    step = bcalc_apply(m, r1, bcalc_apply(m, r2, x, tol=1e-6).result_vector,
                       tol=1e-6)
    assert np.max(np.abs(prod.result_vector - step.result_vector)) <= 1e-5


def test_spectral_norm_dominated_by_derivative_norm():
    # ||f(A)|| <= |f(inf)| + 2 K^2 ||f||, K = 1 for these contraction models
    m = crandall_pazy_spectrum(2.0, 16)
    om = OmegaSequence.constant(1.0, 4)
    for k in (CayleyResolventKernel(4, 1.0, 1.0, om), w_kernel(1.0, 1.0),
              ResolventRatioKernel(1.0, 2.0, 1.0)):
        nrm, _ = operator_norm(m, k)
        bound = abs(k.limit_at_infinity) + 2.0 * b0_norm(k, tol=1e-7).value
        assert nrm <= bound + 1e-7


def test_ray_route_reproduces_scalar_resolvent():
    m = diagonal_model([2.0])
    rep = dcalc_apply(m, ResolventKernel(1.0), 1.0, np.array([1.0]), tol=1e-6)
    assert np.isclose(rep.reference_vector[0], 1.0 / 3.0, rtol=1e-14)
    assert rep.max_componentwise_error <= 1e-5


def test_ray_route_constant_is_exact():
    m = diagonal_model([2.0])
    rep = dcalc_apply(m, ConstantKernel(2.5 + 0.5j), 1.0, np.array([2.0]), tol=1e-6)
    assert rep.max_componentwise_error == 0.0
    assert rep.result_vector[0] == (2.5 + 0.5j) * 2.0


def test_ray_route_order_consistency():
    k = CayleyResolventKernel(2, 0.5, 0.5, OmegaSequence.constant(1.0, 2),
                              anchor="max")
    m = crandall_pazy_spectrum(2.0, 4)
    x = np.full(4, 0.5, dtype=complex)
    r0 = dcalc_apply(m, k, 0.0, x, tol=1e-6)
    r1 = dcalc_apply(m, k, 1.0, x, tol=1e-6)
    assert r0.max_componentwise_error <= 1e-5
    assert r1.max_componentwise_error <= 1e-5
    assert np.max(np.abs(r0.result_vector - r1.result_vector)) <= 1e-5


def test_ray_route_sector_check():
    bad = diagonal_model([-1.0 + 2j, 1.0])
    with pytest.raises(SpectrumError):
        dcalc_apply(bad, ResolventKernel(1.0), 1.0, np.zeros(2), tol=1e-5)
    with pytest.raises(ValueError):
        dcalc_apply(diagonal_model([1.0]), ResolventKernel(1.0), -1.5,
                    np.array([1.0]), tol=1e-5)


def test_vector_length_checked():
    m = crandall_pazy_spectrum(1.0, 4)
    with pytest.raises(ValueError):
        bcalc_apply(m, ResolventKernel(1.0), np.ones(3), tol=1e-5)
