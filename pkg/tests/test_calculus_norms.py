import io
import json
import math

import numpy as np
import pytest

from cpsglab.calculus_norms import (F_alpha_q, L_envelope, RateEnvelope,
                                    WeightPhiQ, adjust_omega_min, b0_norm,
                                    beta_function, ds_norm, fta_sup_closed,
                                    fta_sup_numeric, g_sup_closed,
                                    g_sup_numeric, rate_envelope_eval,
                                    stirling_ratio, sup_norm_halfplane,
                                    weighted_b0_norm, xi1)
from cpsglab.errors import (DivergenceError, KernelDomainError,
                            PreThresholdError, QuadratureError)
from cpsglab.kernels import (CayleyResolventKernel, ConstantKernel,
                             InverseSemigroupResolventKernel, OmegaSequence,
                             ProductKernel, ResolventRatioKernel,
                             SemigroupKernel, w_kernel)


def fnaw(n, alpha=1.0, c=1.0, omega=1.0, anchor="min"):
    return CayleyResolventKernel(n, alpha, c, OmegaSequence.constant(omega, n),
                                 anchor=anchor)


def test_b0_norm_of_unit_resolvent_power():
    r = b0_norm(w_kernel(1.0, 1.0), tol=1e-9)
    assert abs(r.value - 1.0) <= 1e-9
    assert r.abs_error_estimate <= 1e-9


def test_b0_norm_of_constant_vanishes():
    assert b0_norm(ConstantKernel(5.0), tol=1e-9).value == 0.0


def test_b0_norm_needs_a_derivative():
    with pytest.raises(KernelDomainError):
        b0_norm(SemigroupKernel(1.0), tol=1e-8)


def test_b0_scaling_of_damped_cayley():
    # decay like n**(-1/2); the constant settles slowly from below, so the
    # bound fitted at n = 16 gets 20% slack
    b16 = b0_norm(fnaw(16), tol=1e-7).value
    b64 = b0_norm(fnaw(64), tol=1e-7).value
    assert b64 < b16
    assert b64 <= 1.2 * (b16 * 4.0) / 8.0


def test_weighted_norm_closed_value():
    # split at 1: int_0^1 (1+xi)^-2 = 1/2 and int_1^inf sqrt(xi)(1+xi)^-2
    # = pi/4 + 1/2, so the weighted norm is 1 + pi/4
    r = weighted_b0_norm(w_kernel(1.0, 1.0), WeightPhiQ(0.5), tol=1e-9)
    assert abs(r.value - (1.0 + math.pi / 4.0)) <= 1e-9


def test_weighted_norm_ratio_kernel_bound():
    bound = 0.25 + 2.0 / math.sqrt(3.0)
    r = weighted_b0_norm(ResolventRatioKernel(1.0, 2.0, 1.0), WeightPhiQ(0.5),
                         tol=1e-8)
    assert r.value <= bound
    assert r.value >= 0.5 * bound


def test_weighted_norm_constant_vanishes():
    assert weighted_b0_norm(ConstantKernel(1.0), WeightPhiQ(0.25), tol=1e-9).value == 0.0


def test_weighted_norm_divergence_below_weight_exponent():
    with pytest.raises((DivergenceError, QuadratureError)):
        weighted_b0_norm(w_kernel(0.3, 1.0), WeightPhiQ(0.5), tol=1e-6)


def test_weight_dominates_plain_norm():
    for k in (fnaw(8), w_kernel(1.0, 1.0), ResolventRatioKernel(1.0, 2.0, 1.0)):
        plain = b0_norm(k, tol=1e-7).value
        weighted = weighted_b0_norm(k, WeightPhiQ(0.3), tol=1e-7).value
        assert weighted >= plain - 1e-7


def test_weight_phi_q_domain():
    w = WeightPhiQ(0.5)
    assert w(0.5) == 1.0 and w(4.0) == 2.0
    with pytest.raises(ValueError):
        WeightPhiQ(0.0)
    with pytest.raises(ValueError):
        WeightPhiQ(1.0)


def test_audit_records_are_json_lines():
    buf = io.StringIO()
    b0_norm(w_kernel(1.0, 1.0), tol=1e-8, audit=buf)
    rec = json.loads(buf.getvalue().strip())
    assert rec["op"] == "b0_norm"
    assert abs(rec["value"] - 1.0) <= 1e-8
    assert rec["evaluations"] > 0


def test_ds_norm_constant_vanishes():
    assert ds_norm(ConstantKernel(2.0), 2.0, tol=1e-8).value == 0.0


def test_ds_norm_lower_bound_via_axis_supremum():
    # anchored-at-max kernel with c = omega = 1/2 reduces to
    # z^n/(z+1)^(n+alpha); its ray norm dominates
    # pi/2^((3s+4)/2) * sup_{xi>0} f(xi)
    s = 2.0
    kex = CayleyResolventKernel(4, 1.0, 0.5, OmegaSequence.constant(0.5, 4),
                                anchor="max")
    xs = np.geomspace(1e-3, 1e3, 100001)
    sup_axis = float(np.max(np.abs(kex.value(xs))))
    # oracle cross-check of the axis sup: maximizer of xi^4/(xi+1)^5 is xi=4
    assert abs(sup_axis - 4.0**4 / 5.0**5) <= 1e-7
    val = ds_norm(kex, s, tol=1e-6).value
    assert val >= math.pi / 2.0**((3 * s + 4) / 2) * sup_axis

    # the spec-variant parameters (omega = 1) satisfy the same bound
    kv = CayleyResolventKernel(4, 1.0, 0.5, OmegaSequence.constant(1.0, 4),
                               anchor="max")
    sup_v = float(np.max(np.abs(kv.value(xs))))
    assert ds_norm(kv, s, tol=1e-6).value >= math.pi / 2.0**((3 * s + 4) / 2) * sup_v


def test_ds_norm_decay_in_n():
    def fnapp(n):
        return CayleyResolventKernel(n, 1.0, 0.5, OmegaSequence.constant(1.0, n),
                                     anchor="max")
    d8 = ds_norm(fnapp(8), 2.0, tol=1e-6).value
    d64 = ds_norm(fnapp(64), 2.0, tol=1e-6).value
    assert d64 < d8
    # 1/n scaling with a slowly settling constant: 50% slack on the bound
    # fitted at n = 8
    assert 64 * d64 <= 1.5 * 8 * d8


def test_ds_norm_monotone_in_weight_order():
    k = fnaw(8, anchor="max", c=0.5)
    v_small = ds_norm(k, 1.2, tol=1e-6).value
    v_large = ds_norm(k, 2.4, tol=1e-6).value
    assert v_large <= v_small + 1e-9


def test_xi1_closed_root():
    res = xi1(2, 1.0, 1.0, 1.0)
    assert np.isclose(res.value, 2.0 + math.sqrt(8.0), rtol=1e-14)
    assert res.unique_positive
    # oracle: numpy root of the quadratic -xi^2 + 2B xi + C
    B = 2.0 * 1.0 * 2 / 2.0 - 1.0 + 1.0
    C = 4.0 * 1.0 * 1.0 * 2 / 2.0 - 0.0
    roots = np.roots([-1.0, 2.0 * B, C])
    pos = roots[roots > 0]
    assert len(pos) == 1 and np.isclose(res.value, pos[0], rtol=1e-12)


def test_xi1_linear_growth():
    n = 10**4
    r1 = xi1(n, 1.0, 1.0, 1.0).value
    r4 = xi1(4 * n, 1.0, 1.0, 1.0).value
    assert abs(r4 / r1 - 4.0) <= 0.04


def test_xi1_degenerate_constant_term():
    res = xi1(5, 2.0, 1.5, 1.5)
    assert res.constant_term > 0.0
    B = 2.0 * 1.5 * 5 / 3.0
    roots = np.roots([-1.0, 2.0 * B, 4.0 * 1.5 * 1.5 * 5 / 3.0])
    pos = float(roots[roots > 0][0])
    assert abs(res.value - pos) / pos <= 1e-12


def test_g_sup_second_branch_is_definition_at_zero():
    n, alpha, c, omega = 8, 1.0, 1.0, 1.0
    x = 2.0 * xi1(n, alpha, c, omega).value
    expected = (x + c - omega)**n / (x + c + omega)**(n + alpha + 1)
    assert np.isclose(g_sup_closed(x, n, alpha, c, omega), expected, rtol=1e-14)


def test_g_sup_matches_numeric_maximization():
    for xi in (0.5, 1.0, 20.0, 200.0):
        closed = g_sup_closed(xi, 8, 1.0, 1.0, 1.0)
        numeric = g_sup_numeric(xi, 8, 1.0, 1.0, 1.0)
        assert abs(closed - numeric) / closed <= 1e-8


def test_g_sup_branch_continuity():
    for (n, alpha, c, omega) in ((8, 1.0, 1.0, 1.0), (32, 0.6, 0.5, 2.0)):
        xj = xi1(n, alpha, c, omega).value
        lo = g_sup_closed(xj * (1 - 1e-12), n, alpha, c, omega)
        hi = g_sup_closed(xj * (1 + 1e-12), n, alpha, c, omega)
        assert abs(lo - hi) / lo <= 1e-10


def test_g_sup_pre_threshold_rejected_with_fallback():
    # widely separated c and omega push the crossover index up
    with pytest.raises(PreThresholdError) as exc_info:
        g_sup_closed(1.0, 1, 1.0, 10.0, 0.1)
    assert exc_info.value.n1 is not None and exc_info.value.n1 > 1
    val = g_sup_numeric(1.0, 1, 1.0, 10.0, 0.1)
    assert val > 0.0


def test_fta_sup_examples():
    assert fta_sup_closed(2.0, 0.0, 1.0) == 0.5
    junction = fta_sup_closed(2.0, 1.0, 1.0)
    assert np.isclose(junction, math.exp(-0.5) / 2.0, rtol=1e-14)
    assert np.isclose(junction, math.sqrt(1.0 / (2 * math.e)) / math.sqrt(2.0),
                      rtol=1e-14)
    closed = fta_sup_closed(2.0, 10.0, 1.0)
    assert np.isclose(closed, math.sqrt(1.0 / (2 * math.e)) / math.sqrt(20.0),
                      rtol=1e-14)
    assert abs(closed - fta_sup_numeric(2.0, 10.0, 1.0)) / closed <= 1e-8


def test_fta_sup_junction_continuity():
    for zeta, beta in ((2.0, 1.0), (3.0, 0.7)):
        tj = beta * zeta / 2.0
        lo = fta_sup_closed(zeta, tj * (1 - 1e-12), beta)
        hi = fta_sup_closed(zeta, tj * (1 + 1e-12), beta)
        assert abs(lo - hi) / lo <= 1e-10


def test_beta_function_values():
    assert np.isclose(beta_function(3.0, 1.0), 1.0 / 3.0, rtol=1e-14)
    assert np.isclose(beta_function(0.5, 0.5), math.pi, rtol=1e-13)
    with pytest.raises(ValueError):
        beta_function(-1.0, 2.0)


def test_stirling_ratio_limit():
    for alpha in (0.5, 1.0, 1.5):
        assert abs(stirling_ratio(1e4, alpha) - math.gamma(alpha)) <= 1e-3


def test_envelope_values():
    assert F_alpha_q(16, 1.0, 0.25) == 0.25
    assert np.isclose(F_alpha_q(1, 0.5, 0.25), math.log(2.0))
    assert np.isclose(F_alpha_q(16, 0.3, 0.25), 16.0**-0.05)
    # formula value (log 2)**2.1 for the alpha >= (2-beta)/2 branch
    assert np.isclose(L_envelope(1.0, 1.0, 1.0, 0.1), math.log(2.0)**2.1,
                      rtol=1e-14)
    assert np.isclose(L_envelope(3.0, 0.2, 1.0, 0.1), math.log(4.0))


def test_envelope_domains():
    with pytest.raises(ValueError):
        F_alpha_q(4, 0.2, 0.25)
    with pytest.raises(ValueError):
        L_envelope(1.0, 1.0, 1.5, 0.1)
    with pytest.raises(ValueError):
        L_envelope(-1.0, 1.0, 1.0, 0.1)


def test_rate_envelope_eval_dispatch():
    f = RateEnvelope("F", alpha=1.0, q=0.25)
    assert rate_envelope_eval(f, 16) == 0.25
    with pytest.raises(ValueError):
        rate_envelope_eval(f, 16.5)
    l = RateEnvelope("L", alpha=1.0, beta=1.0, eps=0.1)
    assert np.isclose(rate_envelope_eval(l, 1.0), math.log(2.0)**2.1)
    with pytest.raises(ValueError):
        RateEnvelope("F", alpha=0.2, q=0.25)
    with pytest.raises(ValueError):
        RateEnvelope("G", alpha=1.0)


def test_adjust_omega_min():
    assert adjust_omega_min(1.0, 0.5, 2.0) == 0.5
    assert adjust_omega_min(0.5, 0.5, 2.0) == 0.125
    adj = adjust_omega_min(0.7, 0.9, 3.0)
    assert 0.7**2 >= adj * 3.0 - 1e-15
    with pytest.raises(ValueError):
        adjust_omega_min(1.0, 2.0, 1.0)


def test_product_estimate():
    # the weighted norm of a product against the factor norms, with the
    # sup norm from boundary maximization
    W = WeightPhiQ(0.3)
    f = fnaw(8)
    g = ResolventRatioKernel(1.0, 2.0, 1.0)
    nf = weighted_b0_norm(f, W, tol=1e-7).value
    ng = weighted_b0_norm(g, W, tol=1e-7).value
    nfg = weighted_b0_norm(ProductKernel(f, g), W, tol=1e-7).value
    gsup = sup_norm_halfplane(g)
    assert abs(f.limit_at_infinity) == 0.0
    assert nfg <= nf * (ng + gsup) + 1e-9


def test_sup_norm_halfplane_of_ratio_kernel():
    assert abs(sup_norm_halfplane(ResolventRatioKernel(1.0, 2.0, 1.0)) - 1.0) <= 1e-8
