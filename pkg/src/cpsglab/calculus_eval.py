"""Integral evaluation of f(A)x against direct spectral application.

Two integral routes are implemented for diagonal models:

* half-plane route:  f(inf) x - (2/pi) int_0^inf xi int_R
      f'(xi + i eta) (xi - i eta + A)^{-2} x  d eta d xi
* ray-weighted route of order s:  f(inf) x - (2^s/pi) int_0^inf xi^s int_R
      f'(xi + i eta) (A + xi - i eta)^{-(s+1)} x  d eta d xi

Diagonal resolvents are scalars, so both routes reduce to nested quadrature
of complex scalar integrands, one component per active mode.  The spectral
reference f(lambda_k) x_k is exact for normal models and serves as the
oracle the integral route is judged against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectrumError
from .kernels import Kernel, limit_at_infinity_checked
from .quadrature import _real_line_vec, _semi_infinite_vec
from .spectral_models import SpectrumModel


@dataclass
class CalcEvalReport:
    result_vector: np.ndarray
    reference_vector: np.ndarray
    max_componentwise_error: float
    evaluations: int


def _active_modes(x, K):
    x = np.asarray(x, dtype=complex)
    if x.shape != (K,):
        raise ValueError(f"vector length {x.shape} does not match truncation {K}")
    return x, np.nonzero(x)[0]


def _nested_halfplane_integral(kernel, lams, weight_exponent, resolvent_power,
                               tol):
    """int_0^inf xi^w [ int_R f'(xi+i eta) (xi - i eta + lam)^{-p} d eta ] d xi
    for each lam in ``lams``; returns (values, evaluations)."""
    evals_box = [0]
    eta_scale = 1.0 + float(np.max(np.abs(lams.imag)))

    def inner(xi):
        # the outer weight xi**w amplifies inner errors; shrink the inner
        # tolerance accordingly
        inner_tol = tol / (100.0 * (1.0 + xi)**max(1.0, weight_exponent))

        def f(etas):
            etas = np.asarray(etas, dtype=float)
            fp = kernel.derivative(xi + 1j * etas)
            res = (xi - 1j * etas)[:, None] + lams[None, :]
            return fp[:, None] * np.exp(-resolvent_power * np.log(res))

        val, _, n, _ = _real_line_vec(f, inner_tol, u0=xi + eta_scale)
        evals_box[0] += n
        return val

    def outer(xis):
        xis = np.atleast_1d(np.asarray(xis, dtype=float))
        rows = []
        for xi in xis:
            w = xi**weight_exponent if xi > 0 else (1.0 if weight_exponent == 0 else 0.0)
            rows.append(w * inner(xi))
        return np.asarray(rows)

    value, _, n_outer, _ = _semi_infinite_vec(outer, tol)
    return np.asarray(value), evals_box[0] + n_outer


def bcalc_apply(model: SpectrumModel, spec: Kernel, x, tol: float = 1e-6) -> CalcEvalReport:
    """Half-plane integral route for f(A)x on a diagonal model.

    Requires Re lambda_k > 0 (bounded semigroup regime) and a kernel with a
    closed derivative and a known limit at infinity (validated against the
    positive real axis before use).
    """
    if model.kind != "diagonal":
        raise SpectrumError("integral calculus evaluation supports diagonal models only")
    lams = model.eigenvalues
    if np.any(lams.real <= 0):
        raise SpectrumError("half-plane route needs Re lambda > 0 for every mode")
    x, active = _active_modes(x, model.truncation)
    finf = limit_at_infinity_checked(spec)

    result = finf * x.copy()
    evals = 0
    if len(active) > 0:
        vals, evals = _nested_halfplane_integral(
            spec, lams[active], weight_exponent=1.0, resolvent_power=2.0, tol=tol)
        result[active] = (finf - (2.0 / np.pi) * vals) * x[active]

    reference = spec.value(lams) * x
    err = float(np.max(np.abs(result - reference))) if len(x) else 0.0
    return CalcEvalReport(result, reference, err, evals)


def dcalc_apply(model: SpectrumModel, spec: Kernel, s: float, x,
                tol: float = 1e-6) -> CalcEvalReport:
    """Ray-weighted integral route of order s for f(A)x on a diagonal model.

    The spectrum must be confined to a sector of half-angle strictly below
    pi/2 (checked); resolvent powers use the principal branch.
    """
    if model.kind != "diagonal":
        raise SpectrumError("integral calculus evaluation supports diagonal models only")
    if s <= -1:
        raise ValueError("need s > -1")
    lams = model.eigenvalues
    if np.any(lams.real <= 0):
        raise SpectrumError("sector check failed: Re lambda <= 0 present")
    angle = float(np.max(np.abs(np.angle(lams))))
    if angle >= np.pi / 2:
        raise SpectrumError(
            f"sector check failed: spectral angle {angle:.4f} not below pi/2")
    x, active = _active_modes(x, model.truncation)
    finf = limit_at_infinity_checked(spec)

    result = finf * x.copy()
    evals = 0
    if len(active) > 0:
        vals, evals = _nested_halfplane_integral(
            spec, lams[active], weight_exponent=float(s),
            resolvent_power=float(s) + 1.0, tol=tol)
        result[active] = (finf - (2.0**s / np.pi) * vals) * x[active]

    reference = spec.value(lams) * x
    err = float(np.max(np.abs(result - reference))) if len(x) else 0.0
    return CalcEvalReport(result, reference, err, evals)
