"""Functional-calculus norms and their closed-form envelopes.

Three integral norms of a holomorphic kernel f on the right half-plane:

* plain derivative norm       int_0^inf sup_eta |f'(xi + i eta)| dxi
* weighted derivative norm    same with weight phi_q (1 below 1, xi**q above)
* ray-integral norm           int_{-pi/2}^{pi/2} cos^s(th) int_0^inf |f'(r e^{i th})| dr dth

plus the crossover abscissa xi1(n), the two-branch closed suprema that make
the weighted-norm integrals tractable, beta-function asymptotics, and the
logarithmic rate envelopes used to judge fitted decay exponents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betaln, gammaln

from .errors import DivergenceError, KernelDomainError, PreThresholdError, QuadratureError
from .kernels import Kernel
from .quadrature import (QuadResult, _adaptive_interval, _EvalCounter,
                         _semi_infinite_vec, _sup_on_rays_batch,
                         max_on_halfline, sup_on_vertical_line)


@dataclass(frozen=True)
class WeightPhiQ:
    """Weight equal to 1 on (0, 1) and xi**q on [1, inf), 0 < q < 1."""

    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError("weight exponent q must lie in (0, 1)")

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.where(xi < 1.0, 1.0, xi**self.q)


def _emit_audit(audit, record):
    if audit is None:
        return
    line = json.dumps(record, sort_keys=True)
    if callable(audit):
        audit(line)
    else:
        audit.write(line + "\n")


def _sup_abs_derivative(kernel: Kernel, xi: float, sup_tol: float) -> float:
    def g(etas):
        return np.abs(kernel.derivative(xi + 1j * np.asarray(etas)))
    # the hump never sits far beyond the abscissa scale for these kernels
    return sup_on_vertical_line(g, tol=sup_tol, h0=8.0 * (1.0 + xi))


def b0_norm(spec: Kernel, tol: float = 1e-8, weight=None, audit=None) -> QuadResult:
    """Integral over xi of the vertical-line sup of |f'|, optionally weighted.

    The vertical-line suprema for all abscissae of a quadrature panel are
    located in one batched search (one derivative evaluation per refinement
    step serves the whole panel).  Divergence of the tail (e.g. weighting a
    kernel whose derivative decays no faster than xi**(-1-q)) surfaces as a
    DivergenceError.
    """
    if not spec.has_derivative:
        raise KernelDomainError(f"{type(spec).__name__} has no derivative available")
    sup_tol = min(1e-9, tol * 1e-2)

    def integrand(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))

        def g(eta_mat):
            z = xs[:, None] + 1j * eta_mat
            return np.abs(spec.derivative(z))

        sups = _sup_on_rays_batch(g, 8.0 * (1.0 + xs), sup_tol)
        if weight is not None:
            sups = sups * weight(xs)
        return sups

    value, err, evals, tail = _semi_infinite_vec(integrand, tol)
    res = QuadResult(float(np.real(np.asarray(value).reshape(()))), float(err),
                     evals, float(tail))
    _emit_audit(audit, {"op": "b0_norm" if weight is None else "weighted_b0_norm",
                        "kernel": type(spec).__name__, "value": res.value,
                        "abs_error_estimate": res.abs_error_estimate,
                        "evaluations": res.evaluations})
    return res


def weighted_b0_norm(spec: Kernel, weight: WeightPhiQ, tol: float = 1e-8,
                     audit=None) -> QuadResult:
    """phi_q-weighted derivative norm; finite only while the kernel's decay
    exponent exceeds q."""
    return b0_norm(spec, tol=tol, weight=weight, audit=audit)


def ds_norm(spec: Kernel, s: float, tol: float = 1e-7, audit=None) -> QuadResult:
    """Ray-integral norm in polar form: outer cos^s(theta), inner radial."""
    if s <= -1.0:
        raise ValueError("need s > -1")
    if not spec.has_derivative:
        raise KernelDomainError(f"{type(spec).__name__} has no derivative available")
    inner_tol = tol / 20.0

    def radial(theta: float) -> float:
        u = np.exp(1j * theta)

        def f(rs):
            return np.abs(spec.derivative(np.asarray(rs, dtype=float) * u))

        value, _, _, _ = _semi_infinite_vec(f, inner_tol)
        return float(np.real(np.asarray(value).reshape(())))

    counter = _EvalCounter()

    def outer(thetas):
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        counter.count += len(thetas)
        return np.array([np.cos(t)**s * radial(t) for t in thetas])

    half = np.pi / 2.0
    val, err, _ = _adaptive_interval(outer, -half, half, tol, counter, budget=3_000_000)
    res = QuadResult(float(np.real(np.asarray(val).reshape(()))), float(err),
                     counter.count, 0.0)
    _emit_audit(audit, {"op": "ds_norm", "kernel": type(spec).__name__, "s": s,
                        "value": res.value, "abs_error_estimate": res.abs_error_estimate,
                        "evaluations": res.evaluations})
    return res


@dataclass(frozen=True)
class Xi1Result:
    """Positive root of the crossover quadratic, with threshold diagnostics.

    The quadratic -xi**2 + 2 B xi + C with
        B = 2 omega n/(alpha+1) - c + omega,
        C = 4 c omega n/(alpha+1) - (c - omega)**2
    has a unique positive root iff C > 0 (or C == 0 with B > 0); below that
    threshold the closed two-branch supremum does not apply.
    """

    value: float
    discriminant: float
    constant_term: float
    unique_positive: bool
    n1_estimate: int


def xi1(n: float, alpha: float, c: float, omega: float) -> Xi1Result:
    """Crossover abscissa: B + 2 omega sqrt(n(n+alpha+1))/(alpha+1)."""
    if min(n, alpha, c, omega) <= 0:
        raise ValueError("all of n, alpha, c, omega must be positive")
    a1 = alpha + 1.0
    B = 2.0 * omega * n / a1 - c + omega
    C = 4.0 * c * omega * n / a1 - (c - omega)**2
    disc = B * B + C
    value = B + 2.0 * omega * math.sqrt(n * (n + a1)) / a1
    unique = C > 0.0 or (C == 0.0 and B > 0.0)
    n1 = max(1, math.ceil(a1 * (c - omega)**2 / (4.0 * c * omega)))
    return Xi1Result(value, disc, C, unique, n1)


def _log_g_second_branch(xi, n, alpha, c, omega):
    return n * math.log(xi + c - omega) - (n + alpha + 1.0) * math.log(xi + c + omega)


def g_sup_closed(xi: float, n: float, alpha: float, c: float, omega: float) -> float:
    """Closed supremum over s >= 0 of
        ((xi+c-omega)**2 + s)**(n/2) / ((xi+c+omega)**2 + s)**((n+alpha+1)/2).

    Two branches split at xi1(n); evaluated in log space so large n neither
    overflows nor underflows prematurely.
    """
    info = xi1(n, alpha, c, omega)
    if not info.unique_positive:
        raise PreThresholdError(
            f"n={n} is below the crossover threshold (estimated n1={info.n1_estimate}); "
            "use the numeric supremum", n1=info.n1_estimate)
    a1 = alpha + 1.0
    if xi <= info.value:
        log_val = 0.5 * n * math.log(n / (n + a1)) \
            + 0.5 * a1 * math.log(a1 / (4.0 * omega * (n + a1))) \
            - 0.5 * a1 * math.log(xi + c)
        return math.exp(log_val)
    return math.exp(_log_g_second_branch(xi, n, alpha, c, omega))


def g_sup_numeric(xi: float, n: float, alpha: float, c: float, omega: float,
                  tol: float = 1e-12) -> float:
    """Direct maximization over s >= 0 of the same two-parameter quotient."""
    u = xi + c - omega
    v = xi + c + omega

    def g(ss):
        ss = np.asarray(ss, dtype=float)
        return np.exp(0.5 * n * np.log(u * u + ss)
                      - 0.5 * (n + alpha + 1.0) * np.log(v * v + ss))

    return max_on_halfline(g, tol=tol, h0=max(4.0, 8.0 * v * v * (n + 1)))


def fta_sup_closed(zeta: float, t: float, beta: float) -> float:
    """Closed supremum over s >= 0 of exp(-t zeta/(zeta**2+s)) (zeta**2+s)**(-beta/2).

    The maximizer leaves s = 0 exactly when t exceeds beta*zeta/2; past it
    the supremum decays like (t zeta)**(-beta/2).
    """
    if zeta <= 1.0 or beta <= 0.0 or t < 0.0:
        raise ValueError("need zeta > 1, beta > 0, t >= 0")
    if t <= beta * zeta / 2.0:
        return math.exp(-t / zeta) / zeta**beta
    cst = (beta / (2.0 * math.e))**(beta / 2.0)
    return cst / (t * zeta)**(beta / 2.0)


def fta_sup_numeric(zeta: float, t: float, beta: float, tol: float = 1e-12) -> float:
    def g(ss):
        ss = np.asarray(ss, dtype=float)
        den = zeta * zeta + ss
        return np.exp(-t * zeta / den) / den**(beta / 2.0)

    return max_on_halfline(g, tol=tol, h0=max(4.0, 4.0 * zeta * max(t, 1.0)))


def beta_function(s: float, t: float) -> float:
    """Euler beta via log-gamma; positive arguments only."""
    if s <= 0 or t <= 0:
        raise ValueError("beta function arguments must be positive")
    return math.exp(gammaln(s) + gammaln(t) - gammaln(s + t))


def stirling_ratio(n: float, alpha: float) -> float:
    """n**alpha * B(n+1, alpha); approaches Gamma(alpha) as n grows."""
    if n <= 0 or alpha <= 0:
        raise ValueError("need n > 0 and alpha > 0")
    return math.exp(alpha * math.log(n) + betaln(n + 1.0, alpha))


@dataclass(frozen=True)
class RateEnvelope:
    """Piecewise rate envelope: kind 'F' (kernel-norm decay in n) or
    'L' (logarithmic correction to the product decay rate)."""

    kind: str
    alpha: float
    q: float = 0.0
    beta: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if self.kind == "F":
            if not (self.alpha > self.q > 0):
                raise ValueError("F envelope needs alpha > q > 0")
        elif self.kind == "L":
            if not (self.alpha > 0 and self.eps > 0 and 0 < self.beta <= 1):
                raise ValueError("L envelope needs alpha, eps > 0 and beta in (0, 1]")
        else:
            raise ValueError(f"unknown envelope kind {self.kind!r}")


def F_alpha_q(n: float, alpha: float, q: float) -> float:
    """Three-regime decay envelope for the weighted kernel norms."""
    if not (alpha > q > 0):
        raise ValueError("need alpha > q > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 2.0 * q:
        return n**(-(alpha - q))
    if alpha == 2.0 * q:
        return math.log(n + 1.0) / n**q
    return n**(-alpha / 2.0)


def L_envelope(tau: float, alpha: float, beta: float, eps: float) -> float:
    """Logarithmic envelope multiplying tau**(-alpha/(2-beta))."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not (alpha > 0 and eps > 0 and 0 < beta <= 1):
        raise ValueError("need alpha, eps > 0 and beta in (0, 1]")
    if alpha < (2.0 - beta) / 2.0:
        return math.log(tau + 1.0)
    return math.log(tau + 1.0)**(2.0 * alpha / (2.0 - beta) + eps)


def rate_envelope_eval(env: RateEnvelope, tau: float) -> float:
    if env.kind == "F":
        if abs(tau - round(tau)) > 1e-9:
            raise ValueError("F envelope takes integer arguments")
        return F_alpha_q(round(tau), env.alpha, env.q)
    return L_envelope(tau, env.alpha, env.beta, env.eps)


def adjust_omega_min(c: float, omega_min: float, omega_max: float) -> float:
    """Widened lower step bound min(omega_min, c**2/omega_max).

    Guarantees c**2 >= (adjusted omega_min) * omega_max, the condition under
    which every admissible Cayley factor modulus is dominated by the one at
    the adjusted lower bound.
    """
    if min(c, omega_min, omega_max) <= 0 or omega_min > omega_max:
        raise ValueError("need 0 < omega_min <= omega_max and c > 0")
    return min(omega_min, c * c / omega_max)


def sup_norm_halfplane(spec: Kernel, safety_res=(0.01, 0.1, 1.0, 10.0)) -> float:
    """sup of |f| over the right half-plane, from boundary maximization.

    For bounded holomorphic kernels with limits along the axis the sup is
    taken on the imaginary axis; a sweep over a few interior vertical lines
    guards against implementation slips.
    """
    best = 0.0
    for re in (0.0,) + tuple(safety_res):
        def g(etas, re=re):
            return np.abs(spec.value(re + 1j * np.asarray(etas)))
        best = max(best, sup_on_vertical_line(g, tol=1e-10))
    return best
