"""Resolvent integral conditions and Lyapunov quadratic forms.

For diagonal models every eta-integral collapses to the closed per-mode form

    int_R |(lam + c)^p|^2 / |xi + i eta + lam|^2 d eta
        = pi |lam + c|^(2p) / (xi + Re lam),

so the weighted suprema over xi reduce to one-dimensional maximizations with
an analytic stationary point.  Quadrature cross-checks of the same
quantities are provided for the oracle tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SpectrumError
from .kernels import CayleyProductKernel, OmegaSequence
from .quadrature import _real_line_vec, _semi_infinite_vec
from .spectral_models import SpectrumModel


@dataclass
class ConditionIIIReport:
    sup_value: float
    attaining_xi: float
    attaining_mode: int
    parameters: dict

    def to_json(self) -> str:
        return json.dumps({
            "sup_value": self.sup_value,
            "attaining_xi": self.attaining_xi,
            "attaining_mode": self.attaining_mode,
            "parameters": self.parameters,
        }, sort_keys=True)


def _mode_weight(lams: np.ndarray, shift: float, p: float) -> np.ndarray:
    """|(lam + shift)^p|^2 = |lam + shift|^(2p), safe at p = 0."""
    if p == 0.0:
        return np.ones(len(lams))
    return np.abs(lams + shift)**(2.0 * p)


def _sup_xi_weighted(a: float, w: float, lo: float) -> tuple[float, float]:
    """sup over xi > lo of xi**w / (xi + a) for 0 < w < 1, with maximizer.

    The stationary point is xi* = a w/(1-w); if it falls at or below the
    boundary the supremum is approached at xi -> lo+.
    """
    if not (0.0 < w < 1.0):
        raise ValueError("weight exponent must lie in (0, 1)")
    xi_star = a * w / (1.0 - w)
    xi = xi_star if xi_star > lo else lo
    return xi**w / (xi + a), xi


def condition_iii_value(model: SpectrumModel, beta: float, q: float,
                        c: float) -> ConditionIIIReport:
    """sup over unit x and xi > c of
        xi^(1-2q) int_R ||(A+c)^(beta q) (xi + i eta + A)^{-1} x||^2 d eta.

    For a diagonal model the quadratic form is diagonal, so the sup over
    unit vectors is the max over basis vectors; each mode admits the closed
    per-mode reduction and a 1-D maximization in xi.
    """
    if model.kind != "diagonal":
        raise SpectrumError("the basis-vector reduction needs a diagonal model")
    if not (0.0 < q < 0.5):
        raise ValueError("need q in (0, 1/2)")
    if not (0.0 < beta <= 1.0):
        raise ValueError("need beta in (0, 1]")
    if c <= model.growth_bound:
        raise SpectrumError(
            f"need c > growth bound ({model.growth_bound}); got c={c}")
    lams = model.eigenvalues
    weights = _mode_weight(lams, c, beta * q)
    w = 1.0 - 2.0 * q

    best_val, best_xi, best_mode = -np.inf, c, 1
    for k, (a, wt) in enumerate(zip(lams.real, weights)):
        u, xi = _sup_xi_weighted(a, w, c)
        val = math.pi * wt * u
        if val > best_val:
            best_val, best_xi, best_mode = val, xi, k + 1
    return ConditionIIIReport(
        sup_value=float(best_val),
        attaining_xi=float(best_xi),
        attaining_mode=best_mode,
        parameters={"beta": beta, "q": q, "c": c, "K": model.truncation},
    )


def condition_iii_form(model: SpectrumModel, beta: float, q: float, c: float,
                       xi: float, x) -> float:
    """The condition quadratic form at a fixed xi and vector x (closed form)."""
    if model.kind != "diagonal":
        raise SpectrumError("diagonal models only")
    x = np.asarray(x, dtype=complex)
    lams = model.eigenvalues
    weights = _mode_weight(lams, c, beta * q)
    per_mode = math.pi * weights / (xi + lams.real)
    return float(xi**(1.0 - 2.0 * q) * np.sum(np.abs(x)**2 * per_mode))


def mode_integral_closed(lam: complex, p: float, shift: float, xi: float) -> float:
    """pi |lam + shift|^(2p) / (xi + Re lam)."""
    return math.pi * float(_mode_weight(np.array([lam]), shift, p)[0]) / (xi + lam.real)


def mode_integral_quadrature(lam: complex, p: float, shift: float, xi: float,
                             tol: float = 1e-10) -> float:
    """Direct eta-integration of |(lam+shift)^p|^2/((xi+Re lam)^2+(eta+Im lam)^2)."""
    wt = float(_mode_weight(np.array([lam]), shift, p)[0])
    a = xi + lam.real
    b = lam.imag

    def f(etas):
        etas = np.asarray(etas, dtype=float)
        return wt / (a * a + (etas + b)**2)

    val, _, _, _ = _real_line_vec(f, tol)
    return float(np.real(np.asarray(val).reshape(())))


def plancherel_sides(model: SpectrumModel, beta: float, q: float, xi: float,
                     mode_index: int, tol: float = 1e-10):
    """Frequency-side and time-side integrals for one basis mode, plus the
    shared closed form.

    Frequency side: int_R ||A^(beta q) (xi + i eta + A)^{-1} e_k||^2 d eta.
    Time side:      2 pi int_0^inf e^{-2 xi t} ||A^(beta q) e^{-tA} e_k||^2 dt.
    Both equal pi |lam_k|^(2 beta q) / (xi + Re lam_k).
    """
    if model.kind != "diagonal":
        raise SpectrumError("diagonal models only")
    if not (1 <= mode_index <= model.truncation):
        raise SpectrumError(f"mode index {mode_index} out of range")
    lam = complex(model.eigenvalues[mode_index - 1])
    p = beta * q
    wt = float(_mode_weight(np.array([lam]), 0.0, p)[0])

    freq = mode_integral_quadrature(lam, p, 0.0, xi, tol=tol)

    a = xi + lam.real

    def time_side(ts):
        ts = np.asarray(ts, dtype=float)
        return 2.0 * math.pi * wt * np.exp(-2.0 * a * ts)

    tval, _, _, _ = _semi_infinite_vec(time_side, tol)
    time = float(np.real(np.asarray(tval).reshape(())))

    closed = mode_integral_closed(lam, p, 0.0, xi)
    return freq, time, closed


def plancherel_residual(model: SpectrumModel, beta: float, q: float, xi: float,
                        mode_index: int, tol: float = 1e-10) -> float:
    """|frequency side - time side| for one basis mode."""
    freq, time, _ = plancherel_sides(model, beta, q, xi, mode_index, tol=tol)
    return abs(freq - time)


def xi_r(r: float) -> float:
    """(1 - r**2) / (2 (r**2 + 1)) for 0 < r < 1."""
    if not (0.0 < r < 1.0):
        raise ValueError("need r in (0, 1)")
    return (1.0 - r * r) / (2.0 * (r * r + 1.0))


@dataclass
class LyapunovForms:
    """Per-mode diagonal values of the exponentially weighted Gram integrals."""

    P_diag: np.ndarray
    Q_diag: np.ndarray
    R_diag: np.ndarray
    xi_r: float


def lyapunov_forms(model: SpectrumModel, xi: float, r: float,
                   omega_min: float, omega_max: float) -> LyapunovForms:
    """Closed diagonal Gram forms.

    P_k(xi) = 1/(2(xi + Re lam_k)), the weighted energy of the orbit;
    Q_k(xi) = 1/(2(xi + Re(1/lam_k))), the same for the inverse generator;
    R_k(r)  = 2 omega_max P_k(omega_min xi_r) + (2/omega_min) Q_k(xi_r/omega_max).
    """
    if model.kind != "diagonal":
        raise SpectrumError("diagonal models only")
    if not model.invertible_stable:
        raise SpectrumError("model must be invertible-stable (Re lam > 0)")
    lams = model.eigenvalues
    re = lams.real
    re_inv = (1.0 / lams).real
    if np.any(re <= 0) or np.any(re_inv <= 0):
        raise SpectrumError("nonpositive real part in lam or 1/lam")
    xr = xi_r(r)
    P = 1.0 / (2.0 * (xi + re))
    Q = 1.0 / (2.0 * (xi + re_inv))
    P_at = 1.0 / (2.0 * (omega_min * xr + re))
    Q_at = 1.0 / (2.0 * (xr / omega_max + re_inv))
    R = 2.0 * omega_max * P_at + (2.0 / omega_min) * Q_at
    return LyapunovForms(P, Q, R, xr)


def q_form_quadrature(lam: complex, xi: float, tol: float = 1e-10) -> float:
    """int_0^inf e^{-2 xi t} |e^{-t/lam}|^2 dt by direct quadrature."""
    a = (1.0 / lam).real

    def f(ts):
        ts = np.asarray(ts, dtype=float)
        return np.exp(-2.0 * (xi + a) * ts)

    val, _, _, _ = _semi_infinite_vec(f, tol)
    return float(np.real(np.asarray(val).reshape(())))


def pz_ratio(model: SpectrumModel, n: int, r: float, omegas: OmegaSequence,
             x, y) -> float:
    """Empirical constant witness for the product-form inequality:

        |(n+1) r^n <y, (prod V_{omega_k}(A)) x>|
            / ( ||y|| / sqrt(1-r) * sqrt(<x, R(r) x>) ).
    """
    if model.kind != "diagonal":
        raise SpectrumError("diagonal models only")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    forms = lyapunov_forms(model, 0.0, r, omegas.omega_min, omegas.omega_max)
    rx = float(np.sum(np.abs(x)**2 * forms.R_diag))
    ny = float(np.linalg.norm(y))
    if rx <= 0.0 or ny == 0.0:
        raise SpectrumError("degenerate x or y: the denominator vanishes")
    vx = CayleyProductKernel(omegas, n).value(model.eigenvalues) * x
    numer = abs((n + 1) * r**n * np.vdot(y, vx))
    denom = ny / math.sqrt(1.0 - r) * math.sqrt(rx)
    return float(numer / denom)


def lemma_small_large_split(model: SpectrumModel, beta: float, q: float,
                            xi0: float):
    """Suprema of the two xi-weighted variants of the per-mode integrals:

        sup_{0 < xi <= xi0}  xi       * max_k pi |lam_k|^(2 beta q)/(xi + Re lam_k)
        sup_{xi > xi0}       xi^(1-2q) * max_k pi |lam_k|^(2 beta q)/(xi + Re lam_k)

    The first weight is increasing in xi, so its sup sits at xi0; the second
    has the analytic interior maximizer per mode.
    """
    if model.kind != "diagonal":
        raise SpectrumError("diagonal models only")
    if xi0 <= 0:
        raise ValueError("need xi0 > 0")
    lams = model.eigenvalues
    weights = _mode_weight(lams, 0.0, beta * q)

    small = float(np.max(xi0 * math.pi * weights / (xi0 + lams.real)))

    w = 1.0 - 2.0 * q
    large = -np.inf
    for a, wt in zip(lams.real, weights):
        u, _ = _sup_xi_weighted(a, w, xi0)
        large = max(large, math.pi * wt * u)
    return small, float(large)
