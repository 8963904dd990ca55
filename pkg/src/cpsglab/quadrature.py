"""Adaptive quadrature on [0, inf) and supremum search along a ray.

Two primitives back every functional-calculus norm in the package:

* ``integrate_semi_infinite`` integrates a nonnegative, eventually
  decreasing integrand over [0, inf) by adaptive Gauss panels on a growing
  interval [0, U].  U is doubled until a geometric extrapolation of the last
  dyadic panel bounds the remaining tail below half the tolerance; the
  extrapolation carries a safety factor of 4 because the integrands of
  interest decay only polynomially.

* ``sup_on_vertical_line`` locates sup over eta of g(eta) for a continuous g
  vanishing (or flattening to a limit) at infinity, by a coarse geometric
  grid followed by golden-section refinement around the best brackets.

Both accept numpy-vectorized callables.  Internal vector-valued variants are
used by the operator-calculus evaluator, where the integrands are complex
and carry one component per spectral mode.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .errors import DivergenceError, QuadratureError

_GL_LO_X, _GL_LO_W = roots_legendre(8)
_GL_HI_X, _GL_HI_W = roots_legendre(16)

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class QuadResult:
    """Value of an improper integral with an accounting trail."""

    value: float
    abs_error_estimate: float
    evaluations: int
    tail_bound: float


class _EvalCounter:
    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


def _panel(f, a, b, counter):
    """One Gauss panel on [a, b]: high-order value, pair error estimate, and
    the panel integral of the modulus (a majorant used for tail decisions)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    f_hi = np.asarray(f(mid + half * _GL_HI_X))
    f_lo = np.asarray(f(mid + half * _GL_LO_X))
    v_hi = half * np.tensordot(_GL_HI_W, f_hi, axes=(0, 0))
    v_lo = half * np.tensordot(_GL_LO_W, f_lo, axes=(0, 0))
    counter.count += len(_GL_HI_X) + len(_GL_LO_X)
    err = float(np.max(np.abs(v_hi - v_lo)))
    abs_mag = float(np.max(half * np.tensordot(_GL_HI_W, np.abs(f_hi), axes=(0, 0))))
    return v_hi, err, abs_mag


def _adaptive_interval(f, a, b, tol, counter, budget):
    """Heap-driven adaptive subdivision of [a, b].

    ``f`` maps a node array to an array of shape (nodes,) or (nodes, d).
    Returns (value, error_estimate, modulus_integral); raises
    QuadratureError past ``budget``.
    """
    val, err, vabs = _panel(f, a, b, counter)
    seq = 0
    heap = [(-err, seq, a, b, val, err, vabs)]
    total_val = np.array(val, copy=True)
    total_err = err
    total_abs = vabs
    width_floor = 1e-14 * (abs(a) + abs(b) + 1.0)
    while total_err > tol and heap:
        if counter.count > budget:
            raise QuadratureError(
                "interval quadrature exceeded evaluation budget "
                f"({budget}) with error estimate {total_err:.3e} > tol {tol:.3e}",
                partial=QuadResult(_scalarize(total_val), total_err, counter.count, 0.0),
            )
        neg_err, _, pa, pb, pval, perr, pabs = heapq.heappop(heap)
        if pb - pa < width_floor:
            continue
        pm = 0.5 * (pa + pb)
        lval, lerr, labs = _panel(f, pa, pm, counter)
        rval, rerr, rabs = _panel(f, pm, pb, counter)
        total_val += lval + rval - pval
        total_err += lerr + rerr - perr
        total_abs += labs + rabs - pabs
        seq += 1
        heapq.heappush(heap, (-lerr, seq, pa, pm, lval, lerr, labs))
        seq += 1
        heapq.heappush(heap, (-rerr, seq, pm, pb, rval, rerr, rabs))
    return total_val, max(total_err, 0.0), max(total_abs, 0.0)


def _scalarize(v):
    arr = np.asarray(v)
    if arr.ndim == 0:
        return complex(arr) if np.iscomplexobj(arr) else float(arr)
    if arr.size == 1:
        return _scalarize(arr.reshape(()))
    return arr


def _semi_infinite_vec(f, tol, budget=1_000_000, u0=1.0, max_doublings=700):
    """Vector/complex-capable engine behind ``integrate_semi_infinite``.

    Returns (value, error_estimate, evaluations, tail_bound).
    """
    counter = _EvalCounter()
    total, err_total, _ = _adaptive_interval(f, 0.0, u0, tol / 4.0, counter, budget)
    total = np.array(total, copy=True)

    U = u0
    prev_mag = None
    tail_bound = np.inf
    rising = 0
    j = 0
    while True:
        tol_j = tol / (8.0 * (j + 1) * (j + 2))
        pval, perr, mag = _adaptive_interval(f, U, 2.0 * U, tol_j, counter, budget)
        total += pval
        err_total += perr

        if prev_mag is not None:
            if prev_mag == 0.0 and mag == 0.0:
                if j >= 3:
                    tail_bound = 0.0
                    break
            elif prev_mag > 0.0:
                r = mag / prev_mag
                if r >= 1.0:
                    # panels may legitimately grow while the dyadic width
                    # climbs into the integrand's plateau scale; only a long
                    # non-decreasing run signals divergence
                    rising += 1
                    if rising >= 40 and mag > tol:
                        raise DivergenceError(
                            "dyadic tail panels stopped decreasing; integral "
                            "appears divergent (last panel magnitude "
                            f"{mag:.3e} at U={U:.3e})",
                            partial=QuadResult(_scalarize(total), err_total, counter.count, np.inf),
                        )
                else:
                    rising = 0
                    if r < 0.999:
                        tail_mag = mag * r / (1.0 - r)
                        tail_bound = 4.0 * tail_mag
                        if tail_bound < tol / 2.0 and j >= 2:
                            # fold the raw geometric estimate into the value;
                            # the safety-factored bound covers its error
                            total += pval * (r / (1.0 - r))
                            break
                if mag < 1e-300:
                    tail_bound = 4.0 * mag
                    break
        prev_mag = mag
        U *= 2.0
        j += 1
        if j > max_doublings:
            raise DivergenceError(
                f"tail not resolved after {max_doublings} interval doublings "
                f"(U={U:.3e}); integrand decays too slowly for tol {tol:.3e}",
                partial=QuadResult(_scalarize(total), err_total, counter.count, np.inf),
            )
        if counter.count > budget:
            raise QuadratureError(
                f"semi-infinite quadrature exceeded evaluation budget ({budget})",
                partial=QuadResult(_scalarize(total), err_total, counter.count, np.inf),
            )
    return total, err_total + tail_bound, counter.count, tail_bound


def integrate_semi_infinite(f: Callable, tol: float, budget: int = 1_000_000) -> QuadResult:
    """Integrate a nonnegative, eventually decreasing f over [0, inf).

    ``f`` must accept a numpy array of abscissae and return values of the
    same shape.  The total error estimate (interior panels plus the
    safety-factored tail bound) is kept at or below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def fv(xs):
        return np.asarray(f(np.asarray(xs, dtype=float)), dtype=float)

    value, err, evals, tail = _semi_infinite_vec(fv, tol, budget=budget)
    return QuadResult(float(np.real(_scalarize(value))), float(err), evals, float(tail))


def _real_line_vec(f, tol, budget=2_000_000, u0=1.0, max_doublings=700):
    """Integral over the whole real line via two mirrored semi-infinite halves."""

    def right(xs):
        return f(xs)

    def left(xs):
        return f(-xs)

    v1, e1, n1, t1 = _semi_infinite_vec(right, tol / 2.0, budget=budget, u0=u0,
                                        max_doublings=max_doublings)
    v2, e2, n2, t2 = _semi_infinite_vec(left, tol / 2.0, budget=budget, u0=u0,
                                        max_doublings=max_doublings)
    return v1 + v2, e1 + e2, n1 + n2, t1 + t2


def _golden_max(g, a, b, counter=None, budget=np.inf, xtol_rel=1e-12):
    """Golden-section maximization of a scalar unimodal function on [a, b].

    Near a smooth maximum the value error is quadratic in the bracket
    width, so an x-tolerance of sqrt(value tolerance) suffices.
    """
    c = b - (b - a) * _GOLDEN
    d = a + (b - a) * _GOLDEN
    gc = float(g(c))
    gd = float(g(d))
    n = 2
    while (b - a) > xtol_rel * max(1.0, abs(a), abs(b)) and n < 200:
        if counter is not None:
            counter.count += 1
            if counter.count > budget:
                break
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - (b - a) * _GOLDEN
            gc = float(g(c))
        else:
            a, c, gc = c, d, gd
            d = a + (b - a) * _GOLDEN
            gd = float(g(d))
        n += 1
    x = 0.5 * (a + b)
    return x, float(g(x))


def _local_max_brackets(xs, vals, keep=8):
    """Indices of interior/boundary local maxima, best first."""
    idx = []
    n = len(xs)
    for i in range(n):
        lo = vals[i - 1] if i > 0 else -np.inf
        hi = vals[i + 1] if i < n - 1 else -np.inf
        if vals[i] >= lo and vals[i] >= hi:
            idx.append(i)
    idx.sort(key=lambda i: -vals[i])
    return idx[:keep]


def _max_on_ray(g, tol, budget, h0, grid_points=33, refine_starts=8,
                boundary_factor=1e-3):
    """Supremum of g over [0, inf); handles decay to 0 and flat plateaus.

    The search interval stops growing once the boundary value has dropped
    ``boundary_factor`` below the running maximum; this leans on the
    eventual monotonicity of the target functions (all kernel moduli here
    are eventually decreasing in |eta|).
    """
    counter = _EvalCounter()
    H = h0
    plateau = 0.0
    xs = np.concatenate(([0.0], np.geomspace(1e-4, H, grid_points)))
    vals = np.asarray(g(xs), dtype=float)
    counter.count += len(xs)
    while True:
        gmax = float(np.max(vals))
        if gmax == 0.0:
            return 0.0, counter.count
        boundary = float(vals[-1])
        if boundary <= max(boundary_factor, tol) * gmax:
            break
        # extend the grid by a factor of 8 without re-evaluating old nodes
        ext = np.geomspace(H, 8.0 * H, 13)[1:]
        ext_vals = np.asarray(g(ext), dtype=float)
        counter.count += len(ext)
        prev_boundary = boundary
        xs = np.concatenate((xs, ext))
        vals = np.concatenate((vals, ext_vals))
        H *= 8.0
        boundary = float(vals[-1])
        if abs(boundary - prev_boundary) <= max(tol, 1e-9) * max(gmax, boundary, 1e-300):
            # flat tail: the sup is approached (or attained) at infinity
            plateau = max(boundary, prev_boundary)
            break
        if H > 1e30:
            plateau = boundary
            break
        if counter.count > budget:
            raise QuadratureError(
                f"sup search exceeded evaluation budget ({budget})")

    best = float(np.max(vals))
    xtol = 0.3 * np.sqrt(max(tol, 1e-15))
    for i in _local_max_brackets(xs, vals, keep=refine_starts):
        a = xs[i - 1] if i > 0 else 0.0
        b = xs[i + 1] if i < len(xs) - 1 else xs[-1] * 8.0
        if b <= a:
            continue
        _, v = _golden_max(lambda x: g(np.asarray([x]))[0], a, b, counter,
                           budget, xtol_rel=xtol)
        best = max(best, v)
    return max(best, plateau), counter.count


def sup_on_vertical_line(g: Callable, decay_hint: str = "rational",
                         tol: float = 1e-9, symmetric: bool = True,
                         budget: int = 200_000, h0: float = 4.0) -> float:
    """sup over real eta of g(eta), for g continuous and decaying at infinity.

    ``g`` must accept numpy arrays.  With ``symmetric=True`` (the default;
    every kernel modulus here is a function of eta**2) only eta >= 0 is
    searched.  ``decay_hint`` is advisory; both rational and exponential
    tails are handled by the same boundary test.  ``h0`` seeds the search
    interval; picking it near the expected hump scale saves extensions.
    """
    if decay_hint not in ("rational", "exponential"):
        raise ValueError(f"unknown decay_hint {decay_hint!r}")
    best, _ = _max_on_ray(g, tol, budget, h0)
    if not symmetric:
        neg, _ = _max_on_ray(lambda xs: g(-xs), tol, budget, h0)
        best = max(best, neg)
    return best


def max_on_halfline(f: Callable, tol: float = 1e-9, budget: int = 200_000,
                    h0: float = 4.0) -> float:
    """Supremum of a vectorized scalar function over [0, inf)."""
    best, _ = _max_on_ray(f, tol, budget, h0)
    return best


def _sup_on_rays_batch(g, h0s, tol, grid_points=33, max_extensions=12,
                       boundary_factor=1e-3):
    """Row-wise suprema over [0, inf) for a batch of tasks.

    ``g`` maps an (m, k) matrix of abscissae to an (m, k) matrix of values;
    row i is searched on a geometric grid scaled by h0s[i], extended while
    any row's boundary value stays above ``boundary_factor`` of its running
    maximum, then refined by synchronized golden-section passes on the two
    best brackets per row.  One matrix evaluation per golden iteration
    serves every row, which is what makes integrand-heavy norms affordable.
    """
    h0s = np.asarray(h0s, dtype=float)
    m = len(h0s)
    rel = np.concatenate(([0.0], np.geomspace(1e-5, 1.0, grid_points - 1)))
    xs = h0s[:, None] * rel[None, :]
    vals = np.asarray(g(xs), dtype=float)

    H = h0s.copy()
    for _ in range(max_extensions):
        rowmax = vals.max(axis=1)
        boundary = vals[:, -1]
        need = boundary > np.maximum(boundary_factor, tol) * rowmax
        need &= rowmax > 0.0
        if not np.any(need):
            break
        ext_rel = np.geomspace(1.0, 8.0, 7)[1:]
        ext = np.where(need[:, None], H[:, None] * ext_rel[None, :],
                       xs[:, -1:])
        ext_vals = np.asarray(g(ext), dtype=float)
        xs = np.concatenate((xs, ext), axis=1)
        vals = np.concatenate((vals, ext_vals), axis=1)
        H = np.where(need, H * 8.0, H)

    best = vals.max(axis=1)
    nonzero = best > 0.0

    # bracket the two strongest interior local maxima per row
    def brackets(rank):
        a = np.zeros(m)
        b = np.zeros(m)
        ok = np.zeros(m, dtype=bool)
        for i in range(m):
            if not nonzero[i]:
                continue
            row = vals[i]
            cands = [j for j in _local_max_brackets(xs[i], row, keep=rank + 1)
                     if row[j] >= 1e-3 * best[i]]
            if len(cands) <= rank:
                continue
            j = cands[rank]
            a[i] = xs[i][j - 1] if j > 0 else 0.0
            b[i] = xs[i][j + 1] if j < xs.shape[1] - 1 else xs[i][-1] * 8.0
            ok[i] = b[i] > a[i]
        return a, b, ok

    xtol = 0.3 * np.sqrt(max(tol, 1e-15))
    for rank in (0, 1):
        a, b, ok = brackets(rank)
        if not np.any(ok):
            continue
        # synchronized golden-section ascent; converged rows ride along
        c = b - (b - a) * _GOLDEN
        d = a + (b - a) * _GOLDEN
        gc = np.asarray(g(c[:, None]), dtype=float)[:, 0]
        gd = np.asarray(g(d[:, None]), dtype=float)[:, 0]
        for _ in range(200):
            live = ok & ((b - a) > xtol * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b))))
            if not np.any(live):
                break
            take_c = gc >= gd
            upd_c = live & take_c
            upd_d = live & ~take_c
            b = np.where(upd_c, d, b)
            d = np.where(upd_c, c, d)
            gd = np.where(upd_c, gc, gd)
            a = np.where(upd_d, c, a)
            c = np.where(upd_d, d, c)
            gc = np.where(upd_d, gd, gc)
            new_c = b - (b - a) * _GOLDEN
            new_d = a + (b - a) * _GOLDEN
            probe = np.where(upd_c, new_c, np.where(upd_d, new_d, c))
            pv = np.asarray(g(probe[:, None]), dtype=float)[:, 0]
            gc = np.where(upd_c, pv, gc)
            gd = np.where(upd_d, pv, gd)
            c = np.where(upd_c, new_c, c)
            d = np.where(upd_d, new_d, d)
        best = np.maximum(best, np.where(ok, np.maximum(gc, gd), 0.0))
    return best
