"""Operator norms of kernels applied to spectral models, and norm curves.

For a diagonal (normal) model the norm of f(A) is the supremum of |f| over
the spectrum, reported together with the attaining mode index so truncation
adequacy stays auditable.  For matrix models f(A) is assembled densely
(Cayley factors by LU solves) and the norm is the largest singular value.
"""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import KernelDomainError, SpectrumError, TruncationWarning
from .kernels import (CayleyProductKernel, CayleyResolventKernel, ConstantKernel,
                      FracResolventKernel, GeneratorSemigroupKernel,
                      InverseSemigroupKernel, InverseSemigroupResolventKernel,
                      Kernel, OmegaSequence, ProductKernel, ResolventKernel,
                      ResolventRatioKernel, SemigroupKernel)
from .spectral_models import SpectrumModel, is_normal, _normal_eigendecomposition


@dataclass
class CurveSample:
    parameter: float
    norm: float
    argmax_mode: Optional[int]      # 1-based mode index; None for matrix models


@dataclass
class NormCurve:
    parameter_name: str
    samples: list
    model_digest: str
    truncation: int

    def parameters(self) -> np.ndarray:
        return np.array([s.parameter for s in self.samples])

    def norms(self) -> np.ndarray:
        return np.array([s.norm for s in self.samples])

    def truncated_mask(self) -> np.ndarray:
        """True where the sup landed on the last retained mode."""
        return np.array([s.argmax_mode == self.truncation for s in self.samples])

    def to_csv(self, path=None) -> Optional[str]:
        buf = io.StringIO()
        buf.write("# cpsglab norm curve v1\n")
        buf.write(f"# model={self.model_digest} truncation={self.truncation} "
                  f"parameter={self.parameter_name}\n")
        buf.write("# columns: param,norm,argmax_mode\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["param", "norm", "argmax_mode"])
        for s in self.samples:
            writer.writerow([repr(float(s.parameter)), repr(float(s.norm)),
                             "" if s.argmax_mode is None else s.argmax_mode])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path) -> "NormCurve":
        digest, trunc, pname = "", 0, "param"
        samples = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("#"):
                    for tok in line.lstrip("# ").split():
                        if tok.startswith("model="):
                            digest = tok.split("=", 1)[1]
                        elif tok.startswith("truncation="):
                            trunc = int(tok.split("=", 1)[1])
                        elif tok.startswith("parameter="):
                            pname = tok.split("=", 1)[1]
                    continue
                if not line or line.startswith("param,"):
                    continue
                p, n, m = line.split(",")
                samples.append(CurveSample(float(p), float(n),
                                           int(m) if m else None))
        return cls(pname, samples, digest, trunc)


def _warn_truncation(mode, truncation, context):
    if mode == truncation:
        warnings.warn(
            f"{context}: spectral sup attained at the last retained mode "
            f"(K={truncation}); increase the truncation",
            TruncationWarning, stacklevel=3)


def operator_norm(model: SpectrumModel, spec: Kernel):
    """||f(A)|| with the attaining mode (diagonal) or None (matrix).

    Diagonal route: sup_k |f(lambda_k)|.  Matrix route: largest singular
    value of the assembled f(M).
    """
    if model.kind == "diagonal":
        vals = np.abs(spec.value(model.eigenvalues))
        idx = int(np.argmax(vals))
        mode = idx + 1
        _warn_truncation(mode, model.truncation, "operator_norm")
        return float(vals[idx]), mode
    mat = assemble_matrix_function(model.matrix, spec)
    try:
        s = np.linalg.svd(mat, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        residual = float(np.linalg.norm(mat, ord="fro"))
        raise SpectrumError(
            f"singular-value iteration failed on assembled kernel "
            f"(frobenius magnitude {residual:.3e}): {exc}") from exc
    return float(s[0]), None


def _solve(mat, rhs):
    return np.linalg.solve(mat, rhs)


def _integer_inverse_power(m, alpha, context):
    if alpha < 0 or abs(alpha - round(alpha)) > 1e-12:
        raise SpectrumError(
            f"{context}: non-normal matrices support only nonnegative integer "
            f"powers, got alpha={alpha}")
    out = np.eye(m.shape[0], dtype=complex)
    for _ in range(int(round(alpha))):
        out = _solve(m, out)
    return out


def assemble_matrix_function(m: np.ndarray, spec: Kernel) -> np.ndarray:
    """Dense f(M).  Rational kernels use direct solves; anything else
    requires a normal matrix and goes through the eigendecomposition."""
    n = m.shape[0]
    eye = np.eye(n, dtype=complex)
    if isinstance(spec, ConstantKernel):
        return spec.c * eye
    if isinstance(spec, ResolventKernel):
        return _solve(m + spec.shift * eye, eye)
    if isinstance(spec, SemigroupKernel):
        return scipy.linalg.expm(-spec.t * m)
    if isinstance(spec, GeneratorSemigroupKernel):
        return m @ scipy.linalg.expm(-spec.t * m)
    if isinstance(spec, InverseSemigroupKernel):
        return scipy.linalg.expm(-spec.t * np.linalg.inv(m))
    if isinstance(spec, ProductKernel):
        return assemble_matrix_function(m, spec.left) @ assemble_matrix_function(m, spec.right)
    if isinstance(spec, CayleyProductKernel):
        out = eye
        shift = spec.shift * eye
        for o in spec.omegas.values[:spec.n][::-1]:
            out = (m + shift - o * eye) @ _solve(m + shift + o * eye, out)
        return out
    if isinstance(spec, FracResolventKernel) and not is_normal(m):
        return _integer_inverse_power(m + spec.shift * eye, spec.alpha,
                                      "fractional resolvent")
    if isinstance(spec, CayleyResolventKernel) and not is_normal(m):
        cay = CayleyProductKernel(spec.omegas, spec.n, shift=spec.c)
        damp = _integer_inverse_power(m + (spec.c + spec.omega_anchor) * eye,
                                      spec.alpha, "damped Cayley product")
        return assemble_matrix_function(m, cay) @ damp
    if is_normal(m):
        d, z = _normal_eigendecomposition(m)
        return z @ np.diag(spec.value(d)) @ z.conj().T
    raise SpectrumError(
        f"no dense assembly route for {type(spec).__name__} on a non-normal matrix")


def matrix_cayley_apply(model: SpectrumModel, omegas: OmegaSequence, n: int,
                        alpha: float) -> np.ndarray:
    """(prod_{k<=n} (A - omega_k)(A + omega_k)^{-1}) A^{-alpha}, dense.

    Factors are applied right to left so variable-step ordering is
    preserved; each factor is one LU solve (factorizations cached per
    distinct omega).  Non-normal matrices restrict alpha to nonnegative
    integers.
    """
    if model.kind != "matrix":
        raise SpectrumError("matrix_cayley_apply needs a matrix model")
    if n > len(omegas):
        raise KernelDomainError("n exceeds the omega sequence")
    m = model.matrix
    dim = m.shape[0]
    eye = np.eye(dim, dtype=complex)

    if abs(alpha - round(alpha)) <= 1e-12 and alpha >= 0:
        out = _integer_inverse_power(m, alpha, "matrix Cayley apply")
    elif is_normal(m):
        d, z = _normal_eigendecomposition(m)
        out = z @ np.diag(FracResolventKernel(alpha, 0.0).value(d)) @ z.conj().T
    else:
        raise SpectrumError(
            f"non-integer alpha={alpha} requires a normal matrix")

    lu_cache = {}
    for o in omegas.values[:n][::-1]:
        key = float(o)
        if key not in lu_cache:
            shifted = m + o * eye
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                lu, piv = scipy.linalg.lu_factor(shifted)
            pivots = np.abs(np.diag(lu))
            if pivots.min() <= 1e-14 * max(pivots.max(), 1.0):
                raise SpectrumError(f"singular shift A + {o}")
            lu_cache[key] = (lu, piv)
        y = scipy.linalg.lu_solve(lu_cache[key], out)
        out = m @ y - o * y
    return out


def norm_curve(model: SpectrumModel, kernel_family: Callable[[float], Kernel],
               grid: Sequence[float], parameter_name: str = "param",
               jobs: int = 1) -> NormCurve:
    """One operator-norm sample per grid point, order-preserving.

    ``kernel_family`` maps a grid value to a kernel.  Grid points are
    independent; with jobs > 1 they are evaluated concurrently over the
    shared immutable model.
    """
    grid = list(grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")

    def one(p):
        try:
            norm, mode = operator_norm(model, kernel_family(p))
        except Exception as exc:
            raise type(exc)(f"at grid point {p}: {exc}") from exc
        return CurveSample(float(p), norm, mode)

    if jobs > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(one, grid))
    else:
        samples = [one(p) for p in grid]
    return NormCurve(parameter_name, samples, model.digest(), model.truncation)


def cayley_decay_curve(model: SpectrumModel, omegas: OmegaSequence,
                       alpha: float, n_grid: Sequence[int],
                       weight_shift: float = 0.0) -> NormCurve:
    """||(prod_{k<=n} V_{omega_k}(A)) (A + weight_shift)^{-alpha}|| over an n-grid.

    Diagonal models walk the factor sequence once, snapshotting the running
    modulus product at each requested n; matrix models fall back to dense
    assembly per grid point.
    """
    n_grid = sorted(int(n) for n in n_grid)
    if model.kind == "matrix":
        samples = []
        damp = assemble_matrix_function(model.matrix,
                                        FracResolventKernel(alpha, weight_shift)) \
            if alpha != 0.0 else np.eye(model.truncation, dtype=complex)
        for n in n_grid:
            mat = matrix_cayley_apply(model, omegas, n, 0.0)
            s = np.linalg.svd(mat @ damp, compute_uv=False)
            samples.append(CurveSample(float(n), float(s[0]), None))
        return NormCurve("n", samples, model.digest(), model.truncation)

    lams = model.eigenvalues
    weight = np.abs(FracResolventKernel(alpha, weight_shift).value(lams)) \
        if alpha != 0.0 else np.ones(len(lams))
    mod = np.ones(len(lams))
    samples = []
    want = iter(n_grid)
    nxt = next(want, None)
    if nxt == 0:
        vals = weight
        idx = int(np.argmax(vals))
        samples.append(CurveSample(0.0, float(vals[idx]), idx + 1))
        nxt = next(want, None)
    max_n = n_grid[-1]
    if max_n > len(omegas):
        raise KernelDomainError("n grid exceeds the omega sequence")
    om = omegas.values
    for k in range(1, max_n + 1):
        o = om[k - 1]
        mod *= np.abs((lams - o) / (lams + o))
        if k == nxt:
            vals = mod * weight
            idx = int(np.argmax(vals))
            mode = idx + 1
            _warn_truncation(mode, model.truncation, f"cayley_decay_curve n={k}")
            samples.append(CurveSample(float(k), float(vals[idx]), mode))
            nxt = next(want, None)
    return NormCurve("n", samples, model.digest(), model.truncation)
