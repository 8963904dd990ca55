"""Spectral operator models: diagonal (normal) and dense-matrix generators.

A model represents the negative generator A of a semigroup e^{-tA} through
its spectrum.  Diagonal models hold an explicit eigenvalue list truncated at
K modes; matrix models hold a dense complex matrix small enough for direct
eigensolves and SVDs.  Models are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SpectrumError

MAX_MATRIX_SIZE = 512


@dataclass(frozen=True)
class SpectrumModel:
    kind: str                       # "diagonal" | "matrix"
    eigenvalues: Optional[np.ndarray]
    matrix: Optional[np.ndarray]
    truncation: int
    growth_bound: float
    invertible_stable: bool
    stable: bool
    family: Optional[dict] = None

    def __post_init__(self):
        if self.kind not in ("diagonal", "matrix"):
            raise SpectrumError(f"unknown model kind {self.kind!r}")
        if self.kind == "diagonal":
            if self.eigenvalues is None or len(self.eigenvalues) == 0:
                raise SpectrumError("diagonal model needs a nonempty eigenvalue list")
            if len(self.eigenvalues) != self.truncation:
                raise SpectrumError("eigenvalue count must equal the truncation K")
            self.eigenvalues.flags.writeable = False
        else:
            m = self.matrix
            if m is None or m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise SpectrumError("matrix model needs a square matrix")
            if m.shape[0] > MAX_MATRIX_SIZE:
                raise SpectrumError(
                    f"matrix models are capped at {MAX_MATRIX_SIZE}x{MAX_MATRIX_SIZE}")
            self.matrix.flags.writeable = False

    def spectrum(self) -> np.ndarray:
        """Eigenvalues (computed on demand for matrix models)."""
        if self.kind == "diagonal":
            return self.eigenvalues
        return np.linalg.eigvals(self.matrix)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.kind.encode())
        data = self.eigenvalues if self.kind == "diagonal" else self.matrix
        h.update(np.ascontiguousarray(data).tobytes())
        return h.hexdigest()[:12]


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for a spectrum: a named family plus its parameters."""

    family: str                     # crandall_pazy_example | custom_list | matrix_file
    K: int = 1
    gamma: float = 1.0
    shift: float = 1.0
    beta: float = 1.0
    path: Optional[str] = None
    values: Optional[Sequence[complex]] = None

    def __post_init__(self):
        if self.K < 1:
            raise SpectrumError("truncation K must be at least 1")
        if self.family == "crandall_pazy_example" and self.gamma < 1.0:
            raise SpectrumError("gamma must be >= 1 (decay parameter 1/gamma in (0, 1])")


def _finalize_diagonal(eigs: np.ndarray, family: Optional[dict] = None) -> SpectrumModel:
    eigs = np.asarray(eigs, dtype=complex).copy()
    re = eigs.real
    gb = float(-np.min(re))
    return SpectrumModel(
        kind="diagonal",
        eigenvalues=eigs,
        matrix=None,
        truncation=len(eigs),
        growth_bound=gb,
        invertible_stable=bool(np.all(re > 0.0)),
        stable=bool(np.all(re >= 0.0)),
        family=family,
    )


def diagonal_model(eigenvalues: Sequence[complex], family: Optional[dict] = None) -> SpectrumModel:
    return _finalize_diagonal(np.asarray(list(eigenvalues), dtype=complex), family)


def matrix_model(matrix: np.ndarray) -> SpectrumModel:
    m = np.asarray(matrix, dtype=complex).copy()
    eigs = np.linalg.eigvals(m)
    re = eigs.real
    return SpectrumModel(
        kind="matrix",
        eigenvalues=None,
        matrix=m,
        truncation=m.shape[0],
        growth_bound=float(-np.min(re)),
        invertible_stable=bool(np.all(re > 0.0)),
        stable=bool(np.all(re >= 0.0)),
        family=None,
    )


def crandall_pazy_spectrum(gamma: float, K: int, shift: float = 1.0) -> SpectrumModel:
    """Diagonal model with eigenvalues k + i k**gamma + shift, k = 1..K.

    The smoothing parameter of the resulting semigroup family is 1/gamma.
    With the default shift 1 the model has growth bound -(1 + shift).
    """
    if gamma < 1.0:
        raise SpectrumError("gamma must be >= 1")
    if K < 1:
        raise SpectrumError("K must be >= 1")
    k = np.arange(1, K + 1, dtype=float)
    eigs = k + 1j * k**gamma + shift
    fam = {"family": "crandall_pazy_example", "gamma": gamma, "shift": shift,
           "beta": 1.0 / gamma}
    return _finalize_diagonal(eigs, fam)


def polynomial_decay_spectrum(beta: float, K: int) -> SpectrumModel:
    """Diagonal model with eigenvalues k**(-beta) + i k, k = 1..K.

    The spectrum approaches the imaginary axis along Re = |Im|**(-beta),
    giving a bounded semigroup with polynomial (rate 1/beta) decay of the
    smoothed orbit norms.
    """
    if beta <= 0.0:
        raise SpectrumError("beta must be positive")
    k = np.arange(1, K + 1, dtype=float)
    eigs = k**(-beta) + 1j * k
    fam = {"family": "polynomial_decay", "beta": beta}
    return _finalize_diagonal(eigs, fam)


def sector_spectrum(K: int, slope: float = 1.0) -> SpectrumModel:
    """Unbounded spectrum k(1 + i*slope) confined to a sector of half-plane.

    Every eigenvalue has argument arctan(slope) < pi/2, real part >= 1.
    """
    k = np.arange(1, K + 1, dtype=float)
    eigs = k * (1.0 + 1j * slope)
    fam = {"family": "sector_line", "slope": slope}
    return _finalize_diagonal(eigs, fam)


def build_spectrum(spec: FamilySpec) -> SpectrumModel:
    if spec.family == "crandall_pazy_example":
        return crandall_pazy_spectrum(spec.gamma, spec.K, spec.shift)
    if spec.family == "custom_list":
        if spec.values is not None:
            return diagonal_model(spec.values)
        if spec.path is not None:
            return load_custom_list(spec.path)
        raise SpectrumError("custom_list needs explicit values or a path")
    if spec.family == "matrix_file":
        if spec.path is None:
            raise SpectrumError("matrix_file needs a path")
        return load_matrix_file(spec.path)
    if spec.family == "polynomial_decay":
        return polynomial_decay_spectrum(spec.beta, spec.K)
    raise SpectrumError(f"unknown spectrum family {spec.family!r}")


def load_custom_list(path) -> SpectrumModel:
    """Read a diagonal spectrum from text: one `re im` pair per line."""
    eigs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SpectrumError(
                    f"{path}:{lineno}: expected `re im`, got {line!r}")
            eigs.append(complex(float(parts[0]), float(parts[1])))
    if not eigs:
        raise SpectrumError(f"{path}: no eigenvalues found")
    return diagonal_model(eigs)


def load_matrix_file(path) -> SpectrumModel:
    """Read a dense matrix: a one-line `n` header, then n*n row-major re/im pairs."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise SpectrumError(f"{path}: empty matrix file")
    n = int(tokens[0])
    need = 2 * n * n
    body = tokens[1:]
    if len(body) != need:
        raise SpectrumError(
            f"{path}: expected {need} floats for a {n}x{n} complex matrix, got {len(body)}")
    flat = np.asarray([float(t) for t in body], dtype=float)
    m = (flat[0::2] + 1j * flat[1::2]).reshape(n, n)
    return matrix_model(m)


def save_custom_list(model: SpectrumModel, path) -> None:
    if model.kind != "diagonal":
        raise SpectrumError("only diagonal models serialize as custom lists")
    with open(path, "w") as fh:
        for lam in model.eigenvalues:
            fh.write(f"{float(lam.real)!r} {float(lam.imag)!r}\n")


def save_matrix_file(model: SpectrumModel, path) -> None:
    if model.kind != "matrix":
        raise SpectrumError("only matrix models serialize as matrix files")
    m = model.matrix
    with open(path, "w") as fh:
        fh.write(f"{m.shape[0]}\n")
        for row in m:
            fh.write(" ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in row) + "\n")


def growth_bound(model: SpectrumModel) -> float:
    """-min Re of the spectrum; the exponential growth rate for normal models."""
    return float(-np.min(model.spectrum().real))


def is_normal(matrix: np.ndarray, rtol: float = 1e-10) -> bool:
    m = np.asarray(matrix)
    scale = np.linalg.norm(m, ord="fro") ** 2 + 1e-300
    comm = m @ m.conj().T - m.conj().T @ m
    return np.linalg.norm(comm, ord="fro") <= rtol * scale


def _normal_eigendecomposition(matrix: np.ndarray):
    from scipy.linalg import schur

    t, z = schur(np.asarray(matrix, dtype=complex), output="complex")
    off = t - np.diag(np.diag(t))
    if np.linalg.norm(off, ord="fro") > 1e-8 * (np.linalg.norm(t, ord="fro") + 1e-300):
        raise SpectrumError("matrix is not normal; eigen-application refused")
    return np.diag(t), z


def _principal_power(values: np.ndarray, alpha: float) -> np.ndarray:
    vals = np.asarray(values, dtype=complex)
    bad = (vals.real <= 0.0) & (np.abs(vals.imag) == 0.0)
    if np.any(bad):
        raise SpectrumError(
            f"fractional power undefined on (-inf, 0]: offending value {vals[bad][0]}")
    return np.exp(alpha * np.log(vals))


def fractional_scale(model: SpectrumModel, alpha: float) -> SpectrumModel:
    """Model of A**alpha via the principal branch (negative alpha allowed)."""
    if model.kind == "diagonal":
        return _finalize_diagonal(_principal_power(model.eigenvalues, alpha))
    if not is_normal(model.matrix):
        raise SpectrumError("fractional powers of non-normal matrices are out of scope")
    d, z = _normal_eigendecomposition(model.matrix)
    scaled = z @ np.diag(_principal_power(d, alpha)) @ z.conj().T
    return matrix_model(scaled)


def invert_spectrum(model: SpectrumModel) -> SpectrumModel:
    """Model of A**-1; growth bound recomputed from the reciprocal spectrum."""
    if model.kind == "diagonal":
        eigs = model.eigenvalues
        if np.any(eigs == 0):
            raise SpectrumError("cannot invert: zero eigenvalue present")
        return _finalize_diagonal(1.0 / eigs)
    eigs = np.linalg.eigvals(model.matrix)
    if np.any(np.abs(eigs) < 1e-14 * np.max(np.abs(eigs))):
        raise SpectrumError("cannot invert: matrix numerically singular")
    return matrix_model(np.linalg.inv(model.matrix))
