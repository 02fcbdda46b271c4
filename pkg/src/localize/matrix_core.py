"""Linear algebra for real skew-symmetric forms.

Pfaffians, the canonical rotation weights of a non-degenerate skew form, the
oriented square root of its determinant, and Vandermonde products.

Sign convention: the canonical 2x2 block for weight ``lam`` is
``[[0, -lam], [lam, 0]]`` and ``Pf([[0, a], [-a, 0]]) = a``, so a
block-diagonal canonical form has Pfaffian ``(-1)**n * prod(lam)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateLinearizationError, SkewFormError

SKEW_TOL = 1e-12
SINGULAR_RTOL = 1e-12
# largest dimension handled by cofactor expansion
COFACTOR_MAX_DIM = 6


class Orientation(enum.IntEnum):
    """Sign of the reference volume form on the standard basis."""

    POSITIVE = 1
    NEGATIVE = -1


@dataclass(frozen=True)
class SkewForm:
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", as_skew(self.entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def half_dim(self) -> int:
        return self.dim // 2


@dataclass(frozen=True)
class SpectralPairing:
    """Canonical weights and an orthonormal basis bringing a skew form to block form.

    ``basis.T @ A @ basis`` is block diagonal with blocks ``[[0, -w], [w, 0]]``.
    """

    weights: np.ndarray
    basis: np.ndarray
    orientation_sign: int

    def block_form(self) -> np.ndarray:
        return canonical_matrix(self.weights)


def as_skew(a, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate ``a`` as an even-dimensional real skew matrix and return ``(a - a.T) / 2``."""
    if isinstance(a, SkewForm):
        return a.entries
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SkewFormError(f"expected a square matrix, got shape {arr.shape}")
    m = arr.shape[0]
    if m == 0 or m % 2:
        raise SkewFormError(f"dimension must be even and positive, got {m}")
    if not np.all(np.isfinite(arr)):
        raise SkewFormError("matrix has non-finite entries")
    resid = np.max(np.abs(arr + arr.T)) / 2
    if resid > tol:
        raise SkewFormError(f"matrix is not skew-symmetric (residual {resid:.3e} > {tol:.0e})")
    return (arr - arr.T) / 2


def canonical_matrix(weights) -> np.ndarray:
    """Block-diagonal skew matrix with blocks ``[[0, -w], [w, 0]]``."""
    w = np.asarray(weights, dtype=float)
    out = np.zeros((2 * len(w), 2 * len(w)))
    for j, lam in enumerate(w):
        out[2 * j, 2 * j + 1] = -lam
        out[2 * j + 1, 2 * j] = lam
    return out


def _pfaffian_cofactor(a: np.ndarray) -> float:
    m = a.shape[0]
    if m == 0:
        return 1.0
    if m == 2:
        return float(a[0, 1])
    total = 0.0
    rest = np.arange(1, m)
    for j in range(1, m):
        if a[0, j] == 0.0:
            continue
        keep = rest[rest != j]
        sign = 1.0 if j % 2 == 1 else -1.0
        total += sign * a[0, j] * _pfaffian_cofactor(a[np.ix_(keep, keep)])
    return total


def _pfaffian_parlett_reid(a: np.ndarray) -> float:
    # Gaussian elimination with symmetric pivoting (skew LTL^T); O(m^3)
    a = np.array(a, dtype=float)
    m = a.shape[0]
    pf = 1.0
    for k in range(0, m - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < m:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def pfaffian(a, method: str = "auto") -> float:
    """Pfaffian of a real skew-symmetric matrix.

    ``method`` is ``"cofactor"``, ``"parlett-reid"`` or ``"auto"`` (cofactor
    expansion up to dimension 6, elimination above).
    """
    arr = as_skew(a)
    if method == "auto":
        method = "cofactor" if arr.shape[0] <= COFACTOR_MAX_DIM else "parlett-reid"
    if method == "cofactor":
        return _pfaffian_cofactor(arr)
    if method == "parlett-reid":
        return _pfaffian_parlett_reid(arr)
    raise ValueError(f"unknown pfaffian method {method!r}")


def is_singular(a, rtol: float = SINGULAR_RTOL) -> bool:
    """Scale-aware singularity test ``|det A| <= rtol * ||A||_2 ** dim``."""
    arr = as_skew(a)
    scale = np.linalg.norm(arr, 2) ** arr.shape[0]
    return abs(np.linalg.det(arr)) <= rtol * scale


def skew_canonical_form(a, orientation: Orientation = Orientation.POSITIVE) -> SpectralPairing:
    """Orthonormal basis ``e`` and weights with ``e.T @ A @ e`` in canonical block form.

    The basis is positively oriented for ``orientation``; if the real Schur
    basis is not, its first two vectors are interchanged, which flips the sign
    of the first weight.
    """
    arr = as_skew(a)
    if is_singular(arr):
        raise DegenerateLinearizationError("degenerate linearization: skew form is singular")
    t, z = scipy.linalg.schur(arr, output="real")
    n = arr.shape[0] // 2
    # Schur blocks come out as [[0, b], [-b, 0]] with b = -weight
    weights = -np.array([t[2 * j, 2 * j + 1] for j in range(n)])
    if np.sign(np.linalg.det(z)) != int(orientation):
        z[:, [0, 1]] = z[:, [1, 0]]
        weights[0] = -weights[0]
    return SpectralPairing(weights=weights, basis=z, orientation_sign=int(orientation))


def sqrt_det(a, orientation: Orientation = Orientation.POSITIVE) -> float:
    """Oriented square root of ``det A``: the product of canonical weights.

    Equals ``(-1)**n * Pf_e(A)`` for a positively oriented orthonormal basis
    ``e``; for the standard orientation this is ``(-1)**n * pfaffian(A)``.
    """
    arr = as_skew(a)
    if is_singular(arr):
        raise DegenerateLinearizationError("degenerate linearization: skew form is singular")
    n = arr.shape[0] // 2
    return (-1) ** n * int(orientation) * pfaffian(arr)


def vandermonde(v) -> complex:
    """``prod_{r<s} (v_r - v_s)``; returns 1 for fewer than two entries."""
    vals = np.asarray(v, dtype=complex).ravel()
    out = 1.0 + 0.0j
    for r in range(len(vals)):
        for s in range(r + 1, len(vals)):
            out *= vals[r] - vals[s]
    return out
