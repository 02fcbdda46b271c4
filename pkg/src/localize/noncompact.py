"""SL(2,R) acting on CP^1 by Moebius transformations.

``[[al, be], [ga, de]] . z = (al z + be) / (ga z + de)``. For
``X = [[a, b], [c, -a]]`` the generated field in the chart ``z = z1/z2`` is
``V_X(z) = b + 2 a z - c z**2``; in the chart ``w = z2/z1`` it is
``c - 2 a w - b w**2``. Zeros of the field are the eigenlines of ``X``, and the
holomorphic weight at the eigenline with eigenvalue ``lam`` is ``-2 lam``.

The hemisphere ``H`` of the cycle ``C_H`` is the open upper half-plane
``Im(z1/z2) > 0``; the invariant circle is the real projective line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    LocalizeError,
    NonRegularError,
    NotAZeroError,
    UnspecifiedMultiplicityError,
)

CLASSIFY_TOL = 1e-12
STABILITY_TOL = 1e-10
ZERO_TOL = 1e-8


class RegularClass(enum.Enum):
    ELLIPTIC = "elliptic"
    SPLIT = "split"
    NONREGULAR = "nonregular"


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    ROTATION = "rotation"


class CycleChoice(enum.Enum):
    CONORMAL_CIRCLE = "conormal"
    C_H_UPPER = "c-h"


@dataclass(frozen=True)
class Sl2Element:
    """Traceless ``[[a, b], [c, -a]]``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise LocalizeError(f"entry {name} is not finite")
            object.__setattr__(self, name, v)

    @classmethod
    def from_matrix(cls, m) -> "Sl2Element":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise LocalizeError("expected a 2x2 matrix")
        if abs(m[0, 0] + m[1, 1]) > 1e-12 * max(1.0, np.abs(m).max()):
            raise LocalizeError("matrix is not traceless")
        return cls(m[0, 0], m[0, 1], m[1, 0])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, -self.a]])

    @property
    def det(self) -> float:
        return -self.a * self.a - self.b * self.c

    @property
    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c))

    def conjugate(self, g) -> "Sl2Element":
        """``g X g^-1``."""
        g = np.asarray(g, dtype=float)
        return Sl2Element.from_matrix(g @ self.matrix @ np.linalg.inv(g))


@dataclass(frozen=True)
class ProjPoint:
    """Homogeneous ``(z1, z2)`` scaled so the larger component is exactly 1."""

    z1: complex
    z2: complex

    def __post_init__(self):
        z1, z2 = complex(self.z1), complex(self.z2)
        if z1 == 0 and z2 == 0:
            raise LocalizeError("(0, 0) is not a projective point")
        if abs(z1) > abs(z2):
            z1, z2 = 1.0 + 0.0j, z2 / z1
        else:
            z1, z2 = z1 / z2, 1.0 + 0.0j
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @classmethod
    def from_affine(cls, z) -> "ProjPoint":
        if z == np.inf or z is None:
            return cls(1.0, 0.0)
        return cls(z, 1.0)

    @property
    def in_z_chart(self) -> bool:
        return self.z2 == 1.0

    def affine(self) -> complex | float:
        """``z1/z2``, or ``inf`` at the point at infinity."""
        if self.z2 == 0:
            return np.inf
        return self.z1 / self.z2

    def upper_half(self) -> float:
        """Sign-carrying ``Im(z1 conj(z2))``: positive iff ``Im(z1/z2) > 0``."""
        return (self.z1 * np.conj(self.z2)).imag

    def close_to(self, other: "ProjPoint", tol: float = 1e-9) -> bool:
        return abs(self.z1 * other.z2 - self.z2 * other.z1) <= tol


def mobius(g, p: ProjPoint) -> ProjPoint:
    g = np.asarray(g)
    return ProjPoint(g[0, 0] * p.z1 + g[0, 1] * p.z2, g[1, 0] * p.z1 + g[1, 1] * p.z2)


@dataclass(frozen=True)
class ZeroDatum:
    point: ProjPoint
    mu: complex
    stability: Stability
    multiplicity: int
    chart: str

    def to_dict(self) -> dict:
        z = self.point.affine()
        inf = z is np.inf or z == np.inf
        return {
            "z_re": "inf" if inf else float(z.real),
            "z_im": "inf" if inf else float(z.imag),
            "mu_re": float(self.mu.real),
            "mu_im": float(self.mu.imag),
            "stability": self.stability.value,
            "multiplicity": int(self.multiplicity),
        }


def classify(x: Sl2Element, tol: float = CLASSIFY_TOL) -> RegularClass:
    d = x.det
    if d > tol:
        return RegularClass.ELLIPTIC
    if d < -tol:
        return RegularClass.SPLIT
    return RegularClass.NONREGULAR


def _require_regular(x, tol=CLASSIFY_TOL):
    kind = classify(x, tol)
    if kind is RegularClass.NONREGULAR:
        raise NonRegularError("X is not regular semisimple (repeated eigenvalue)")
    return kind


def eigenvalues(x: Sl2Element) -> tuple[complex, complex]:
    """``(+sqrt(-det X), -sqrt(-det X))`` on the principal branch."""
    root = np.sqrt(complex(-x.det))
    return root, -root


def flow_zeros(x: Sl2Element) -> tuple[ProjPoint, ProjPoint]:
    """The two eigenlines of ``X``, ordered by eigenvalue ``+sqrt(-det)``, ``-sqrt(-det)``."""
    _require_regular(x)
    out = []
    for lam in eigenvalues(x):
        # (X - lam) v = 0: both rows give a candidate kernel vector
        v1 = np.array([x.b, lam - x.a])
        v2 = np.array([lam + x.a, x.c])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        out.append(ProjPoint(v[0], v[1]))
    return out[0], out[1]


def vector_field(x: Sl2Element, p: ProjPoint) -> complex:
    """Generator field of ``X`` at ``p`` in the chart chosen by ``p``'s normalization."""
    if p.in_z_chart:
        z = p.z1
        return x.b + 2 * x.a * z - x.c * z * z
    w = p.z2
    return x.c - 2 * x.a * w - x.b * w * w


def linearize(x: Sl2Element, p: ProjPoint, tol: float = ZERO_TOL) -> complex:
    """Holomorphic weight: derivative of the generator field at the zero ``p``."""
    if abs(vector_field(x, p)) > tol * max(1.0, x.scale):
        raise NotAZeroError("point is not a zero of the vector field")
    if p.in_z_chart:
        return complex(2 * x.a - 2 * x.c * p.z1)
    return complex(-2 * x.a - 2 * x.b * p.z2)


def stability(mu: complex, tol: float = STABILITY_TOL) -> Stability:
    mu = complex(mu)
    if mu == 0:
        raise LocalizeError("weight is zero: degenerate zero")
    if mu.real < -tol:
        return Stability.STABLE
    if mu.real > tol:
        return Stability.UNSTABLE
    return Stability.ROTATION


def multiplicity(x: Sl2Element, point: ProjPoint, mu: complex,
                 cycle: CycleChoice = CycleChoice.C_H_UPPER) -> int:
    """Integer multiplicity of a zero for the cycle ``C_H``.

    Elliptic: 1 iff the zero lies in the upper half-plane. Split: 1 iff it is stable.
    """
    kind = _require_regular(x)
    if cycle is not CycleChoice.C_H_UPPER:
        raise UnspecifiedMultiplicityError(
            f"multiplicities are unspecified for the {cycle.value} cycle")
    if kind is RegularClass.ELLIPTIC:
        return int(point.upper_half() > 0)
    return int(stability(mu) is Stability.STABLE)


def zero_data(x: Sl2Element, cycle: CycleChoice = CycleChoice.C_H_UPPER) -> list[ZeroDatum]:
    out = []
    for p in flow_zeros(x):
        mu = linearize(x, p)
        out.append(ZeroDatum(
            point=p,
            mu=mu,
            stability=stability(mu),
            multiplicity=multiplicity(x, p, mu, cycle),
            chart="z" if p.in_z_chart else "w",
        ))
    return out


DEFAULT_S = -1 / (2j * np.pi)


def f_alpha_const(x: Sl2Element, s: complex = DEFAULT_S) -> complex:
    """Localized value ``(-2 pi s) * sum_p m_p / mu_p`` for the constant form on ``C_H``."""
    return complex(-2 * np.pi * complex(s) * sum(d.multiplicity / d.mu for d in zero_data(x)))


def moment_map_eval(z: complex, zeta: complex, x: Sl2Element) -> complex:
    """``<xi, X*>`` for the covector ``zeta dz`` at ``z`` in the standard chart."""
    z = complex(z)
    return complex(zeta) * (x.b + 2 * x.a * z - x.c * z * z)
