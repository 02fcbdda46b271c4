"""Fixed-point formulas for compact group actions.

Berline-Vergne and Duistermaat-Heckman sums over user-supplied zero data,
the Harish-Chandra Weyl sum, the Itzykson-Zuber integral over U(n) and its
root-data generalization, and coadjoint-orbit symplectic volumes.

Cartan elements are given by real vectors (see ``roots``): ``x = i*theta``
and ``x0 = i*t`` in Cartan coordinates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConditioningWarning, LocalizeError, NonRegularError, OrderingWarning
from .matrix_core import vandermonde
from .roots import (
    REGULAR_TOL,
    RootSystemSpec,
    builtin_un_spec,
    check_eta,
    is_regular,
    require_regular,
    theta_of,
)

CONDITIONING_GAP = 1e-6


@dataclass(frozen=True)
class FixedPointDatum:
    """One zero ``p`` of the generating vector field.

    ``weights`` are the canonical rotation weights of the linearization at ``p``,
    so the square root of its determinant is their product.
    """

    label: str
    j_value: complex
    weights: tuple
    multiplicity: int = 1
    class_value: complex = 1.0

    def __post_init__(self):
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(self.weights, dtype=float)))
        if any(v == 0.0 for v in w):
            raise LocalizeError(f"fixed point {self.label!r} has a zero weight")
        if self.multiplicity < 0:
            raise LocalizeError(f"fixed point {self.label!r} has negative multiplicity")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "j_value", complex(self.j_value))
        object.__setattr__(self, "class_value", complex(self.class_value))

    @property
    def sqrt_det(self) -> float:
        return math.prod(self.weights)


@dataclass(frozen=True)
class DHProblem:
    n: int
    c: complex
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "points", tuple(self.points))
        if self.c == 0:
            raise LocalizeError("c must be nonzero")
        if not self.points:
            raise LocalizeError("at least one fixed point is required")
        for p in self.points:
            if len(p.weights) != self.n:
                raise LocalizeError(
                    f"fixed point {p.label!r} has {len(p.weights)} weights, expected {self.n}")


def _check_points(n, points):
    points = list(points)
    if not points:
        raise LocalizeError("at least one fixed point is required")
    for p in points:
        if len(p.weights) != n:
            raise LocalizeError(f"fixed point {p.label!r} has {len(p.weights)} weights, expected {n}")
    return points


def bv_sum(n: int, points) -> complex:
    """Localization sum ``i**n * sum_p m_p * class_p / prod(weights_p)``.

    The sign ``(-1)**(n/2)`` is read as the principal branch ``i**n``.
    """
    points = _check_points(n, points)
    total = sum(p.multiplicity * p.class_value / p.sqrt_det for p in points)
    return complex(1j ** n * total)


def dh_sum(problem: DHProblem) -> complex:
    """``(2 pi / c)**n * sum_p m_p * exp(c J(p)) / prod(weights_p)``."""
    c, n = problem.c, problem.n
    total = sum(p.multiplicity * np.exp(c * p.j_value) / p.sqrt_det for p in problem.points)
    return complex((2 * np.pi / c) ** n * total)


@dataclass(frozen=True)
class SphereDemo:
    c: complex
    fixed_point_value: complex
    quadrature_value: complex
    abs_diff: float


def sphere_problem(c) -> DHProblem:
    """Round unit sphere, rotation about the axis, ``J`` = height: two polar zeros."""
    return DHProblem(n=1, c=c, points=(
        FixedPointDatum("north", 1.0, (1.0,)),
        FixedPointDatum("south", -1.0, (-1.0,)),
    ))


def sphere_dh_demo(c) -> SphereDemo:
    """Fixed-point sum on S^2 against adaptive quadrature of ``2 pi int_{-1}^{1} e^{cz} dz``."""
    c = complex(c)
    if c == 0:
        raise LocalizeError("c must be nonzero")
    fp = dh_sum(sphere_problem(c))
    opts = dict(epsabs=1e-12, epsrel=1e-13, limit=200)
    re, _ = integrate.quad(lambda z: np.exp(c * z).real, -1.0, 1.0, **opts)
    im, _ = integrate.quad(lambda z: np.exp(c * z).imag, -1.0, 1.0, **opts)
    quad = 2 * np.pi * complex(re, im)
    return SphereDemo(c, fp, quad, float(abs(fp - quad)))


def _spec_for(spec, n):
    if spec is None:
        return builtin_un_spec(n)
    if spec.rank != n:
        raise LocalizeError(f"Cartan element has {n} coordinates, spec has rank {spec.rank}")
    return spec


def _weyl_terms(spec: RootSystemSpec, theta, t):
    """Per Weyl element: ``lambda_x0(w.x)`` and ``prod_beta b @ (M_w theta)``."""
    moved = spec.weyl_matrices @ theta
    pairing = moved @ spec.inner_product @ t
    root_prod = np.prod(moved @ spec.positive_roots.T, axis=1)
    return pairing, root_prod


def hc_weyl_sum(x, x0, c, spec: RootSystemSpec | None = None) -> complex:
    """Harish-Chandra sum ``c**-N * sum_w exp(-c (w.lam)(x)) / prod_beta (w.beta)(i x)``.

    ``N = |P|``. Uses the reversed symplectic form (moment map ``-J``), for
    which ``c = -i`` gives the orbit integral normalized by ``(2 pi)**N``; on
    U(n) that equals ``symplectic_volume_un(t) * iz_exact(theta, t)``.
    """
    theta, t = theta_of(x), theta_of(x0)
    spec = _spec_for(spec, len(theta))
    if len(t) != spec.rank:
        raise LocalizeError("x and x0 must have the same rank")
    require_regular(spec, theta, "x")
    require_regular(spec, t, "x0")
    c = complex(c)
    pairing, root_prod = _weyl_terms(spec, theta, t)
    # (w.beta)(i x) = b @ (i * i * M theta) = -b @ M theta
    denom = (-1.0) ** spec.n_roots * root_prod
    return complex(c ** (-spec.n_roots) * np.sum(np.exp(-c * pairing) / denom))


def _warn_conditioning(theta, t):
    gaps = [np.abs(np.subtract.outer(v, v))[np.triu_indices(len(v), 1)] for v in (theta, t)]
    smallest = min((g.min() for g in gaps if g.size), default=np.inf)
    if smallest < CONDITIONING_GAP:
        amplification = 1.0 / smallest
        warnings.warn(
            f"near-coincident arguments (min gap {smallest:.3e}); rounding error may be "
            f"amplified by about {amplification:.1e}",
            ConditioningWarning, stacklevel=3)


def iz_exact(x, x0, tol: float = REGULAR_TOL) -> complex:
    """Itzykson-Zuber integral ``int_{U(n)} exp(-i Tr(x a x0 a^-1)) d mu(a)``.

    ``(prod_{k<n} k!) * i**-P * det[exp(i theta_r t_s)] / (Delta(t) Delta(theta))``
    with ``P = n(n-1)/2`` and ``Delta(v) = prod_{r<s} (v_r - v_s)``.
    """
    theta, t = theta_of(x), theta_of(x0)
    n = len(theta)
    if len(t) != n:
        raise LocalizeError("x and x0 must have the same size")
    if not is_regular(theta, tol):
        raise NonRegularError("x is not regular: repeated theta entries")
    if not is_regular(t, tol):
        raise NonRegularError("x0 is not regular: repeated t entries")
    if not check_eta(t):
        warnings.warn("x0 violates t_1 > ... > t_n; evaluating anyway", OrderingWarning, stacklevel=2)
    _warn_conditioning(theta, t)
    p = n * (n - 1) // 2
    const = math.prod(math.factorial(k) for k in range(n)) * (1j) ** (-p)
    det = np.linalg.det(np.exp(1j * np.outer(theta, t)))
    return complex(const * det / (vandermonde(t) * vandermonde(theta)))


def symplectic_volume_un(t, tol: float = REGULAR_TOL) -> float:
    """Normalized symplectic volume of the U(n) orbit through ``diag(i t)``:
    ``prod_{r<s}(t_r - t_s) / prod_{k<n} k!``."""
    t = theta_of(t)
    if not is_regular(t, tol):
        raise NonRegularError("t is not regular: repeated entries")
    n = len(t)
    return float(vandermonde(t).real / math.prod(math.factorial(k) for k in range(n)))


def _check_positive(spec, t):
    vals = spec.root_values(t)
    if np.any(vals <= 0):
        warnings.warn("x0 violates i*beta(x0) < 0 for some positive root", OrderingWarning,
                      stacklevel=3)
    return vals


def symplectic_volume_generic(spec: RootSystemSpec, x0, tol: float = REGULAR_TOL) -> float:
    """``prod_beta beta(-i x0) / delta_P(H_beta)`` from root data."""
    t = theta_of(x0)
    spec = _spec_for(spec, len(t))
    require_regular(spec, t, "x0", tol)
    # beta(-i x0) = b @ (-i * i t) = b @ t
    vals = _check_positive(spec, t)
    return float(np.prod(vals / spec.delta_of_coroots()))


def iz_generic(spec: RootSystemSpec, x, x0, tol: float = REGULAR_TOL) -> complex:
    """Itzykson-Zuber integral for a compact group given by root data:
    ``prod_beta delta_P(H_beta)/beta(-i x0) * sum_w exp(i (w.lam)(x)) / prod_beta (w.beta)(x)``."""
    theta, t = theta_of(x), theta_of(x0)
    spec = _spec_for(spec, len(theta))
    if len(t) != spec.rank:
        raise LocalizeError("x and x0 must have the same rank")
    require_regular(spec, theta, "x", tol)
    require_regular(spec, t, "x0", tol)
    vals = _check_positive(spec, t)
    pairing, root_prod = _weyl_terms(spec, theta, t)
    # (w.beta)(x) = i * b @ (M theta)
    denom = (1j) ** spec.n_roots * root_prod
    prefactor = np.prod(spec.delta_of_coroots() / vals)
    return complex(prefactor * np.sum(np.exp(1j * pairing) / denom))


def volume_limit_terms(t, eps) -> complex:
    """Right side of the U(n) localization formula at ``theta_j = eps * (n - 1 - j)``.

    The determinant is the Vandermonde of ``exp(i eps t_j)`` and
    ``Delta(theta) = eps**P * prod_{r<s}(s - r)``.
    """
    t = theta_of(t)
    n = len(t)
    p = n * (n - 1) // 2
    z = np.exp(1j * eps * t)
    gaps = math.prod(s - r for r in range(n) for s in range(r + 1, n))
    return complex((1j) ** (-p) * vandermonde(z) / (gaps * eps ** p))


def richardson_at_zero(eps, values) -> complex:
    """Value at 0 of the interpolating polynomial through ``(eps_k, values_k)``."""
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=complex)
    total = 0.0 + 0.0j
    for k in range(len(eps)):
        others = np.delete(eps, k)
        total += values[k] * np.prod(others / (others - eps[k]))
    return complex(total)


def volume_limit(t, epsilons=(1e-2, 1e-3, 1e-4), tol: float = REGULAR_TOL) -> float:
    """Symplectic volume as the ``eps -> 0`` limit of the localization formula,
    by polynomial extrapolation of degree ``len(epsilons) - 1``."""
    t = theta_of(t)
    if not is_regular(t, tol):
        raise NonRegularError("t is not regular: repeated entries")
    eps = [float(e) for e in epsilons]
    if len(eps) < 3:
        raise LocalizeError("at least 3 epsilons are required")
    if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise LocalizeError("epsilons must be positive and strictly decreasing")
    values = [volume_limit_terms(t, e) for e in eps]
    return richardson_at_zero(eps, values).real
