"""Cartan data, positive roots and Weyl group actions.

Coordinates: an element of the complexified Cartan subalgebra is a complex
vector ``h``; for U(n) this is the diagonal ``H = diag(h)``. A real Cartan
element ``x`` is stored through its real vector ``theta`` with ``h = i*theta``
(``x = diag(i*theta)`` for U(n)). A root is a real covector ``b`` acting as
``beta(h) = b @ h``; the inner product is ``<h, k> = h @ G @ conj(k)``.
Weyl elements act on coordinates by matrices ``M``: ``(w.lam)(h) = lam(M @ h)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import NonRegularError, SpecError

REGULAR_TOL = 1e-9


@dataclass(frozen=True)
class CartanElement:
    """Cartan element ``diag(i*theta_1, ..., i*theta_n)`` stored as ``theta``."""

    theta: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.asarray(self.theta, dtype=float).ravel())
        if not all(np.isfinite(vals)):
            raise ValueError("Cartan element entries must be finite")
        object.__setattr__(self, "theta", vals)

    @property
    def n(self) -> int:
        return len(self.theta)

    def as_array(self) -> np.ndarray:
        return np.array(self.theta)

    def as_matrix(self) -> np.ndarray:
        return np.diag(1j * self.as_array())


def theta_of(x) -> np.ndarray:
    """Coerce a CartanElement or a sequence of reals to a float vector."""
    if isinstance(x, CartanElement):
        return x.as_array()
    arr = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("Cartan element entries must be finite")
    return arr


def _parity(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class WeylPermutation:
    """Element of S_n (0-based) acting by ``theta'_j = theta_{sigma(j)}``."""

    sigma: tuple

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        if sorted(sigma) != list(range(len(sigma))):
            raise ValueError(f"{sigma} is not a permutation of 0..{len(sigma) - 1}")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls, n: int) -> "WeylPermutation":
        return cls(tuple(range(n)))

    @property
    def sign(self) -> int:
        return _parity(self.sigma)

    def matrix(self) -> np.ndarray:
        n = len(self.sigma)
        m = np.zeros((n, n))
        m[np.arange(n), self.sigma] = 1.0
        return m

    def compose(self, other: "WeylPermutation") -> "WeylPermutation":
        """``self . other``, i.e. apply ``other`` first."""
        return WeylPermutation(tuple(other.sigma[j] for j in self.sigma))


def weyl_apply(w: WeylPermutation, x) -> CartanElement:
    theta = theta_of(x)
    if len(w.sigma) != len(theta):
        raise ValueError(f"permutation of size {len(w.sigma)} applied to rank-{len(theta)} element")
    return CartanElement(theta[list(w.sigma)])


def is_regular(x, tol: float = REGULAR_TOL) -> bool:
    """True iff all pairwise gaps of ``theta`` exceed ``tol``."""
    theta = theta_of(x)
    if len(theta) < 2:
        return True
    gaps = np.abs(theta[:, None] - theta[None, :])[np.triu_indices(len(theta), 1)]
    return bool(gaps.min() > tol)


def check_eta(x0) -> bool:
    """Chamber condition ``t_1 > t_2 > ... > t_n``."""
    t = theta_of(x0)
    return bool(np.all(np.diff(t) < 0))


@dataclass(frozen=True)
class PositiveRootUn:
    """Root ``h -> h_r - h_s`` of U(n), 0-based with ``r < s``."""

    r: int
    s: int

    def __post_init__(self):
        if not 0 <= self.r < self.s:
            raise ValueError(f"need 0 <= r < s, got r={self.r}, s={self.s}")


def root_eval_un(beta: PositiveRootUn, h) -> complex:
    h = np.asarray(h, dtype=complex).ravel()
    if beta.s >= len(h):
        raise IndexError(f"root ({beta.r}, {beta.s}) out of range for rank {len(h)}")
    return complex(h[beta.r] - h[beta.s])


def positive_roots_un(n: int) -> list[PositiveRootUn]:
    return [PositiveRootUn(r, s) for r, s in itertools.combinations(range(n), 2)]


@dataclass(frozen=True, eq=False)
class RootSystemSpec:
    """Declarative root data for a compact connected group.

    positive_roots: (|P|, rank) real covectors; weyl_matrices: (|W|, rank, rank);
    weyl_signs: (|W|,) determinants; coroot_vectors: (|P|, rank), the ``H_beta``;
    delta_p: half the sum of positive roots; inner_product: (rank, rank) SPD.
    """

    rank: int
    positive_roots: np.ndarray
    weyl_matrices: np.ndarray
    weyl_signs: np.ndarray
    coroot_vectors: np.ndarray
    delta_p: np.ndarray
    inner_product: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, RootSystemSpec):
            return NotImplemented
        return self.rank == other.rank and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("positive_roots", "weyl_matrices", "weyl_signs",
                      "coroot_vectors", "delta_p", "inner_product")
        )

    @property
    def n_roots(self) -> int:
        return self.positive_roots.shape[0]

    def delta_of_coroots(self) -> np.ndarray:
        """``delta_P(H_beta)`` for every positive root."""
        return self.coroot_vectors @ self.delta_p

    def root_values(self, theta) -> np.ndarray:
        """Real parts ``b @ theta``; the root value at ``x = i*theta`` is ``i`` times this."""
        return self.positive_roots @ theta_of(theta)

    def is_regular(self, theta, tol: float = REGULAR_TOL) -> bool:
        vals = self.root_values(theta)
        return bool(vals.size == 0 or np.min(np.abs(vals)) > tol)

    def to_document(self) -> dict:
        return {
            "rank": int(self.rank),
            "positive_roots": self.positive_roots.tolist(),
            "weyl_elements": [
                {"matrix": m.tolist(), "sign": int(s)}
                for m, s in zip(self.weyl_matrices, self.weyl_signs)
            ],
            "coroot_vectors": self.coroot_vectors.tolist(),
            "delta_p": self.delta_p.tolist(),
            "inner_product": self.inner_product.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document())


def require_regular(spec: RootSystemSpec, theta, name: str, tol: float = REGULAR_TOL):
    if not spec.is_regular(theta, tol):
        raise NonRegularError(f"{name} is not regular: some root value is within {tol:g} of zero")


def builtin_un_spec(n: int) -> RootSystemSpec:
    """Root data of U(n): roots ``e_r - e_s``, ``W = S_n``, ``H_beta = e_r - e_s``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    eye = np.eye(n)
    roots = np.array([eye[r] - eye[s] for r, s in itertools.combinations(range(n), 2)])
    roots = roots.reshape(-1, n)
    perms = [WeylPermutation(p) for p in itertools.permutations(range(n))]
    return RootSystemSpec(
        rank=n,
        positive_roots=roots,
        weyl_matrices=np.array([p.matrix() for p in perms]),
        weyl_signs=np.array([p.sign for p in perms]),
        coroot_vectors=roots.copy(),
        delta_p=roots.sum(axis=0) / 2,
        inner_product=eye,
    )


def _key(m: np.ndarray) -> bytes:
    return np.round(m, 9).astype(float).tobytes()


def validate_spec(spec: RootSystemSpec) -> list[str]:
    """Return the list of violated invariants (empty when valid)."""
    bad = []
    r = spec.rank
    g = spec.inner_product
    if g.shape != (r, r):
        return [f"inner_product has shape {g.shape}, expected {(r, r)}"]
    if spec.positive_roots.shape[1:] != (r,):
        bad.append(f"positive_roots must have length {r}")
    if spec.coroot_vectors.shape != spec.positive_roots.shape:
        bad.append("coroot_vectors must have one vector per positive root")
    if spec.delta_p.shape != (r,):
        bad.append(f"delta_p must have length {r}")
    if spec.weyl_matrices.ndim != 3 or spec.weyl_matrices.shape[1:] != (r, r):
        bad.append(f"weyl element matrices must be {r}x{r}")
    if bad:
        return bad

    if not np.allclose(g, g.T, atol=1e-12):
        bad.append("inner_product is not symmetric")
    elif np.linalg.eigvalsh(g).min() <= 0:
        bad.append("inner_product is not positive definite")

    if not np.allclose(spec.delta_p, spec.positive_roots.sum(axis=0) / 2, rtol=0, atol=1e-12):
        bad.append("delta_p is not half the sum of the positive roots")

    rng = np.random.default_rng(16)
    hs = rng.standard_normal((16, r)) + 1j * rng.standard_normal((16, r))
    lhs = hs @ spec.positive_roots.T
    rhs = hs @ g @ spec.coroot_vectors.T
    if not np.allclose(lhs, rhs, rtol=0, atol=1e-10 * max(1.0, np.abs(lhs).max(initial=0))):
        bad.append("coroot check failed: beta(H) != <H, H_beta> for some root")
    self_pair = np.einsum("ij,ij->i", spec.positive_roots, spec.coroot_vectors)
    if np.any(self_pair <= 0):
        bad.append("beta(H_beta) must be positive for every root")

    mats = spec.weyl_matrices
    if len(mats) == 0:
        bad.append("Weyl group is empty")
        return bad
    if len(spec.weyl_signs) != len(mats):
        bad.append("one sign is required per Weyl element")
    else:
        dets = np.linalg.det(mats)
        if np.any(np.abs(dets - spec.weyl_signs) > 1e-9):
            bad.append("Weyl element sign differs from its determinant")
    for k, m in enumerate(mats):
        if not np.allclose(m.T @ g @ m, g, atol=1e-9):
            bad.append(f"Weyl element {k} does not preserve the inner product")
            break
    keys = {_key(m) for m in mats}
    if _key(np.eye(r)) not in keys:
        bad.append("Weyl group closure: identity missing")
    products = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, r, r)
    if any(_key(p) not in keys for p in products):
        bad.append("Weyl group closure: product of two elements is not in the set")
    return bad


def load_spec(document) -> RootSystemSpec:
    """Build and validate a RootSystemSpec from a JSON string, bytes or parsed dict."""
    if isinstance(document, (str, bytes, bytearray)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"parse error: {exc}") from exc
    if not isinstance(document, dict):
        raise SpecError("parse error: document must be a JSON object")
    missing = [k for k in ("rank", "positive_roots", "weyl_elements", "coroot_vectors",
                           "delta_p", "inner_product") if k not in document]
    if missing:
        raise SpecError([f"parse error: missing key {k!r}" for k in missing])
    try:
        rank = int(document["rank"])
        roots = np.array(document["positive_roots"], dtype=float).reshape(-1, rank)
        coroots = np.array(document["coroot_vectors"], dtype=float).reshape(-1, rank)
        weyl = document["weyl_elements"]
        mats = np.array([e["matrix"] for e in weyl], dtype=float).reshape(-1, rank, rank)
        signs = np.array([int(e["sign"]) for e in weyl])
        spec = RootSystemSpec(
            rank=rank,
            positive_roots=roots,
            weyl_matrices=mats,
            weyl_signs=signs,
            coroot_vectors=coroots,
            delta_p=np.array(document["delta_p"], dtype=float),
            inner_product=np.array(document["inner_product"], dtype=float),
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise SpecError(f"parse error: {exc}") from exc
    bad = validate_spec(spec)
    if bad:
        raise SpecError(bad)
    return spec
