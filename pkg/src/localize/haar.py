"""Haar-random unitaries and seeded Monte Carlo estimates over U(n).

Worker ``k`` draws from a Philox stream keyed by ``(seed, k)``; its sample
values are concatenated in worker order before reduction, so the estimate
depends only on ``(seed, n_samples, workers)``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .roots import theta_of

DEFAULT_SEED = 0x5EED
BATCH = 8192


@dataclass(frozen=True)
class HaarEstimate:
    mean: complex
    stderr: float
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean_re": float(self.mean.real),
            "mean_im": float(self.mean.imag),
            "stderr": float(self.stderr),
            "n_samples": int(self.n_samples),
            "seed": int(self.seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def worker_rng(seed: int, worker: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(worker),))
    return np.random.Generator(np.random.Philox(ss))


def sample_haar_batch(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` Haar unitaries, shape ``(size, n, n)``.

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` moved into
    ``Q`` so that ``R`` has a positive diagonal.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def sample_haar(n: int, rng: np.random.Generator) -> np.ndarray:
    return sample_haar_batch(n, 1, rng)[0]


def unitarity_residual(u: np.ndarray) -> float:
    """Max-entry norm of ``U U^dagger - I`` (over a stack if given one)."""
    u = np.asarray(u)
    prod = u @ np.conj(np.swapaxes(u, -1, -2))
    return float(np.max(np.abs(prod - np.eye(u.shape[-1]))))


def _split(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


def _worker_values(f, n, count, seed, k, batched):
    rng = worker_rng(seed, k)
    out = []
    done = 0
    while done < count:
        size = min(BATCH, count - done)
        us = sample_haar_batch(n, size, rng)
        if batched:
            vals = np.asarray(f(us), dtype=complex).reshape(size)
        else:
            vals = np.array([complex(f(u)) for u in us])
        out.append(vals)
        done += size
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def haar_values(f, n: int, n_samples: int, seed: int = DEFAULT_SEED,
                workers: int = 1, batched: bool = False) -> np.ndarray:
    """Per-sample values ``f(U)`` in deterministic (worker, draw) order."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    counts = _split(n_samples, workers)
    if workers == 1:
        parts = [_worker_values(f, n, counts[0], seed, 0, batched)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_worker_values, f, n, c, seed, k, batched)
                       for k, c in enumerate(counts)]
            parts = [fut.result() for fut in futures]
    return np.concatenate(parts)


def estimate(values: np.ndarray, seed: int) -> HaarEstimate:
    values = np.asarray(values, dtype=complex)
    m = len(values)
    if m < 2:
        raise ValueError("at least 2 samples are required")
    var = np.var(values.real, ddof=1) + np.var(values.imag, ddof=1)
    return HaarEstimate(complex(np.mean(values)), float(np.sqrt(var / m)), m, int(seed))


def mc_expectation(f, n: int, n_samples: int, seed: int = DEFAULT_SEED,
                   workers: int = 1, batched: bool = False) -> HaarEstimate:
    """Haar-measure Monte Carlo estimate of ``E[f(U)]`` over U(n).

    With ``batched=True``, ``f`` receives a stack ``(B, n, n)`` and returns ``B`` values.
    """
    if n_samples < 2:
        raise ValueError("at least 2 samples are required")
    return estimate(haar_values(f, n, n_samples, seed, workers, batched), seed)


def iz_integrand(theta, t):
    """Batched ``U -> exp(-i Tr(x U x0 U^dagger))`` for ``x = diag(i theta)``, ``x0 = diag(i t)``.

    The trace equals ``-sum_jk theta_j t_k |U_jk|^2``.
    """
    coupling = np.outer(theta_of(theta), theta_of(t))

    def f(us):
        return np.exp(1j * np.einsum("jk,bjk->b", coupling, np.abs(us) ** 2))

    return f


def iz_mc(x, x0, n_samples: int, seed: int = DEFAULT_SEED, workers: int = 1) -> HaarEstimate:
    """Monte Carlo estimate of the Itzykson-Zuber integral over normalized Haar measure."""
    theta, t = theta_of(x), theta_of(x0)
    if len(theta) != len(t):
        raise ValueError("x and x0 must have the same size")
    return mc_expectation(iz_integrand(theta, t), len(theta), n_samples, seed, workers, batched=True)
