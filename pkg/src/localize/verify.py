"""Acceptance gates: each exact formula checked against an independent oracle.

Every criterion returns a :class:`CriterionResult` with the measured
statistic, the tolerance it is held to and its wall-clock runtime.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import compact, haar, noncompact
from .matrix_core import pfaffian
from .roots import builtin_un_spec


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict
    tolerance: str
    runtime: float = 0.0
    runtime_limit: float = float("inf")
    details: list = field(default_factory=list)

    @property
    def runtime_ok(self) -> bool:
        return self.runtime < self.runtime_limit

    @property
    def ok(self) -> bool:
        return self.passed and self.runtime_ok

    def summary(self) -> str:
        return ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        limit = f" < {self.runtime_limit:g}s" if np.isfinite(self.runtime_limit) else ""
        return (f"[{status}] {self.number:2d}. {self.name}: {self.summary()} "
                f"(tol {self.tolerance}; {self.runtime:.2f}s{limit})")

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "pass": bool(self.passed),
            "runtime_ok": bool(self.runtime_ok),
            "measured": {k: _jsonable(v) for k, v in self.measured.items()},
            "tolerance": self.tolerance,
        }


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int, bool, np.bool_)):
        return v.item() if hasattr(v, "item") else v
    return v


def random_skew(rng, dim):
    a = rng.standard_normal((dim, dim))
    return a - a.T


def random_rotation(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_eta_pair(rng, n, min_gap=0.2):
    """Regular ``theta`` and strictly decreasing ``t`` with gaps at least ``min_gap``."""
    while True:
        theta = rng.uniform(-2, 2, n)
        t = np.sort(rng.uniform(-2, 2, n))[::-1]
        if n < 2 or (np.min(np.abs(np.diff(np.sort(theta)))) > min_gap
                     and np.min(-np.diff(t)) > min_gap):
            return theta, t


def random_sl2(rng, kind):
    """Random regular element of the given class, conjugated by a random SL(2,R) element."""
    lam = rng.uniform(0.3, 3.0) * rng.choice([-1.0, 1.0])
    base = np.array([[0.0, lam], [-lam, 0.0]]) if kind == "elliptic" else np.diag([lam, -lam])
    g = rng.standard_normal((2, 2))
    while abs(np.linalg.det(g)) < 0.2:
        g = rng.standard_normal((2, 2))
    if np.linalg.det(g) < 0:
        g[:, 0] = -g[:, 0]
    g = g / np.sqrt(np.linalg.det(g))
    return noncompact.Sl2Element.from_matrix(g @ base @ np.linalg.inv(g))


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - start
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def pfaffian_identity(seed=haar.DEFAULT_SEED):
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    worst_split = 0.0
    for k in range(200):
        dim = 2 * (1 + k % 5)
        a = random_skew(rng, dim)
        pf = pfaffian(a)
        det = np.linalg.det(a)
        worst = max(worst, abs(pf * pf - det) / max(1.0, abs(det)))
        if dim <= 6:
            worst_split = max(worst_split, abs(pf - pfaffian(a, "parlett-reid")))
    return CriterionResult(1, "Pfaffian squared equals determinant", worst <= 1e-9 and worst_split <= 1e-10,
                           {"max_scaled_residual": worst, "cofactor_vs_elimination": worst_split},
                           "1e-9*max(1,|det|); methods agree 1e-10", runtime_limit=1.0)


@_timed
def pfaffian_orthogonal_invariance(seed=haar.DEFAULT_SEED):
    rng = np.random.default_rng([seed, 2])
    worst = 0.0
    for k in range(100):
        dim = 2 * (1 + k % 5)
        a = random_skew(rng, dim)
        q = random_rotation(rng, dim)
        worst = max(worst, abs(pfaffian(q.T @ a @ q) - pfaffian(a)))
    return CriterionResult(2, "Pfaffian invariant under SO(2n) conjugation", worst <= 1e-9,
                           {"max_abs_diff": worst}, "1e-9", runtime_limit=1.0)


SPHERE_CS = (0.5, 1.0, 2.0, 1j, 1 + 1j)


@_timed
def dh_sphere_exactness(seed=haar.DEFAULT_SEED):
    worst = 0.0
    for c in SPHERE_CS:
        demo = compact.sphere_dh_demo(c)
        worst = max(worst, demo.abs_diff / max(1.0, abs(demo.quadrature_value)))
    return CriterionResult(3, "Duistermaat-Heckman exact on the sphere", worst <= 1e-8,
                           {"max_rel_diff": worst}, "1e-8 relative", runtime_limit=1.0)


@_timed
def un_cross_formula(seed=haar.DEFAULT_SEED):
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for n in (2, 3):
        spec = builtin_un_spec(n)
        for _ in range(100):
            theta, t = random_eta_pair(rng, n)
            exact = compact.iz_exact(theta, t)
            generic = compact.iz_generic(spec, theta, t)
            worst = max(worst, abs(exact - generic) / abs(exact))
    return CriterionResult(4, "U(n) determinant formula equals root-data formula", worst <= 1e-9,
                           {"max_rel_diff": worst}, "1e-9 relative", runtime_limit=5.0)


IZ_CASES = {2: ((1.0, 0.0), (2.0, 1.0)), 3: ((1.0, 0.3, -0.5), (1.5, 0.5, -1.0))}
IZ_SAMPLES = 200_000


@_timed
def iz_vs_haar(seed=haar.DEFAULT_SEED, workers=1, samples=IZ_SAMPLES):
    measured = {}
    ok = True
    theta1, t1 = (0.7,), (1.3,)
    est1 = haar.iz_mc(theta1, t1, 16, seed, workers)
    exact1 = compact.iz_exact(theta1, t1)
    err1 = max(abs(exact1 - np.exp(1j * 0.7 * 1.3)), abs(est1.mean - exact1))
    measured["n1_abs_err"] = float(err1)
    ok &= err1 <= 1e-14
    for n, (theta, t) in IZ_CASES.items():
        est = haar.iz_mc(theta, t, samples, seed, workers)
        exact = compact.iz_exact(theta, t)
        dre = abs(exact.real - est.mean.real) / est.stderr
        dim = abs(exact.imag - est.mean.imag) / est.stderr
        measured[f"n{n}_re_sigmas"] = float(dre)
        measured[f"n{n}_im_sigmas"] = float(dim)
        ok &= dre <= 4 and dim <= 4
    return CriterionResult(5, "Itzykson-Zuber formula agrees with Haar Monte Carlo", bool(ok),
                           measured, "4 stderr per component; n=1 exact to 1e-14",
                           runtime_limit=60.0)


@_timed
def volume_checks(seed=haar.DEFAULT_SEED):
    measured = {}
    ok = True
    for t, expected in (((2.0, 1.0), 1.0), ((3.0, 1.0, 0.0), 3.0)):
        closed = compact.symplectic_volume_un(t)
        lim = compact.volume_limit(t, (1e-2, 1e-3, 1e-4))
        rel = abs(lim - closed) / abs(closed)
        measured[f"limit_rel_err_n{len(t)}"] = float(rel)
        ok &= rel <= 1e-6 and abs(closed - expected) <= 1e-12
    worst = 0.0
    rng = np.random.default_rng([seed, 6])
    for n in (2, 3, 4):
        spec = builtin_un_spec(n)
        for _ in range(10):
            _, t = random_eta_pair(rng, n)
            a = compact.symplectic_volume_un(t)
            b = compact.symplectic_volume_generic(spec, t)
            worst = max(worst, abs(a - b) / abs(a))
    measured["generic_vs_un_rel"] = float(worst)
    ok &= worst <= 1e-12
    return CriterionResult(6, "Symplectic volume: limit, closed form and root-data form", bool(ok),
                           measured, "limit 1e-6 relative; generic 1e-12", runtime_limit=1.0)


HAAR_SAMPLES = 100_000


@_timed
def haar_statistics(seed=haar.DEFAULT_SEED, workers=1, samples=HAAR_SAMPLES):
    measured = {}
    ok = True
    worst_unitarity = 0.0
    worst_sigma = 0.0
    for n in (2, 3):
        rng = haar.worker_rng(seed, 100 + n)
        stack = haar.sample_haar_batch(n, samples, rng)
        worst_unitarity = max(worst_unitarity, haar.unitarity_residual(stack))
        for j in range(n):
            vals = np.abs(stack[:, 0, j]) ** 2
            se = np.std(vals, ddof=1) / np.sqrt(samples)
            worst_sigma = max(worst_sigma, abs(vals.mean() - 1.0 / n) / se)
    measured["max_unitarity_residual"] = worst_unitarity
    measured["max_row_norm_sigmas"] = worst_sigma
    ok &= worst_unitarity <= 1e-12 and worst_sigma <= 4

    # left invariance: g(VU) against g(U) with independent sample streams
    worst_inv = 0.0
    vrng = np.random.default_rng([seed, 7])
    for n in (2, 3):
        v = haar.sample_haar(n, vrng)
        stats = {
            "trace": lambda us: np.trace(us, axis1=1, axis2=2),
            "abs_u11_sq": lambda us: np.abs(us[:, 0, 0]) ** 2,
        }
        for name, g in stats.items():
            plain = haar.mc_expectation(g, n, samples, seed + 1, workers, batched=True)
            moved = haar.mc_expectation(lambda us: g(v @ us), n, samples, seed + 2, workers,
                                        batched=True)
            combined = np.hypot(plain.stderr, moved.stderr)
            worst_inv = max(worst_inv, abs(plain.mean - moved.mean) / combined)
    measured["left_invariance_sigmas"] = worst_inv
    ok &= worst_inv <= 4
    return CriterionResult(7, "Haar sampler unitarity and invariance statistics", bool(ok), measured,
                           "unitarity 1e-12; 4 stderr", runtime_limit=30.0)


@_timed
def noncompact_multiplicities(seed=haar.DEFAULT_SEED):
    rng = np.random.default_rng([seed, 8])
    mismatches = 0
    bad_counts = 0
    bad_rule = 0
    checked = 0
    while checked < 1000:
        a, b, c = rng.standard_normal(3)
        x = noncompact.Sl2Element(a, b, c)
        kind = noncompact.classify(x)
        if kind is noncompact.RegularClass.NONREGULAR:
            continue
        checked += 1
        eig = np.linalg.eigvals(x.matrix)
        oracle = (noncompact.RegularClass.ELLIPTIC if np.all(np.abs(eig.imag) > 0)
                  else noncompact.RegularClass.SPLIT)
        mismatches += oracle is not kind
        data = noncompact.zero_data(x)
        bad_counts += sum(d.multiplicity for d in data) != 1
        for d in data:
            if kind is noncompact.RegularClass.ELLIPTIC:
                expect = int(d.point.upper_half() > 0)
            else:
                expect = int(d.mu.real < 0)
            bad_rule += d.multiplicity != expect
    ok = mismatches == 0 and bad_counts == 0 and bad_rule == 0
    return CriterionResult(8, "Non-compact multiplicities follow the half-plane and stability rules",
                           ok, {"class_mismatches": mismatches, "bad_totals": bad_counts,
                                "rule_violations": bad_rule}, "exact", runtime_limit=2.0)


@_timed
def f_alpha_invariance(seed=haar.DEFAULT_SEED):
    rng = np.random.default_rng([seed, 9])
    worst = 0.0
    worst_sum = 0.0
    angles = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    for kind in ("elliptic", "split"):
        for _ in range(50):
            x = random_sl2(rng, kind)
            ref = noncompact.f_alpha_const(x)
            data = noncompact.zero_data(x)
            worst_sum = max(worst_sum, abs(data[0].mu + data[1].mu))
            for phi in angles:
                k = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
                val = noncompact.f_alpha_const(x.conjugate(k))
                worst = max(worst, abs(val - ref) / abs(ref))
    ok = worst <= 1e-9 and worst_sum <= 1e-12
    return CriterionResult(9, "F_alpha invariant under SO(2) conjugation", ok,
                           {"max_rel_diff": worst, "max_weight_sum": worst_sum},
                           "1e-9 relative; weight sum 1e-12", runtime_limit=2.0)


@_timed
def reproducibility(seed=haar.DEFAULT_SEED, workers=1, samples=20_000):
    def once():
        iz = haar.iz_mc((1.0, 0.3, -0.5), (1.5, 0.5, -1.0), samples, seed, workers).to_json()
        norms = haar.mc_expectation(lambda us: np.abs(us[:, 0, 0]) ** 2, 3, samples, seed, workers,
                                    batched=True).to_json()
        return iz + norms

    runs = [once() for _ in range(2)]
    ok = runs[0] == runs[1]
    return CriterionResult(10, "Monte Carlo output is byte-identical on repeat", ok,
                           {"identical": ok, "bytes": len(runs[0])}, "byte-identical JSON")


CRITERIA = (
    pfaffian_identity,
    pfaffian_orthogonal_invariance,
    dh_sphere_exactness,
    un_cross_formula,
    iz_vs_haar,
    volume_checks,
    haar_statistics,
    noncompact_multiplicities,
    f_alpha_invariance,
    reproducibility,
)

_MC = {iz_vs_haar, haar_statistics, reproducibility}


def run_all(seed=haar.DEFAULT_SEED, workers=1) -> list[CriterionResult]:
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for crit in CRITERIA:
            if crit in _MC:
                results.append(crit(seed=seed, workers=workers))
            else:
                results.append(crit(seed=seed))
    return results
