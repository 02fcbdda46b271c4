import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from localize.errors import (
    LocalizeError,
    NonRegularError,
    NotAZeroError,
    UnspecifiedMultiplicityError,
)
from localize.noncompact import (
    CycleChoice,
    ProjPoint,
    RegularClass,
    Sl2Element,
    Stability,
    classify,
    f_alpha_const,
    flow_zeros,
    linearize,
    mobius,
    moment_map_eval,
    multiplicity,
    stability,
    zero_data,
)

ELL = Sl2Element(0, 1, -1)
SPLIT = Sl2Element(1, 0, 0)

entries = st.floats(-3, 3, allow_nan=False)


def rotation(phi):
    return np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])


def random_sl2_group(rng):
    g = rng.standard_normal((2, 2))
    if np.linalg.det(g) < 0:
        g[:, 0] *= -1
    return g / np.sqrt(np.linalg.det(g))


def chart_velocity(x, u, z_chart, h=1e-6):
    """Velocity of the Moebius flow exp(tX) at chart coordinate u, by central difference."""
    point = ProjPoint(u, 1) if z_chart else ProjPoint(1, u)

    def coord(t):
        q = mobius(expm(t * x.matrix), point)
        return q.z1 / q.z2 if z_chart else q.z2 / q.z1

    return (coord(h) - coord(-h)) / (2 * h)


def fd_weight(x, p, d=1e-4):
    u = p.z1 if p.in_z_chart else p.z2
    return (chart_velocity(x, u + d, p.in_z_chart) - chart_velocity(x, u - d, p.in_z_chart)) / (2 * d)


class TestClassify:
    def test_examples(self):
        assert classify(ELL) is RegularClass.ELLIPTIC
        assert classify(SPLIT) is RegularClass.SPLIT
        assert classify(Sl2Element(0, 1, 0)) is RegularClass.NONREGULAR
        assert ELL.det == 1 and SPLIT.det == -1

    def test_eigenvalue_oracle(self):
        rng = np.random.default_rng(0)
        for a, b, c in rng.uniform(-2, 2, (1000, 3)):
            x = Sl2Element(a, b, c)
            ev = np.linalg.eigvals(x.matrix)
            disc = (ev[0] - ev[1]) ** 2
            expected = RegularClass.ELLIPTIC if disc.real < 0 else RegularClass.SPLIT
            assert classify(x) is expected

    def test_from_matrix(self):
        assert Sl2Element.from_matrix([[0, 1], [-1, 0]]) == ELL
        with pytest.raises(LocalizeError):
            Sl2Element.from_matrix([[1, 0], [0, 1]])
        with pytest.raises(LocalizeError):
            Sl2Element(np.inf, 0, 0)


class TestZeros:
    def test_elliptic(self):
        p, q = flow_zeros(ELL)
        assert {complex(np.round(p.affine(), 12)), complex(np.round(q.affine(), 12))} == {1j, -1j}

    def test_split(self):
        zs = {z.affine() for z in flow_zeros(SPLIT)}
        assert 0 in zs and np.inf in zs

    def test_nonregular(self):
        with pytest.raises(NonRegularError):
            flow_zeros(Sl2Element(0, 1, 0))

    @settings(max_examples=100, deadline=None)
    @given(entries, entries, entries)
    def test_zeros_are_eigenlines(self, a, b, c):
        x = Sl2Element(a, b, c)
        if classify(x, 1e-3) is RegularClass.NONREGULAR:
            return
        for p in flow_zeros(x):
            v = np.array([p.z1, p.z2])
            w = x.matrix @ v
            assert abs(w[0] * v[1] - w[1] * v[0]) <= 1e-9 * max(1, x.scale)

    def test_elliptic_conjugate_split_real(self):
        rng = np.random.default_rng(1)
        for a, b, c in rng.uniform(-2, 2, (300, 3)):
            x = Sl2Element(a, b, c)
            p, q = flow_zeros(x)
            if classify(x) is RegularClass.ELLIPTIC:
                assert p.close_to(ProjPoint(np.conj(q.z1), np.conj(q.z2)), 1e-10)
                assert p.upper_half() * q.upper_half() < 0
            else:
                assert abs(p.upper_half()) <= 1e-10 and abs(q.upper_half()) <= 1e-10

    def test_equivariance(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            x = Sl2Element(*rng.uniform(-2, 2, 3))
            g = random_sl2_group(rng)
            moved = [mobius(g, p) for p in flow_zeros(x)]
            for p in flow_zeros(x.conjugate(g)):
                assert any(p.close_to(m, 1e-9) for m in moved)

    def test_projective_normalization(self):
        p = ProjPoint(2j, 4)
        assert p.z2 == 1 and p.z1 == 0.5j
        assert ProjPoint.from_affine(np.inf).affine() == np.inf
        with pytest.raises(LocalizeError):
            ProjPoint(0, 0)


class TestLinearize:
    def test_elliptic(self):
        assert linearize(ELL, ProjPoint.from_affine(1j)) == pytest.approx(2j)
        assert linearize(ELL, ProjPoint.from_affine(-1j)) == pytest.approx(-2j)

    def test_split(self):
        assert linearize(SPLIT, ProjPoint.from_affine(0)) == 2
        assert linearize(SPLIT, ProjPoint.from_affine(np.inf)) == -2

    def test_not_a_zero(self):
        with pytest.raises(NotAZeroError):
            linearize(ELL, ProjPoint.from_affine(0))

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(3)
        for x in [ELL, SPLIT] + [Sl2Element(*rng.uniform(-2, 2, 3)) for _ in range(20)]:
            for p in flow_zeros(x):
                assert linearize(x, p) == pytest.approx(fd_weight(x, p), abs=1e-3 * max(1, x.scale))

    def test_weights_cancel(self):
        rng = np.random.default_rng(4)
        for a, b, c in rng.uniform(-3, 3, (500, 3)):
            mus = [d.mu for d in zero_data(Sl2Element(a, b, c))]
            assert abs(sum(mus)) <= 1e-12 * max(1, abs(mus[0]))

    def test_weight_is_minus_twice_eigenvalue(self):
        x = Sl2Element(0.4, 1.3, -0.7)
        mus = sorted((d.mu for d in zero_data(x)), key=lambda m: m.imag)
        ev = sorted(np.linalg.eigvals(x.matrix), key=lambda e: -e.imag)
        assert mus == pytest.approx([-2 * e for e in ev])


class TestStability:
    def test_examples(self):
        assert stability(-2) is Stability.STABLE
        assert stability(2) is Stability.UNSTABLE
        assert stability(2j) is Stability.ROTATION

    def test_zero(self):
        with pytest.raises(LocalizeError):
            stability(0)


class TestMultiplicity:
    def test_elliptic(self):
        up, down = ProjPoint.from_affine(1j), ProjPoint.from_affine(-1j)
        assert multiplicity(ELL, up, 2j) == 1
        assert multiplicity(ELL, down, -2j) == 0

    def test_split(self):
        zd = {d.point.affine(): d for d in zero_data(SPLIT)}
        assert zd[np.inf].multiplicity == 1 and zd[np.inf].stability is Stability.STABLE
        assert zd[0].multiplicity == 0

    def test_reversed_flow(self):
        zd = {d.point.affine(): d for d in zero_data(Sl2Element(-1, 0, 0))}
        assert zd[0].multiplicity == 1
        assert zd[np.inf].multiplicity == 0

    def test_exactly_one(self):
        rng = np.random.default_rng(5)
        for a, b, c in rng.uniform(-3, 3, (1000, 3)):
            assert sum(d.multiplicity for d in zero_data(Sl2Element(a, b, c))) == 1

    def test_conormal_unspecified(self):
        p = ProjPoint.from_affine(1j)
        with pytest.raises(UnspecifiedMultiplicityError):
            multiplicity(ELL, p, 2j, CycleChoice.CONORMAL_CIRCLE)

    def test_nonregular(self):
        with pytest.raises(NonRegularError):
            multiplicity(Sl2Element(0, 0, 0), ProjPoint.from_affine(0), 1)

    def test_to_dict(self):
        d = {z.point.affine(): z for z in zero_data(SPLIT)}[np.inf].to_dict()
        assert d["z_re"] == "inf" and d["multiplicity"] == 1 and d["mu_re"] == -2


class TestFAlpha:
    def test_examples(self):
        assert f_alpha_const(ELL, 1) == pytest.approx(np.pi * 1j)
        assert f_alpha_const(SPLIT, 1) == pytest.approx(np.pi)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
    def test_inverse_scaling(self, lam):
        assert f_alpha_const(Sl2Element(0, lam, -lam), 1) == pytest.approx(np.pi * 1j / lam)

    def test_linear_in_s(self):
        x = Sl2Element(0.3, 2, -1)
        assert f_alpha_const(x, 2 - 1j) == pytest.approx((2 - 1j) * f_alpha_const(x, 1))

    def test_rotation_invariance(self):
        rng = np.random.default_rng(6)
        for x in [ELL, SPLIT, Sl2Element(*rng.uniform(-2, 2, 3))]:
            ref = f_alpha_const(x, 0.7)
            for phi in np.linspace(0, 2 * np.pi, 32, endpoint=False):
                val = f_alpha_const(x.conjugate(rotation(phi)), 0.7)
                assert abs(val - ref) <= 1e-9 * abs(ref)

    def test_nonregular(self):
        with pytest.raises(NonRegularError):
            f_alpha_const(Sl2Element(0, 1, 0), 1)


class TestMomentMap:
    def test_examples(self):
        assert moment_map_eval(0, 1, ELL) == 1
        assert moment_map_eval(0.3 + 2j, 0, ELL) == 0
        assert moment_map_eval(1j, 5 - 2j, ELL) == pytest.approx(0)

    def test_is_flow_velocity(self):
        x = Sl2Element(0.2, -0.5, 1.1)
        z, h = 0.4 + 0.3j, 1e-6
        vel = (mobius(expm(h * x.matrix), ProjPoint.from_affine(z)).affine()
               - mobius(expm(-h * x.matrix), ProjPoint.from_affine(z)).affine()) / (2 * h)
        assert moment_map_eval(z, 1, x) == pytest.approx(vel, rel=1e-8)
