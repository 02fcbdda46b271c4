import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localize.errors import DegenerateLinearizationError, SkewFormError
from localize.matrix_core import (
    Orientation,
    SkewForm,
    canonical_matrix,
    pfaffian,
    skew_canonical_form,
    sqrt_det,
    vandermonde,
)


def pfaffian_by_matchings(a):
    """Sum over perfect matchings; sign from the permutation (i1 j1 i2 j2 ...)."""
    m = a.shape[0]

    def matchings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for k, other in enumerate(rest):
            for tail in matchings(rest[:k] + rest[k + 1:]):
                yield [(first, other)] + tail

    total = 0.0
    for match in matchings(list(range(m))):
        perm = [i for pair in match for i in pair]
        inversions = sum(1 for x, y in itertools.combinations(perm, 2) if x > y)
        total += (-1) ** inversions * np.prod([a[i, j] for i, j in match])
    return total


def rand_skew(rng, dim):
    a = rng.standard_normal((dim, dim))
    return a - a.T


def rand_rotation(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


class TestPfaffian:
    def test_canonical_2x2(self):
        assert pfaffian([[0, -2], [2, 0]]) == -2

    def test_zero_matrix(self):
        assert pfaffian(np.zeros((4, 4))) == 0

    @pytest.mark.parametrize("dim", [2, 4, 6, 8])
    def test_matches_matching_expansion(self, dim):
        rng = np.random.default_rng(dim)
        a = rand_skew(rng, dim)
        assert pfaffian(a) == pytest.approx(pfaffian_by_matchings(a), rel=1e-12, abs=1e-12)

    def test_square_is_determinant_6x6(self):
        a = rand_skew(np.random.default_rng(6), 6)
        det = np.linalg.det(a)
        assert abs(pfaffian(a) ** 2 - det) <= 1e-9 * abs(det)

    @pytest.mark.parametrize("dim", [2, 4, 6])
    def test_methods_agree_on_overlap(self, dim):
        rng = np.random.default_rng(100 + dim)
        for _ in range(20):
            a = rand_skew(rng, dim)
            assert abs(pfaffian(a, "cofactor") - pfaffian(a, "parlett-reid")) <= 1e-10

    def test_large_uses_elimination(self):
        a = rand_skew(np.random.default_rng(3), 12)
        det = np.linalg.det(a)
        assert abs(pfaffian(a) ** 2 - det) <= 1e-9 * max(1, abs(det))

    def test_singular_rank_deficient(self):
        v = np.random.default_rng(1).standard_normal((6, 2))
        a = np.outer(v[:, 0], v[:, 1]) - np.outer(v[:, 1], v[:, 0])
        assert abs(pfaffian(a)) < 1e-12
        assert abs(pfaffian(a, "parlett-reid")) < 1e-12

    @pytest.mark.parametrize("bad", [
        np.zeros((3, 3)),
        np.zeros((2, 3)),
        np.array([[0.0, 1.0], [1.0, 0.0]]),
        np.zeros((0, 0)),
    ])
    def test_rejects(self, bad):
        with pytest.raises(SkewFormError):
            pfaffian(bad)

    def test_symmetrizes_small_noise(self):
        a = np.array([[0.0, 1.0], [-1.0 + 1e-14, 0.0]])
        assert SkewForm(a).entries[1, 0] == -SkewForm(a).entries[0, 1]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_rotation_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rand_skew(rng, 2 * n)
        q = rand_rotation(rng, 2 * n)
        assert abs(pfaffian(q.T @ a @ q) - pfaffian(a)) <= 1e-9 * max(1, abs(pfaffian(a)))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_square_equals_det(self, n, seed):
        a = rand_skew(np.random.default_rng(seed), 2 * n)
        det = np.linalg.det(a)
        assert abs(pfaffian(a) ** 2 - det) <= 1e-9 * max(1, abs(det))


class TestCanonicalForm:
    def test_already_canonical(self):
        a = canonical_matrix([1, 3])
        pairing = skew_canonical_form(a)
        assert sorted(np.abs(pairing.weights)) == pytest.approx([1, 3])
        assert np.prod(pairing.weights) == pytest.approx(3)
        b = pairing.basis
        assert np.allclose(np.abs(b) @ np.ones(4), np.ones(4))  # signed permutation

    def test_round_trip_recovers_weights(self):
        q = rand_rotation(np.random.default_rng(5), 4)
        a = q.T @ canonical_matrix([2, 5]) @ q
        pairing = skew_canonical_form(a)
        assert sorted(np.abs(pairing.weights)) == pytest.approx([2, 5])
        assert np.prod(pairing.weights) == pytest.approx(10)
        assert np.allclose(pairing.basis.T @ a @ pairing.basis, pairing.block_form(), atol=1e-9)

    @pytest.mark.parametrize("orientation", list(Orientation))
    def test_basis_oriented_and_pfaffian_sign(self, orientation):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 4):
            a = rand_skew(rng, 2 * n)
            pairing = skew_canonical_form(a, orientation)
            assert np.sign(np.linalg.det(pairing.basis)) == int(orientation)
            assert np.allclose(pairing.basis.T @ pairing.basis, np.eye(2 * n), atol=1e-12)
            assert np.allclose(pairing.basis.T @ a @ pairing.basis, pairing.block_form(), atol=1e-9)
            pf_e = pfaffian(pairing.basis.T @ a @ pairing.basis)
            assert (-1) ** n * np.prod(pairing.weights) == pytest.approx(pf_e)
            assert pf_e == pytest.approx(int(orientation) * pfaffian(a))

    def test_singular_raises(self):
        with pytest.raises(DegenerateLinearizationError):
            skew_canonical_form(np.zeros((2, 2)))
        with pytest.raises(DegenerateLinearizationError):
            sqrt_det(np.zeros((4, 4)))


class TestSqrtDet:
    def test_canonical_n1(self):
        assert sqrt_det(canonical_matrix([2])) == pytest.approx(2)

    def test_canonical_n2(self):
        assert sqrt_det(canonical_matrix([1, 3])) == pytest.approx(3)

    def test_conjugated(self):
        q = rand_rotation(np.random.default_rng(8), 4)
        assert sqrt_det(q.T @ canonical_matrix([2, 5]) @ q) == pytest.approx(10, rel=1e-12)

    def test_square_and_invariance(self):
        rng = np.random.default_rng(9)
        for n in (1, 2, 3):
            a = rand_skew(rng, 2 * n)
            q = rand_rotation(rng, 2 * n)
            assert sqrt_det(a) ** 2 == pytest.approx(np.linalg.det(a), rel=1e-9)
            assert sqrt_det(q.T @ a @ q) == pytest.approx(sqrt_det(a), rel=1e-9)

    def test_reversed_orientation_flips_sign(self):
        a = canonical_matrix([2, 5])
        assert sqrt_det(a, Orientation.NEGATIVE) == pytest.approx(-10)


class TestVandermonde:
    def test_examples(self):
        assert vandermonde([3, 1]) == 2
        assert vandermonde([1, 3]) == -2
        assert vandermonde([3, 1, 0]) == 6
        assert vandermonde([]) == 1
        assert vandermonde([7]) == 1

    @given(st.lists(st.integers(-20, 20), min_size=2, max_size=6), st.data())
    def test_alternating(self, vals, data):
        i = data.draw(st.integers(0, len(vals) - 1))
        j = data.draw(st.integers(0, len(vals) - 1).filter(lambda k: k != i))
        swapped = list(vals)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        assert vandermonde(swapped) == -vandermonde(vals)

    def test_repeated_entry_is_zero(self):
        assert vandermonde([1.5, 2.0, 1.5]) == 0

    def test_matches_determinant(self):
        v = np.array([0.3, -1.2, 2.0, 0.7])
        m = np.vander(v)  # decreasing powers
        assert vandermonde(v).real == pytest.approx(np.linalg.det(m), rel=1e-12)
