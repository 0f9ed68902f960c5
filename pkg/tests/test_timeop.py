import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from timeops.spectra import Accumulation, hydrogen_point_spectrum
from timeops.timeop import (
    CHANNEL_DIMENSION_LIMIT,
    BlockOperator,
    MatrixKind,
    assemble_time_operator,
    ccr_residual,
    channel_time_operator,
    commutator_defect_columns,
    direct_sum,
    galapon_matrix,
    osc_timeop_spectrum,
    project_to_difference_span,
    random_difference_vector,
)


class TestGalaponMatrix:
    def test_two_by_two_direct_entries(self):
        t = galapon_matrix((1.0, 2.0))
        expected = np.array([[0.0, -1.0j], [1.0j, 0.0]])
        assert np.array_equal(t.data, expected)

    def test_wide_gap_entry(self):
        t = galapon_matrix((1.0, 7.0))
        assert t.data[0, 1] == 1j / -6.0
        assert t.data[1, 0] == 1j / 6.0

    def test_inverse_conjugate_entries(self):
        t = galapon_matrix((1.0, 2.0), MatrixKind.INVERSE_CONJUGATE)
        assert t.data[0, 1] == 2.0j
        assert t.kind is MatrixKind.INVERSE_CONJUGATE

    def test_diagonal_is_exactly_zero(self):
        t = galapon_matrix(np.linspace(0.3, 9.7, 40))
        assert np.all(np.diag(t.data) == 0.0)

    def test_exactly_hermitian_by_construction(self):
        t = galapon_matrix(np.cumsum(np.linspace(0.1, 2.0, 25)))
        assert np.array_equal(t.data, t.data.conj().T)
        assert t.hermiticity_defect() == 0.0

    def test_pairing_eigenvalues(self):
        direct = galapon_matrix((0.5, 1.5, 2.5))
        assert direct.pairing_eigenvalues == (0.5, 1.5, 2.5)
        ic = galapon_matrix((-2.0, -1.0), MatrixKind.INVERSE_CONJUGATE)
        assert ic.pairing_eigenvalues == (-0.5, -1.0)

    def test_inverse_conjugate_is_direct_matrix_of_reciprocals(self):
        ev = np.array([-2.0, -1.0, -0.5, -0.2])
        ic = galapon_matrix(ev, MatrixKind.INVERSE_CONJUGATE)
        inv = 1.0 / ev
        expected = np.zeros((4, 4), dtype=complex)
        for n in range(4):
            for m in range(4):
                if n != m:
                    expected[n, m] = 1j / (inv[n] - inv[m])
        scale = np.max(np.abs(ic.data))
        assert np.max(np.abs(ic.data - expected)) <= 1e-12 * scale

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
    def test_direct_kind_scales_inversely(self, alpha):
        ev = np.array([0.5, 1.1, 2.9, 4.0])
        base = galapon_matrix(ev).data
        scaled = galapon_matrix(alpha * ev).data
        assert np.max(np.abs(scaled - base / alpha)) <= 1e-13 * np.max(np.abs(base))

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
    def test_inverse_conjugate_kind_scales_directly(self, alpha):
        ev = np.array([-2.0, -1.0, -0.4])
        base = galapon_matrix(ev, MatrixKind.INVERSE_CONJUGATE).data
        scaled = galapon_matrix(alpha * ev, MatrixKind.INVERSE_CONJUGATE).data
        assert np.max(np.abs(scaled - alpha * base)) <= 1e-13 * np.max(np.abs(scaled))

    def test_rejects_unsorted_and_zero_and_oversized(self):
        with pytest.raises(ValueError, match="increasing"):
            galapon_matrix((2.0, 1.0))
        with pytest.raises(ValueError, match="nonzero"):
            galapon_matrix((-1.0, 0.0), MatrixKind.INVERSE_CONJUGATE)
        with pytest.raises(ValueError, match="exceeds"):
            galapon_matrix(np.arange(CHANNEL_DIMENSION_LIMIT + 1, dtype=float))

    def test_json_document(self):
        t = galapon_matrix((1.0, 2.0))
        doc = t.to_json()
        assert doc["kind"] == "direct"
        assert doc["dimension"] == 2
        assert doc["data"][1] == [0.0, -1.0]

    @given(
        st.lists(
            st.floats(min_value=0.01, max_value=10.0),
            min_size=2,
            max_size=20,
        )
    )
    def test_random_channels_are_hermitian_with_small_residual(self, gaps):
        ev = 0.5 + np.cumsum(gaps)
        t = galapon_matrix(ev)
        assert np.array_equal(t.data, t.data.conj().T)
        v = random_difference_vector(np.random.default_rng(11), ev.size)
        assert ccr_residual(ev, t, v) <= 1e-10


class TestDifferenceSpan:
    def test_projection_removes_the_mean(self):
        v = np.array([1.0, 2.0, 3.0, 10.0], dtype=complex)
        w = project_to_difference_span(v)
        assert abs(w.sum()) <= 1e-14 * np.linalg.norm(w)

    def test_random_vector_is_unit_and_in_span(self):
        rng = np.random.default_rng(3)
        v = random_difference_vector(rng, 17)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert abs(v.sum()) <= 1e-13

    def test_random_vector_is_seed_deterministic(self):
        a = random_difference_vector(np.random.default_rng(5), 8)
        b = random_difference_vector(np.random.default_rng(5), 8)
        assert np.array_equal(a, b)

    def test_trivial_dimension_rejected(self):
        with pytest.raises(ValueError):
            random_difference_vector(np.random.default_rng(0), 1)


class TestCcrResidual:
    def test_commutator_is_i_times_hollow_ones(self):
        ev = np.array([0.5, 1.7, 3.1])
        comm = commutator_defect_columns(ev, galapon_matrix(ev))
        expected = 1j * (np.ones((3, 3)) - np.eye(3))
        assert np.max(np.abs(comm - expected)) <= 1e-13

    def test_basis_vector_is_rejected(self):
        ev = np.array([1.0, 2.0, 3.0])
        t = galapon_matrix(ev)
        e0 = np.zeros(3, dtype=complex)
        e0[0] = 1.0
        with pytest.raises(ValueError, match="difference span"):
            ccr_residual(ev, t, e0)

    def test_difference_of_basis_vectors(self):
        vals = np.array([-1.0 / n ** 2 for n in range(1, 7)])
        t = galapon_matrix(vals, MatrixKind.INVERSE_CONJUGATE)
        h = np.array(t.pairing_eigenvalues)
        v = np.zeros(6, dtype=complex)
        v[0], v[3] = 1.0, -1.0
        v /= np.linalg.norm(v)
        assert ccr_residual(h, t, v) <= 1e-12

    def test_random_vectors_on_a_wide_channel(self):
        ev = 0.5 + 0.37 * np.arange(50)
        t = galapon_matrix(ev)
        rng = np.random.default_rng(7)
        worst = max(
            ccr_residual(ev, t, random_difference_vector(rng, 50)) for _ in range(20)
        )
        assert worst <= 1e-12

    def test_dimension_mismatch_rejected(self):
        ev = np.array([1.0, 2.0])
        t = galapon_matrix(ev)
        with pytest.raises(ValueError):
            ccr_residual(ev, t, np.zeros(3, dtype=complex))


class TestBlockOperator:
    @staticmethod
    def _two_blocks():
        a = channel_time_operator([-1.0, -0.25, -1.0 / 9.0], Accumulation.TO_ZERO)
        b = channel_time_operator([-0.0625, -0.04], Accumulation.TO_ZERO)
        return direct_sum([a, b])

    def test_shapes_and_slices(self):
        op = self._two_blocks()
        assert op.total_dimension == 5
        assert op.block_count == 2
        assert op.offsets == (0, 3)
        assert op.block_slice(1) == slice(3, 5)

    def test_dense_assembly(self):
        op = self._two_blocks()
        h = op.dense_hamiltonian()
        assert h.shape == (5,)
        dense = op.dense_time_operator()
        assert np.array_equal(dense[:3, :3], op.blocks[0][1].data)
        assert np.array_equal(dense[3:, 3:], op.blocks[1][1].data)
        assert np.all(dense[:3, 3:] == 0.0)

    def test_full_residual_with_per_block_membership(self):
        op = self._two_blocks()
        rng = np.random.default_rng(2)
        v = np.concatenate(
            [random_difference_vector(rng, 3), random_difference_vector(rng, 2)]
        )
        assert op.ccr_residual(v) <= 1e-10

    def test_globally_balanced_but_blockwise_unbalanced_vector_is_rejected(self):
        op = self._two_blocks()
        v = np.array([1.0, 0.0, 0.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
        with pytest.raises(ValueError, match="difference span"):
            op.ccr_residual(v)

    def test_inconsistent_offsets_rejected(self):
        op = self._two_blocks()
        with pytest.raises(ValueError, match="offsets"):
            BlockOperator(blocks=op.blocks, offsets=(0, 4))


class TestChannelTimeOperator:
    def test_zero_accumulation_routes_to_inverse_conjugate(self):
        _, t = channel_time_operator([-0.5, -0.125], Accumulation.TO_ZERO)
        assert t.kind is MatrixKind.INVERSE_CONJUGATE

    def test_infinity_accumulation_routes_to_direct(self):
        _, t = channel_time_operator([0.5, 1.5], Accumulation.TO_INFINITY)
        assert t.kind is MatrixKind.DIRECT

    def test_values_are_sorted_before_building(self):
        _, t = channel_time_operator([2.5, 0.5, 1.5], Accumulation.TO_INFINITY)
        assert t.eigenvalues == (0.5, 1.5, 2.5)


class TestAssembleTimeOperator:
    def test_hydrogen_end_to_end(self):
        deco, op = assemble_time_operator(hydrogen_point_spectrum(1.0, 1.0, 3))
        assert deco.channel_count == 9
        assert op.block_count == 9
        assert op.total_dimension == 14
        rng = np.random.default_rng(13)
        worst = 0.0
        for eigs, t in op.blocks:
            if t.dimension < 2:
                continue
            v = random_difference_vector(rng, t.dimension)
            worst = max(worst, ccr_residual(eigs, t, v))
        assert worst <= 1e-12


class TestOscillatorSpectrum:
    def test_smallest_truncation(self):
        ev, lo, hi = osc_timeop_spectrum(1.0, 2)
        np.testing.assert_allclose(ev, [-1.0, 1.0], atol=1e-12)
        assert lo == pytest.approx(-1.0, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)

    def test_bounded_by_symbol_and_monotone(self):
        omega = 2.0
        tops = []
        for n in (4, 16, 64):
            ev, lo, hi = osc_timeop_spectrum(omega, n)
            assert hi < math.pi / omega
            assert lo > -math.pi / omega
            tops.append(hi)
        assert tops[0] < tops[1] < tops[2]

    def test_scales_like_inverse_frequency(self):
        _, _, hi1 = osc_timeop_spectrum(1.0, 50)
        _, _, hi2 = osc_timeop_spectrum(2.0, 50)
        assert hi2 == pytest.approx(hi1 / 2.0, rel=1e-12)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            osc_timeop_spectrum(0.0, 10)
        with pytest.raises(ValueError):
            osc_timeop_spectrum(1.0, 1)
