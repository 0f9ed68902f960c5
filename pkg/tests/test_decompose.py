import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from timeops.decompose import (
    bucket_index,
    channel_partition,
    decompose_spectrum,
    partition_null_sequence,
    verify_decomposition,
)
from timeops.spectra import (
    Accumulation,
    DiscreteSpectrum,
    harmonic_spectrum,
    hydrogen_point_spectrum,
)

ZETA_2 = math.pi ** 2 / 6.0


class TestBucketIndex:
    @pytest.mark.parametrize(
        "a, k",
        [
            (1.0, 1),
            (-1.0, 1),
            (0.5, 2),
            (0.3, 3),
            (1.0 / 3.0, 3),
            (0.2, 5),
            (-0.2, 5),
            (1e-3, 1000),
        ],
    )
    def test_examples(self, a, k):
        assert bucket_index(a) == k

    def test_boundaries_are_right_closed(self):
        for k in (1, 2, 3, 7, 100):
            assert bucket_index(1.0 / k) == k

    @given(st.floats(min_value=1e-8, max_value=1.0), st.sampled_from([1.0, -1.0]))
    def test_bracket_property(self, mag, sign):
        k = bucket_index(sign * mag)
        assert mag <= 1.0 / k
        assert mag > 1.0 / (k + 1)

    @pytest.mark.parametrize("bad", [0.0, 1.5, -2.0, 5e-324, math.inf, math.nan])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            bucket_index(bad)


class TestPartitionNullSequence:
    def test_harmonic_reciprocals_fill_one_channel(self):
        deco = partition_null_sequence([-1.0 / n for n in range(1, 9)])
        assert deco.channels == ((0, 1, 2, 3, 4, 5, 6, 7),)
        assert deco.bucket_certificates == ((1, 2, 3, 4, 5, 6, 7, 8),)

    def test_slow_sequence_needs_five_channels(self):
        deco = partition_null_sequence([-1.0 / math.sqrt(n) for n in range(1, 9)])
        assert deco.channels == ((0, 3), (1, 4), (2, 5), (6,), (7,))
        assert deco.bucket_certificates == ((1, 2), (1, 2), (1, 2), (2,), (2,))

    def test_channels_reference_original_input_positions(self):
        deco = partition_null_sequence([-0.3, -1.0])
        assert deco.channels == ((1, 0),)
        assert deco.slot_value(1) == -1.0
        np.testing.assert_allclose(deco.channel_values(0), [-1.0, -0.3])

    def test_deterministic(self):
        vals = [-1.0 / math.sqrt(n) for n in range(1, 20)]
        a = partition_null_sequence(vals)
        b = partition_null_sequence(vals)
        assert a.channels == b.channels
        assert a.bucket_certificates == b.bucket_certificates
        assert a.prescale == b.prescale

    def test_certificate_sums_stay_below_zeta_two(self):
        deco = partition_null_sequence([-1.0 / n for n in range(1, 101)])
        report = verify_decomposition(deco)
        assert report.ok
        assert deco.channel_count == 1
        assert report.certificate_sums[0] <= ZETA_2

    def test_accumulation_side_follows_the_signs(self):
        neg = partition_null_sequence([-0.5, -0.25])
        pos = partition_null_sequence([0.5, 0.25, -0.1])
        assert neg.source.accumulation is Accumulation.TO_ZERO
        assert pos.source.accumulation is Accumulation.TO_INFINITY


class TestChannelPartition:
    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            channel_partition([0.5, 0.0], [1, 1])
        with pytest.raises(ValueError):
            channel_partition([0.5, 0.5], [1, 1])
        with pytest.raises(ValueError):
            channel_partition([0.5, 0.25], [1, 0])
        with pytest.raises(ValueError):
            channel_partition([0.5, 0.25], [1, 1], p=1.0)
        with pytest.raises(ValueError):
            channel_partition([], [])

    def test_extremal_value_lands_in_bucket_one(self):
        part = channel_partition([-7.3], [1])
        assert part.certificates == ((1,),)
        assert part.prescale == pytest.approx(1.0 / 7.3)

    @given(
        st.lists(
            st.floats(min_value=1e-3, max_value=1e3),
            min_size=1,
            max_size=12,
            unique=True,
        ),
        st.integers(min_value=-16, max_value=16),
    )
    def test_invariant_under_dyadic_rescaling(self, vals, j):
        alpha = 2.0 ** j
        base = channel_partition(vals, [1] * len(vals))
        scaled = channel_partition([alpha * v for v in vals], [1] * len(vals))
        assert scaled.channels == base.channels
        assert scaled.certificates == base.certificates
        assert scaled.prescale == pytest.approx(base.prescale / alpha)

    def test_spot_check_generic_rescaling(self):
        vals = [-0.5, -0.125, -1.0 / 18.0, -0.03125]
        mults = [1, 4, 9, 16]
        base = channel_partition(vals, mults)
        scaled = channel_partition([3.7 * v for v in vals], mults)
        assert scaled.channels == base.channels
        assert scaled.certificates == base.certificates


class TestDecomposeSpectrum:
    def test_hydrogen_column_structure(self):
        deco = decompose_spectrum(hydrogen_point_spectrum(1.0, 1.0, 3))
        assert deco.channel_count == 9
        assert len(deco.slots) == 14
        index_sets = [set(deco.channel_eigenvalue_indices(i)) for i in range(9)]
        assert index_sets.count({0, 1, 2}) == 1
        assert index_sets.count({1, 2}) == 3
        assert index_sets.count({2}) == 5
        # Extraction order walks the buckets upward, which for a spectrum
        # accumulating at zero means eigenvalues come out ascending.
        np.testing.assert_allclose(
            deco.channel_values(0), [-0.5, -0.125, -1.0 / 18.0]
        )
        assert verify_decomposition(deco).ok

    def test_degenerate_oscillator_columns(self):
        deco = decompose_spectrum(harmonic_spectrum([1.0, 1.0], 2))
        value_sets = sorted(
            tuple(sorted(deco.channel_values(i))) for i in range(deco.channel_count)
        )
        assert value_sets == [(1.0, 2.0, 3.0), (2.0, 3.0), (3.0,)]

    def test_infinity_side_buckets_reciprocals(self):
        deco = decompose_spectrum(harmonic_spectrum([1.0], 3))
        assert deco.channels == ((0, 1, 2, 3),)
        assert deco.bucket_certificates == ((1, 3, 5, 7),)
        assert deco.prescale == pytest.approx(0.5)

    def test_rejects_zero_eigenvalue_on_the_infinity_side(self):
        s = DiscreteSpectrum(((0.0, 1), (1.0, 1)), Accumulation.TO_INFINITY)
        with pytest.raises(ValueError, match="reciprocals"):
            decompose_spectrum(s)

    def test_json_document_shape(self):
        deco = decompose_spectrum(hydrogen_point_spectrum(1.0, 1.0, 2))
        doc = deco.to_json()
        assert set(doc) == {"prescale", "p", "channels", "certificates"}
        assert doc["channels"] == [list(c) for c in deco.channels]


class TestVerifyDecomposition:
    def test_adversarial_duplicate_slot(self):
        deco = decompose_spectrum(hydrogen_point_spectrum(1.0, 1.0, 3))
        bad = dataclasses.replace(
            deco, channels=((0, 0, 5),) + deco.channels[1:]
        )
        report = verify_decomposition(bad)
        assert not report.disjoint_cover
        assert not report.simple_channels
        assert not report.ok
        assert report.violations

    def test_adversarial_decreasing_certificate(self):
        deco = decompose_spectrum(hydrogen_point_spectrum(1.0, 1.0, 3))
        bad = dataclasses.replace(
            deco,
            bucket_certificates=((9, 4, 1),) + deco.bucket_certificates[1:],
        )
        report = verify_decomposition(bad)
        assert not report.increasing_certificates
        assert not report.ok

    def test_report_json_carries_ok_flag(self):
        deco = decompose_spectrum(harmonic_spectrum([1.0], 5))
        doc = verify_decomposition(deco).to_json()
        assert doc["ok"] is True
        assert doc["violations"] == []
