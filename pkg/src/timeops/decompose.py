"""Channel decomposition of degenerate spectra.

A null sequence (distinct nonzero reals whose magnitudes, after rescaling,
sit in (0, 1]) is split into subsequences with at most one element per
"bucket", where bucket k collects the magnitudes in (1/(k+1), 1/k].  Each
extraction round walks the nonempty buckets in increasing k and takes the
element of lowest original index from each; the chosen elements form one
channel.  Because a channel holds at most one element per bucket, its
p-th power magnitude sum is dominated by the partial zeta sum over the
occupied levels, which is the finite-truncation summability certificate.

Spectra with multiplicities are first resolved into columns: copy c of an
eigenvalue belongs to column c (zero-based), so column c holds exactly the
eigenvalues with multiplicity greater than c.  Each column is a simple
value set and is partitioned by the bucket procedure; for spectra that
accumulate at infinity the procedure runs on reciprocals.  One rescaling,
by the largest magnitude over the whole spectrum, is shared by every
column so that channel structure is a property of the spectrum rather
than of any single column.

The untruncated theory needs extra bookkeeping to keep infinitely many
infinite channels alive; none of that survives truncation, so the column
construction above is the entire algorithm here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import Accumulation, DiscreteSpectrum

__all__ = [
    "ChannelDecomposition",
    "DecompositionReport",
    "PartitionResult",
    "bucket_index",
    "channel_partition",
    "partition_null_sequence",
    "decompose_spectrum",
    "verify_decomposition",
]

#: Exponent used when no explicit summability exponent is requested.
DEFAULT_EXPONENT = 2.0


def bucket_index(a: float) -> int:
    """Bucket level of a magnitude in (0, 1].

    Returns the unique k >= 1 with 1/(k+1) < |a| <= 1/k.  The boundary
    |a| = 1/k belongs to bucket k (right-closed).

    Raises
    ------
    ValueError
        If |a| is zero, exceeds 1, or is so small that its reciprocal
        overflows a float (no representable bucket level).
    """
    mag = abs(float(a))
    if not 0.0 < mag <= 1.0:
        raise ValueError(f"bucket_index needs 0 < |a| <= 1, got {a!r}")
    inverse = 1.0 / mag
    if math.isinf(inverse):
        raise ValueError(f"magnitude {mag!r} too small to bucket")
    k = int(inverse)
    # Float division can land on either side of an integer boundary; nudge
    # k until the defining inequality holds for the actual float value.
    while mag <= 1.0 / (k + 1):
        k += 1
    while mag > 1.0 / k:
        k -= 1
    return k


@dataclass(frozen=True)
class PartitionResult:
    """Channel assignment at the level of raw (value, copy) pairs.

    ``channels`` lists, per channel, the (value index, copy index) pairs it
    owns; ``certificates`` gives the strictly increasing bucket levels the
    channel occupies.  ``prescale`` is the reciprocal of the largest
    bucketed magnitude (of the values themselves, or of their reciprocals
    when ``reciprocals`` was set).
    """

    channels: tuple[tuple[tuple[int, int], ...], ...]
    certificates: tuple[tuple[int, ...], ...]
    prescale: float
    p: float


def _extraction_rounds(scaled: "list[float]") -> "tuple[list[list[int]], list[list[int]]]":
    """Greedy rounds over prescaled magnitudes; returns channels and levels.

    Each round groups the remaining positions by bucket level and extracts
    the lowest-index element per nonempty bucket into a new channel.
    """
    remaining = list(range(len(scaled)))
    channels: list[list[int]] = []
    levels: list[list[int]] = []
    while remaining:
        first_in_bucket: dict[int, int] = {}
        for pos in remaining:
            k = bucket_index(scaled[pos])
            if k not in first_in_bucket:
                first_in_bucket[k] = pos
        occupied = sorted(first_in_bucket)
        chosen = [first_in_bucket[k] for k in occupied]
        channels.append(chosen)
        levels.append(occupied)
        taken = set(chosen)
        remaining = [pos for pos in remaining if pos not in taken]
    return channels, levels


def channel_partition(
    values,
    multiplicities,
    p: float = DEFAULT_EXPONENT,
    *,
    reciprocals: bool = False,
) -> PartitionResult:
    """Partition a multiset of distinct nonzero values into simple channels.

    This is the core shared by :func:`decompose_spectrum` (which wraps the
    result around a source spectrum) and by transformed-spectrum pipelines
    whose value sets need not obey any sign convention.

    Parameters
    ----------
    values : array-like of float
        Distinct nonzero values.
    multiplicities : sequence of int
        Copy count per value, all >= 1.
    p : float
        Summability exponent, > 1.
    reciprocals : bool
        Bucket the reciprocals 1/value instead of the values themselves
        (used for spectra accumulating at infinity).
    """
    vals = np.asarray(values, dtype=float)
    mults = [int(m) for m in multiplicities]
    if vals.ndim != 1 or vals.size == 0:
        raise ValueError("values must be a nonempty 1-d array")
    if len(mults) != vals.size:
        raise ValueError("need one multiplicity per value")
    if any(m < 1 for m in mults):
        raise ValueError("multiplicities must be >= 1")
    if float(p) <= 1.0:
        raise ValueError("summability exponent must exceed 1")
    if np.any(vals == 0.0):
        raise ValueError("values must be nonzero")
    if np.unique(vals).size != vals.size:
        raise ValueError("values must be pairwise distinct")

    seq = 1.0 / vals if reciprocals else vals
    # Dividing by the largest magnitude (rather than multiplying by its
    # reciprocal) makes the extremal ratio exactly 1.0, so every scaled
    # magnitude is a valid bucket argument.
    divisor = float(np.max(np.abs(seq)))
    scaled = np.abs(seq) / divisor

    channels: list[tuple[tuple[int, int], ...]] = []
    certificates: list[tuple[int, ...]] = []
    for column in range(max(mults)):
        members = [n for n, m in enumerate(mults) if m > column]
        per_column, levels = _extraction_rounds([scaled[n] for n in members])
        for chan, ks in zip(per_column, levels):
            channels.append(tuple((members[pos], column) for pos in chan))
            certificates.append(tuple(ks))
    return PartitionResult(
        channels=tuple(channels),
        certificates=tuple(certificates),
        prescale=1.0 / divisor,
        p=float(p),
    )


@dataclass(frozen=True)
class ChannelDecomposition:
    """Assignment of multiplicity slots of a spectrum to simple channels.

    ``slots`` enumerates the (eigenvalue index, copy index) pairs of the
    source spectrum, eigenvalue-major; ``channels`` lists slot indices per
    channel.  ``bucket_certificates`` records, channel by channel, the
    strictly increasing bucket levels occupied (certifying the p-power
    summability bound), ``prescale`` the shared rescaling factor.
    """

    source: DiscreteSpectrum
    slots: tuple[tuple[int, int], ...]
    channels: tuple[tuple[int, ...], ...]
    bucket_certificates: tuple[tuple[int, ...], ...]
    p: float
    prescale: float

    def __post_init__(self) -> None:
        n_slots = len(self.slots)
        for chan in self.channels:
            for slot in chan:
                if not 0 <= slot < n_slots:
                    raise ValueError("channel references an unknown slot")
        if len(self.bucket_certificates) != len(self.channels):
            raise ValueError("need one certificate per channel")

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    def slot_value(self, slot: int) -> float:
        eig, _ = self.slots[slot]
        return self.source.entries[eig][0]

    def channel_values(self, index: int) -> np.ndarray:
        """Eigenvalues of one channel, in extraction order."""
        return np.array([self.slot_value(s) for s in self.channels[index]])

    def channel_eigenvalue_indices(self, index: int) -> tuple[int, ...]:
        return tuple(self.slots[s][0] for s in self.channels[index])

    def to_json(self) -> dict:
        return {
            "prescale": self.prescale,
            "p": self.p,
            "channels": [list(c) for c in self.channels],
            "certificates": [list(c) for c in self.bucket_certificates],
        }


def partition_null_sequence(values, p: float = DEFAULT_EXPONENT) -> ChannelDecomposition:
    """Partition a list of distinct nonzero reals into channels.

    The values are rescaled by the reciprocal of their largest magnitude
    and split by the bucket procedure described in the module docstring.
    The result is wrapped around a synthetic single-multiplicity spectrum
    holding the sorted values; slots stay in the original input order, so
    channel entries refer to positions in ``values`` as given.
    """
    vals = np.asarray(values, dtype=float)
    part = channel_partition(vals, [1] * vals.size, p)

    order = np.argsort(vals)
    rank = {int(orig): pos for pos, orig in enumerate(order)}
    accumulation = (
        Accumulation.TO_ZERO if vals.max() < 0.0 else Accumulation.TO_INFINITY
    )
    source = DiscreteSpectrum(
        entries=tuple((float(vals[i]), 1) for i in order),
        accumulation=accumulation,
        label=f"null-sequence(n={vals.size})",
    )
    # Slot i describes input position i; its eigenvalue index is the rank
    # of values[i] in the sorted spectrum.
    slots = tuple((rank[i], 0) for i in range(vals.size))
    channels = tuple(
        tuple(index for index, _ in chan) for chan in part.channels
    )
    return ChannelDecomposition(
        source=source,
        slots=slots,
        channels=channels,
        bucket_certificates=part.certificates,
        p=part.p,
        prescale=part.prescale,
    )


def decompose_spectrum(s: DiscreteSpectrum, p: float = DEFAULT_EXPONENT) -> ChannelDecomposition:
    """Resolve multiplicities into columns and partition each column.

    Copy c of eigenvalue n occupies column c; the columns share one
    rescaling factor computed from the whole spectrum.  For spectra
    accumulating at infinity the bucket procedure runs on reciprocals,
    which is where the summability certificate lives in that regime.
    """
    reciprocals = s.accumulation is Accumulation.TO_INFINITY
    if reciprocals and any(v == 0.0 for v, _ in s.entries):
        raise ValueError("cannot take reciprocals of a spectrum containing zero")
    mults = s.multiplicities
    part = channel_partition(s.values, mults, p, reciprocals=reciprocals)

    slots = tuple(
        (n, copy) for n in range(len(mults)) for copy in range(mults[n])
    )
    slot_of = {pair: i for i, pair in enumerate(slots)}
    channels = tuple(
        tuple(slot_of[pair] for pair in chan) for chan in part.channels
    )
    return ChannelDecomposition(
        source=s,
        slots=slots,
        channels=channels,
        bucket_certificates=part.certificates,
        p=part.p,
        prescale=part.prescale,
    )


@dataclass(frozen=True)
class DecompositionReport:
    """Outcome of the structural checks on a decomposition."""

    disjoint_cover: bool
    simple_channels: bool
    increasing_certificates: bool
    certificate_sums: tuple[float, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.disjoint_cover and self.simple_channels and self.increasing_certificates

    def to_json(self) -> dict:
        return {
            "disjoint_cover": self.disjoint_cover,
            "simple_channels": self.simple_channels,
            "increasing_certificates": self.increasing_certificates,
            "certificate_sums": list(self.certificate_sums),
            "violations": list(self.violations),
            "ok": self.ok,
        }


def verify_decomposition(c: ChannelDecomposition) -> DecompositionReport:
    """Check the structural invariants of a decomposition.

    Violations are reported, never raised, so adversarial inputs can be
    inspected.  The certificate sums sum(1/k^p) are the finite-truncation
    witnesses of per-channel p-power summability.
    """
    violations: list[str] = []

    seen: list[int] = []
    for chan in c.channels:
        seen.extend(chan)
    disjoint_cover = sorted(seen) == list(range(len(c.slots)))
    if not disjoint_cover:
        violations.append("channels do not partition the slot set")

    simple = True
    for i, chan in enumerate(c.channels):
        eigs = c.channel_eigenvalue_indices(i)
        if len(set(eigs)) != len(eigs):
            simple = False
            violations.append(f"channel {i} repeats an eigenvalue")

    increasing = True
    for i, cert in enumerate(c.bucket_certificates):
        if any(b <= a for a, b in zip(cert, cert[1:])):
            increasing = False
            violations.append(f"channel {i} certificate is not strictly increasing")

    sums = tuple(
        float(sum(1.0 / float(k) ** c.p for k in cert))
        for cert in c.bucket_certificates
    )
    return DecompositionReport(
        disjoint_cover=disjoint_cover,
        simple_channels=simple,
        increasing_certificates=increasing,
        certificate_sums=sums,
        violations=tuple(violations),
    )
