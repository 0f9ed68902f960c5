"""Time-operator matrices on simple channels and their direct sums.

In the eigenbasis of a simple (multiplicity-free) channel the canonical
time-operator candidate is the Hermitian matrix with zero diagonal and
off-diagonal entries i/(E_n - E_m).  Against H = diag(E) it satisfies
[H, T] = i(J - I) with J the all-ones matrix, so the commutator defect
([H,T]v + iv) collapses to i*(sum of coefficients)*ones: it vanishes
identically on the span of eigenvector differences.  That cancellation is
algebraic, not asymptotic, which is why the residual checks here demand
machine precision rather than convergence.

Two entry conventions are provided.  ``DIRECT`` pairs with diag(E) itself
and suits spectra growing to infinity.  ``INVERSE_CONJUGATE`` has entries
i E_n E_m / (E_m - E_n) = i/(1/E_n - 1/E_m): it is the direct matrix of
the reciprocal eigenvalues, pairs with diag(1/E), and suits spectra
accumulating at zero, whose reciprocals are the ones marching off to
infinity.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .decompose import decompose_spectrum
from .spectra import Accumulation, DiscreteSpectrum

__all__ = [
    "MatrixKind",
    "TimeOperatorMatrix",
    "BlockOperator",
    "galapon_matrix",
    "ccr_residual",
    "commutator_defect_columns",
    "project_to_difference_span",
    "random_difference_vector",
    "channel_time_operator",
    "direct_sum",
    "assemble_time_operator",
    "osc_timeop_spectrum",
]

#: Hard cap on channel dimension; dense eigensolves and matrix products
#: beyond this are not worth their O(N^3) cost in this toolkit.
CHANNEL_DIMENSION_LIMIT = 4096

#: Relative tolerance of the Hermiticity invariant.
HERMITICITY_RTOL = 1e-12

#: A vector belongs to the difference span when its coefficient sum is
#: this small relative to its norm (the span is exactly the kernel of the
#: summation functional).
DIFFERENCE_SPAN_RTOL = 1e-10


class MatrixKind(str, Enum):
    DIRECT = "direct"
    INVERSE_CONJUGATE = "inverse_conjugate"


@dataclass(frozen=True)
class TimeOperatorMatrix:
    """Dense Hermitian time-operator matrix over one simple channel."""

    dimension: int
    data: np.ndarray
    eigenvalues: tuple[float, ...]
    kind: MatrixKind

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=complex)
        if data.shape != (self.dimension, self.dimension):
            raise ValueError("data shape does not match dimension")
        if len(self.eigenvalues) != self.dimension:
            raise ValueError("need one eigenvalue per basis vector")
        if np.any(np.diagonal(data) != 0.0):
            raise ValueError("time-operator matrix must have zero diagonal")
        scale = float(np.max(np.abs(data))) if data.size else 0.0
        defect = float(np.max(np.abs(data - data.conj().T))) if data.size else 0.0
        if defect > HERMITICITY_RTOL * max(scale, 1e-300):
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "eigenvalues", tuple(float(e) for e in self.eigenvalues))
        object.__setattr__(self, "kind", MatrixKind(self.kind))

    @property
    def pairing_eigenvalues(self) -> tuple[float, ...]:
        """Diagonal of the Hamiltonian this matrix is conjugate to.

        The commutation relation holds against diag(E) for the direct kind
        and against diag(1/E) for the inverse-conjugate kind.
        """
        if self.kind is MatrixKind.DIRECT:
            return self.eigenvalues
        return tuple(1.0 / e for e in self.eigenvalues)

    def hermiticity_defect(self) -> float:
        """Max entrywise deviation from the conjugate transpose, relative."""
        scale = float(np.max(np.abs(self.data))) if self.data.size else 0.0
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.data - self.data.conj().T))) / scale

    def to_json(self) -> dict:
        flat = self.data.reshape(-1)
        return {
            "dimension": self.dimension,
            "eigenvalues": list(self.eigenvalues),
            "kind": self.kind.value,
            "data": [[z.real, z.imag] for z in flat],
        }


def galapon_matrix(eigenvalues, kind: MatrixKind = MatrixKind.DIRECT) -> TimeOperatorMatrix:
    """Build the time-operator matrix of a simple channel.

    Parameters
    ----------
    eigenvalues : array-like of float
        Strictly increasing channel eigenvalues.  Must be nonzero for the
        inverse-conjugate kind.
    kind : MatrixKind
        ``DIRECT`` gives entries i/(E_n - E_m); ``INVERSE_CONJUGATE``
        gives i E_n E_m/(E_m - E_n), the direct matrix of the reciprocal
        spectrum in the original basis order.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    kind = MatrixKind(kind)
    if ev.ndim != 1 or ev.size == 0:
        raise ValueError("eigenvalues must be a nonempty 1-d array")
    if ev.size > CHANNEL_DIMENSION_LIMIT:
        raise ValueError(
            f"channel dimension {ev.size} exceeds the dense-solver limit "
            f"{CHANNEL_DIMENSION_LIMIT}"
        )
    if np.any(np.diff(ev) <= 0.0):
        raise ValueError("eigenvalues must be strictly increasing")
    if kind is MatrixKind.INVERSE_CONJUGATE and np.any(ev == 0.0):
        raise ValueError("inverse-conjugate kind requires nonzero eigenvalues")

    gaps = np.subtract.outer(ev, ev)          # gaps[n, m] = E_n - E_m
    np.fill_diagonal(gaps, 1.0)               # placeholder, diagonal is zeroed below
    if kind is MatrixKind.DIRECT:
        data = 1j / gaps
    else:
        data = 1j * np.multiply.outer(ev, ev) / (-gaps)
    np.fill_diagonal(data, 0.0)
    return TimeOperatorMatrix(ev.size, data, tuple(ev), kind)


def project_to_difference_span(v) -> np.ndarray:
    """Remove the mean so the coefficient sum is zero."""
    vec = np.asarray(v, dtype=complex)
    return vec - vec.mean()


def random_difference_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Seeded random unit vector with zero coefficient sum.

    Coefficients are drawn uniformly from the complex square [-1,1]^2,
    projected, and normalized; the rare near-zero projection is redrawn.
    """
    if dim < 2:
        raise ValueError("the difference span is trivial below dimension 2")
    while True:
        v = rng.uniform(-1.0, 1.0, dim) + 1j * rng.uniform(-1.0, 1.0, dim)
        v = project_to_difference_span(v)
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            return v / norm


def _require_difference_span(v: np.ndarray) -> None:
    defect = abs(v.sum())
    if defect > DIFFERENCE_SPAN_RTOL * max(float(np.linalg.norm(v)), 1e-300):
        raise ValueError(
            "vector lies outside the difference span "
            f"(coefficient sum {defect:.3e})"
        )


def commutator_defect_columns(eigenvalues, t: TimeOperatorMatrix) -> np.ndarray:
    """Dense commutator [H, T] with H = diag(eigenvalues).

    Computed entrywise as (h_n - h_m) T[n, m], which involves no summation
    and keeps round-off at a few ulp per entry.
    """
    h = np.asarray(eigenvalues, dtype=float)
    if h.size != t.dimension:
        raise ValueError("eigenvalue count does not match matrix dimension")
    return h[:, None] * t.data - t.data * h[None, :]


def ccr_residual(eigenvalues, t: TimeOperatorMatrix, v) -> float:
    """Norm of ([H,T] + i)v for a vector v in the difference span.

    H is diag(eigenvalues).  The residual is zero in exact arithmetic for
    any v with zero coefficient sum, because the commutator equals
    i(J - I) and the all-ones contribution is annihilated on that span.
    Vectors whose coefficient sum exceeds the membership tolerance are
    rejected rather than silently measured.
    """
    vec = np.asarray(v, dtype=complex)
    if vec.shape != (t.dimension,):
        raise ValueError("vector length does not match matrix dimension")
    _require_difference_span(vec)
    comm = commutator_defect_columns(eigenvalues, t)
    return float(np.linalg.norm(comm @ vec + 1j * vec))


@dataclass(frozen=True)
class BlockOperator:
    """Direct sum of per-channel Hamiltonians and time operators."""

    blocks: tuple[tuple[tuple[float, ...], TimeOperatorMatrix], ...]
    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = 0
        for offset, (eigs, t) in zip(self.offsets, self.blocks):
            if offset != expected:
                raise ValueError("offsets are inconsistent with block sizes")
            if len(eigs) != t.dimension:
                raise ValueError("block eigenvalue count does not match its matrix")
            expected += t.dimension

    @property
    def total_dimension(self) -> int:
        return sum(t.dimension for _, t in self.blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def dense_hamiltonian(self) -> np.ndarray:
        return np.concatenate([np.asarray(eigs, dtype=float) for eigs, _ in self.blocks])

    def dense_time_operator(self) -> np.ndarray:
        n = self.total_dimension
        out = np.zeros((n, n), dtype=complex)
        for offset, (_, t) in zip(self.offsets, self.blocks):
            out[offset:offset + t.dimension, offset:offset + t.dimension] = t.data
        return out

    def block_slice(self, index: int) -> slice:
        offset = self.offsets[index]
        return slice(offset, offset + self.blocks[index][1].dimension)

    def ccr_residual(self, v) -> float:
        """Residual over the full space; v must be in every block's span.

        The commutation domain of a direct sum is the direct sum of the
        per-block difference spans, so each block slice of v must have a
        vanishing coefficient sum on its own.
        """
        vec = np.asarray(v, dtype=complex)
        if vec.shape != (self.total_dimension,):
            raise ValueError("vector length does not match operator dimension")
        total = 0.0
        for i, (eigs, t) in enumerate(self.blocks):
            piece = vec[self.block_slice(i)]
            _require_difference_span(piece)
            comm = commutator_defect_columns(eigs, t)
            total += float(np.linalg.norm(comm @ piece + 1j * piece)) ** 2
        return float(np.sqrt(total))


def direct_sum(blocks) -> BlockOperator:
    """Assemble per-channel (eigenvalues, matrix) pairs into one operator."""
    packed = []
    offsets = []
    position = 0
    for eigs, t in blocks:
        eigs = tuple(float(e) for e in eigs)
        if len(eigs) != t.dimension:
            raise ValueError("block eigenvalue count does not match its matrix")
        packed.append((eigs, t))
        offsets.append(position)
        position += t.dimension
    return BlockOperator(blocks=tuple(packed), offsets=tuple(offsets))


def channel_time_operator(values, accumulation: Accumulation):
    """Time-operator block for one simple channel of a spectrum.

    Returns (pairing eigenvalues, matrix).  Spectra accumulating at zero
    get the inverse-conjugate matrix, whose conjugate Hamiltonian is the
    reciprocal diagonal; spectra growing to infinity get the direct one.
    """
    ev = np.sort(np.asarray(values, dtype=float))
    if Accumulation(accumulation) is Accumulation.TO_ZERO:
        t = galapon_matrix(ev, MatrixKind.INVERSE_CONJUGATE)
    else:
        t = galapon_matrix(ev, MatrixKind.DIRECT)
    return t.pairing_eigenvalues, t


def assemble_time_operator(s: DiscreteSpectrum, p: float = 2.0):
    """Decompose a spectrum and build the block time operator.

    Returns (decomposition, BlockOperator) with one block per channel, in
    decomposition order.
    """
    deco = decompose_spectrum(s, p)
    blocks = [
        channel_time_operator(deco.channel_values(i), s.accumulation)
        for i in range(deco.channel_count)
    ]
    return deco, direct_sum(blocks)


def osc_timeop_spectrum(omega: float, n: int):
    """Eigenvalues of the oscillator time-operator truncation.

    The matrix is Toeplitz with entries (i/omega)/(n - m); its symbol has
    range (-pi/omega, pi/omega), so the truncation eigenvalues fill that
    interval from the inside as the size grows.

    Returns (ascending eigenvalue array, min, max).
    """
    omega = float(omega)
    n = int(n)
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if n < 2:
        raise ValueError("need a matrix of size at least 2")
    levels = omega * (np.arange(n) + 0.5)
    t = galapon_matrix(levels, MatrixKind.DIRECT)
    ev = np.linalg.eigvalsh(t.data)
    return ev, float(ev[0]), float(ev[-1])
