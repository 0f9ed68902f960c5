"""Model spectra and truncated Hamiltonians.

Discrete spectra are the common currency of the toolkit: a sorted list of
distinct eigenvalues with multiplicities, tagged with where the untruncated
sequence accumulates (at zero from below, or at infinity).  This module
generates the standard model spectra (harmonic oscillator in d dimensions,
hydrogen-like point spectra) and the truncated Rabi Hamiltonian, which is
the one model here that requires an actual eigensolve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Accumulation",
    "DiscreteSpectrum",
    "HermitianMatrix",
    "harmonic_spectrum",
    "hydrogen_point_spectrum",
    "rabi_hamiltonian",
    "rabi_bound_check",
    "invert_spectrum",
]

#: Relative tolerance for the Hermiticity check on constructed matrices.
HERMITICITY_RTOL = 1e-12

#: Values of a d-dimensional harmonic spectrum closer than this (relative to
#: the largest frequency) are merged into one degenerate level.  Floating
#: summation of incommensurate frequencies never collides beyond round-off,
#: so this only fires for genuine degeneracies.
DEGENERACY_MERGE_RTOL = 1e-10


class Accumulation(str, Enum):
    """Where the untruncated eigenvalue sequence accumulates."""

    TO_ZERO = "to_zero"
    TO_INFINITY = "to_infinity"


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Sorted eigenvalues with multiplicities and an accumulation tag.

    Parameters
    ----------
    entries : tuple of (value, multiplicity) pairs
        Strictly increasing by value; every multiplicity is a positive
        integer.
    accumulation : Accumulation
        ``TO_ZERO`` spectra follow the convention E_1 < E_2 < ... < 0, so
        every value must be negative.  ``TO_INFINITY`` spectra are only
        required to increase (unboundedness cannot be checked at a finite
        truncation).
    label : str
        Free-form provenance text; generators record their truncation
        parameters here so reports are reproducible.
    """

    entries: tuple[tuple[float, int], ...]
    accumulation: Accumulation
    label: str = ""

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("spectrum must contain at least one entry")
        entries = tuple((float(v), int(m)) for v, m in self.entries)
        object.__setattr__(self, "entries", entries)
        accumulation = Accumulation(self.accumulation)
        object.__setattr__(self, "accumulation", accumulation)
        values = [v for v, _ in entries]
        if any(m < 1 for _, m in entries):
            raise ValueError("multiplicities must be >= 1")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("values must be strictly increasing")
        if accumulation is Accumulation.TO_ZERO:
            if any(v >= 0.0 for v in values):
                raise ValueError(
                    "a spectrum accumulating at zero must consist of "
                    "negative values"
                )
        elif len(values) >= 2 and values[-1] <= values[0]:
            raise ValueError("spectrum must increase toward its accumulation point")

    @property
    def values(self) -> np.ndarray:
        """Distinct eigenvalues, ascending."""
        return np.array([v for v, _ in self.entries], dtype=float)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.entries)

    @property
    def total_states(self) -> int:
        """Number of eigenstates counted with multiplicity."""
        return sum(self.multiplicities)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "accumulation": self.accumulation.value,
            "entries": [[v, m] for v, m in self.entries],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DiscreteSpectrum":
        return cls(
            entries=tuple((float(v), int(m)) for v, m in doc["entries"]),
            accumulation=Accumulation(doc["accumulation"]),
            label=str(doc.get("label", "")),
        )


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex Hermitian matrix with labelled basis vectors."""

    dimension: int
    data: np.ndarray
    basis_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=complex)
        if data.shape != (self.dimension, self.dimension):
            raise ValueError("data shape does not match declared dimension")
        if len(self.basis_labels) != self.dimension:
            raise ValueError("need one basis label per dimension")
        scale = float(np.max(np.abs(data))) if data.size else 0.0
        defect = float(np.max(np.abs(data - data.conj().T))) if data.size else 0.0
        if defect > HERMITICITY_RTOL * max(scale, 1e-300):
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order (dense Hermitian solve)."""
        return np.linalg.eigvalsh(self.data)

    def to_json(self) -> dict:
        flat = self.data.reshape(-1)
        return {
            "dimension": self.dimension,
            "basis_labels": list(self.basis_labels),
            "data": [[z.real, z.imag] for z in flat],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HermitianMatrix":
        n = int(doc["dimension"])
        flat = np.array([complex(re, im) for re, im in doc["data"]])
        return cls(n, flat.reshape(n, n), tuple(doc["basis_labels"]))


def _lattice_points(dims: int, total: int):
    """Yield all occupation tuples (n_1..n_d) with sum <= total."""
    if dims == 1:
        for n in range(total + 1):
            yield (n,)
        return
    for n in range(total + 1):
        for rest in _lattice_points(dims - 1, total - n):
            yield (n, *rest)


def harmonic_spectrum(omega: "list[float]", n_max: int) -> DiscreteSpectrum:
    """Truncated spectrum of a d-dimensional harmonic oscillator.

    Enumerates every occupation tuple (n_1, .., n_d) with n_j >= 0 and
    sum n_j <= n_max, sums the level values sum_j omega_j (n_j + 1/2), and
    merges values that coincide up to ``DEGENERACY_MERGE_RTOL`` times the
    largest frequency.

    Parameters
    ----------
    omega : list of float
        Positive mode frequencies; the length sets the dimension d.
    n_max : int
        Total occupation cutoff, at least 1.

    Returns
    -------
    DiscreteSpectrum
        Accumulating at infinity; multiplicities count lattice points.
    """
    freqs = [float(w) for w in omega]
    if not freqs:
        raise ValueError("need at least one frequency")
    if any(w <= 0.0 for w in freqs):
        raise ValueError("frequencies must be positive")
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")

    base = 0.5 * math.fsum(freqs)
    levels = sorted(
        math.fsum(w * n for w, n in zip(freqs, point)) + base
        for point in _lattice_points(len(freqs), n_max)
    )
    tol = DEGENERACY_MERGE_RTOL * max(freqs)
    entries: list[list] = []
    for value in levels:
        if entries and value - entries[-1][0] <= tol:
            entries[-1][1] += 1
        else:
            entries.append([value, 1])
    label = f"harmonic(omega={freqs}, n_max={n_max})"
    return DiscreteSpectrum(
        entries=tuple((v, m) for v, m in entries),
        accumulation=Accumulation.TO_INFINITY,
        label=label,
    )


def hydrogen_point_spectrum(m: float, gamma: float, n_max: int) -> DiscreteSpectrum:
    """Hydrogen-like point spectrum -m*gamma^2/(2 n^2) for n = 1..n_max.

    The level values are the standard Coulomb bound-state energies.  The
    multiplicity n^2 is the textbook degeneracy of level n; it is supplied
    here as standard physics input, not derived inside the toolkit.
    """
    m = float(m)
    gamma = float(gamma)
    n_max = int(n_max)
    if m <= 0.0 or gamma <= 0.0:
        raise ValueError("mass and coupling must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    entries = tuple(
        (-m * gamma * gamma / (2.0 * n * n), n * n) for n in range(1, n_max + 1)
    )
    return DiscreteSpectrum(
        entries=entries,
        accumulation=Accumulation.TO_ZERO,
        label=f"hydrogen(m={m}, gamma={gamma}, n_max={n_max})",
    )


def rabi_hamiltonian(
    mu: float, omega: float, g: float, fock_cutoff: int
) -> HermitianMatrix:
    """Rabi Hamiltonian mu*sz (x) 1 + omega*1 (x) a*a + g*sx (x) (a + a*).

    The boson mode is truncated at ``fock_cutoff``: ladder entries that
    would leave the retained number states are dropped, which keeps the
    matrix exactly Hermitian (variational truncation).

    Returns the 2(fock_cutoff+1)-dimensional matrix in the product basis
    spin (x) number state, spin-up block first.
    """
    mu = float(mu)
    omega = float(omega)
    g = float(g)
    fock_cutoff = int(fock_cutoff)
    if mu <= 0.0 or omega <= 0.0:
        raise ValueError("mu and omega must be positive")
    if fock_cutoff < 2:
        raise ValueError("fock_cutoff must be >= 2")

    dim = fock_cutoff + 1
    lower = np.zeros((dim, dim))
    for n in range(1, dim):
        lower[n - 1, n] = math.sqrt(n)
    number = lower.T @ lower
    quad = lower + lower.T

    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = (
        mu * np.kron(sz, np.eye(dim))
        + omega * np.kron(np.eye(2), number)
        + g * np.kron(sx, quad)
    )
    labels = tuple(f"{s}|n={n}" for s in ("up", "down") for n in range(dim))
    return HermitianMatrix(2 * dim, h.astype(complex), labels)


def rabi_bound_check(
    eigenvalues, mu: float, omega: float, g: float, count: int
) -> "list[bool]":
    """Check the two-sided bound on every second Rabi eigenvalue.

    For n = 0..count-1 the n-th reference level is nu_n = omega*n - g^2/omega
    and the check is nu_n - mu <= eigenvalues[2n] <= nu_n + mu, with the
    eigenvalues sorted ascending and counted with multiplicity.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if 2 * count > ev.size:
        raise ValueError("count too large for the eigenvalue list")
    out = []
    for n in range(count):
        nu = omega * n - g * g / omega
        out.append(bool(nu - mu <= ev[2 * n] <= nu + mu))
    return out


def invert_spectrum(s: DiscreteSpectrum) -> DiscreteSpectrum:
    """Map every eigenvalue to its reciprocal and re-sort.

    Multiplicities are carried along and the accumulation tag flips.
    A zero eigenvalue has no reciprocal and is rejected.
    """
    if any(v == 0.0 for v, _ in s.entries):
        raise ValueError("cannot invert a spectrum containing zero")
    flipped = (
        Accumulation.TO_INFINITY
        if s.accumulation is Accumulation.TO_ZERO
        else Accumulation.TO_ZERO
    )
    entries = tuple(sorted((1.0 / v, m) for v, m in s.entries))
    if flipped is Accumulation.TO_ZERO and entries[-1][0] > 0.0:
        raise ValueError(
            "inverted spectrum would accumulate at zero from above; the "
            "to-zero sign convention only represents negative sequences"
        )
    return DiscreteSpectrum(
        entries=entries, accumulation=flipped, label=f"invert({s.label})"
    )
