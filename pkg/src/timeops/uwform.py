"""Ultra-weak time forms, the uncertainty identity, and spectrum transforms.

When a spectrum accumulates at zero the time-operator matrix of a channel
has no dense-domain conjugate Hamiltonian, but the pairing survives as a
sesquilinear form.  With S the inverse-conjugate matrix and D = diag(1/E^2)
the form is

    t[phi, psi] = phi^H A psi,    A = -(S D + D S) / 2,

Hermitian by construction.  On the domain of vectors whose coefficients
are orthogonal to the eigenvalue vector (per channel) it obeys the
ultra-weak commutation identity

    t[H phi, psi] - t[phi, H psi] = -i (phi, psi)

exactly, and drags the time-energy uncertainty bound along with it: for a
unit vector in that domain the quantity (t - a)[(H - b) psi, psi] has
imaginary part exactly -1/2 for every choice of real centers a, b, hence
modulus at least 1/2.

The second half of the module transports the construction along functions
of the Hamiltonian.  A shifted symbol f~(x) = f(x) - f(0) applied to the
spectrum yields a new eigenvalue multiset; when the shifted values are
nonzero and the accumulation at zero survives, the transformed form is
built by the same channel machinery.  Admissibility is checked before any
matrix is touched, with witnesses naming the offending eigenvalues.

Inner products are antilinear in the first slot throughout (np.vdot).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .decompose import channel_partition, decompose_spectrum
from .spectra import Accumulation, DiscreteSpectrum
from .timeop import MatrixKind, galapon_matrix

__all__ = [
    "FormChannel",
    "SesquilinearForm",
    "UncertaintyResult",
    "FunctionKind",
    "FunctionSpec",
    "AdmissibilityReport",
    "AdmissibilityError",
    "uwform_point",
    "assemble_uwform",
    "random_domain_vector",
    "uw_ccr_residual",
    "direct_sum_form",
    "uncertainty_check",
    "f_condition_check",
    "f_transform_form",
]

#: Per-block membership tolerance for the form's commutation domain.
CCR_DOMAIN_RTOL = 1e-10

#: Unit-vector tolerance for the uncertainty check.
UNIT_NORM_ATOL = 1e-12

#: Slack allowed on the exact -1/2 imaginary part and the 1/2 lower bound.
UNCERTAINTY_ATOL = 1e-10

#: Sin-resonance detector: 2*beta*E within this of a nonzero integer fails.
SIN_RESONANCE_ATOL = 1e-9


class FormChannel:
    """One simple channel of an ultra-weak form.

    Holds the channel eigenvalues (strictly increasing, nonzero), the
    inverse-conjugate matrix S, and the evaluator A = -(S D + D S)/2 with
    D = diag(1/E^2).  The two D-products are applied by row and column
    scaling, which keeps A Hermitian to the last bit: the (n, m) and
    (m, n) entries are built from the same float products.
    """

    def __init__(self, eigenvalues) -> None:
        ev = np.asarray(eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise ValueError("eigenvalues must be a nonempty 1-d array")
        if np.any(ev == 0.0):
            raise ValueError("form channels require nonzero eigenvalues")
        if np.any(np.diff(ev) <= 0.0):
            raise ValueError("eigenvalues must be strictly increasing")
        self.eigenvalues = ev.copy()
        self.eigenvalues.flags.writeable = False
        self.dimension = int(ev.size)
        s = galapon_matrix(ev, MatrixKind.INVERSE_CONJUGATE).data
        d = 1.0 / (ev * ev)
        a = -0.5 * (s * d[None, :] + d[:, None] * s)
        a.flags.writeable = False
        self.s_matrix = s
        self.evaluator = a

    def domain_defect(self, v: np.ndarray) -> float:
        """|sum E_n v_n|, the distance of v from the commutation domain."""
        return abs(complex(np.dot(self.eigenvalues, v)))

    def project_to_ccr_domain(self, v: np.ndarray) -> np.ndarray:
        if self.dimension == 1:
            # the constraint kills everything; avoid leaving round-off dust
            return np.zeros_like(v)
        e = self.eigenvalues
        w = v - (np.dot(e, v) / np.dot(e, e)) * e
        # second pass scrubs the cancellation residue of the first
        return w - (np.dot(e, w) / np.dot(e, e)) * e


@dataclass(frozen=True)
class SesquilinearForm:
    """Direct sum of form channels, evaluated blockwise."""

    channels: tuple[FormChannel, ...]
    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.channels:
            raise ValueError("a form needs at least one channel")
        expected = 0
        for offset, ch in zip(self.offsets, self.channels):
            if offset != expected:
                raise ValueError("offsets are inconsistent with channel sizes")
            expected += ch.dimension

    @property
    def total_dimension(self) -> int:
        return sum(ch.dimension for ch in self.channels)

    def block_slice(self, index: int) -> slice:
        offset = self.offsets[index]
        return slice(offset, offset + self.channels[index].dimension)

    def hamiltonian_diagonal(self) -> np.ndarray:
        return np.concatenate([ch.eigenvalues for ch in self.channels])

    def _check_shape(self, v: np.ndarray) -> None:
        if v.shape != (self.total_dimension,):
            raise ValueError("vector length does not match the form dimension")

    def evaluate(self, phi, psi) -> complex:
        """t[phi, psi], antilinear in phi."""
        phi = np.asarray(phi, dtype=complex)
        psi = np.asarray(psi, dtype=complex)
        self._check_shape(phi)
        self._check_shape(psi)
        total = 0.0 + 0.0j
        for i, ch in enumerate(self.channels):
            sl = self.block_slice(i)
            total += np.vdot(phi[sl], ch.evaluator @ psi[sl])
        return complex(total)

    def apply_hamiltonian(self, v) -> np.ndarray:
        vec = np.asarray(v, dtype=complex)
        self._check_shape(vec)
        return self.hamiltonian_diagonal() * vec

    def in_ccr_domain(self, v) -> bool:
        vec = np.asarray(v, dtype=complex)
        self._check_shape(vec)
        # the block tolerance is anchored to the norm of the whole vector:
        # a nearly annihilated block piece is round-off, not a violation
        whole = float(np.linalg.norm(vec))
        for i, ch in enumerate(self.channels):
            piece = vec[self.block_slice(i)]
            scale = float(np.linalg.norm(ch.eigenvalues)) * whole
            if ch.domain_defect(piece) > CCR_DOMAIN_RTOL * max(scale, 1e-300):
                return False
        return True

    def require_ccr_domain(self, v) -> None:
        if not self.in_ccr_domain(v):
            raise ValueError(
                "vector lies outside the form's commutation domain "
                "(some block is not orthogonal to its eigenvalue vector)"
            )

    def project_to_ccr_domain(self, v) -> np.ndarray:
        vec = np.asarray(v, dtype=complex)
        self._check_shape(vec)
        out = vec.copy()
        for i, ch in enumerate(self.channels):
            sl = self.block_slice(i)
            out[sl] = ch.project_to_ccr_domain(out[sl])
        return out

    def describe_domains(self) -> list[dict]:
        """Per-channel summary of sizes and eigenvalue ranges."""
        out = []
        for i, ch in enumerate(self.channels):
            out.append({
                "channel_id": i,
                "dimension": ch.dimension,
                "eigenvalue_min": float(ch.eigenvalues[0]),
                "eigenvalue_max": float(ch.eigenvalues[-1]),
            })
        return out


def uwform_point(eigenvalues) -> SesquilinearForm:
    """Single-channel form over strictly increasing negative eigenvalues."""
    ev = np.asarray(eigenvalues, dtype=float)
    if np.any(ev >= 0.0):
        raise ValueError("point form expects strictly negative eigenvalues")
    return SesquilinearForm(channels=(FormChannel(ev),), offsets=(0,))


def direct_sum_form(forms) -> SesquilinearForm:
    """Concatenate the channels of several forms into one."""
    channels = []
    for f in forms:
        channels.extend(f.channels)
    offsets = []
    position = 0
    for ch in channels:
        offsets.append(position)
        position += ch.dimension
    return SesquilinearForm(channels=tuple(channels), offsets=tuple(offsets))


def assemble_uwform(s: DiscreteSpectrum, p: float = 2.0):
    """Decompose a zero-accumulating spectrum into an ultra-weak form.

    Returns (decomposition, SesquilinearForm) with one form channel per
    decomposition channel, eigenvalues sorted ascending within each.
    """
    if s.accumulation is not Accumulation.TO_ZERO:
        raise ValueError("ultra-weak forms are built over spectra accumulating at zero")
    deco = decompose_spectrum(s, p)
    channels = tuple(
        FormChannel(np.sort(np.asarray(deco.channel_values(i), dtype=float)))
        for i in range(deco.channel_count)
    )
    offsets = []
    position = 0
    for ch in channels:
        offsets.append(position)
        position += ch.dimension
    return deco, SesquilinearForm(channels=channels, offsets=tuple(offsets))


def random_domain_vector(rng: np.random.Generator, form: SesquilinearForm) -> np.ndarray:
    """Seeded random unit vector in the form's commutation domain.

    Uniform complex coefficients projected blockwise and normalized;
    a near-zero projection is redrawn.
    """
    dim = form.total_dimension
    while True:
        v = rng.uniform(-1.0, 1.0, dim) + 1j * rng.uniform(-1.0, 1.0, dim)
        v = form.project_to_ccr_domain(v)
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            return v / norm


def uw_ccr_residual(form: SesquilinearForm, phi, psi) -> float:
    """|t[H phi, psi] - t[phi, H psi] + i (phi, psi)| on the form domain."""
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    form.require_ccr_domain(phi)
    form.require_ccr_domain(psi)
    lhs = form.evaluate(form.apply_hamiltonian(phi), psi)
    rhs = form.evaluate(phi, form.apply_hamiltonian(psi))
    return abs(lhs - rhs + 1j * np.vdot(phi, psi))


@dataclass(frozen=True)
class UncertaintyResult:
    value: float
    imaginary_part: float
    value_ok: bool
    imaginary_ok: bool

    @property
    def passes(self) -> bool:
        return self.value_ok and self.imaginary_ok

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "imaginary_part": self.imaginary_part,
            "value_ok": self.value_ok,
            "imaginary_ok": self.imaginary_ok,
            "passes": self.passes,
        }


def uncertainty_check(form: SesquilinearForm, psi, a: float = 0.0, b: float = 0.0) -> UncertaintyResult:
    """Evaluate (t - a)[(H - b) psi, psi] for a unit domain vector psi.

    The imaginary part equals -1/2 identically on the domain, so the
    modulus is bounded below by 1/2 for every real center pair (a, b).
    Both facts are checked to tight absolute tolerance.
    """
    psi = np.asarray(psi, dtype=complex)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > UNIT_NORM_ATOL:
        raise ValueError("psi must be a unit vector")
    form.require_ccr_domain(psi)
    a = float(a)
    b = float(b)
    shifted = form.apply_hamiltonian(psi) - b * psi
    z = form.evaluate(shifted, psi) - a * np.vdot(shifted, psi)
    z = complex(z)
    imaginary_ok = abs(z.imag + 0.5) <= UNCERTAINTY_ATOL
    value_ok = abs(z) >= 0.5 - UNCERTAINTY_ATOL
    return UncertaintyResult(
        value=abs(z),
        imaginary_part=z.imag,
        value_ok=value_ok,
        imaginary_ok=imaginary_ok,
    )


class FunctionKind(str, Enum):
    EXP = "exp"
    POLYNOMIAL = "poly"
    SIN = "sin"


@dataclass(frozen=True)
class FunctionSpec:
    """Symbol f applied to the Hamiltonian.

    ``EXP`` with parameter beta is f(x) = exp(-beta x); ``SIN`` with beta
    is f(x) = sin(2 pi beta x); ``POLYNOMIAL`` takes coefficients
    (a_0, ..., a_N) in ascending degree.  The transform always uses the
    shifted symbol f~(x) = f(x) - f(0).
    """

    kind: FunctionKind
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        kind = FunctionKind(self.kind)
        params = tuple(float(x) for x in self.params)
        if kind in (FunctionKind.EXP, FunctionKind.SIN):
            if len(params) != 1:
                raise ValueError(f"{kind.value} takes exactly one parameter")
            if params[0] == 0.0:
                raise ValueError(f"{kind.value} parameter must be nonzero")
        else:
            if not params:
                raise ValueError("polynomial needs at least one coefficient")
            if len(params) > 1 and params[-1] == 0.0:
                raise ValueError("polynomial leading coefficient must be nonzero")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is FunctionKind.EXP:
            return np.exp(-self.params[0] * x)
        if self.kind is FunctionKind.SIN:
            return np.sin(2.0 * np.pi * self.params[0] * x)
        out = np.zeros_like(x)
        for coeff in reversed(self.params):
            out = out * x + coeff
        return out

    def shifted(self, x):
        """f~(x) = f(x) - f(0)."""
        return self.evaluate(x) - self.evaluate(0.0)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "params": list(self.params)}

    @classmethod
    def from_json(cls, payload: dict) -> "FunctionSpec":
        return cls(kind=FunctionKind(payload["kind"]), params=tuple(payload["params"]))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the transform precondition checks.

    ``witnesses`` lists human-readable records of each violation; for the
    sine symbol these name the resonant eigenvalue index (1-based, in
    spectrum order) and the integer it collides with.
    """

    admissible: bool
    witnesses: tuple[dict, ...]
    shifted_values: tuple[float, ...]
    distinct_count: int
    details: dict

    def to_json(self) -> dict:
        return {
            "admissible": self.admissible,
            "witnesses": [dict(w) for w in self.witnesses],
            "shifted_values": list(self.shifted_values),
            "distinct_count": self.distinct_count,
            "details": dict(self.details),
        }


class AdmissibilityError(ValueError):
    """Raised when a transform is attempted with a failing precondition."""

    def __init__(self, report: AdmissibilityReport) -> None:
        self.report = report
        heads = ", ".join(w.get("reason", "violation") for w in report.witnesses[:3])
        super().__init__(f"function fails the transform precondition ({heads})")


def _census(values: np.ndarray, tol: float) -> int:
    """Count of distinct values under an absolute merge tolerance."""
    ordered = np.sort(values)
    if ordered.size == 0:
        return 0
    return 1 + int(np.count_nonzero(np.diff(ordered) > tol))


def f_condition_check(f: FunctionSpec, s: DiscreteSpectrum) -> AdmissibilityReport:
    """Decide whether f transports the spectrum into a usable form.

    The shifted values f~(E_n) must all be nonzero (no eigenvalue may be
    sent to the accumulation point).  For the sine symbol that is a
    resonance condition: 2 beta E_n must avoid the nonzero integers,
    checked here within SIN_RESONANCE_ATOL.  For polynomials the derived
    condition is that g(x) = sum_{j>=1} a_j x^{j-1} has no zero on the
    closed positive half-line, probed conservatively by a sign scan plus
    the real nonnegative roots of g.
    """
    if s.accumulation is not Accumulation.TO_ZERO:
        raise ValueError("transforms are defined over spectra accumulating at zero")
    ev = s.values
    shifted = np.asarray(f.shifted(ev), dtype=float)
    scale = float(np.max(np.abs(shifted))) if shifted.size else 0.0
    zero_tol = 1e-12 * max(scale, 1e-300)
    witnesses: list[dict] = []

    if f.kind is FunctionKind.SIN:
        beta = f.params[0]
        r = 2.0 * beta * ev
        nearest = np.round(r)
        for n, (rn, kn) in enumerate(zip(r, nearest), start=1):
            if kn != 0.0 and abs(rn - kn) <= SIN_RESONANCE_ATOL:
                witnesses.append({
                    "reason": "sine resonance",
                    "eigenvalue_index": n,
                    "eigenvalue": float(ev[n - 1]),
                    "integer": int(kn),
                })
        k_max = int(math.ceil(2.0 * abs(beta) * float(np.max(np.abs(ev))))) + 1
        details = {"scanned_integer_range": k_max}
    elif f.kind is FunctionKind.POLYNOMIAL:
        g = np.asarray(f.params[1:], dtype=float)
        details = {}
        if g.size == 0 or not np.any(g):
            witnesses.append({"reason": "polynomial has no nonconstant part"})
        else:
            grid = np.linspace(0.0, 10.0 * float(np.max(np.abs(ev))), 1000)
            gvals = np.zeros_like(grid)
            for coeff in reversed(g):
                gvals = gvals * grid + coeff
            if np.any(gvals == 0.0) or np.any(gvals[:-1] * gvals[1:] < 0.0):
                witnesses.append({"reason": "derivative factor changes sign on [0, inf)"})
            elif g.size > 1:
                roots = np.roots(g[::-1])
                for root in roots:
                    if abs(root.imag) <= 1e-9 * (1.0 + abs(root.real)) and root.real >= -1e-12:
                        witnesses.append({
                            "reason": "derivative factor has a nonnegative real root",
                            "root": float(root.real),
                        })
    else:
        details = {}

    for n, value in enumerate(shifted, start=1):
        if abs(value) <= zero_tol:
            witnesses.append({
                "reason": "eigenvalue maps to the accumulation point",
                "eigenvalue_index": n,
                "eigenvalue": float(ev[n - 1]),
            })

    return AdmissibilityReport(
        admissible=not witnesses,
        witnesses=tuple(witnesses),
        shifted_values=tuple(float(v) for v in shifted),
        distinct_count=_census(shifted, 1e-12 * max(scale, 1e-300)),
        details=details,
    )


def f_transform_form(f: FunctionSpec, s: DiscreteSpectrum, p: float = 2.0):
    """Ultra-weak form of f~(H) over a zero-accumulating spectrum.

    Checks admissibility first (raising AdmissibilityError with the full
    report on failure), merges shifted values that coincide within the
    census tolerance by adding their multiplicities, partitions the
    resulting value set, and assembles the channel forms.

    Returns (report, partition, SesquilinearForm).
    """
    report = f_condition_check(f, s)
    if not report.admissible:
        raise AdmissibilityError(report)

    shifted = np.asarray(report.shifted_values, dtype=float)
    mults = s.multiplicities
    scale = float(np.max(np.abs(shifted)))
    merge_tol = 1e-12 * scale

    order = np.argsort(shifted)
    merged_values: list[float] = []
    merged_mults: list[int] = []
    for idx in order:
        value = float(shifted[idx])
        mult = int(mults[idx])
        if merged_values and value - merged_values[-1] <= merge_tol:
            merged_mults[-1] += mult
        else:
            merged_values.append(value)
            merged_mults.append(mult)

    values = np.asarray(merged_values, dtype=float)
    partition = channel_partition(values, merged_mults, p)
    channels = []
    for channel in partition.channels:
        members = np.sort(values[[value_index for value_index, _ in channel]])
        channels.append(FormChannel(members))
    offsets = []
    position = 0
    for ch in channels:
        offsets.append(position)
        position += ch.dimension
    form = SesquilinearForm(channels=tuple(channels), offsets=tuple(offsets))
    return report, partition, form
