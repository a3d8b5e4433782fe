"""Pauli parametrization of qubit Hamiltonians and the driven-spin builders.

A 2x2 operator is carried around as ``h * (n0 + n . sigma)`` with real h > 0
and the triple normalized so that ``n . conj(n) = 1``.  The commutator
condition solved by :func:`solve_sigma_a` is what turns a non-commuting
perturbation into left/right weak values; see :mod:`weakres.weakvalue`.

Sign conventions: ``sigma3 |+> = +|+>`` with ``|+> = (1, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, DimensionMismatchError, ParallelFieldsError
from .linalg import as_matrix, exp_su2, expm, ket

__all__ = [
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "ID2",
    "PLUS",
    "MINUS",
    "sigma_dot",
    "PauliDecomp",
    "HamiltonianPair",
    "SigmaA",
    "PiecewiseSchedule",
    "decompose",
    "reconstruct",
    "solve_sigma_a",
    "rabi_rotating_frame",
    "ramsey_schedule",
    "evolve_piecewise",
]

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)
for _m in (SIGMA1, SIGMA2, SIGMA3, ID2):
    _m.setflags(write=False)

#: sigma3 eigenstates |+> and |->
PLUS = np.array([1.0, 0.0], dtype=np.complex128)
MINUS = np.array([0.0, 1.0], dtype=np.complex128)
PLUS.setflags(write=False)
MINUS.setflags(write=False)


def sigma_dot(n) -> np.ndarray:
    """n . sigma for a (possibly complex) triple n."""
    n = np.asarray(n, dtype=np.complex128)
    return n[0] * SIGMA1 + n[1] * SIGMA2 + n[2] * SIGMA3


@dataclass(frozen=True)
class PauliDecomp:
    """A 2x2 operator as h * (n0 + n . sigma).

    ``direction_undetermined`` marks decompositions of pure-identity inputs,
    where the sigma direction is a placeholder (0, 0, 1) rather than data.
    """

    h: float
    n0: complex
    n: np.ndarray
    direction_undetermined: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n", np.asarray(self.n, dtype=np.complex128))
        object.__setattr__(self, "n0", complex(self.n0))
        object.__setattr__(self, "h", float(self.h))
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError(f"h must be positive and finite, got {self.h}")
        if self.n.shape != (3,):
            raise ValueError("n must be a triple")
        if not (np.all(np.isfinite(self.n.real)) and np.all(np.isfinite(self.n.imag))):
            raise ValueError("n components must be finite")
        nn = float(np.real(np.dot(self.n, self.n.conj())))
        if abs(nn - 1.0) > 1e-12:
            raise ValueError(f"n . conj(n) = {nn} deviates from 1 beyond 1e-12")

    @property
    def sigma(self) -> np.ndarray:
        """The traceless direction operator n . sigma."""
        return sigma_dot(self.n)

    def matrix(self) -> np.ndarray:
        """Reconstruct h * (n0 + n . sigma); the flagged placeholder
        direction of a pure-identity decomposition is not part of the data
        and does not re-enter."""
        if self.direction_undetermined:
            return self.h * self.n0 * ID2
        return self.h * (self.n0 * ID2 + self.sigma)

    def evolution(self, t: float) -> np.ndarray:
        """exp(-i * H * t) in closed form."""
        if self.direction_undetermined:
            return np.exp(-1j * t * self.h * self.n0) * ID2
        return exp_su2(self, t)


@dataclass(frozen=True)
class HamiltonianPair:
    """Free part H0 plus interaction part V.  ``H0 = None`` means the free
    Hamiltonian vanishes (the bare direct-measurement setup)."""

    H0: PauliDecomp | None
    V: PauliDecomp

    def h0_matrix(self) -> np.ndarray:
        return np.zeros((2, 2), dtype=np.complex128) if self.H0 is None else self.H0.matrix()

    def h0_evolution(self, t: float) -> np.ndarray:
        return ID2.copy() if self.H0 is None else self.H0.evolution(t)


@dataclass(frozen=True)
class SigmaA:
    """Solution of the commutator condition
    [sigma_a, sigma_h] = 2i (sigma_v - ((nh.nv)/(nh.nh)) sigma_h).

    The minimal-gauge solution n_a = (nh x n_perp) / (nh.nh) is generally not
    unit-normalized; its Hermitian norm is reported instead of being enforced.
    """

    n_a: np.ndarray
    norm: float

    @property
    def matrix(self) -> np.ndarray:
        return sigma_dot(self.n_a)


def reconstruct(d: PauliDecomp) -> np.ndarray:
    return d.matrix()


def decompose(m) -> PauliDecomp:
    """Inverse of :func:`reconstruct`: coefficients via half-traces.

    Pure multiples of the identity get the flagged placeholder direction so
    downstream commutative-case code can proceed.
    """
    m = as_matrix(m)
    if m.shape != (2, 2):
        raise DimensionMismatchError("decompose expects a 2x2 matrix")
    if not np.any(m):
        raise DegenerateError("cannot decompose the zero matrix")
    a0 = (m[0, 0] + m[1, 1]) / 2.0
    a = np.array(
        [
            (m[0, 1] + m[1, 0]) / 2.0,
            (m[0, 1] - m[1, 0]) * 1j / 2.0,
            (m[0, 0] - m[1, 1]) / 2.0,
        ],
        dtype=np.complex128,
    )
    s = float(np.linalg.norm(a))
    if s <= 1e-14 * max(1.0, abs(a0)):
        h = abs(a0)
        return PauliDecomp(
            h=h, n0=a0 / h, n=np.array([0.0, 0.0, 1.0]), direction_undetermined=True
        )
    return PauliDecomp(h=s, n0=a0 / s, n=a / s)


def _bdot(a: np.ndarray, b: np.ndarray) -> complex:
    """Bilinear (unconjugated) dot product of complex triples."""
    return complex(np.dot(a, b))


def solve_sigma_a(nh, nv) -> SigmaA:
    """Minimal-gauge n_a with [n_a.sigma, nh.sigma] = 2i (n_perp . sigma),
    where n_perp is the component of nv bilinear-perpendicular to nh.

    Raises :class:`ParallelFieldsError` when n_perp vanishes (commutative
    case, no sigma_a needed) and :class:`DegenerateError` when nh.nh = 0
    (bilinear-null direction, the construction has no inverse).
    """
    nh = np.asarray(nh, dtype=np.complex128)
    nv = np.asarray(nv, dtype=np.complex128)
    dhh = _bdot(nh, nh)
    if abs(dhh) < 1e-14:
        raise DegenerateError("nh is bilinear-null: (nh.nh) = 0, sigma_a undefined")
    n_perp = nv - (_bdot(nh, nv) / dhh) * nh
    if np.linalg.norm(n_perp) < 1e-14 * max(1.0, float(np.linalg.norm(nv))):
        raise ParallelFieldsError(
            "nv is parallel to nh (commutative case); sigma_a is not needed"
        )
    n_a = np.cross(nh, n_perp) / dhh
    return SigmaA(n_a=n_a, norm=float(np.linalg.norm(n_a)))


def rabi_rotating_frame(omega: float, omega0: float, omega1: float) -> PauliDecomp:
    """Rotating-frame generator of the driven spin,
    omega1 * (sigma1 + ((omega - omega0) / (2 omega1)) sigma3)."""
    if not omega1 > 0:
        raise ValueError("omega1 must be positive")
    m = omega1 * SIGMA1 + ((omega - omega0) / 2.0) * SIGMA3
    return decompose(m)


@dataclass(frozen=True)
class PiecewiseSchedule:
    """Ordered (duration, generator) segments; the first segment acts first.

    Durations must be non-negative and all generators share one dimension.
    A negative generator with positive duration encodes a frame-restoring
    phase exp(+i G t).
    """

    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        segs = []
        dim = None
        for dur, gen in self.segments:
            dur = float(dur)
            if dur < 0:
                raise ValueError("segment durations must be non-negative")
            g = as_matrix(gen)
            if dim is None:
                dim = g.shape[0]
            elif g.shape[0] != dim:
                raise DimensionMismatchError("all segment generators must share one dimension")
            segs.append((dur, g))
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def dim(self) -> int | None:
        return self.segments[0][1].shape[0] if self.segments else None

    def total_unitary(self) -> np.ndarray:
        """Product of segment exponentials, first segment rightmost."""
        if not self.segments:
            raise DegenerateError("empty schedule has no dimension")
        u = np.eye(self.dim, dtype=np.complex128)
        for dur, gen in self.segments:
            u = expm(gen, -1j * dur) @ u
        return u


def ramsey_schedule(
    omega: float,
    omega0: float,
    omega1: float,
    tau: float,
    T: float,
    t0: float = 0.0,
    path_sign: int = +1,
) -> PiecewiseSchedule:
    """Two separated pulses with free precession in between, pre-integrated
    to the exact five-factor sandwich

    ``exp(+i w (t0+tau+T) s3/2) exp(-i w1 tau s1/2) exp(-i (w-w0) T s3/2)
    exp(-i w1 tau s1/2) exp(-i w t0 s3/2)``

    ``path_sign = -1`` flips every sigma3 phase (the second interferometer
    path, where the static field points the other way).
    """
    if tau < 0 or T < 0:
        raise ValueError("tau and T must be non-negative")
    s = float(path_sign)
    if s not in (-1.0, 1.0):
        raise ValueError("path_sign must be +1 or -1")
    segs = (
        (t0, s * (omega / 2.0) * SIGMA3),
        (tau / 2.0, omega1 * SIGMA1),
        (T, s * ((omega - omega0) / 2.0) * SIGMA3),
        (tau / 2.0, omega1 * SIGMA1),
        (t0 + tau + T, -s * (omega / 2.0) * SIGMA3),
    )
    return PiecewiseSchedule(segments=segs)


def evolve_piecewise(schedule: PiecewiseSchedule, psi) -> np.ndarray:
    """Apply the schedule's segment exponentials to ``psi`` in order."""
    v = ket(psi)
    for dur, gen in schedule.segments:
        if gen.shape[0] != v.size:
            raise DimensionMismatchError(
                f"generator dim {gen.shape[0]} != state dim {v.size}"
            )
        v = expm(gen, -1j * dur) @ v
    return v
