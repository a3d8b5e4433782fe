"""Weak values between pre- and post-selected qubit states.

Four forms are provided: the bare weak value, the free-evolved form (which is
placement-independent because the operator commutes with its own evolution),
the left/right pair for a non-commuting operator, and the log-derivative of
the transition amplitude.

Divergent weak values are first-class results: overlaps down to 1e-14 produce
a flagged report rather than an error, since amplification near vanishing
overlap is exactly the regime of interest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchCutError, OrthogonalSelectionError
from .linalg import as_matrix, inner, ket
from .pauli import PauliDecomp

__all__ = [
    "ORTHOGONAL_TOL",
    "AMPLIFICATION_THRESHOLD",
    "SelectionPair",
    "WeakValueReport",
    "weak_value",
    "evolved_weak_value",
    "weak_value_h",
    "weak_value_LR",
    "weak_value_log_derivative",
]

# Below this overlap magnitude a weak value is reported as divergent (error);
# between this and AMPLIFIED_OVERLAP it is returned but flagged.
ORTHOGONAL_TOL = 1e-14
AMPLIFIED_OVERLAP = 1e-8

# |A_w| beyond this marks the report as amplified.
AMPLIFICATION_THRESHOLD = 10.0


@dataclass(frozen=True)
class SelectionPair:
    """Pre-selected state |psi_i> (not necessarily normalized) and
    post-selected state |psi_f> (normalized)."""

    pre: np.ndarray
    post: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pre", ket(self.pre))
        object.__setattr__(self, "post", ket(self.post))
        if self.pre.size != self.post.size:
            raise ValueError("pre and post states must share one dimension")
        pn = float(np.linalg.norm(self.post))
        if abs(pn - 1.0) > 1e-12:
            raise ValueError(f"post state must be normalized, |psi_f| = {pn}")

    @property
    def overlap(self) -> complex:
        """<psi_f | psi_i>."""
        return inner(self.post, self.pre)

    @property
    def overlap_mag(self) -> float:
        return abs(self.overlap)


@dataclass(frozen=True)
class WeakValueReport:
    value: complex
    overlap_mag: float
    amplified: bool


def _report(value: complex, overlap_mag: float) -> WeakValueReport:
    amplified = abs(value) > AMPLIFICATION_THRESHOLD or overlap_mag < AMPLIFIED_OVERLAP
    return WeakValueReport(value=complex(value), overlap_mag=float(overlap_mag), amplified=amplified)


def weak_value(a, sel: SelectionPair) -> WeakValueReport:
    """<psi_f| A |psi_i> / <psi_f | psi_i>."""
    a = as_matrix(a)
    den = sel.overlap
    if abs(den) < ORTHOGONAL_TOL:
        raise OrthogonalSelectionError(
            f"selection overlap {abs(den):.3g} below {ORTHOGONAL_TOL}; weak value divergent",
            overlap_mag=abs(den),
        )
    num = inner(sel.post, a @ sel.pre)
    return _report(num / den, abs(den))


def _evolved_denominator(u: np.ndarray, sel: SelectionPair) -> complex:
    den = inner(sel.post, u @ sel.pre)
    if abs(den) < ORTHOGONAL_TOL:
        raise OrthogonalSelectionError(
            f"post state orthogonal to evolved pre state (|.| = {abs(den):.3g})",
            overlap_mag=abs(den),
        )
    return den


def evolved_weak_value(a, u, sel: SelectionPair) -> WeakValueReport:
    """Left-placed weak value across an evolution:
    <psi_f| A U |psi_i> / <psi_f| U |psi_i>."""
    a = as_matrix(a)
    u = as_matrix(u)
    den = _evolved_denominator(u, sel)
    return _report(inner(sel.post, a @ (u @ sel.pre)) / den, abs(den))


def weak_value_h(d: PauliDecomp, t: float, sel: SelectionPair) -> WeakValueReport:
    """Weak value of sigma_h = n_h . sigma across its own free evolution,
    <psi_f| sigma_h e^{-i H0 t} |psi_i> / <psi_f| e^{-i H0 t} |psi_i>.

    Left and right placements coincide because [sigma_h, H0] = 0; both are
    evaluated and checked against each other.
    """
    u = d.evolution(t)
    sig = d.sigma
    den = _evolved_denominator(u, sel)
    left = inner(sel.post, sig @ (u @ sel.pre)) / den
    right = inner(sel.post, u @ (sig @ sel.pre)) / den
    if abs(left - right) > 1e-10 * max(1.0, abs(left)):
        raise ArithmeticError(
            f"left/right placements disagree ({left} vs {right}); H0 not normal?"
        )
    return _report(left, abs(den))


def weak_value_LR(
    sigma_a, d: PauliDecomp, t: float, sel: SelectionPair
) -> tuple[WeakValueReport, WeakValueReport]:
    """Left and right weak values of a non-commuting operator across the
    free evolution: L = <f|A e^{-iH0 t}|i>/D and R = <f|e^{-iH0 t} A|i>/D."""
    a = as_matrix(sigma_a)
    u = d.evolution(t)
    den = _evolved_denominator(u, sel)
    left = inner(sel.post, a @ (u @ sel.pre)) / den
    right = inner(sel.post, u @ (a @ sel.pre)) / den
    return _report(left, abs(den)), _report(right, abs(den))


def weak_value_log_derivative(
    family: Callable[[float], np.ndarray],
    sel: SelectionPair,
    eps_probe: float = 1e-5,
) -> WeakValueReport:
    """i * d/de ln Amp(e) at e = 0 by central difference of the complex log,
    where Amp(e) = <psi_f| family(e) |psi_i> / sqrt(|<psi_i|psi_i>|).

    For family(e) = e^{-i e A} this converges to the weak value of A at rate
    O(eps_probe^2).  The stencil is rejected if the amplitude's phase jumps
    by more than pi/2 across it (a zero crossing inside the stencil would
    make the log branch ambiguous).
    """
    if not (1e-6 <= eps_probe <= 1e-3):
        raise ValueError("eps_probe must lie in [1e-6, 1e-3]")
    root = np.sqrt(abs(inner(sel.pre, sel.pre)))

    def amp(e: float) -> complex:
        return inner(sel.post, as_matrix(family(e)) @ sel.pre) / root

    a0 = amp(0.0)
    if abs(a0) < ORTHOGONAL_TOL:
        raise OrthogonalSelectionError(
            f"transition amplitude at e=0 is {abs(a0):.3g}; susceptibility undefined",
            overlap_mag=abs(a0),
        )
    ap = amp(+eps_probe)
    am = amp(-eps_probe)
    if min(abs(ap), abs(am)) < ORTHOGONAL_TOL:
        raise BranchCutError("amplitude vanishes inside the stencil")
    ratio = ap / am
    if abs(np.angle(ratio)) > np.pi / 2:
        raise BranchCutError(
            "amplitude phase winds by more than pi/2 across the stencil; "
            "shrink eps_probe or move away from the zero"
        )
    value = 1j * np.log(ratio) / (2.0 * eps_probe)
    return _report(value, abs(a0))
