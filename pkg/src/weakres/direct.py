"""Direct measurement: transition probabilities and what they reveal.

The effective coupling is eps = (strength of V) * t; a run evolves with
``H0 + (eps / t) * W`` where ``W = n0_v + sigma_v`` is the unit-strength
interaction operator.  Complex eps makes the generator non-Hermitian (the
imaginary part feeds a decay-like channel), in which case probabilities may
exceed 1 and are reported raw.

First-order predictions combine the free-evolved weak value of sigma_v (or
sigma_h) with the left/right pair of sigma_a; both reduce to the plain weak
value when the free part vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ParallelFieldsError, ScanError, ZeroProbabilityError
from .linalg import expm, inner
from .pauli import HamiltonianPair, sigma_dot, solve_sigma_a
from .weakvalue import (
    SelectionPair,
    evolved_weak_value,
    weak_value,
    weak_value_h,
    weak_value_LR,
)

__all__ = [
    "DirectConfig",
    "TransitionResult",
    "transition_exact",
    "predict_first_order",
    "extract_im_weak_value",
    "extract_complex_weak_value",
]


@dataclass(frozen=True)
class DirectConfig:
    """One direct-measurement run.

    ``coupling`` is the effective eps = g*t; a nonzero imaginary part labels
    the run non-Hermitian.
    """

    pair: HamiltonianPair
    t: float
    sel: SelectionPair
    coupling: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "coupling", complex(self.coupling))
        if not (self.t >= 0.0 and math.isfinite(self.t)):
            raise ValueError("t must be finite and non-negative")

    @property
    def is_non_hermitian(self) -> bool:
        return self.coupling.imag != 0.0

    def interaction_unit(self) -> np.ndarray:
        """W = n0_v + sigma_v (the interaction with its strength divided out)."""
        v = self.pair.V
        return v.matrix() / v.h

    def with_coupling(self, coupling: complex) -> "DirectConfig":
        return DirectConfig(pair=self.pair, t=self.t, sel=self.sel, coupling=coupling)


@dataclass(frozen=True)
class TransitionResult:
    """Amplitude and probability of the post-selected transition.

    ``amplitude`` carries the 1/sqrt(|<psi_i|psi_i>|) normalization, so
    ``probability = |amplitude|^2`` for any pre-state normalization.
    """

    amplitude: complex
    probability: float
    probability_zero_coupling: float


def _amplitude(cfg: DirectConfig, coupling: complex) -> complex:
    gen = cfg.t * cfg.pair.h0_matrix() + coupling * cfg.interaction_unit()
    u = expm(gen, -1j)
    root = np.sqrt(abs(inner(cfg.sel.pre, cfg.sel.pre)))
    return inner(cfg.sel.post, u @ cfg.sel.pre) / root


def transition_exact(cfg: DirectConfig) -> TransitionResult:
    """Exact amplitude <psi_f| exp(-i (H0 t + eps W)) |psi_i> / sqrt(|<i|i>|)
    and the matching probability, plus the coupling-off reference."""
    amp = _amplitude(cfg, cfg.coupling)
    amp0 = _amplitude(cfg, 0.0)
    return TransitionResult(
        amplitude=amp,
        probability=float(abs(amp) ** 2),
        probability_zero_coupling=float(abs(amp0) ** 2),
    )


def predict_first_order(cfg: DirectConfig) -> float:
    """First-order transition probability,

    Pr(0) * exp(2 eps Im n0_v) * [1 + 2 eps Im(r * shW) + (eps/(t h)) Im(L - R)]

    with r = (nh.nv)/(nh.nh) bilinear; the parallel (commutative) case
    collapses the bracket to 1 + 2 eps Im(svW).  Exact at the level of the
    eps-derivative, so the residual against :func:`transition_exact` is
    O(eps^2).
    """
    if cfg.coupling.imag != 0.0:
        raise ValueError("first-order prediction takes a real coupling")
    eps = cfg.coupling.real
    h0 = cfg.pair.H0
    v = cfg.pair.V
    amp0 = _amplitude(cfg, 0.0)
    pr0 = float(abs(amp0) ** 2)

    commutative = h0 is None or h0.direction_undetermined
    sigma_a = None
    if not commutative:
        try:
            sigma_a = solve_sigma_a(h0.n, v.n)
        except ParallelFieldsError:
            commutative = True

    prefactor = math.exp(2.0 * eps * v.n0.imag)
    if commutative:
        if h0 is None:
            svw = weak_value(v.sigma, cfg.sel).value
        else:
            # sigma_v across the (commuting) free evolution
            svw = evolved_weak_value(sigma_dot(v.n), h0.evolution(cfg.t), cfg.sel).value
        bracket = 1.0 + 2.0 * eps * svw.imag
    else:
        r = complex(np.dot(h0.n, v.n)) / complex(np.dot(h0.n, h0.n))
        shw = weak_value_h(h0, cfg.t, cfg.sel).value
        left, right = weak_value_LR(sigma_a.matrix, h0, cfg.t, cfg.sel)
        if cfg.t <= 0.0:
            raise DegenerateError("non-commutative first-order form needs t > 0")
        bracket = (
            1.0
            + 2.0 * eps * (r.imag * shw.real + r.real * shw.imag)
            + (eps / (cfg.t * h0.h)) * (left.value.imag - right.value.imag)
        )
    return pr0 * prefactor * bracket


def _central_log_slope(scan: list[tuple[float, float]]) -> float:
    """(1/2) d ln Pr / d eps at 0 from the innermost symmetric pair."""
    pts = sorted(((float(e), float(p)) for e, p in scan), key=lambda ep: ep[0])
    if len(pts) < 3:
        raise ScanError("scan needs at least 3 points")
    eps = [e for e, _ in pts]
    by_eps = dict(pts)
    if 0.0 not in by_eps:
        raise ScanError("scan must contain the zero-coupling point")
    if by_eps[0.0] <= 1e-12:
        raise ZeroProbabilityError(
            "Pr(0) vanishes (resonance point); susceptibility undefined"
        )
    pos = [e for e in eps if e > 0]
    pairs = [e for e in pos if -e in by_eps]
    if not pairs:
        raise ScanError("scan is not symmetric around zero")
    e = min(pairs)
    p_plus, p_minus = by_eps[e], by_eps[-e]
    if p_plus <= 0 or p_minus <= 0:
        raise ZeroProbabilityError("probability vanishes inside the stencil")
    return 0.5 * (math.log(p_plus) - math.log(p_minus)) / (2.0 * e)


def extract_im_weak_value(scan: list[tuple[float, float]]) -> float:
    """Im A_w = (1/2) d ln Pr / d eps at eps = 0 by central difference over a
    symmetric (coupling, probability) scan."""
    return _central_log_slope(scan)


def extract_complex_weak_value(
    scan_r: list[tuple[float, float]], scan_i: list[tuple[float, float]]
) -> complex:
    """Recover the full weak value from two scans: the real-coupling scan
    yields Im A_w, the imaginary-coupling (non-Hermitian) scan yields Re A_w.
    ``scan_i`` rows are (eps_i, Pr) with eps_i the imaginary part."""
    im = _central_log_slope(scan_r)
    re = _central_log_slope(scan_i)
    return complex(re, im)
