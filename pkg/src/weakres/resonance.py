"""Rabi and Ramsey resonances in both measurement schemes.

The driven spin is treated in the frame where a detuning tilts the unit-norm
drive axis: the single-pulse generator is ``w1 (cos x s1 + sin x s3)`` with
tilt ``x = (w - w0) / (2 w1)``.  At a pi/2 pulse the surviving population is
exactly ``sin^2(x)``, so the line's logarithmic susceptibility to the
disturbance eps (through ``w0 = w0_bar + eps``) is exactly ``-cot(phi)`` --
the imaginary part of the amplified weak value.  The two-pulse sequence needs
no such frame choice: its three-factor product is already exact.

Indirect counterparts couple the same perturbation to a two-path probe
through the path observable P = |I><I| - |II><II|; the pointer shifts of
P_I and P_IplusII carry Im and Re of the (real, tan/sec-shaped) weak values.

Measurement strengths: delta_rabi = 2 eps t / pi (pinned at the pi/2 pulse)
and delta_ramsey = eps T, so delta_rabi = (2/pi) delta_ramsey at t = T.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .direct import DirectConfig, predict_first_order
from .errors import (
    DegenerateError,
    MultiPeakError,
    NoPeakError,
    OrthogonalSelectionError,
    PostSelectionAnnihilatedError,
    ZeroProbabilityError,
    ZeroVarianceError,
)
from .linalg import exp_su2, inner, ket
from .pauli import (
    MINUS,
    PLUS,
    PauliDecomp,
    HamiltonianPair,
    SIGMA1,
    SIGMA3,
    decompose,
    solve_sigma_a,
)
from .probe import build_two_path, evolve_and_postselect, moments, pointer_shift_measured
from .weakvalue import SelectionPair, weak_value, weak_value_LR

__all__ = [
    "RabiParams",
    "RamseyParams",
    "ResonanceCurve",
    "IndirectShiftReport",
    "DEFAULT_EXTRACTION_PROBE",
    "NEAR_PEAK_PULSE_AREA",
    "rabi_evolution",
    "rabi_prob_exact",
    "rabi_prob_flip",
    "rabi_prob_weak",
    "ramsey_evolution",
    "ramsey_prob_exact",
    "ramsey_prob_flip",
    "ramsey_prob_weak",
    "first_order_valid",
    "rabi_susceptibility",
    "ramsey_susceptibility",
    "rabi_indirect_shifts",
    "ramsey_indirect_shifts",
    "rabi_indirect_extract",
    "ramsey_indirect_extract",
    "sensitivity_compare",
    "scan",
    "fwhm",
]

_HALF_PI = math.pi / 2.0

# Pulse area used for near-peak sensitivity comparisons.  At exactly pi/2 the
# reference probability vanishes and the first-order picture degenerates;
# 0.998 * pi/2 keeps the (2/pi) strength ratio within 0.3% while the weak
# expansion still holds at eps ~ 1e-4.
NEAR_PEAK_PULSE_AREA = 0.998 * _HALF_PI

# Equal-weight path state with a quarter-wave relative phase: Var(P) = 1 and
# <C_{P_IplusII, P}> = -1, so both quadratures of the weak value are readable.
DEFAULT_EXTRACTION_PROBE = np.array([1.0, 1.0j], dtype=np.complex128) / np.sqrt(2.0)
DEFAULT_EXTRACTION_PROBE.setflags(write=False)

#: Default for scan shift columns: maximizes Var(P) = 1.
DEFAULT_SCAN_PROBE = np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)
DEFAULT_SCAN_PROBE.setflags(write=False)


def _sel_state(sign: int) -> np.ndarray:
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    return PLUS if sign == +1 else MINUS


@dataclass(frozen=True)
class RabiParams:
    """Continuously driven spin.  ``omega0 = omega0_bar + epsilon`` where
    epsilon is the small unknown disturbance under measurement."""

    omega0_bar: float
    epsilon: float
    omega: float
    omega1: float
    t: float

    def __post_init__(self):
        if not self.omega1 > 0:
            raise ValueError("omega1 must be positive")
        if self.t < 0:
            raise ValueError("t must be non-negative")

    @property
    def omega0(self) -> float:
        return self.omega0_bar + self.epsilon

    @property
    def phi_rabi(self) -> float:
        return (self.omega - self.omega0_bar) / (2.0 * self.omega1)

    @property
    def delta_rabi(self) -> float:
        return 2.0 * self.epsilon * self.t / math.pi

    @property
    def tilt(self) -> float:
        """Total detuning angle (omega - omega0) / (2 omega1)."""
        return (self.omega - self.omega0) / (2.0 * self.omega1)

    @property
    def pulse_area(self) -> float:
        return self.omega1 * self.t


@dataclass(frozen=True)
class RamseyParams:
    """Two separated pulses (area omega1*tau/2 each) around a free-precession
    window of duration T."""

    omega0_bar: float
    epsilon: float
    omega: float
    omega1: float
    tau: float
    T: float

    def __post_init__(self):
        if not self.omega1 > 0:
            raise ValueError("omega1 must be positive")
        if self.tau < 0 or self.T < 0:
            raise ValueError("tau and T must be non-negative")

    @property
    def omega0(self) -> float:
        return self.omega0_bar + self.epsilon

    @property
    def phi_ramsey(self) -> float:
        return (self.omega - self.omega0_bar) * self.T / 2.0

    @property
    def delta_ramsey(self) -> float:
        return self.epsilon * self.T

    @property
    def beta(self) -> float:
        """Free-precession half-angle (omega - omega0) T / 2."""
        return (self.omega - self.omega0) * self.T / 2.0

    @property
    def pulse_area(self) -> float:
        return self.omega1 * self.tau


# ----------------------------------------------------------------------------
# direct-scheme probabilities


def _tilt_decomp(omega1: float, x: float) -> PauliDecomp:
    return PauliDecomp(h=omega1, n0=0.0, n=np.array([math.cos(x), 0.0, math.sin(x)]))


def rabi_evolution(p: RabiParams) -> np.ndarray:
    """Single-pulse propagator exp(-i w1 t (cos x s1 + sin x s3))."""
    return exp_su2(_tilt_decomp(p.omega1, p.tilt), p.t)


def rabi_prob_exact(p: RabiParams, sign: int = +1) -> float:
    """Survival probability |<s| U |s>|^2 of the driven spin."""
    s = _sel_state(sign)
    return float(abs(inner(s, rabi_evolution(p) @ s)) ** 2)


def rabi_prob_flip(p: RabiParams, sign: int = +1) -> float:
    """Transition probability |<-s| U |s>|^2 (the resonance peak)."""
    s = _sel_state(sign)
    o = _sel_state(-sign)
    return float(abs(inner(o, rabi_evolution(p) @ s)) ** 2)


def ramsey_evolution(p: RamseyParams) -> np.ndarray:
    """Three-factor sandwich: pulse, free precession, pulse."""
    pulse = exp_su2(decompose(SIGMA1), p.omega1 * p.tau / 2.0)
    free = exp_su2(decompose(SIGMA3), p.beta)
    return pulse @ free @ pulse


def ramsey_prob_exact(p: RamseyParams, sign: int = +1) -> float:
    s = _sel_state(sign)
    return float(abs(inner(s, ramsey_evolution(p) @ s)) ** 2)


def ramsey_prob_flip(p: RamseyParams, sign: int = +1) -> float:
    s = _sel_state(sign)
    o = _sel_state(-sign)
    return float(abs(inner(o, ramsey_evolution(p) @ s)) ** 2)


def _weak_line(phi: float, delta: float) -> float:
    """sin^2(phi) * (1 - delta*cot(phi)), written so phi = 0 is total."""
    s = math.sin(phi)
    c = math.cos(phi)
    return s * s - delta * s * c


def _require_half_pi(area: float, what: str):
    if abs(area - _HALF_PI) > 1e-9:
        raise ValueError(
            f"{what} requires a pi/2 pulse (area = {area}); other pulse areas "
            "go through direct.predict_first_order"
        )


def rabi_prob_weak(p: RabiParams) -> float:
    """First-order line sin^2(phi) (1 + delta_rabi * (-cot phi)) at the
    pi/2 pulse.  Continuous (-> 0) at the resonance point phi = 0."""
    _require_half_pi(p.pulse_area, "rabi_prob_weak")
    return _weak_line(p.phi_rabi, p.delta_rabi)


def ramsey_prob_weak(p: RamseyParams) -> float:
    """First-order line sin^2(phi) (1 + delta_ramsey * (-cot phi)) at the
    pi/2 pulse pair."""
    _require_half_pi(p.pulse_area, "ramsey_prob_weak")
    return _weak_line(p.phi_ramsey, p.delta_ramsey)


def first_order_valid(phi: float, delta: float) -> bool:
    """Flag |delta * cot(phi)| < 0.1 marking where the first-order line can
    be trusted relative to Pr(0)."""
    return abs(delta * math.cos(phi)) < 0.1 * abs(math.sin(phi))


# ----------------------------------------------------------------------------
# susceptibility extraction (direct scheme)


@dataclass(frozen=True)
class SusceptibilityReport:
    value: float
    reference: float
    relative_deviation: float


def _finite_diff_susceptibility(prob_of_eps, pr0: float, dstrength_deps: float, step: float) -> float:
    if pr0 <= 1e-12:
        raise ZeroProbabilityError("Pr(0) vanishes at the resonance point")
    return (prob_of_eps(+step) - prob_of_eps(-step)) / (2.0 * step) / dstrength_deps / pr0


def rabi_susceptibility(p: RabiParams, step: float = 1e-5) -> SusceptibilityReport:
    """(1/Pr(0)) dPr/d(delta_rabi) at eps = 0 by central difference; equals
    -cot(phi_rabi) at the pi/2 pulse."""
    base = replace(p, epsilon=0.0)
    value = _finite_diff_susceptibility(
        lambda e: rabi_prob_exact(replace(p, epsilon=e)),
        rabi_prob_exact(base),
        2.0 * p.t / math.pi,
        step,
    )
    ref = -1.0 / math.tan(p.phi_rabi)
    return SusceptibilityReport(value, ref, abs(value - ref) / abs(ref))


def ramsey_susceptibility(p: RamseyParams, step: float = 1e-5) -> SusceptibilityReport:
    """(1/Pr(0)) dPr/d(delta_ramsey) at eps = 0; equals -cot(phi_ramsey) at
    the pi/2 pulse pair."""
    base = replace(p, epsilon=0.0)
    value = _finite_diff_susceptibility(
        lambda e: ramsey_prob_exact(replace(p, epsilon=e)),
        ramsey_prob_exact(base),
        p.T,
        step,
    )
    ref = -1.0 / math.tan(p.phi_ramsey)
    return SusceptibilityReport(value, ref, abs(value - ref) / abs(ref))


# ----------------------------------------------------------------------------
# indirect scheme (two-path probe)


@dataclass(frozen=True)
class IndirectShiftReport:
    """First-order predictions next to exact-evolution measurements for the
    two path observables, plus the weak value that drives them.

    At the divergence point (pi/2 pulse, vanishing reference amplitude) the
    weak value and predictions are NaN while the measured shifts stay exact.
    """

    predicted_dP_I: float
    predicted_dP_IplusII: float
    measured_dP_I: float
    measured_dP_IplusII: float
    weak_value: complex  # (L - R) for the driven spin; sigma_3^W for the pair
    coupling: float  # v/2h, resp. vT

    @property
    def divergent(self) -> bool:
        return math.isnan(self.weak_value.real)


def _check_probe(probe_init: np.ndarray):
    v = ket(probe_init)
    if v.size != 2:
        raise DegenerateError("two-path probe states have dimension 2")
    if min(abs(v[0]), abs(v[1])) < 1e-12 * np.linalg.norm(v):
        warnings.warn(
            "probe_init is (nearly) a path eigenstate: path covariances vanish "
            "and first-order shifts carry no signal",
            stacklevel=3,
        )
    return v


def rabi_indirect_shifts(
    p: RabiParams, probe_init, sign: int = +1
) -> IndirectShiftReport:
    """Path-dependent drive: H0 = w1 s1 on both paths, V = w1 x s3 coupled to
    P.  First-order shifts follow from the left/right pair (+-tan of the
    pulse area); measured values come from the exact 4x4 evolution."""
    psi_p = _check_probe(probe_init)
    s = _sel_state(sign)
    sel = SelectionPair(pre=s, post=s)
    x = p.tilt
    h0 = PauliDecomp(h=p.omega1, n0=0.0, n=np.array([1.0, 0.0, 0.0]))
    sigma_a = solve_sigma_a(h0.n, np.array([0.0, 0.0, 1.0]))
    try:
        left, right = weak_value_LR(sigma_a.matrix, h0, p.t, sel)
        diff = left.value - right.value
    except OrthogonalSelectionError:
        diff = complex(float("nan"), float("nan"))  # divergence point
    coupling = x / 2.0

    probe = build_two_path()
    m_i = moments(psi_p, probe.f_catalog["P_I"], probe.P)
    m_ii = moments(psi_p, probe.f_catalog["P_IplusII"], probe.P)
    pred_i = coupling * (diff.real * m_i.comm_CFP + 2.0 * diff.imag * m_i.cov_PF)
    pred_ii = coupling * (diff.real * m_ii.comm_CFP + 2.0 * diff.imag * m_ii.cov_PF)

    c = evolve_and_postselect(
        h0.matrix(), p.omega1 * x * SIGMA3, probe, p.t, sel, psi_p
    )
    meas_i = pointer_shift_measured(c, probe.f_catalog["P_I"])
    meas_ii = pointer_shift_measured(c, probe.f_catalog["P_IplusII"])
    return IndirectShiftReport(pred_i, pred_ii, meas_i, meas_ii, diff, coupling)


def _ramsey_effective_sel(p: RamseyParams, sign: int) -> SelectionPair:
    s = _sel_state(sign)
    half_pulse = exp_su2(decompose(SIGMA1), p.omega1 * p.tau / 2.0)
    return SelectionPair(pre=half_pulse @ s, post=half_pulse.conj().T @ s)


def ramsey_indirect_shifts(
    p: RamseyParams, probe_init, sign: int = +1
) -> IndirectShiftReport:
    """Path-dependent free precession between shared pulses: the pulses dress
    the selection, V = ((w - w0)/2) s3 couples to P for a time T, and the
    weak value is sigma_3^W = +-1/cos(pulse area)."""
    psi_p = _check_probe(probe_init)
    sel = _ramsey_effective_sel(p, sign)
    try:
        w3 = weak_value(SIGMA3, sel).value
    except OrthogonalSelectionError:
        w3 = complex(float("nan"), float("nan"))  # divergence point
    coupling = p.beta  # v T

    probe = build_two_path()
    m_i = moments(psi_p, probe.f_catalog["P_I"], probe.P)
    m_ii = moments(psi_p, probe.f_catalog["P_IplusII"], probe.P)
    pred_i = coupling * (w3.real * m_i.comm_CFP + 2.0 * w3.imag * m_i.cov_PF)
    pred_ii = coupling * (w3.real * m_ii.comm_CFP + 2.0 * w3.imag * m_ii.cov_PF)

    zero = np.zeros((2, 2), dtype=np.complex128)
    c = evolve_and_postselect(
        zero, ((p.omega - p.omega0) / 2.0) * SIGMA3, probe, p.T, sel, psi_p
    )
    meas_i = pointer_shift_measured(c, probe.f_catalog["P_I"])
    meas_ii = pointer_shift_measured(c, probe.f_catalog["P_IplusII"])
    return IndirectShiftReport(pred_i, pred_ii, meas_i, meas_ii, w3, coupling)


@dataclass(frozen=True)
class IndirectExtraction:
    recovered: complex
    reference: float
    relative_deviation: float


def _shift_slopes(shift_at, step: float) -> tuple[float, float]:
    """d(dP_I)/dk and d(dP_IplusII)/dk at k = 0 by central difference."""
    rep_p = shift_at(+step)
    rep_m = shift_at(-step)
    d_i = (rep_p.measured_dP_I - rep_m.measured_dP_I) / (2.0 * step)
    d_ii = (rep_p.measured_dP_IplusII - rep_m.measured_dP_IplusII) / (2.0 * step)
    return d_i, d_ii


def _invert_slopes(d_i, d_ii, m_i, m_ii) -> complex:
    if abs(m_i.cov_PF) < 1e-14:
        raise ZeroVarianceError("Cov(P, P_I) vanishes for this probe state")
    if abs(m_ii.comm_CFP) < 1e-14:
        raise ZeroVarianceError(
            "<C_{P_IplusII,P}> vanishes for this probe state; use a probe with a "
            "relative path phase (e.g. (|I> + i|II>)/sqrt(2))"
        )
    im = d_i / (2.0 * m_i.cov_PF)
    re = (d_ii - (m_ii.cov_PF / m_i.cov_PF) * d_i) / m_ii.comm_CFP
    return complex(re, im)


def rabi_indirect_extract(
    p: RabiParams, probe_init=None, sign: int = +1, step: float = 1e-4
) -> IndirectExtraction:
    """Recover the driven spin's weak value +-tan(w1 t) from path-observable
    susceptibilities, scanning the coupling k = v/2h = x/2 through eps."""
    psi_p = ket(DEFAULT_EXTRACTION_PROBE if probe_init is None else probe_init)
    probe = build_two_path()
    m_i = moments(psi_p, probe.f_catalog["P_I"], probe.P)
    m_ii = moments(psi_p, probe.f_catalog["P_IplusII"], probe.P)

    def shift_at(k: float) -> IndirectShiftReport:
        # x = 2k; at omega = omega0_bar the tilt is -eps/(2 w1) => eps = -4 w1 k
        q = replace(p, omega=p.omega0_bar, epsilon=-4.0 * p.omega1 * k)
        return rabi_indirect_shifts(q, psi_p, sign)

    d_i, d_ii = _shift_slopes(shift_at, step)
    diff = _invert_slopes(d_i, d_ii, m_i, m_ii)
    recovered = diff / 2.0  # L = -R, so L = (L - R)/2
    ref = float(sign) * math.tan(p.omega1 * p.t)
    return IndirectExtraction(recovered, ref, abs(recovered - ref) / abs(ref))


def ramsey_indirect_extract(
    p: RamseyParams, probe_init=None, sign: int = +1, step: float = 1e-4
) -> IndirectExtraction:
    """Recover sigma_3^W = +-1/cos(w1 tau) from path-observable
    susceptibilities, scanning the coupling k = vT = beta through eps."""
    psi_p = ket(DEFAULT_EXTRACTION_PROBE if probe_init is None else probe_init)
    probe = build_two_path()
    m_i = moments(psi_p, probe.f_catalog["P_I"], probe.P)
    m_ii = moments(psi_p, probe.f_catalog["P_IplusII"], probe.P)

    def shift_at(k: float) -> IndirectShiftReport:
        # beta = -eps T/2 at omega = omega0_bar => eps = -2k/T
        q = replace(p, omega=p.omega0_bar, epsilon=-2.0 * k / p.T)
        return ramsey_indirect_shifts(q, psi_p, sign)

    d_i, d_ii = _shift_slopes(shift_at, step)
    recovered = _invert_slopes(d_i, d_ii, m_i, m_ii)
    ref = float(sign) / math.cos(p.omega1 * p.tau)
    return IndirectExtraction(recovered, ref, abs(recovered - ref) / abs(ref))


def sensitivity_compare(
    t: float, T: float, epsilon: float, pulse_area: float = NEAR_PEAK_PULSE_AREA
) -> tuple[float, float]:
    """Strength ratio delta_rabi/delta_ramsey = 2t/(pi T) next to the ratio
    of near-peak indirect shifts of P_IplusII.

    The shift ratio uses the antisymmetrized shifts at +-epsilon (identical
    to a shift ratio at epsilon up to even-order terms, which it removes)
    with both pulse areas at ``pulse_area`` just below pi/2.
    """
    if not (t > 0 and T > 0):
        raise ValueError("t and T must be positive")
    ratio_strengths = 2.0 * t / (math.pi * T)
    probe = DEFAULT_EXTRACTION_PROBE
    w1 = pulse_area / t  # same pulse area for both sequences (tau = t)

    def rabi_shift(e: float) -> float:
        p = RabiParams(omega0_bar=1.0, epsilon=e, omega=1.0, omega1=w1, t=t)
        return rabi_indirect_shifts(p, probe).measured_dP_IplusII

    def ramsey_shift(e: float) -> float:
        p = RamseyParams(omega0_bar=1.0, epsilon=e, omega=1.0, omega1=w1, tau=t, T=T)
        return ramsey_indirect_shifts(p, probe).measured_dP_IplusII

    num = rabi_shift(+epsilon) - rabi_shift(-epsilon)
    den = ramsey_shift(+epsilon) - ramsey_shift(-epsilon)
    if abs(den) < 1e-300:
        raise ZeroProbabilityError("Ramsey shift vanished; cannot form the ratio")
    return ratio_strengths, num / den


# ----------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ResonanceCurve:
    """Scan rows ordered by strictly increasing omega."""

    omegas: np.ndarray
    pr_exact: np.ndarray
    pr_first_order: np.ndarray
    first_order_valid: np.ndarray
    dP_I: np.ndarray | None = None
    dP_IplusII: np.ndarray | None = None
    scheme: str = "direct"
    scenario: str = "rabi"

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        if om.size == 0:
            raise DegenerateError("scan grid is empty")
        if om.size > 1 and not np.all(np.diff(om) > 0):
            raise ValueError("scan grid must be strictly increasing")
        object.__setattr__(self, "omegas", om)

    def column(self, name: str) -> np.ndarray:
        col = getattr(self, name, None)
        if col is None:
            raise KeyError(f"curve has no column {name!r}")
        return np.asarray(col)

    @property
    def columns(self) -> list[str]:
        cols = ["omega", "pr_exact", "pr_first_order"]
        if self.dP_I is not None:
            cols += ["dP_I", "dP_IplusII"]
        return cols

    def rows(self):
        for k in range(self.omegas.size):
            row = [self.omegas[k], float(self.pr_exact[k]), float(self.pr_first_order[k])]
            if self.dP_I is not None:
                row += [float(self.dP_I[k]), float(self.dP_IplusII[k])]
            yield row


def _thread_count() -> int:
    raw = os.environ.get("WEAKRES_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n == 0:
        n = os.cpu_count() or 1
    return max(1, n)


def _ordered_map(fn, items):
    n = _thread_count()
    items = list(items)
    if n <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _rabi_first_order(p: RabiParams, sign: int) -> float:
    if abs(p.pulse_area - _HALF_PI) <= 1e-9:
        return rabi_prob_weak(p)
    if p.epsilon == 0.0:
        return rabi_prob_exact(replace(p, epsilon=0.0), sign)
    # general pulse area: linearize the tilted generator around eps = 0 and
    # hand it to the generic first-order evaluator
    phi = p.phi_rabi
    delta = -p.epsilon / (2.0 * p.omega1)
    h0 = _tilt_decomp(p.omega1, phi)
    v = PauliDecomp(
        h=p.omega1 * abs(delta),
        n0=0.0,
        n=math.copysign(1.0, delta) * np.array([-math.sin(phi), 0.0, math.cos(phi)]),
    )
    s = _sel_state(sign)
    cfg = DirectConfig(
        pair=HamiltonianPair(H0=h0, V=v),
        t=p.t,
        sel=SelectionPair(pre=s, post=s),
        coupling=p.omega1 * abs(delta) * p.t,
    )
    return predict_first_order(cfg)


def _ramsey_first_order(p: RamseyParams, sign: int) -> float:
    if abs(p.pulse_area - _HALF_PI) <= 1e-9:
        return ramsey_prob_weak(p)
    if p.epsilon == 0.0:
        return ramsey_prob_exact(replace(p, epsilon=0.0), sign)
    # pulse-dressed selection with the eps = 0 precession folded into the
    # pre state, leaving V = -(eps/2) s3 as the whole perturbation
    sel = _ramsey_effective_sel(p, sign)
    beta0 = (p.omega - p.omega0_bar) * p.T / 2.0
    pre = exp_su2(decompose(SIGMA3), beta0) @ sel.pre
    sel = SelectionPair(pre=pre, post=sel.post)
    v = decompose(-0.5 * SIGMA3 * math.copysign(1.0, p.epsilon))
    cfg = DirectConfig(
        pair=HamiltonianPair(H0=None, V=v),
        t=p.T,
        sel=sel,
        coupling=abs(p.epsilon) * p.T / 2.0,
    )
    return predict_first_order(cfg)


def scan(
    scheme: str,
    scenario: str,
    template,
    omegas,
    probe_init=None,
    sign: int = +1,
) -> ResonanceCurve:
    """Sweep omega over a strictly increasing grid.

    Direct scans fill the exact and first-order probability columns; indirect
    scans additionally fill the measured path-observable shifts.  Grid points
    where post-selection annihilates the probe (the exact peak of a pi/2-pulse
    line) get NaN shifts rather than failing the whole sweep.
    """
    if scheme not in ("direct", "indirect"):
        raise ValueError("scheme must be 'direct' or 'indirect'")
    if scenario not in ("rabi", "ramsey"):
        raise ValueError("scenario must be 'rabi' or 'ramsey'")
    is_rabi = scenario == "rabi"
    wanted = RabiParams if is_rabi else RamseyParams
    if not isinstance(template, wanted):
        raise ValueError(f"{scenario} scan needs a {wanted.__name__} template")
    om = np.asarray(list(omegas), dtype=float)
    probe = ket(probe_init) if probe_init is not None else DEFAULT_SCAN_PROBE

    def one(omega: float):
        p = replace(template, omega=float(omega))
        if is_rabi:
            pr = rabi_prob_exact(p, sign)
            first = _rabi_first_order(p, sign)
            valid = first_order_valid(p.phi_rabi, p.delta_rabi)
        else:
            pr = ramsey_prob_exact(p, sign)
            first = _ramsey_first_order(p, sign)
            valid = first_order_valid(p.phi_ramsey, p.delta_ramsey)
        if scheme == "indirect":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                try:
                    rep = (
                        rabi_indirect_shifts(p, probe, sign)
                        if is_rabi
                        else ramsey_indirect_shifts(p, probe, sign)
                    )
                    shifts = (rep.measured_dP_I, rep.measured_dP_IplusII)
                except PostSelectionAnnihilatedError:
                    shifts = (float("nan"), float("nan"))
            return pr, first, valid, shifts[0], shifts[1]
        return pr, first, valid, None, None

    rows = _ordered_map(one, om)
    pr = np.array([r[0] for r in rows])
    first = np.array([r[1] for r in rows])
    valid = np.array([r[2] for r in rows], dtype=bool)
    if scheme == "indirect":
        dpi = np.array([r[3] for r in rows])
        dpii = np.array([r[4] for r in rows])
    else:
        dpi = dpii = None
    return ResonanceCurve(
        omegas=om,
        pr_exact=pr,
        pr_first_order=first,
        first_order_valid=valid,
        dP_I=dpi,
        dP_IplusII=dpii,
        scheme=scheme,
        scenario=scenario,
    )


def fwhm(curve: ResonanceCurve, column: str = "pr_exact") -> float:
    """Full width at half maximum of the flipped population 1 - Pr read from
    ``column``, by linear interpolation between bracketing grid points.

    Raises :class:`NoPeakError` if the peak is at the window edge or the half
    level is not reached, :class:`MultiPeakError` if side lobes rise back
    above half maximum inside the window.
    """
    y = curve.column(column)
    if column.startswith("pr"):
        y = 1.0 - y
    x = curve.omegas
    if y.size < 3:
        raise NoPeakError("need at least 3 grid points")
    k = int(np.argmax(y))
    if k in (0, y.size - 1):
        raise NoPeakError("peak sits on the window edge")
    half = y[k] / 2.0

    def crossing(direction: int) -> float:
        j = k
        while 0 <= j + direction < y.size and y[j + direction] > half:
            j += direction
        j2 = j + direction
        if j2 < 0 or j2 >= y.size:
            raise NoPeakError("half level not reached inside the window")
        # linear interpolation between j and j2; a flat segment sitting
        # exactly at the half level counts as crossing at its far end
        x0, x1 = x[j], x[j2]
        y0, y1 = y[j], y[j2]
        xc = x1 if y1 == y0 else x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        # anything beyond must stay below half, else there are side lobes
        rest = y[j2 + direction :: direction] if direction > 0 else y[: max(j2, 0)]
        if rest.size and np.any(rest > half):
            raise MultiPeakError(
                "side lobes above half maximum; narrow the scan window"
            )
        return float(xc)

    left = crossing(-1)
    right = crossing(+1)
    return right - left
