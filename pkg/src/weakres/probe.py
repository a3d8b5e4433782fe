"""Indirect measurement with an explicit probe.

The combined system evolves under ``H0 x I + V x P``; post-selecting the
qubit leaves a (non-normalized) probe state whose pointer shifts encode the
weak values.  Probes are finite-dimensional: a two-path space or a truncated
oscillator whose [Q, P] = i holds on all interior matrix elements (the
corner anomaly at the top Fock state is recorded in the model metadata).

The unified-framework operations re-express post-selected probe expectations
as plain expectations of E_f x F on the combined state, which is what makes
the direct scheme a special case (F = identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    PostSelectionAnnihilatedError,
    ZeroVarianceError,
)
from .linalg import as_matrix, dagger, expm, inner, ket, kron
from .pauli import HamiltonianPair, sigma_dot, solve_sigma_a
from .errors import ParallelFieldsError
from .weakvalue import SelectionPair, evolved_weak_value, weak_value, weak_value_LR

__all__ = [
    "POST_SELECTION_FLOOR",
    "ProbeModel",
    "CombinedState",
    "MomentReport",
    "build_two_path",
    "build_truncated_oscillator",
    "moments",
    "evolve_and_postselect",
    "pointer_shift_measured",
    "predict_shift_general",
    "predict_shift_P",
    "predict_shift_Q",
    "extract_weak_value_from_shifts",
    "unified_expectation",
]

# Post-selected probe norms below this count as annihilated.
POST_SELECTION_FLOOR = 1e-20


@dataclass(frozen=True)
class ProbeModel:
    """A finite-dimensional pointer: its coupling observable P, optionally a
    conjugate Q, and a catalog of named readout observables."""

    kind: str
    dim: int
    P: np.ndarray
    Q: np.ndarray | None = None
    f_catalog: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "P", as_matrix(self.P))
        if self.Q is not None:
            object.__setattr__(self, "Q", as_matrix(self.Q))
        for name, op in (("P", self.P), ("Q", self.Q)):
            if op is None:
                continue
            dev = float(np.max(np.abs(op - dagger(op))))
            if dev > 1e-12:
                raise ValueError(f"probe observable {name} not Hermitian (dev {dev:.2g})")


def build_two_path() -> ProbeModel:
    """Two-path probe spanned by |I>, |II> with pointer P = |I><I| - |II><II|.

    There is no conjugate Q in dimension 2; real-part readout goes through
    the projector P_IplusII = |I+II><I+II| whose commutator with P is the
    nonzero channel.
    """
    p_i = np.diag([1.0, 0.0]).astype(np.complex128)
    p_ii = np.diag([0.0, 1.0]).astype(np.complex128)
    p = p_i - p_ii
    p_iplusii = 0.5 * np.ones((2, 2), dtype=np.complex128)
    return ProbeModel(
        kind="two_path",
        dim=2,
        P=p,
        Q=None,
        f_catalog={
            "P": p,
            "P_I": p_i,
            "P_II": p_ii,
            "P_IplusII": p_iplusii,
            "I": np.eye(2, dtype=np.complex128),
        },
    )


def build_truncated_oscillator(dim: int) -> ProbeModel:
    """Truncated Fock-space pointer with Q = (a + a')/sqrt2, P = i(a' - a)/sqrt2.

    [Q, P] = i holds exactly on |m>, |n> with m, n <= dim-2; the top corner
    carries <dim-1|[Q,P]|dim-1> = i(1 - dim), recorded in the metadata.
    """
    if not (4 <= dim <= 32):
        raise ValueError(f"oscillator dim must be in [4, 32], got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(np.complex128)
    adag = a.conj().T
    q = (a + adag) / np.sqrt(2.0)
    p = 1j * (adag - a) / np.sqrt(2.0)
    comm = q @ p - p @ q
    interior = comm[: dim - 1, : dim - 1] - 1j * np.eye(dim - 1)
    meta = {
        "commutator_interior_dev": float(np.max(np.abs(interior))),
        "commutator_corner": complex(comm[dim - 1, dim - 1]),
    }
    return ProbeModel(
        kind="oscillator",
        dim=dim,
        P=p,
        Q=q,
        f_catalog={"P": p, "Q": q, "N": adag @ a, "I": np.eye(dim, dtype=np.complex128)},
        metadata=meta,
    )


def ground_state(probe: ProbeModel) -> np.ndarray:
    """|0> for an oscillator probe; the equal superposition for two paths."""
    if probe.kind == "oscillator":
        v = np.zeros(probe.dim, dtype=np.complex128)
        v[0] = 1.0
        return v
    return np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True)
class MomentReport:
    """First and second moments of (F, P) in a probe state."""

    mean_F: float
    mean_P: float
    var_P: float
    cov_PF: float
    comm_CFP: float
    anticomm_AFP: float


def _expect(state: np.ndarray, op: np.ndarray, nrm2: float) -> complex:
    return inner(state, op @ state) / nrm2


def moments(state, F, P) -> MomentReport:
    """Moments entering the pointer-shift formulas: means, Var(P),
    Cov(P, F) = <{P,F}>/2 - <P><F>, <C_FP> with C_FP = -i[F, P], and <{P,F}>.

    F and P are assumed Hermitian; expectations are taken as real parts."""
    s = ket(state)
    F = as_matrix(F)
    P = as_matrix(P)
    nrm2 = abs(inner(s, s))
    if nrm2 <= 0.0:
        raise ZeroVarianceError("zero state has no moments")
    mean_f = _expect(s, F, nrm2).real
    mean_p = _expect(s, P, nrm2).real
    var_p = _expect(s, P @ P, nrm2).real - mean_p**2
    anti = _expect(s, P @ F + F @ P, nrm2).real
    cov = 0.5 * anti - mean_p * mean_f
    comm = _expect(s, -1j * (F @ P - P @ F), nrm2).real
    return MomentReport(
        mean_F=mean_f,
        mean_P=mean_p,
        var_P=var_p,
        cov_PF=cov,
        comm_CFP=comm,
        anticomm_AFP=anti,
    )


@dataclass(frozen=True)
class CombinedState:
    """System x probe state before/after evolution, plus the post-selected
    (non-normalized) probe state and the probe's initial state."""

    lambda_i: np.ndarray
    lambda_f: np.ndarray
    psi_f_probe: np.ndarray
    psi_i_probe: np.ndarray
    post: np.ndarray  # the post-selected qubit state used for projection

    @property
    def probe_dim(self) -> int:
        return self.psi_f_probe.size


def evolve_and_postselect(
    H0, V, probe: ProbeModel, t: float, sel: SelectionPair, probe_init
) -> CombinedState:
    """Evolve |psi_i x Psi_i> under H0 x I + V x P for time t, then project
    the qubit factor on <psi_f|."""
    H0 = as_matrix(H0)
    V = as_matrix(V)
    if H0.shape != (2, 2) or V.shape != (2, 2):
        raise DimensionMismatchError("H0 and V must be 2x2 system operators")
    psi_init = ket(probe_init)
    if psi_init.size != probe.dim:
        raise DimensionMismatchError(
            f"probe_init dim {psi_init.size} != probe dim {probe.dim}"
        )
    eye_p = np.eye(probe.dim, dtype=np.complex128)
    h = kron(H0, eye_p) + kron(V, probe.P)
    lam_i = np.kron(sel.pre, psi_init)
    lam_f = expm(h, -1j * t) @ lam_i
    psi_f_probe = sel.post.conj() @ lam_f.reshape(2, probe.dim)
    return CombinedState(
        lambda_i=lam_i,
        lambda_f=lam_f,
        psi_f_probe=psi_f_probe,
        psi_i_probe=psi_init,
        post=sel.post,
    )


def pointer_shift_measured(c: CombinedState, F) -> float:
    """<F>_f - <F>_i across evolution plus post-selection."""
    F = as_matrix(F)
    nf = abs(inner(c.psi_f_probe, c.psi_f_probe))
    if nf <= POST_SELECTION_FLOOR:
        raise PostSelectionAnnihilatedError(
            f"post-selected probe norm^2 = {nf:.3g} below floor"
        )
    ni = abs(inner(c.psi_i_probe, c.psi_i_probe))
    mean_f_final = (inner(c.psi_f_probe, F @ c.psi_f_probe) / nf).real
    mean_f_init = (inner(c.psi_i_probe, F @ c.psi_i_probe) / ni).real
    return mean_f_final - mean_f_init


def _weak_factor(pair: HamiltonianPair, t: float, sel: SelectionPair) -> complex:
    """vt*(n0_v + r*shW) + (v/2h)*(L - R): the complex factor multiplying the
    probe response in the first-order shift formulas."""
    v = pair.V
    h0 = pair.H0
    if h0 is None or h0.direction_undetermined:
        svw = (
            weak_value(sigma_dot(v.n), sel).value
            if h0 is None
            else evolved_weak_value(sigma_dot(v.n), h0.evolution(t), sel).value
        )
        return v.h * t * (v.n0 + svw)
    try:
        sigma_a = solve_sigma_a(h0.n, v.n)
    except ParallelFieldsError:
        svw = evolved_weak_value(sigma_dot(v.n), h0.evolution(t), sel).value
        return v.h * t * (v.n0 + svw)
    r = complex(np.dot(h0.n, v.n)) / complex(np.dot(h0.n, h0.n))
    shw = evolved_weak_value(sigma_dot(h0.n), h0.evolution(t), sel).value
    left, right = weak_value_LR(sigma_a.matrix, h0, t, sel)
    return v.h * t * (v.n0 + r * shw) + (v.h / (2.0 * h0.h)) * (
        left.value - right.value
    )


def predict_shift_general(
    pair: HamiltonianPair, t: float, sel: SelectionPair, m: MomentReport
) -> float:
    """First-order pointer shift

    Delta F = Re(W) <C_FP>_i + 2 Im(W) Cov(F, P)_i,

    with W = vt (n0_v + r shW) + (v/2h)(L - R); reduces to the textbook
    gt (Re A_w <C_FP> + 2 Im A_w Cov(P,F)) when H0 = 0.
    """
    w = _weak_factor(pair, t, sel)
    return w.real * m.comm_CFP + 2.0 * w.imag * m.cov_PF


def predict_shift_P(
    pair: HamiltonianPair, t: float, sel: SelectionPair, m: MomentReport
) -> float:
    """Specialization F = P (``m`` from ``moments(state, P, P)``):
    Delta P = 2 Im(W) Var(P)_i."""
    w = _weak_factor(pair, t, sel)
    return 2.0 * w.imag * m.var_P


def predict_shift_Q(
    pair: HamiltonianPair, t: float, sel: SelectionPair, m: MomentReport
) -> float:
    """Specialization F = Q conjugate to P (``m`` from ``moments(state, Q, P)``):
    Delta Q = Re(W) <C_QP> + 2 Im(W) Cov(P, Q), with <C_QP> = 1 away from
    the truncation corner."""
    return predict_shift_general(pair, t, sel, m)


def extract_weak_value_from_shifts(
    dP: float, dQ: float, m: MomentReport, strength: float, branch: str = "commutative"
) -> complex:
    """Invert the two pointer shifts for the weak value:

    Im = dP / (2 * strength * Var(P)),
    Re = dQ / strength - (Cov(P,Q)/Var(P)) * dP / strength.

    ``m`` must be the moments of (F=Q, P) in the initial probe state.  For
    ``branch='noncommutative'`` the result is the left-right difference
    (L - R) and ``strength`` is v/2h; for the commutative branch it is the
    evolved weak value and ``strength`` is vt.
    """
    if branch not in ("commutative", "noncommutative"):
        raise ValueError("branch must be 'commutative' or 'noncommutative'")
    if not strength > 0:
        raise ValueError("strength must be positive")
    if m.var_P <= 1e-14:
        raise ZeroVarianceError("Var(P) vanishes; pointer carries no signal")
    im = dP / (2.0 * strength * m.var_P)
    re = dQ / strength - (m.cov_PF / m.var_P) * (dP / strength)
    return complex(re, im)


def unified_expectation(c: CombinedState, F, sel: SelectionPair) -> tuple[float, float]:
    """Expectation of E_f x F on the evolved combined state.

    Returns ``(raw, ratio)`` where raw = <L_f|E_f x F|L_f>/<L_f|L_f> and
    ratio = raw / <E_f x I>_f; the ratio equals the post-selected probe
    expectation <F>_f exactly.
    """
    F = as_matrix(F)
    e_f = np.outer(sel.post, sel.post.conj())
    pd = c.probe_dim
    big_f = kron(e_f, F)
    nrm = abs(inner(c.lambda_f, c.lambda_f))
    raw = (inner(c.lambda_f, big_f @ c.lambda_f) / nrm).real
    sel_weight = (
        inner(c.lambda_f, kron(e_f, np.eye(pd, dtype=np.complex128)) @ c.lambda_f) / nrm
    ).real
    if sel_weight * nrm <= POST_SELECTION_FLOOR:
        raise PostSelectionAnnihilatedError("post-selected weight below floor")
    return raw, raw / sel_weight
