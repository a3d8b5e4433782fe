"""Invariant suite behind ``weakres verify``.

Each check returns a measured residual compared against a pinned tolerance;
the strict profile tightens every tolerance tenfold.  Checks are seeded and
deterministic.  A deliberately perturbed su(2) exponential (see
``WEAKRES_MUTATE_SU2`` in :mod:`weakres.linalg`) must make the suite fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .direct import DirectConfig, predict_first_order, transition_exact
from .errors import WeakresError
from .linalg import dagger, exp_su2, expm, inner, kron
from .pauli import (
    SIGMA3,
    HamiltonianPair,
    PauliDecomp,
    decompose,
    ramsey_schedule,
    sigma_dot,
    solve_sigma_a,
)
from .probe import (
    ProbeModel,
    build_truncated_oscillator,
    evolve_and_postselect,
    moments,
    pointer_shift_measured,
    predict_shift_P,
    unified_expectation,
)
from .resonance import (
    RabiParams,
    RamseyParams,
    rabi_prob_exact,
    rabi_prob_flip,
    rabi_prob_weak,
    ramsey_prob_exact,
    ramsey_prob_flip,
    ramsey_prob_weak,
    scan,
)
from .weakvalue import SelectionPair, weak_value, weak_value_log_derivative

# Residual slopes are rated on these couplings: small enough that cubic
# contamination stays ~1e-3 in the fitted slope (the strict profile wants
# |slope - 2| <= 0.01), large enough to sit far above the rounding floor.
_SLOPE_COUPLINGS = (1e-3, 1e-4, 1e-5)

__all__ = ["CheckResult", "run_suite", "CHECKS"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""


def _rng():
    return np.random.default_rng(20240817)


def _rand_herm(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2.0


def _rand_ket(rng, d, normed=True):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v) if normed else v


def _rand_sel(rng, min_overlap=0.2):
    while True:
        sel = SelectionPair(pre=_rand_ket(rng, 2), post=_rand_ket(rng, 2))
        if sel.overlap_mag >= min_overlap:
            return sel


def _slope(couplings, residuals) -> float:
    le = np.log10(np.asarray(couplings))
    lr = np.log10(np.maximum(np.asarray(residuals), 1e-300))
    return float(np.polyfit(le, lr, 1)[0])


# --- individual checks -------------------------------------------------------


def check_expm_unitarity():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 9))
        h = _rand_herm(rng, d)
        t = float(rng.uniform(0.1, 10.0))
        u = expm(h, -1j * t)
        worst = max(worst, float(np.max(np.abs(dagger(u) @ u - np.eye(d)))))
    return worst


def check_su2_vs_expm_hermitian():
    rng = _rng()
    worst = 0.0
    for _ in range(200):
        d = decompose(_rand_herm(rng, 2))
        theta = float(rng.uniform(-10.0, 10.0) / max(d.h, 1.0))
        worst = max(
            worst, float(np.max(np.abs(exp_su2(d, theta) - expm(d.matrix(), -1j * theta))))
        )
    return worst


def check_su2_vs_expm_complex():
    rng = _rng()
    worst = 0.0
    tried = 0
    while tried < 100:
        n = rng.normal(size=3) + 1j * rng.normal(size=3)
        n = n / np.linalg.norm(n)
        if abs(np.dot(n, n)) < 1e-3:  # skip near-null directions
            continue
        tried += 1
        d = PauliDecomp(h=float(rng.uniform(0.2, 2.0)), n0=0.0, n=n)
        theta = float(rng.uniform(-2.0, 2.0))
        worst = max(
            worst, float(np.max(np.abs(exp_su2(d, theta) - expm(d.matrix(), -1j * theta))))
        )
    return worst


def check_kron_associativity():
    rng = _rng()
    a = _rand_herm(rng, 2)
    b = _rand_herm(rng, 3)
    c = _rand_herm(rng, 4)
    return float(np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))))


def check_decompose_roundtrip():
    rng = _rng()
    worst = 0.0
    for _ in range(200):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        d = decompose(m)
        worst = max(worst, float(np.max(np.abs(d.matrix() - m))))
    return worst


def check_sigma_a_commutator():
    rng = _rng()
    worst = 0.0
    done = 0
    while done < 100:
        nh = rng.normal(size=3)
        nv = rng.normal(size=3)
        nh = nh / np.linalg.norm(nh)
        nv = nv / np.linalg.norm(nv)
        perp = nv - (np.dot(nh, nv)) * nh
        if np.linalg.norm(perp) < 1e-6:
            continue
        done += 1
        sa = solve_sigma_a(nh, nv)
        lhs = sa.matrix @ sigma_dot(nh) - sigma_dot(nh) @ sa.matrix
        r = np.dot(nh, nv) / np.dot(nh, nh)
        rhs = 2j * (sigma_dot(nv) - r * sigma_dot(nh))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def check_piecewise_norm():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        sch = ramsey_schedule(
            omega=float(rng.uniform(0.5, 2.0)),
            omega0=float(rng.uniform(0.5, 2.0)),
            omega1=float(rng.uniform(0.5, 2.0)),
            tau=float(rng.uniform(0.0, 2.0)),
            T=float(rng.uniform(0.0, 3.0)),
            t0=float(rng.uniform(0.0, 1.0)),
        )
        psi = _rand_ket(rng, 2)
        out = sch.total_unitary() @ psi
        worst = max(worst, abs(float(np.linalg.norm(out)) - 1.0))
    return worst


def check_weak_value_linearity():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        sel = _rand_sel(rng)
        a = _rand_herm(rng, 2)
        b = _rand_herm(rng, 2)
        al = complex(rng.normal(), rng.normal())
        be = complex(rng.normal(), rng.normal())
        lhs = weak_value(al * a + be * b, sel).value
        rhs = al * weak_value(a, sel).value + be * weak_value(b, sel).value
        worst = max(worst, abs(lhs - rhs))
    return worst


def check_eigenstate_weak_value():
    sel = SelectionPair(pre=[1.0, 0.0], post=[1.0, 0.0])
    return abs(weak_value(SIGMA3, sel).value - 1.0)


def check_log_derivative_convergence():
    """Richardson halving: the log-derivative error must drop ~4x when the
    stencil halves (second-order convergence)."""
    rng = _rng()
    worst_ratio_dev = 0.0
    for _ in range(10):
        a = _rand_herm(rng, 2)
        sel = _rand_sel(rng, min_overlap=0.4)
        exact = weak_value(a, sel).value
        fam = lambda e: expm(a, -1j * e)
        e1 = abs(weak_value_log_derivative(fam, sel, 8e-4).value - exact)
        e2 = abs(weak_value_log_derivative(fam, sel, 4e-4).value - exact)
        if e1 < 1e-12:  # error at rounding floor; nothing to rate
            continue
        worst_ratio_dev = max(worst_ratio_dev, abs(e1 / max(e2, 1e-300) - 4.0))
    return worst_ratio_dev


def check_transition_zero_coupling():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        cfg = DirectConfig(
            pair=HamiltonianPair(H0=decompose(_rand_herm(rng, 2)), V=decompose(_rand_herm(rng, 2))),
            t=float(rng.uniform(0.1, 2.0)),
            sel=_rand_sel(rng),
            coupling=0.0,
        )
        res = transition_exact(cfg)
        worst = max(worst, abs(res.probability - res.probability_zero_coupling))
    return worst


def check_first_order_slope_direct():
    rng = _rng()
    worst_dev = 0.0
    done = 0
    while done < 20:
        try:
            cfg0 = DirectConfig(
                pair=HamiltonianPair(
                    H0=decompose(_rand_herm(rng, 2)), V=decompose(_rand_herm(rng, 2))
                ),
                t=float(rng.uniform(0.3, 1.5)),
                sel=_rand_sel(rng, min_overlap=0.3),
            )
            if transition_exact(cfg0).probability_zero_coupling < 1e-2:
                continue
            resid = []
            for eps in _SLOPE_COUPLINGS:
                cfg = cfg0.with_coupling(eps)
                resid.append(abs(transition_exact(cfg).probability - predict_first_order(cfg)))
            if min(resid) < 1e-13:
                continue
            done += 1
            worst_dev = max(worst_dev, abs(_slope(_SLOPE_COUPLINGS, resid) - 2.0))
        except WeakresError:
            continue
    return worst_dev


def check_hermitian_probability_bound():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        cfg = DirectConfig(
            pair=HamiltonianPair(H0=decompose(_rand_herm(rng, 2)), V=decompose(_rand_herm(rng, 2))),
            t=float(rng.uniform(0.1, 2.0)),
            sel=_rand_sel(rng, min_overlap=0.0),
            coupling=float(rng.uniform(-0.5, 0.5)),
        )
        worst = max(worst, transition_exact(cfg).probability - 1.0)
    return max(worst, 0.0)


def _random_combined(rng):
    pd = int(rng.integers(2, 7))
    probe = ProbeModel(kind="custom", dim=pd, P=_rand_herm(rng, pd), f_catalog={})
    sel = SelectionPair(pre=_rand_ket(rng, 2, normed=False), post=_rand_ket(rng, 2))
    c = evolve_and_postselect(
        _rand_herm(rng, 2),
        _rand_herm(rng, 2),
        probe,
        float(rng.uniform(0.1, 2.0)),
        sel,
        _rand_ket(rng, pd, normed=False),
    )
    return c, probe, sel


def check_embedding_identity():
    """Relative to the state/observable scale."""
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        c, probe, sel = _random_combined(rng)
        f = _rand_herm(rng, probe.dim)
        ef = np.outer(sel.post, sel.post.conj())
        lhs = inner(c.lambda_f, kron(ef, f) @ c.lambda_f)
        rhs = inner(c.psi_f_probe, f @ c.psi_f_probe)
        scale = abs(inner(c.lambda_f, c.lambda_f)) * np.linalg.norm(f, 2)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def check_initial_identity():
    """Relative to the state/observable scale."""
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        c, probe, sel = _random_combined(rng)
        f = _rand_herm(rng, probe.dim)
        ef = np.outer(sel.post, sel.post.conj())
        lhs = inner(c.lambda_i, kron(ef, f) @ c.lambda_i)
        rhs = abs(sel.overlap) ** 2 * inner(c.psi_i_probe, f @ c.psi_i_probe)
        scale = abs(inner(c.lambda_i, c.lambda_i)) * np.linalg.norm(f, 2)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def check_norm_conservation():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        c, _, _ = _random_combined(rng)
        ni = abs(inner(c.lambda_i, c.lambda_i))
        nf = abs(inner(c.lambda_f, c.lambda_f))
        worst = max(worst, abs(nf - ni) / ni)
    return worst


def check_ratio_identity():
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        c, probe, sel = _random_combined(rng)
        f = _rand_herm(rng, probe.dim)
        _, ratio = unified_expectation(c, f, sel)
        nf = inner(c.psi_f_probe, c.psi_f_probe)
        direct = (inner(c.psi_f_probe, f @ c.psi_f_probe) / nf).real
        worst = max(worst, abs(ratio - direct))
    return worst


def check_shift_identity_F_eye():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        c, probe, _ = _random_combined(rng)
        worst = max(
            worst, abs(pointer_shift_measured(c, np.eye(probe.dim, dtype=complex)))
        )
    return worst


def check_pointer_shift_law():
    """Measured Delta P against 2 gt Im(A_w) Var(P): <=1% at gt=1e-3 and
    <=0.01% at gt=1e-4.  Returns the worst margin-normalized excess."""
    probe = build_truncated_oscillator(16)
    gs = np.zeros(16, dtype=complex)
    gs[0] = 1.0
    sel = SelectionPair(pre=np.array([1, 2]) / np.sqrt(5), post=np.array([1, -1j]) / np.sqrt(2))
    aw = weak_value(SIGMA3, sel).value
    worst = 0.0
    for gt, bound in ((1e-3, 1e-2), (1e-4, 1e-4)):
        c = evolve_and_postselect(np.zeros((2, 2), dtype=complex), gt * SIGMA3, probe, 1.0, sel, gs)
        d_p = pointer_shift_measured(c, probe.P)
        pred = 2.0 * gt * aw.imag * 0.5
        worst = max(worst, (abs(d_p - pred) / abs(pred)) / bound)
    return worst


def check_indirect_first_order_slope():
    rng = _rng()
    worst_dev = 0.0
    done = 0
    while done < 10:
        try:
            probe = build_truncated_oscillator(int(rng.integers(4, 12)))
            h0m = _rand_herm(rng, 2)
            vu = _rand_herm(rng, 2)
            vu = vu / decompose(vu).h
            sel = _rand_sel(rng, min_overlap=0.3)
            init = _rand_ket(rng, probe.dim)
            t = 1.0
            m = moments(init, probe.P, probe.P)
            if m.var_P < 1e-3:
                continue
            # a decade below the direct check: post-selection can amplify the
            # cubic term, which would contaminate the fitted slope
            couplings = (1e-4, 1e-5, 1e-6)
            resid = []
            for vt in couplings:
                pair = HamiltonianPair(H0=decompose(h0m), V=decompose(vt / t * vu))
                c = evolve_and_postselect(h0m, (vt / t) * vu, probe, t, sel, init)
                resid.append(abs(pointer_shift_measured(c, probe.P) - predict_shift_P(pair, t, sel, m)))
            if min(resid) < 3e-13:
                continue
            done += 1
            worst_dev = max(worst_dev, abs(_slope(couplings, resid) - 2.0))
        except WeakresError:
            continue
    return worst_dev


def check_complementarity():
    rng = _rng()
    worst = 0.0
    for _ in range(100):
        p = RabiParams(
            omega0_bar=1.0,
            epsilon=float(rng.uniform(-0.1, 0.1)),
            omega=float(rng.uniform(0.0, 2.0)),
            omega1=float(rng.uniform(0.3, 2.0)),
            t=float(rng.uniform(0.0, 4.0)),
        )
        worst = max(worst, abs(rabi_prob_exact(p) + rabi_prob_flip(p) - 1.0))
        q = RamseyParams(
            omega0_bar=1.0,
            epsilon=float(rng.uniform(-0.1, 0.1)),
            omega=float(rng.uniform(0.0, 2.0)),
            omega1=float(rng.uniform(0.3, 2.0)),
            tau=float(rng.uniform(0.0, 3.0)),
            T=float(rng.uniform(0.0, 3.0)),
        )
        worst = max(worst, abs(ramsey_prob_exact(q) + ramsey_prob_flip(q) - 1.0))
    return worst


def check_weak_equivalence():
    """rabi_prob_weak == ramsey_prob_weak on a 201-point grid at T = 2t/pi."""
    t = math.pi / 2
    worst = 0.0
    for omega in np.linspace(0.2, 1.8, 201):
        pr = rabi_prob_weak(RabiParams(1.0, 1e-3, float(omega), 1.0, t))
        pq = ramsey_prob_weak(RamseyParams(1.0, 1e-3, float(omega), 1.0, math.pi / 2, 2 * t / math.pi))
        worst = max(worst, abs(pr - pq))
    return worst


def check_resonance_residual_slope():
    worst_dev = 0.0
    for phi in (0.4, 0.9):
        omega = 1.0 + 2 * phi
        resid = []
        for eps in _SLOPE_COUPLINGS:
            p = RabiParams(1.0, eps, omega, 1.0, math.pi / 2)
            resid.append(abs(rabi_prob_exact(p) - rabi_prob_weak(p)))
        worst_dev = max(worst_dev, abs(_slope(_SLOPE_COUPLINGS, resid) - 2.0))
    return worst_dev


def check_peak_location():
    p = RabiParams(omega0_bar=1.0, epsilon=0.02, omega=1.0, omega1=1.0, t=math.pi / 2)
    grid = np.linspace(0.0, 2.04, 409)  # step 0.005
    curve = scan("direct", "rabi", p, grid)
    flip = 1.0 - curve.pr_exact
    k = int(np.argmax(flip))
    return abs(curve.omegas[k] - p.omega0)


# --- registry ----------------------------------------------------------------

#: (name, callable, tolerance) triples; strict profile divides tolerances by 10.
CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("expm unitarity (Hermitian, |t|<=10)", check_expm_unitarity, 1e-12),
    ("exp_su2 vs expm (Hermitian)", check_su2_vs_expm_hermitian, 1e-12),
    ("exp_su2 vs expm (complex axis)", check_su2_vs_expm_complex, 1e-10),
    ("kron associativity", check_kron_associativity, 1e-13),
    ("decompose/reconstruct roundtrip", check_decompose_roundtrip, 1e-13),
    ("sigma_a commutator identity (100 random)", check_sigma_a_commutator, 1e-12),
    ("piecewise evolution preserves norm", check_piecewise_norm, 1e-12),
    ("weak value linearity", check_weak_value_linearity, 1e-12),
    ("eigenstate weak value exact", check_eigenstate_weak_value, 1e-15),
    ("log-derivative O(eps^2) convergence", check_log_derivative_convergence, 1.0),
    ("transition Pr(0) consistency", check_transition_zero_coupling, 1e-15),
    ("direct first-order residual slope 2", check_first_order_slope_direct, 0.1),
    ("Hermitian probability <= 1", check_hermitian_probability_bound, 1e-12),
    ("embedding identity <Ef x F>", check_embedding_identity, 1e-13),
    ("initial-state post-selection identity", check_initial_identity, 1e-13),
    ("combined norm conservation", check_norm_conservation, 1e-12),
    ("expectation ratio identity", check_ratio_identity, 1e-13),
    ("pointer shift vanishes for F = I", check_shift_identity_F_eye, 1e-14),
    ("pointer-shift law margins", check_pointer_shift_law, 1.0),
    ("indirect first-order residual slope 2", check_indirect_first_order_slope, 0.1),
    ("complementarity Pr + Pr_flip = 1", check_complementarity, 1e-12),
    ("Rabi/Ramsey weak-line equivalence", check_weak_equivalence, 1e-15),
    ("resonance residual slope 2", check_resonance_residual_slope, 0.1),
    ("peak sits at omega0 within one step", check_peak_location, 5.1e-3),
]


def run_suite(profile: str = "default"):
    """Run every check; returns the list of :class:`CheckResult`."""
    if profile not in ("default", "strict"):
        raise ValueError("profile must be 'default' or 'strict'")
    scale = 0.1 if profile == "strict" else 1.0
    results = []
    for name, fn, tol in CHECKS:
        tol_eff = tol * scale
        try:
            residual = float(fn())
            results.append(
                CheckResult(name=name, residual=residual, tolerance=tol_eff, passed=residual <= tol_eff)
            )
        except Exception as exc:  # a crashed check is a failed check
            results.append(
                CheckResult(name=name, residual=float("nan"), tolerance=tol_eff, passed=False, note=str(exc))
            )
    return results
