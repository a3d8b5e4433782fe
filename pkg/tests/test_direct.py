"""Direct scheme: exact transitions, first-order forms, scan extraction."""

import math

import numpy as np
import pytest
import scipy.linalg

from weakres.direct import (
    DirectConfig,
    extract_complex_weak_value,
    extract_im_weak_value,
    predict_first_order,
    transition_exact,
)
from weakres.errors import ScanError, ZeroProbabilityError
from weakres.pauli import (
    MINUS,
    PLUS,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    HamiltonianPair,
    PauliDecomp,
    decompose,
)
from weakres.resonance import RabiParams, rabi_prob_exact
from weakres.weakvalue import SelectionPair, weak_value


def _rand_sel(rng, min_overlap=0.2):
    while True:
        pre = rng.normal(size=2) + 1j * rng.normal(size=2)
        post = rng.normal(size=2) + 1j * rng.normal(size=2)
        pre /= np.linalg.norm(pre)
        post /= np.linalg.norm(post)
        sel = SelectionPair(pre=pre, post=post)
        if sel.overlap_mag >= min_overlap:
            return sel


def _tilt(omega1, x):
    return PauliDecomp(h=omega1, n0=0.0, n=np.array([math.cos(x), 0.0, math.sin(x)]))


class TestTransitionExact:
    def test_zero_coupling_is_free_probability(self):
        rng = np.random.default_rng(30)
        h0 = decompose(SIGMA1 + 0.3 * SIGMA3)
        sel = _rand_sel(rng)
        cfg = DirectConfig(pair=HamiltonianPair(H0=h0, V=decompose(SIGMA3)), t=0.9, sel=sel)
        res = transition_exact(cfg)
        u = scipy.linalg.expm(-1j * 0.9 * h0.matrix())
        want = abs(sel.post.conj() @ u @ sel.pre) ** 2
        assert res.probability == pytest.approx(want, abs=1e-14)
        assert res.probability == res.probability_zero_coupling

    def test_pure_phase_interaction(self):
        sel = SelectionPair(pre=PLUS, post=PLUS)
        cfg = DirectConfig(pair=HamiltonianPair(H0=None, V=decompose(SIGMA3)), t=1.0, sel=sel)
        for eps in (-0.5, 0.0, 0.3, 2.0):
            assert transition_exact(cfg.with_coupling(eps)).probability == pytest.approx(
                1.0, abs=1e-13
            )

    def test_half_pulse_reference_probability(self):
        # pi/2 pulse at tilt pi/4: the surviving population is sin^2(pi/4) = 1/2
        sel = SelectionPair(pre=PLUS, post=PLUS)
        cfg = DirectConfig(
            pair=HamiltonianPair(H0=_tilt(1.0, math.pi / 4), V=decompose(SIGMA3)),
            t=math.pi / 2,
            sel=sel,
        )
        assert transition_exact(cfg).probability_zero_coupling == pytest.approx(0.5, abs=1e-13)

    def test_probability_is_amplitude_squared(self):
        rng = np.random.default_rng(31)
        pre = rng.normal(size=2) + 1j * rng.normal(size=2)  # unnormalized
        sel = SelectionPair(pre=pre, post=PLUS)
        cfg = DirectConfig(
            pair=HamiltonianPair(H0=decompose(SIGMA1), V=decompose(SIGMA3)),
            t=0.7,
            sel=sel,
            coupling=0.2,
        )
        res = transition_exact(cfg)
        assert res.probability == pytest.approx(abs(res.amplitude) ** 2, rel=1e-12)

    def test_hermitian_probability_bounded(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            cfg = DirectConfig(
                pair=HamiltonianPair(H0=decompose((a + a.conj().T) / 2), V=decompose(SIGMA2)),
                t=rng.uniform(0, 2),
                sel=_rand_sel(rng, 0.0),
                coupling=rng.uniform(-1, 1),
            )
            assert transition_exact(cfg).probability <= 1.0 + 1e-12

    def test_non_hermitian_flag_and_growth(self):
        sel = SelectionPair(pre=PLUS, post=PLUS)
        cfg = DirectConfig(
            pair=HamiltonianPair(H0=None, V=decompose(SIGMA3)), t=1.0, sel=sel, coupling=0.5j
        )
        assert cfg.is_non_hermitian
        # +i eps sigma3 amplifies the |+> component: probability exceeds 1
        assert transition_exact(cfg).probability > 1.0


class TestPredictFirstOrder:
    def test_commutative_branch_matches_printed_form(self):
        # H0 and V share the z axis: Pr = Pr(0) (1 + 2 eps Im svW)
        rng = np.random.default_rng(33)
        h0 = decompose(0.8 * SIGMA3)
        v = decompose(0.5 * SIGMA3)
        sel = _rand_sel(rng)
        t, eps = 1.1, 1e-3
        cfg = DirectConfig(pair=HamiltonianPair(H0=h0, V=v), t=t, sel=sel, coupling=eps)
        u0 = scipy.linalg.expm(-1j * t * h0.matrix())
        den = sel.post.conj() @ u0 @ sel.pre
        svw = (sel.post.conj() @ SIGMA3 @ u0 @ sel.pre) / den
        pr0 = abs(den) ** 2
        want = pr0 * (1.0 + 2.0 * eps * svw.imag)
        assert predict_first_order(cfg) == pytest.approx(want, rel=1e-12)

    def test_noncommutative_branch_matches_printed_form(self):
        # perpendicular axes: Pr = Pr(0) (1 + (eps/(t h)) (Im L - Im R))
        rng = np.random.default_rng(34)
        h0 = decompose(1.3 * SIGMA1)
        v = decompose(0.4 * SIGMA3)
        sel = _rand_sel(rng)
        t, eps = 0.8, 1e-3
        cfg = DirectConfig(pair=HamiltonianPair(H0=h0, V=v), t=t, sel=sel, coupling=eps)
        u0 = scipy.linalg.expm(-1j * t * h0.matrix())
        den = sel.post.conj() @ u0 @ sel.pre
        sig_a = -SIGMA2  # solver gauge for nh = x, nv = z
        left = (sel.post.conj() @ sig_a @ u0 @ sel.pre) / den
        right = (sel.post.conj() @ u0 @ sig_a @ sel.pre) / den
        pr0 = abs(den) ** 2
        want = pr0 * (1.0 + (eps / (t * h0.h)) * (left.imag - right.imag))
        assert predict_first_order(cfg) == pytest.approx(want, rel=1e-12)

    def test_non_hermitian_prefactor(self):
        # V with an identity drift: the exp(2 eps Im n0_v) prefactor survives
        sel = SelectionPair(pre=PLUS, post=PLUS)
        v = PauliDecomp(h=1.0, n0=0.5j, n=np.array([0.0, 0.0, 1.0]))
        cfg = DirectConfig(pair=HamiltonianPair(H0=None, V=v), t=1.0, sel=sel, coupling=1e-3)
        got = predict_first_order(cfg)
        svw = weak_value(SIGMA3, sel).value
        want = math.exp(2 * 1e-3 * 0.5) * (1.0 + 2e-3 * svw.imag)
        assert got == pytest.approx(want, rel=1e-12)

    def test_oblique_axes_with_complex_drift(self):
        # neither commutative nor perpendicular, and the interaction carries a
        # complex identity component: the full form must stay O(eps^2)
        h0 = decompose(0.7 * SIGMA1 + 0.4 * SIGMA3)
        v = PauliDecomp(h=1.0, n0=0.3 + 0.2j, n=np.array([0.0, 0.0, 1.0]))
        sel = SelectionPair(
            pre=np.array([1.0, 2.0]) / math.sqrt(5), post=np.array([1.0, -1.0j]) / math.sqrt(2)
        )
        resid = []
        for eps in (1e-2, 1e-3, 1e-4):
            cfg = DirectConfig(pair=HamiltonianPair(H0=h0, V=v), t=0.9, sel=sel, coupling=eps)
            resid.append(abs(transition_exact(cfg).probability - predict_first_order(cfg)))
        slope = np.polyfit(np.log10([1e-2, 1e-3, 1e-4]), np.log10(resid), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.05)

    def test_residual_scales_quadratically(self):
        rng = np.random.default_rng(35)
        done = 0
        while done < 5:
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            cfg0 = DirectConfig(
                pair=HamiltonianPair(
                    H0=decompose((a + a.conj().T) / 2), V=decompose((b + b.conj().T) / 2)
                ),
                t=rng.uniform(0.3, 1.5),
                sel=_rand_sel(rng, 0.3),
            )
            if transition_exact(cfg0).probability_zero_coupling < 1e-2:
                continue
            resid = []
            for eps in (1e-2, 1e-3, 1e-4):
                cfg = cfg0.with_coupling(eps)
                resid.append(abs(transition_exact(cfg).probability - predict_first_order(cfg)))
            if min(resid) < 1e-13:
                continue
            done += 1
            slope = np.polyfit(np.log10([1e-2, 1e-3, 1e-4]), np.log10(resid), 1)[0]
            assert 1.9 <= slope <= 2.1


class TestExtractIm:
    def test_flat_scan(self):
        scan = [(-1e-4, 0.25), (0.0, 0.25), (1e-4, 0.25)]
        assert extract_im_weak_value(scan) == 0.0

    def test_synthetic_linear_scan(self):
        e = 1e-4
        scan = [(s, 0.5 * (1 + 4 * s)) for s in (-e, 0.0, e)]
        assert extract_im_weak_value(scan) == pytest.approx(2.0, abs=1e-6)

    def test_driven_spin_scan_recovers_cot(self):
        # scan in u = delta_rabi / 2 so the generic (1/2) d ln Pr / du reads
        # off Im(sigma2 weak value) = -cot(phi) directly
        phi, w1, t = 0.3, 1.0, math.pi / 2
        scan = []
        for u in (-1e-4, 0.0, 1e-4):
            p = RabiParams(omega0_bar=1.0, epsilon=2 * u, omega=1.0 + 2 * phi, omega1=w1, t=t)
            scan.append((u, rabi_prob_exact(p)))
        got = extract_im_weak_value(scan)
        assert got == pytest.approx(-1.0 / math.tan(phi), rel=1e-6)

    def test_degenerate_scans(self):
        with pytest.raises(ScanError):
            extract_im_weak_value([(0.0, 0.5), (1e-4, 0.5)])
        with pytest.raises(ScanError):
            extract_im_weak_value([(-1e-4, 0.5), (0.0, 0.5), (2e-4, 0.5)])
        with pytest.raises(ZeroProbabilityError):
            extract_im_weak_value([(-1e-4, 0.1), (0.0, 0.0), (1e-4, 0.1)])

    def test_matches_closed_form_away_from_resonance(self):
        rng = np.random.default_rng(36)
        done = 0
        while done < 10:
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a = (a + a.conj().T) / 2
            a = a / decompose(a).h
            sel = _rand_sel(rng, 0.2)
            cfg = DirectConfig(pair=HamiltonianPair(H0=None, V=decompose(a)), t=1.0, sel=sel)
            if transition_exact(cfg).probability_zero_coupling <= 1e-3:
                continue
            done += 1
            e = 1e-4
            scan = [
                (c, transition_exact(cfg.with_coupling(c)).probability) for c in (-e, 0.0, e)
            ]
            want = weak_value(a, sel).value.imag
            assert extract_im_weak_value(scan) == pytest.approx(want, abs=1e-5)


class TestExtractComplex:
    def _scans(self, a, sel, step=1e-4):
        cfg = DirectConfig(pair=HamiltonianPair(H0=None, V=decompose(a)), t=1.0, sel=sel)

        def pr(c):
            return transition_exact(cfg.with_coupling(c)).probability

        scan_r = [(-step, pr(-step)), (0.0, pr(0.0)), (step, pr(step))]
        scan_i = [(-step, pr(-1j * step)), (0.0, pr(0.0)), (step, pr(1j * step))]
        return scan_r, scan_i

    def test_sigma3_plus_selection(self):
        sel = SelectionPair(pre=(PLUS + MINUS) / math.sqrt(2), post=PLUS)
        rec = extract_complex_weak_value(*self._scans(SIGMA3, sel))
        assert rec == pytest.approx(1.0 + 0.0j, abs=1e-6)

    def test_vanishing_weak_value(self):
        sel = SelectionPair(pre=PLUS, post=PLUS)
        rec = extract_complex_weak_value(*self._scans(SIGMA1, sel))
        assert rec == pytest.approx(0.0 + 0.0j, abs=1e-8)

    def test_purely_imaginary_composite(self):
        # the pi/2-pulse sigma2 weak value is purely imaginary (-i cot phi)
        phi = 0.3
        roty = scipy.linalg.expm(-1j * phi * SIGMA2 / 2)
        pulse = scipy.linalg.expm(-1j * (math.pi / 2) * SIGMA1)
        sel = SelectionPair(pre=pulse @ (roty @ PLUS), post=roty @ PLUS)
        rec = extract_complex_weak_value(*self._scans(SIGMA2, sel))
        assert rec.real == pytest.approx(0.0, abs=1e-6)
        assert rec.imag == pytest.approx(-1.0 / math.tan(phi), rel=1e-5)
