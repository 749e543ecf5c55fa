"""Acceptance criteria 1-11; each prints one PASS/FAIL line and checks its time budget."""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from vekuaplate import karman_iter as ki
from vekuaplate import legendre as lg
from vekuaplate import model1d
from vekuaplate import monge_ampere as ma
from vekuaplate import refined_theory as rt
from vekuaplate import vekua_system as vs
from vekuaplate.config import PlateConfig
from vekuaplate.vekua_system import SurfaceLoads

from conftest import _manufacture_planar, _q, chebyshev_grid, oracle_symbol, poisson, q_integral


class Verdict:
    def __init__(self, capsys, number, budget):
        self.capsys, self.number, self.budget = capsys, number, budget
        self.failures, self.notes = [], []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.notes.append(text)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            self.failures.append(f"error: {exc!r}")
        self.check(elapsed < self.budget, f"runtime {elapsed:.2f}s over {self.budget}s")
        status = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.failures + self.notes)
        with self.capsys.disabled():
            print(f"\n{status} criterion {self.number} ({elapsed:.2f}s): {detail}")
        if exc_type is None:
            assert not self.failures, self.failures
        return False


# 1 ---------------------------------------------------------------------------------------------


def test_criterion_1_golden_1d(capsys):
    with Verdict(capsys, 1, 1.0) as v:
        prob = model1d.Neumann1DProblem((0, 1))
        for N in range(3, 51):
            z = model1d.solve_q_basis(prob, N).coeffs
            v.check(list(z) == [0, Fraction(-1, 3)] + [0] * (N - 1), f"q basis N={N}")
        for alpha in (Fraction(0), Fraction(1), Fraction(-7, 3)):
            u = model1d.solve_legendre_basis(model1d.Neumann1DProblem((0, 1), alpha, alpha), 8).coeffs
            v.check(u[1] == Fraction(2, 5) + alpha and u[3] == Fraction(-1, 15), f"legendre basis alpha={alpha}")
        v.note("z_1 = -1/3 exactly for N = 3..50; u_1 = 2/5 + alpha, u_3 = -1/15")


# 2 ---------------------------------------------------------------------------------------------


def test_criterion_2_basis_identities(capsys):
    with Verdict(capsys, 2, 5.0) as v:
        x = chebyshev_grid(200)
        worst_q = worst_s = worst_o = 0.0
        for k in range(21):
            worst_q = max(worst_q, float(np.max(np.abs(lg.eval_q(k, x) - q_integral(k, x)))))
        for k in range(1, 21):
            worst_s = max(worst_s, abs(lg.eval_dq(k, 1.0)), abs(lg.eval_dq(k, -1.0)))
        t, w = lg.gauss_nodes(30)
        for m in range(21):
            for n in range(21):
                g = np.sum(w * lg.eval_p(m, t) * lg.eval_p(n, t)) - (2 / (2 * m + 1) if m == n else 0)
                worst_o = max(worst_o, abs(g))
        v.check(worst_q <= 1e-12, f"q_k closed form vs integral {worst_q:.1e}")
        v.check(worst_s <= 1e-12, f"slopes k=1..20 {worst_s:.1e}")
        v.check(worst_o <= 1e-13, f"orthogonality {worst_o:.1e}")
        v.note(f"integral {worst_q:.1e}, slopes (k>=1) {worst_s:.1e}, orthogonality {worst_o:.1e}; k=0 slope is a separate expected failure")


@pytest.mark.xfail(strict=True, reason="q_0 = (1+x)^2/2 has q_0'(1) = 2; the k = 0 slope condition cannot hold")
def test_criterion_2_q0_slope(capsys):
    with Verdict(capsys, "2 [k=0 slope]", 5.0) as v:
        s = max(abs(lg.eval_dq(0, 1.0)), abs(lg.eval_dq(0, -1.0)))
        v.check(s <= 1e-12, f"|q_0'(+-1)| = {s} (unattainable: q_0' = 1 + x)")


# 3 ---------------------------------------------------------------------------------------------


def test_criterion_3_face_traces(capsys):
    with Verdict(capsys, 3, 1.0) as v:
        rnd = random.Random(3)

        def r():
            return Fraction(rnd.randint(-99, 99), rnd.randint(1, 50))

        bad = 0
        for _ in range(1000):
            h = Fraction(rnd.randint(1, 20), rnd.randint(1, 20))
            s = lg.DifferenceBasisSeries(tuple(r() for _ in range(rnd.randint(0, 8))), r(), r(), h)
            bad += lg.reconstruct_face_trace(s, "+") != s.g_plus
            bad += lg.reconstruct_face_trace(s, "-") != s.g_minus
        v.check(bad == 0, f"{bad} inexact faces")
        v.note("1000 rational series, both faces exact")


# 4 ---------------------------------------------------------------------------------------------


def test_criterion_4_vekua_symbol(capsys):
    with Verdict(capsys, 4, 10.0) as v:
        cfg = PlateConfig(lam=1.5, mu=1.0, h=0.2)
        rng = np.random.default_rng(4)
        modes = rng.uniform(-6, 6, size=(20, 2))
        worst = 0.0
        for N in (0, 1, 2):
            for k1, k2 in modes:
                O = oracle_symbol(cfg, N, k1, k2)
                scale = max(1.0, float(np.max(np.abs(O))))
                worst = max(worst, float(np.max(np.abs(vs.symbol(cfg, N, k1, k2, "printed") - O))) / scale)
        v.check(worst <= 1e-13, f"N<=2 max relative error {worst:.1e}")
        rep = []
        for N in (3, 4):
            d = vs.symbol_discrepancy(cfg, N, *modes[0], lambda a, b: oracle_symbol(cfg, N, a, b))
            rep.append(f"N={N}: main {d['second_order']:.1e}, first {d['first_order']:.1e}, zero-order {d['zero_order']:.3g}")
        v.note(f"N<=2 error {worst:.1e}; reported only: " + ", ".join(rep))


# 5 ---------------------------------------------------------------------------------------------


def test_criterion_5_korn(capsys):
    with Verdict(capsys, 5, 60.0) as v:
        cfg = PlateConfig(lam=1.5, mu=1.0, h=0.2)
        rng = np.random.default_rng(5)
        sampled_grad, sampled_fried, best_grad, best_fried = [], [], [], []
        for N in (0, 1, 2, 4, 8):
            rep = vs.korn_check(cfg, N, 50, rng)
            v.check(rep.margin_grad >= -1e-10 and rep.margin_fried >= -1e-10, f"N={N} margins {rep.margin_grad:.2e}, {rep.margin_fried:.2e}")
            sampled_grad.append(rep.constant_grad)
            sampled_fried.append(rep.constant_fried)
            best_grad.append(rep.best_grad)
            best_fried.append(rep.best_fried)
        # nested spaces force the exact constants to be non-increasing; "no degradation"
        # means they stay above the proven constant 1 and level off
        for name, best in (("grad", best_grad), ("fried", best_fried)):
            v.check(min(best) >= 1 - 1e-9, f"best constant ({name}) below 1: {min(best):.4f}")
            v.check(best[-1] / best[-2] >= 0.99, f"best constant ({name}) not saturated: {best[-2]:.4f} -> {best[-1]:.4f}")
        fmt = lambda xs: "[" + ", ".join(f"{x:.4g}" for x in xs) + "]"
        v.note(f"best grad {fmt(best_grad)}, best fried {fmt(best_fried)}; sampled grad {fmt(sampled_grad)}, sampled fried {fmt(sampled_fried)}")


# 6 ---------------------------------------------------------------------------------------------


def test_criterion_6_monge_ampere(capsys):
    with Verdict(capsys, 6, 30.0) as v:
        rnd = random.Random(6)
        bad = {"decomposition": 0, "complex": 0, "laplacian": 0}
        for _ in range(50):
            u, w = ma.random_poly2(rnd, 6), ma.random_poly2(rnd, 6)
            bad["decomposition"] += not ma.divergence_decomposition(u, w).ok
            lhs = ma.to_complex(ma.bracket(u, w))
            bad["complex"] += lhs != -4 * ma.bracket_complex(ma.to_complex(u), ma.to_complex(w))
            bad["laplacian"] += not ma.laplacian_bracket_expansion(u, w).ok
        for k, n in bad.items():
            v.check(n == 0, f"{k}: {n} nonzero residuals")
        v.note("50 random pairs of degree 6, all residuals identically zero")


# 7 ---------------------------------------------------------------------------------------------


def test_criterion_7_theorem_algebra(capsys):
    with Verdict(capsys, 7, 5.0) as v:
        for p in range(2, 21):
            for a in (Fraction(1), Fraction(-3, 7)):
                ch = ki.chain_coefficients(p, a)
                v.check(ch["bracket"] == -2 * p * p * (2 * p - 1), f"bracket p={p}")
                v.check(ch["V"] == -a / (2 * (2 * p - 1)), f"V p={p} a={a}")
                v.check(ch["UV"] == a * Fraction(2 * p * p * (3 * p - 1), 2 * p - 1), f"c_p p={p} a={a}")
        rep = ki.cp_bound_check(20)
        v.check(rep["holds"], f"bound fails at p={rep['first_violation']}")
        v.note(f"bound holds on p in {rep['valid_range']}; range boundary: {rep['range_boundary']} ({rep['boundary_note']})")


# 8 ---------------------------------------------------------------------------------------------


def test_criterion_8_convergence(capsys):
    with Verdict(capsys, 8, 60.0) as v:
        steps = []
        for n in (2, 3, 4):
            for c in (Fraction(0), Fraction(1), Fraction(13, 10)):
                tr = ki.run_iteration(ma.Z**n * ma.ZB**n, ki.IterationParams(c=c, m_max=20, tol=1e-8))
                ok = tr.verdict == "converged" and tr.norms[-1] < 1e-8 and ki.eventually_decreasing(tr.norms)
                v.check(ok, f"n={n} c={c}: {tr.verdict}")
                steps.append(len(tr.steps) - 1)
        v.note(f"9 runs converged, steps used {min(steps)}..{max(steps)} of 20")


# 9 ---------------------------------------------------------------------------------------------


def test_criterion_9_reissner(capsys):
    with Verdict(capsys, 9, 1.0) as v:
        for q, h in ((1, 1), (Fraction(5, 3), Fraction(1, 20)), (0.75, 0.1)):
            rep = rt.reissner_profiles(1, q, h)
            for k, ok in rep.checks.items():
                v.check(ok, f"{k} q={q} h={h}")
        v.note("sigma_33(h) = 0, sigma_33(-h) = -q, d3 sigma_33(+-h) = 0 exactly; shear profile integrates to 4Q")


# 10 --------------------------------------------------------------------------------------------


def test_criterion_10_kirchhoff(capsys):
    with Verdict(capsys, 10, 1.0) as v:
        q = 2.5
        loads = SurfaceLoads.pressure(q, 1, 1, face="+")
        base = None
        for gamma in (-0.5, 0.0, 0.5):
            cfg = PlateConfig.from_engineering(E=210.0, nu=0.3, h=0.02, a=1.0, b=1.5, gamma=gamma)
            w = rt.solve_linear_plate(rt.BendingProblem(cfg, loads)).w[0, 0]
            k2 = np.pi**2 * (cfg.a**-2 + cfg.b**-2)
            navier = q / (cfg.D * k2**2)
            if gamma == -0.5:
                base = w
                v.check(abs(w / navier - 1) <= 1e-12, f"Navier mismatch {w / navier - 1:.1e}")
            ratio = 1 + cfg.h**2 * (1 + 2 * gamma) * (2 - cfg.nu) * k2 / (3 * (1 - cfg.nu))
            v.check(abs(w / base / ratio - 1) <= 1e-12, f"gamma={gamma} prefactor mismatch")
        v.note("Navier mode reproduced at gamma = -1/2; load prefactor matches for gamma in {-1/2, 0, 1/2}")


# 11 --------------------------------------------------------------------------------------------


def test_criterion_11_residuals(capsys):
    with Verdict(capsys, 11, 10.0) as v:
        rnd = random.Random(11)
        worst = 0.0
        X, Y = ma.X, ma.Y
        for case in range(20):
            cfg = PlateConfig(lam=rnd.choice([0.5, 1.25, 2.0]), mu=rnd.choice([0.75, 1.0]), h=rnd.choice([0.05, 0.1, 0.2]))
            w = ma.random_poly2(rnd, 4)
            f1, f2, S = (ma.random_poly2(rnd, 3) for _ in range(3))
            tau, om = _manufacture_planar(w, cfg, f1, f2, S)
            res = rt.planar_residual(tau, om, w, cfg, (f1, f2), S)
            lam, mu, h = (rt.exact(c) for c in (cfg.lam, cfg.mu, cfg.h))
            E, nu = mu * (3 * lam + 2 * mu) / (lam + mu), lam / (2 * (lam + mu))
            ww = 2 * (w.diff(X).diff(X) * w.diff(Y).diff(Y) - w.diff(X).diff(Y) ** 2)
            rhs = _q(-E / 2) * ww + _q(nu / (2 * h)) * ma.laplacian(S) + _q((1 + nu) / (2 * h)) * (f1.diff(X) + f2.diff(Y))
            kr = rt.kr2_residual(w, poisson(rhs), cfg, (f1, f2), S)
            worst = max(worst, res.sup, max((abs(float(c)) for c in kr.values()), default=0.0))
        v.check(worst <= 1e-10, f"max residual coefficient {worst:.1e}")
        v.note(f"20 manufactured cases, max residual coefficient {worst:.1e}")
