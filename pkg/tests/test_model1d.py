import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vekuaplate import legendre as lg
from vekuaplate import model1d as m1

GOLDEN = Path(__file__).parent / "golden" / "stability_p1.json"
F = Fraction


def test_compatibility_flag():
    assert m1.Neumann1DProblem((F(0),), alpha=-1, beta=1).compatible is False
    # int f = alpha - beta
    assert m1.Neumann1DProblem((F(-1),), alpha=-1, beta=1).compatible
    assert m1.Neumann1DProblem((F(0), F(1))).compatible


def test_incompatible_raises():
    prob = m1.Neumann1DProblem((F(0),), alpha=-1, beta=1)
    with pytest.raises(m1.CompatibilityError):
        m1.solve_legendre_basis(prob, 5)
    with pytest.raises(m1.CompatibilityError):
        m1.solve_q_basis(m1.Neumann1DProblem((F(1),)), 5)


def test_small_truncation_rejected():
    with pytest.raises(ValueError):
        m1.solve_q_basis(m1.Neumann1DProblem((0, 1)), 2)


def test_q_basis_requires_homogeneous():
    with pytest.raises(ValueError):
        m1.solve_q_basis(m1.Neumann1DProblem((F(0), F(1)), alpha=1, beta=1), 5)


@pytest.mark.parametrize("N", [3, 4, 7, 20, 50])
def test_q_basis_golden_p1(N):
    sol = m1.solve_q_basis(m1.Neumann1DProblem((0, 1)), N)
    assert sol.coeffs[1] == F(-1, 3)
    assert all(c == 0 for k, c in enumerate(sol.coeffs) if k != 1)
    assert sol.boundary_slopes() == (0, 0)
    assert sol.residual_norm == 0


def test_q_basis_stiffness_dominance():
    for idx in (list(range(1, 30, 2)), list(range(2, 30, 2))):
        rep = m1.check_irreducible_dominance(m1.q_stiffness(idx))
        assert rep["ok"]


def test_q_stiffness_entries():
    # (q_k', q_k') = 2/(2k+3) + 2/(2k-1), (q_k', q_{k+2}') = -2/(2k+3)
    a = m1.q_stiffness([1, 3, 5])
    assert a[0][0] == F(2, 5) + F(2, 1)
    assert a[0][1] == F(-2, 5)
    assert a[0][2] == 0


@pytest.mark.parametrize("alpha", [F(0), F(1), F(-3, 7)])
def test_legendre_basis_golden(alpha):
    sol = m1.solve_legendre_basis(m1.Neumann1DProblem((0, 1), alpha, alpha), 6)
    assert sol.coeffs[1] == F(2, 5) + alpha
    assert sol.coeffs[3] == F(-1, 15)
    assert all(c == 0 for k, c in enumerate(sol.coeffs) if k not in (1, 3))


def test_p3_rhs_second_derivative_and_slopes():
    # exact solution is -q_3 / 7; check -u'' = p_3 densely and u'(+-1) = 0
    sol = m1.solve_q_basis(m1.Neumann1DProblem((0, 0, 0, 1)), 8)
    x = np.linspace(-1, 1, 10_000)
    assert np.max(np.abs(-sol.second_derivative(x) - lg.eval_p(3, x))) <= 1e-12
    assert sol.boundary_slopes() == (0, 0)
    ref = -lg.eval_q(3, x) / 7
    ref = ref - np.mean(ref)
    got = sol(x)
    assert np.max(np.abs((got - np.mean(got)) - ref)) <= 1e-12


def test_p3_rhs_finite_difference():
    sol = m1.solve_q_basis(m1.Neumann1DProblem((0, 0, 0, 1)), 8)
    x = np.linspace(-1, 1, 2001)
    hx = x[1] - x[0]
    u = sol(x)
    fd = (u[2:] - 2 * u[1:-1] + u[:-2]) / hx**2
    assert np.max(np.abs(-fd - lg.eval_p(3, x[1:-1]))) <= 1e-4


def test_shift_then_solve_meets_data_exactly():
    prob = m1.Neumann1DProblem((F(-1), F(1), F(2)), alpha=-1, beta=1)
    shifted, corr = m1.shift_to_homogeneous(prob)
    assert shifted.homogeneous and shifted.compatible
    sol = m1.solve_q_basis(shifted, 6)
    sol.correction = corr
    assert sol.boundary_slopes() == (F(-1), F(1))


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=1, max_size=6),
    st.integers(3, 12),
)
def test_q_basis_slopes_zero_for_any_rhs(tail, N):
    sol = m1.solve_q_basis(m1.Neumann1DProblem((F(0), *tail)), N)
    assert sol.boundary_slopes() == (0, 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=1, max_size=5))
def test_q_basis_exact_once_truncation_covers_rhs(tail):
    f = (F(0), *tail)
    sol = m1.solve_q_basis(m1.Neumann1DProblem(f), len(f) + 2)
    assert sol.residual_norm == 0


def test_stability_report_matches_golden():
    rep = m1.stability_report(m1.Neumann1DProblem((0, 1), 1, 1), [3, 4, 5, 8])
    frozen = json.loads(GOLDEN.read_text())
    assert rep == frozen


def test_stability_report_properties():
    rep = m1.stability_report(m1.Neumann1DProblem((0, 1), 1, 1), [3, 5, 9])
    for row in rep["rows"]:
        assert F(row["q"]["coeff_sensitivity"]) == 0
        assert F(row["q"]["z_slope_defect"]) == 0
        assert F(row["q"]["u_slope_defect"]) == 0
        assert F(row["p"]["u1_shift"]) == F(1, 10)
