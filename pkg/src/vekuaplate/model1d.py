"""The one-dimensional Neumann model problem.

    -u''(x) = f(x),  u'(-1) = alpha,  u'(1) = beta

solved two ways: in the ``q_k`` basis after shifting to homogeneous data
(the boundary conditions then hold for every truncation), and directly in
Legendre polynomials with the Neumann data entering as natural conditions.
All linear algebra is done in exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import legendre

__all__ = [
    "CompatibilityError",
    "DominanceError",
    "Neumann1DProblem",
    "AffineCorrection",
    "Projective1DSolution",
    "shift_to_homogeneous",
    "q_stiffness",
    "check_irreducible_dominance",
    "solve_q_basis",
    "solve_legendre_basis",
    "stability_report",
]


class CompatibilityError(ValueError):
    """Neumann data inconsistent with the right-hand side."""


class DominanceError(RuntimeError):
    """Truncated q-basis system is not irreducibly diagonally dominant."""


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _l2_weight(n: int) -> Fraction:
    return Fraction(2, 2 * n + 1)


@dataclass(frozen=True)
class Neumann1DProblem:
    """``f`` holds Legendre coefficients ``f_0, f_1, ...`` of the right side."""

    f: tuple
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(_frac(c) for c in self.f) or (Fraction(0),))
        object.__setattr__(self, "alpha", _frac(self.alpha))
        object.__setattr__(self, "beta", _frac(self.beta))

    @property
    def mean_defect(self) -> Fraction:
        """``int f dx - (alpha - beta)``; zero for a solvable problem."""
        return 2 * self.f[0] - (self.alpha - self.beta)

    @property
    def compatible(self) -> bool:
        return self.mean_defect == 0

    @property
    def homogeneous(self) -> bool:
        return self.alpha == 0 and self.beta == 0

    def f_value(self, x):
        return sum(float(c) * legendre.eval_p(n, x) for n, c in enumerate(self.f))


@dataclass(frozen=True)
class AffineCorrection:
    """``u = z + linear*x + quadratic*x**2 + constant``."""

    linear: Fraction
    quadratic: Fraction
    constant: Fraction = Fraction(0)

    def legendre_coeffs(self) -> list[Fraction]:
        # x**2 = (2 p_2 + p_0) / 3
        return [
            self.constant + self.quadratic / 3,
            self.linear,
            2 * self.quadratic / 3,
        ]

    def __call__(self, x):
        return float(self.linear) * x + float(self.quadratic) * x**2 + float(self.constant)

    def derivative(self, x):
        return float(self.linear) + 2 * float(self.quadratic) * x


def shift_to_homogeneous(prob: Neumann1DProblem) -> tuple[Neumann1DProblem, AffineCorrection]:
    """Subtract the quadratic carrying the Neumann data.

    With ``z = u - (alpha+beta)/2 x - (beta-alpha)/4 x^2`` the new problem
    is ``-z'' = f + (beta-alpha)/2`` with ``z'(+-1) = 0``.
    """
    a, b = prob.alpha, prob.beta
    f = list(prob.f)
    f[0] = f[0] + (b - a) / 2
    shifted = Neumann1DProblem(tuple(f), Fraction(0), Fraction(0))
    return shifted, AffineCorrection(linear=(a + b) / 2, quadratic=(b - a) / 4)


def _dq_coeffs(k: int) -> dict[int, Fraction]:
    # q_k' = p_{k+1} - p_{k-1}, with p_{-1} = -p_0
    out = {k + 1: Fraction(1)}
    if k >= 1:
        out[k - 1] = out.get(k - 1, Fraction(0)) - 1
    else:
        out[0] = Fraction(1)
    return out


def _inner(a: dict[int, Fraction], b: dict[int, Fraction]) -> Fraction:
    return sum((c * b[n] * _l2_weight(n) for n, c in a.items() if n in b), Fraction(0))


def q_stiffness(indices: Sequence[int]) -> list[list[Fraction]]:
    """Gram matrix ``(q_j', q_k')`` over the given indices."""
    d = [_dq_coeffs(k) for k in indices]
    return [[_inner(di, dj) for dj in d] for di in d]


def check_irreducible_dominance(a: list[list[Fraction]]) -> dict:
    """Taussky-Todd hypotheses for a tridiagonal matrix.

    Returns a report; ``ok`` is true when every row is weakly diagonally
    dominant, at least one strictly, and no sub/super-diagonal entry is zero.
    """
    n = len(a)
    weak, strict = True, False
    for i in range(n):
        off = sum(abs(a[i][j]) for j in range(n) if j != i)
        if abs(a[i][i]) < off:
            weak = False
        if abs(a[i][i]) > off:
            strict = True
    tridiagonal = all(a[i][j] == 0 for i in range(n) for j in range(n) if abs(i - j) > 1)
    irreducible = all(a[i][i + 1] != 0 and a[i + 1][i] != 0 for i in range(n - 1))
    return {
        "size": n,
        "weakly_dominant": weak,
        "strict_row": strict,
        "tridiagonal": tridiagonal,
        "irreducible": irreducible,
        "ok": weak and strict and tridiagonal and irreducible,
    }


def _thomas(a: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    if n == 0:
        return []
    c_prime = [Fraction(0)] * n
    d_prime = [Fraction(0)] * n
    c_prime[0] = a[0][1] / a[0][0] if n > 1 else Fraction(0)
    d_prime[0] = rhs[0] / a[0][0]
    for i in range(1, n):
        denom = a[i][i] - a[i][i - 1] * c_prime[i - 1]
        c_prime[i] = a[i][i + 1] / denom if i < n - 1 else Fraction(0)
        d_prime[i] = (rhs[i] - a[i][i - 1] * d_prime[i - 1]) / denom
    x = [Fraction(0)] * n
    x[-1] = d_prime[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d_prime[i] - c_prime[i] * x[i + 1]
    return x


def _gauss_solve(a: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    m = [row[:] + [r] for row, r in zip(a, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        for r in range(col + 1, n):
            if m[r][col]:
                fac = m[r][col] / m[col][col]
                m[r] = [x - fac * y for x, y in zip(m[r], m[col])]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        x[i] = (m[i][n] - sum(m[i][j] * x[j] for j in range(i + 1, n))) / m[i][i]
    return x


@dataclass
class Projective1DSolution:
    basis: str
    coeffs: tuple
    residual_norm: float
    system_report: dict = field(default_factory=dict)
    correction: AffineCorrection | None = None

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def legendre_coeffs(self) -> list[Fraction]:
        """Solution (including any affine correction) in Legendre coefficients."""
        if self.basis == "p":
            out = list(self.coeffs)
        else:
            out = [Fraction(0)] * (self.N + 3)
            for k, zk in enumerate(self.coeffs):
                for n, c in legendre.q_legendre_coeffs(k).items():
                    out[n] += zk * c
        if self.correction is not None:
            for n, c in enumerate(self.correction.legendre_coeffs()):
                if n >= len(out):
                    out.append(Fraction(0))
                out[n] += c
        # free constant of the Neumann problem: zero mean
        out[0] = Fraction(0)
        return out

    def boundary_slopes(self) -> tuple[Fraction, Fraction]:
        """Exact ``(u'(-1), u'(1))`` of the represented function."""
        coeffs = self.legendre_coeffs()
        # p_n'(1) = n(n+1)/2, p_n'(-1) = (-1)^(n+1) n(n+1)/2
        right = sum((c * Fraction(n * (n + 1), 2) for n, c in enumerate(coeffs)), Fraction(0))
        left = sum(
            (c * Fraction(n * (n + 1), 2) * (-1) ** (n + 1) for n, c in enumerate(coeffs)),
            Fraction(0),
        )
        return left, right

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(float(c) * legendre.eval_p(n, x) for n, c in enumerate(self.legendre_coeffs()))

    def second_derivative(self, x):
        """``u''`` evaluated from the exact second-derivative coefficients."""
        x = np.asarray(x, dtype=float)
        d2 = _legendre_second_derivative(self.legendre_coeffs())
        return sum(float(c) * legendre.eval_p(n, x) for n, c in enumerate(d2))


def _legendre_derivative(c: Sequence[Fraction]) -> list[Fraction]:
    # p_n' = sum_{j <= n-1, step 2} (2j+1) p_j
    out = [Fraction(0)] * max(len(c) - 1, 1)
    for n, cn in enumerate(c):
        for j in range(n - 1, -1, -2):
            out[j] += (2 * j + 1) * cn
    return out


def _legendre_second_derivative(c: Sequence[Fraction]) -> list[Fraction]:
    return _legendre_derivative(_legendre_derivative(c))


def _residual_l2(minus_d2: Sequence[Fraction], rhs: Sequence[Fraction]) -> float:
    n = max(len(minus_d2), len(rhs))
    r = [
        (minus_d2[i] if i < len(minus_d2) else 0) - (rhs[i] if i < len(rhs) else 0)
        for i in range(n)
    ]
    return float(sum(ri * ri * _l2_weight(i) for i, ri in enumerate(r))) ** 0.5


def solve_q_basis(prob: Neumann1DProblem, N: int) -> Projective1DSolution:
    """Galerkin solve of the homogeneous Neumann problem in ``q_1..q_N``.

    The Gram matrix ``(q_j', q_k')`` decouples into even and odd tridiagonal
    systems; both are checked for irreducible diagonal dominance before the
    exact Thomas solve.
    """
    if N < 3:
        raise ValueError("truncation N must be at least 3")
    if not prob.homogeneous:
        raise ValueError("solve_q_basis expects homogeneous Neumann data; shift first")
    if not prob.compatible:
        raise CompatibilityError(f"right side has nonzero mean {prob.mean_defect}")
    g = {n: c for n, c in enumerate(prob.f) if c}
    z = [Fraction(0)] * (N + 1)
    report = {}
    # q_0 is not admissible (q_0'(1) = 2), so its coefficient stays zero;
    # with g_0 = 0 the remaining chains decouple by parity exactly.
    for parity in ("even", "odd"):
        idx = list(range(2 if parity == "even" else 1, N + 1, 2))
        a = q_stiffness(idx)
        check = check_irreducible_dominance(a)
        report[parity] = check
        if not check["ok"]:
            raise DominanceError(f"{parity} system fails the dominance check: {check}")
        rhs = [_inner(g, legendre.q_legendre_coeffs(k)) for k in idx]
        for k, zk in zip(idx, _thomas(a, rhs)):
            z[k] = zk
    minus_d2 = [-(2 * k + 1) * zk for k, zk in enumerate(z)]
    res = _residual_l2(minus_d2, prob.f)
    return Projective1DSolution("q", tuple(z), res, report)


def solve_legendre_basis(prob: Neumann1DProblem, N: int) -> Projective1DSolution:
    """Galerkin solve in ``p_0..p_N`` with natural Neumann conditions.

    The free constant is fixed by zero mean (``u_0 = 0``).
    """
    if N < 3:
        raise ValueError("truncation N must be at least 3")
    if not prob.compatible:
        raise CompatibilityError(f"Neumann data incompatible: defect {prob.mean_defect}")
    f = list(prob.f) + [Fraction(0)] * max(0, N + 1 - len(prob.f))
    idx = list(range(1, N + 1))
    # (p_j', p_k') = m(m+1), m = min(j, k), for j = k mod 2
    a = [
        [Fraction(min(j, k) * (min(j, k) + 1)) if (j - k) % 2 == 0 else Fraction(0) for k in idx]
        for j in idx
    ]
    rhs = [f[j] * _l2_weight(j) + prob.beta - prob.alpha * (-1) ** j for j in idx]
    u = [Fraction(0)] + _gauss_solve(a, rhs)
    minus_d2 = [-c for c in _legendre_second_derivative(u)]
    res = _residual_l2(minus_d2, prob.f)
    return Projective1DSolution("p", tuple(u), res, {"size": len(idx)})


def _solve_u_via_q(prob: Neumann1DProblem, N: int) -> Projective1DSolution:
    shifted, corr = shift_to_homogeneous(prob)
    sol = solve_q_basis(shifted, N)
    sol.correction = corr
    return sol


def _fr(v: Fraction) -> str:
    return str(v)


def stability_report(
    prob: Neumann1DProblem, N_list: Iterable[int], delta: Fraction | float = Fraction(1, 10)
) -> dict:
    """Compare both bases under a perturbation ``delta`` of the Neumann data.

    Both ``alpha`` and ``beta`` are moved by ``delta`` so the perturbed
    problem stays compatible.
    """
    delta = _frac(delta)
    pert = Neumann1DProblem(prob.f, prob.alpha + delta, prob.beta + delta)
    rows = []
    for N in N_list:
        q0, q1 = _solve_u_via_q(prob, N), _solve_u_via_q(pert, N)
        p0, p1 = solve_legendre_basis(prob, N), solve_legendre_basis(pert, N)
        zl, zr = solve_q_basis(shift_to_homogeneous(prob)[0], N).boundary_slopes()
        ql, qr = q0.boundary_slopes()
        pl, pr = p0.boundary_slopes()
        dz = [b - a for a, b in zip(q0.coeffs, q1.coeffs)]
        du = [b - a for a, b in zip(p0.coeffs, p1.coeffs)]
        rows.append(
            {
                "N": N,
                "q": {
                    "coeffs": [_fr(c) for c in q0.coeffs],
                    "z_slope_defect": _fr(max(abs(zl), abs(zr))),
                    "u_slope_defect": _fr(max(abs(ql - prob.alpha), abs(qr - prob.beta))),
                    "coeff_sensitivity": _fr(max(abs(d) for d in dz)),
                    "correction_linear_shift": _fr(q1.correction.linear - q0.correction.linear),
                },
                "p": {
                    "coeffs": [_fr(c) for c in p0.coeffs],
                    "u_slope_defect": _fr(max(abs(pl - prob.alpha), abs(pr - prob.beta))),
                    "u1_shift": _fr(du[1]),
                    "coeff_sensitivity": _fr(max(abs(d) for d in du)),
                },
            }
        )
    return {
        "f": [_fr(c) for c in prob.f],
        "alpha": _fr(prob.alpha),
        "beta": _fr(prob.beta),
        "delta": _fr(delta),
        "rows": rows,
    }
