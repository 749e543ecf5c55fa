"""Picard-type iteration for the complex form of the von Karman system.

The model scheme, for given constants ``a, b, c``::

    V[m] = a K([U[m-1], U[m-1]])
    U[m] = b K([U[m-1], V[m]]) + c J([U[m-1], V[m]])

with ``[.,.]`` the complex bracket of ``monge_ampere``, ``K`` the double
integral with kernel ``(z - s)(zb - sb)`` and ``J`` the plain double
integral, both from the origin. Starting from ``(z zb)^n`` every iterate
stays in the span of ``(z zb)^e``, which gives a much cheaper closed-form
engine used to cross-check the general one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import CC, QQ, QQ_I, ring

from .config import PlateConfig
from .monge_ampere import RC, Z, ZB, bracket_complex

__all__ = [
    "IterationParams",
    "IterationStep",
    "IterationTrace",
    "kernel_integrate",
    "plain_integrate",
    "majorant_norm",
    "theorem4_step",
    "run_iteration",
    "diag_bracket",
    "diag_to_cpoly",
    "run_monomial_iteration",
    "cp_value",
    "cp_bound_check",
    "chain_coefficients",
    "hybrid_step",
    "eventually_decreasing",
]

RC_FLOAT, _ZF, _ZBF = ring("z,zb", CC)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        # decimal literal, not the binary expansion: c = 1.3 means 13/10
        return Fraction(repr(v))
    return Fraction(v)


@dataclass(frozen=True)
class IterationParams:
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(1)
    c: Fraction = Fraction(0)
    m_max: int = 20
    tol: float = 1e-8
    size_cap_bits: int = 10**6
    growth_cap: float = 1e12
    float_fallback: bool = True

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.m_max < 1:
            raise ValueError("m_max must be at least 1")

    @property
    def in_convergence_regime(self) -> bool:
        """Whether |c| < 4/3, the hypothesis under which convergence is claimed."""
        return abs(self.c) < Fraction(4, 3)


def _map_monomials(P, rule):
    out = {}
    for (j, k), c in P.items():
        (jj, kk), w = rule(j, k)
        out[(jj, kk)] = out.get((jj, kk), 0) + c * w
    return P.ring.from_dict({m: v for m, v in out.items() if v})


def _weight(P, num, den):
    # exact for QQ_I rings, float for the fallback ring
    if P.ring.domain == CC:
        return num / den
    return QQ_I.convert(QQ(num, den))


def kernel_integrate(P):
    """``z^j zb^k -> z^{j+2} zb^{k+2} / ((j+1)(j+2)(k+1)(k+2))``."""
    return _map_monomials(
        P, lambda j, k: ((j + 2, k + 2), _weight(P, 1, (j + 1) * (j + 2) * (k + 1) * (k + 2)))
    )


def plain_integrate(P):
    """``z^j zb^k -> z^{j+1} zb^{k+1} / ((j+1)(k+1))``."""
    return _map_monomials(P, lambda j, k: ((j + 1, k + 1), _weight(P, 1, (j + 1) * (k + 1))))


def _abs(c) -> float:
    if hasattr(c, "x") and hasattr(c, "y"):
        return math.hypot(float(c.x), float(c.y))
    return abs(complex(c))


def majorant_norm(P) -> float:
    """Sum of coefficient moduli: a bound for sup |P| on the unit polydisk."""
    return float(sum(_abs(c) for c in P.values()))


def _coeff_bits(P) -> int:
    bits = 0
    for c in P.values():
        for part in (c.x, c.y):
            q = Fraction(int(part.numerator), int(part.denominator))
            bits = max(bits, q.numerator.bit_length() + q.denominator.bit_length())
    return bits


def _scalar(P, v: Fraction):
    if P.ring.domain == CC:
        return float(v)
    return QQ_I.convert(QQ(v.numerator, v.denominator))


def theorem4_step(U_prev, params: IterationParams):
    """One step of the model scheme; returns ``(V_new, U_new)``."""
    V = kernel_integrate(bracket_complex(U_prev, U_prev)) * _scalar(U_prev, params.a)
    B = bracket_complex(U_prev, V)
    U = kernel_integrate(B) * _scalar(U_prev, params.b)
    if params.c:
        U = U + plain_integrate(B) * _scalar(U_prev, params.c)
    return V, U


@dataclass
class IterationStep:
    m: int
    U: object
    V: object
    norm_U: float
    norm_V: float
    degree: tuple
    exact: bool

    def summary(self) -> dict:
        return {
            "m": self.m,
            "norm_U": self.norm_U,
            "norm_V": self.norm_V,
            "degree": list(self.degree),
            "terms": len(self.U),
            "exact": self.exact,
        }


@dataclass
class IterationTrace:
    params: IterationParams
    steps: list = field(default_factory=list)
    verdict: str = "inconclusive"
    notes: list = field(default_factory=list)

    @property
    def norms(self) -> list[float]:
        return [s.norm_U for s in self.steps]

    def summary(self) -> dict:
        return {
            "a": str(self.params.a),
            "b": str(self.params.b),
            "c": str(self.params.c),
            "tol": self.params.tol,
            "verdict": self.verdict,
            "notes": list(self.notes),
            "in_convergence_regime": self.params.in_convergence_regime,
            "steps": [s.summary() for s in self.steps],
        }


def _degree(P) -> tuple:
    if not P:
        return (0, 0)
    return (P.degree(P.ring.gens[0]), P.degree(P.ring.gens[1]))


def _to_float(P):
    return RC_FLOAT.from_dict({m: complex(float(c.x), float(c.y)) for m, c in P.items()})


def _judge(trace: IterationTrace, norm: float, params: IterationParams) -> bool:
    if not math.isfinite(norm) or norm > params.growth_cap:
        trace.verdict = "diverged"
        return True
    if norm < params.tol:
        trace.verdict = "converged"
        return True
    return False


def run_iteration(U0, params: IterationParams | None = None) -> IterationTrace:
    """Iterate ``theorem4_step`` from ``U0`` and record majorant norms.

    Stops when the norm of ``U[m]`` drops below ``tol`` (converged), exceeds
    ``growth_cap`` (diverged) or after ``m_max`` steps (inconclusive). When a
    coefficient outgrows ``size_cap_bits`` the run continues in floating point
    (or stops as inconclusive if the fallback is disabled).
    """
    params = params or IterationParams()
    if not U0:
        raise ValueError("initial iterate must be nonzero")
    trace = IterationTrace(params)
    U, exact = U0, True
    trace.steps.append(IterationStep(0, U, RC.zero, majorant_norm(U), 0.0, _degree(U), True))
    for m in range(1, params.m_max + 1):
        if exact and _coeff_bits(U) > params.size_cap_bits:
            if not params.float_fallback:
                trace.notes.append(f"size cap of {params.size_cap_bits} bits reached at step {m}")
                return trace
            trace.notes.append(f"switched to floating point at step {m} (size cap)")
            U, exact = _to_float(U), False
        V, U = theorem4_step(U, params)
        step = IterationStep(m, U, V, majorant_norm(U), majorant_norm(V), _degree(U), exact)
        trace.steps.append(step)
        if _judge(trace, step.norm_U, params):
            return trace
    return trace


# --- monomial class (z zb)^e ------------------------------------------------


def diag_bracket(U: dict, V: dict) -> dict:
    """Bracket on ``{e: coeff}`` of ``(z zb)^e``.

    ``[(z zb)^j, (z zb)^k] = -2 j k (j + k - 1) (z zb)^{j+k-2}``.
    """
    out: dict = {}
    for j, uj in U.items():
        for k, vk in V.items():
            w = -2 * j * k * (j + k - 1)
            if w:
                out[j + k - 2] = out.get(j + k - 2, 0) + w * uj * vk
    return {e: c for e, c in out.items() if c}


def _diag_kernel(P: dict) -> dict:
    return {e + 2: c / ((e + 1) * (e + 2)) ** 2 for e, c in P.items()}


def _diag_plain(P: dict) -> dict:
    return {e + 1: c / (e + 1) ** 2 for e, c in P.items()}


def _diag_step(U: dict, params: IterationParams) -> tuple[dict, dict]:
    a, b, c = params.a, params.b, params.c
    if not isinstance(next(iter(U.values()), Fraction(0)), Fraction):
        a, b, c = float(a), float(b), float(c)
    V = {e: a * v for e, v in _diag_kernel(diag_bracket(U, U)).items()}
    B = diag_bracket(U, V)
    Un = {e: b * v for e, v in _diag_kernel(B).items()}
    if c:
        for e, v in _diag_plain(B).items():
            Un[e] = Un.get(e, 0) + c * v
    return V, {e: v for e, v in Un.items() if v}


def diag_to_cpoly(P: dict):
    out = {}
    for e, c in P.items():
        if isinstance(c, Fraction):
            out[(e, e)] = QQ_I.convert(QQ(c.numerator, c.denominator))
        else:
            out[(e, e)] = c
    if out and not isinstance(next(iter(P.values())), Fraction):
        return RC_FLOAT.from_dict(out)
    return RC.from_dict(out)


def run_monomial_iteration(n: int, params: IterationParams | None = None, exact: bool = True):
    """Same scheme as ``run_iteration`` for ``U0 = (z zb)^n`` in the closed-form engine.

    Returns ``(trace_of_dicts, verdict)`` where each entry is ``(U, V, norm_U)``.
    """
    params = params or IterationParams()
    U: dict = {n: Fraction(1) if exact else 1.0}
    rows = [(U, {}, 1.0)]
    verdict = "inconclusive"
    for _ in range(params.m_max):
        V, U = _diag_step(U, params)
        norm = float(sum(abs(c) for c in U.values()))
        rows.append((U, V, norm))
        if not math.isfinite(norm) or norm > params.growth_cap:
            verdict = "diverged"
            break
        if norm < params.tol:
            verdict = "converged"
            break
    return rows, verdict


def eventually_decreasing(norms: list[float], tail: int = 2) -> bool:
    """True when the sequence is strictly decreasing from some index on, over at least ``tail`` steps."""
    if len(norms) < tail + 1:
        return False
    start = len(norms) - 1
    while start > 0 and norms[start] < norms[start - 1]:
        start -= 1
    return len(norms) - 1 - start >= tail


# --- coefficient chain and the c_p bound -------------------------------------


def cp_value(p: int) -> Fraction:
    """``c_p = 2 p^2 (3p - 1) / (2p - 1)``."""
    return Fraction(2 * p * p * (3 * p - 1), 2 * p - 1)


def cp_bound_check(p_max: int) -> dict:
    """Exact check of ``c_p (2p-1)^-2 < 3/4 + 7/(8(p - 3/2))`` for ``p = 2..p_max``.

    The gap is ``(3p-1)(6p-1) / (2 (2p-3)(2p-1)^3)``, positive for every
    ``p >= 2``, so no upper range boundary exists; the report says so and
    gives both limits (``3/4`` for each side).
    """
    if p_max < 2:
        raise ValueError("p_max must be at least 2")
    rows = []
    first_violation = None
    for p in range(2, p_max + 1):
        lhs = cp_value(p) / (2 * p - 1) ** 2
        rhs = Fraction(3, 4) + Fraction(7, 8) / (p - Fraction(3, 2))
        gap = rhs - lhs
        closed = Fraction((3 * p - 1) * (6 * p - 1), 2 * (2 * p - 3) * (2 * p - 1) ** 3)
        rows.append(
            {"p": p, "lhs": str(lhs), "rhs": str(rhs), "gap": str(gap), "gap_closed_form": gap == closed}
        )
        if gap <= 0 and first_violation is None:
            first_violation = p
    return {
        "p_max": p_max,
        "holds": first_violation is None,
        "first_violation": first_violation,
        "valid_range": [2, p_max if first_violation is None else first_violation - 1],
        "range_boundary": None if first_violation is None else first_violation,
        "boundary_note": "gap (3p-1)(6p-1)/(2(2p-3)(2p-1)^3) > 0 for all p >= 2; lhs and rhs both tend to 3/4",
        "lhs_limit": "3/4",
        "rhs_limit": "3/4",
        "rows": rows,
    }


def chain_coefficients(p: int, a=1) -> dict:
    """Bracket, V and ``[U, V]`` coefficients for ``U = (z zb)^p`` by the general engine."""
    a = _frac(a)
    U = Z**p * ZB**p
    UU = bracket_complex(U, U)
    V = kernel_integrate(UU) * QQ_I.convert(QQ(a.numerator, a.denominator))
    UV = bracket_complex(U, V)

    def single(P, e):
        (m, c), = P.items()
        assert m == (e, e), m
        assert c.y == 0
        return Fraction(int(c.x.numerator), int(c.x.denominator))

    return {
        "bracket": single(UU, 2 * p - 2),
        "V": single(V, 2 * p),
        "UV": single(UV, 3 * p - 2),
        "exponents": {"bracket": 2 * p - 2, "V": 2 * p, "UV": 3 * p - 2},
    }


# --- physical scheme --------------------------------------------------------


def hybrid_step(U_prev, V_known, config: PlateConfig, F=None):
    """One step of the plate scheme; returns ``(U_new, V_new)``.

    ``U_new = 2Eh/(16D) (1 - h^2 (1+2 gamma) / (3 (1-nu)) d_z d_zb) K([U, V])`` and
    ``V_new = -mu/(lam* + 2 mu) K([U, U]) + F``. Coefficients are exact
    rationals of the (float) material data.
    """
    E, h, D, nu = (Fraction(v) for v in (config.E, config.h, config.D, config.nu))
    g, mu, ls = Fraction(config.gamma), Fraction(config.mu), Fraction(config.lam_star)

    def q(v: Fraction):
        return QQ_I.convert(QQ(v.numerator, v.denominator))

    W = kernel_integrate(bracket_complex(U_prev, V_known))
    corr = h**2 * (1 + 2 * g) / (3 * (1 - nu))
    if corr:
        W = W - W.diff(Z).diff(ZB) * q(corr)
    U_new = W * q(2 * E * h / (16 * D))
    V_new = kernel_integrate(bracket_complex(U_prev, U_prev)) * q(-mu / (ls + 2 * mu))
    if F is not None:
        V_new = V_new + F
    return U_new, V_new
