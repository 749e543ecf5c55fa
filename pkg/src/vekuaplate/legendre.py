"""Legendre polynomials in the thickness variable.

Everything here works for floats, numpy arrays and ``fractions.Fraction``
alike, so that the face-trace identities can be checked exactly.

The polynomials are extended to negative indices by ``p_{-n} = -p_{n-1}``.
With that convention the antiderivative identity

    int_{-1}^x p_n(t) dt = (p_{n+1}(x) - p_{n-1}(x)) / (2n + 1)

holds for every ``n >= 0``, which is what makes the closed form of the
``q_k`` basis valid down to ``k = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "QuadratureError",
    "eval_p",
    "eval_dp",
    "eval_q",
    "eval_dq",
    "eval_d2q",
    "q_legendre_coeffs",
    "gauss_nodes",
    "moments",
    "LegendreSeries",
    "DifferenceBasisSeries",
    "reconstruct_face_trace",
]

DOMAIN_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside [-1, 1]."""


class QuadratureError(ValueError):
    """Requested moment is beyond the exactness of the quadrature rule."""


def _check_domain(x) -> None:
    if isinstance(x, np.ndarray):
        if x.size and np.max(np.abs(x)) > 1 + DOMAIN_TOL:
            raise DomainError("Legendre argument outside [-1, 1]")
    elif abs(x) > 1 + DOMAIN_TOL:
        raise DomainError(f"Legendre argument {x!r} outside [-1, 1]")


def _one_like(x):
    if isinstance(x, np.ndarray):
        return np.ones_like(x, dtype=float)
    if isinstance(x, Fraction):
        return Fraction(1)
    return 1.0 if isinstance(x, float) else type(x)(1)


def _p(n: int, x):
    """Bonnet recurrence without domain check; negative n by reflection."""
    if n < 0:
        return -_p(-n - 1, x)
    p_prev = _one_like(x)
    if n == 0:
        return p_prev
    p_cur = x * p_prev
    for k in range(1, n):
        p_prev, p_cur = p_cur, ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
    return p_cur


def eval_p(n: int, x):
    """Legendre polynomial ``p_n(x)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    _check_domain(x)
    return _p(n, x)


def _dp(n: int, x):
    # p_n' = sum_{j <= n-1, step 2} (2j+1) p_j
    acc = 0 * _one_like(x)
    for j in range(n - 1, -1, -2):
        acc = acc + (2 * j + 1) * _p(j, x)
    return acc


def eval_dp(n: int, x):
    """Derivative ``p_n'(x)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    _check_domain(x)
    return _dp(n, x)


def eval_q(k: int, x):
    """Stable Neumann basis function ``q_k``.

    ``q_k = (p_{k+2} - p_k)/(2k+3) - (p_k - p_{k-2})/(2k-1)``, equal to
    ``(2k+1) * int_{-1}^x (x - t) p_k(t) dt``; ``q_k'(+-1) = 0`` for k >= 1.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    _check_domain(x)
    a = (_p(k + 2, x) - _p(k, x)) / (2 * k + 3)
    b = (_p(k, x) - _p(k - 2, x)) / (2 * k - 1)
    return a - b


def eval_dq(k: int, x):
    """``q_k'(x) = p_{k+1}(x) - p_{k-1}(x)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    _check_domain(x)
    return _p(k + 1, x) - _p(k - 1, x)


def eval_d2q(k: int, x):
    """``q_k''(x) = (2k+1) p_k(x)``."""
    return (2 * k + 1) * eval_p(k, x)


def q_legendre_coeffs(k: int) -> dict[int, Fraction]:
    """Exact Legendre coefficients of ``q_k``: ``{n: c_n}``."""
    out: dict[int, Fraction] = {}

    def add(n: int, c: Fraction) -> None:
        if n < 0:
            n, c = -n - 1, -c
        out[n] = out.get(n, Fraction(0)) + c

    add(k + 2, Fraction(1, 2 * k + 3))
    add(k, -Fraction(1, 2 * k + 3))
    add(k, -Fraction(1, 2 * k - 1))
    add(k - 2, Fraction(1, 2 * k - 1))
    return {n: c for n, c in sorted(out.items()) if c != 0}


def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    if n < 1:
        raise ValueError("need at least one node")
    return np.polynomial.legendre.leggauss(n)


def _default_node_count(degree: int) -> int:
    return math.ceil((degree + 2) / 2) + 2


def moments(
    f: Callable[[np.ndarray], np.ndarray],
    m_max: int,
    h: float,
    degree: int | None = None,
    n_nodes: int | None = None,
) -> np.ndarray:
    """Thickness moments ``f^m = int_{-h}^{h} f(t) p_m(t/h) dt``, m = 0..m_max.

    ``degree`` is the declared polynomial degree of ``f``; the rule is exact
    when ``degree + m_max <= 2 n - 1``. ``f`` may return extra trailing axes
    (e.g. one value per spatial mode); the moment index is prepended.
    """
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    if h <= 0:
        raise ValueError("half-thickness must be positive")
    need = (degree if degree is not None else 2 * m_max) + m_max
    if n_nodes is None:
        n_nodes = _default_node_count(need)
    elif degree is not None and need > 2 * n_nodes - 1:
        raise QuadratureError(
            f"{n_nodes}-point rule is exact to degree {2 * n_nodes - 1}, "
            f"integrand has degree {need}"
        )
    x, w = gauss_nodes(n_nodes)
    vals = np.asarray(f(h * x), dtype=float)
    if vals.ndim == 0:
        vals = np.full(x.shape, float(vals))
    table = np.array([w * _p(m, x) for m in range(m_max + 1)])
    return h * np.tensordot(table, vals, axes=(1, 0))


@dataclass(frozen=True)
class LegendreSeries:
    """``F(z) = sum_n c_n p_n(arg(z))``.

    ``arg`` is ``z/h`` when ``offset`` is zero and the convention is
    "centered"; "shifted" uses ``(z - offset)/(2h)`` and "doubled" uses
    ``(2z - offset)/(2h)``.
    """

    coeffs: tuple
    h: float
    offset: float = 0
    convention: str = "centered"

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("half-thickness must be positive")
        if self.convention not in ("centered", "shifted", "doubled"):
            raise ValueError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def argument(self, z):
        if self.convention == "centered":
            return (z - self.offset) / self.h
        if self.convention == "shifted":
            return (z - self.offset) / (2 * self.h)
        return (2 * z - self.offset) / (2 * self.h)

    def __call__(self, z):
        x = self.argument(z)
        _check_domain(x)
        total = 0 * _one_like(x)
        for n, c in enumerate(self.coeffs):
            if c:
                total = total + c * _p(n, x)
        return total

    def face_values(self) -> tuple:
        """Values at ``arg = +1`` and ``arg = -1``."""
        plus = sum(self.coeffs)
        minus = sum(c if n % 2 == 0 else -c for n, c in enumerate(self.coeffs))
        return plus, minus

    def to_json(self) -> str:
        return json.dumps(
            {"h": self.h, "offset": self.offset, "coeffs": [float(c) for c in self.coeffs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "LegendreSeries":
        d = json.loads(text)
        return cls(coeffs=tuple(d["coeffs"]), h=d["h"], offset=d.get("offset", 0))


@dataclass(frozen=True)
class DifferenceBasisSeries:
    """Face-compatible thickness profile.

    ``F(z) = ((h+z) g+ + (h-z) g-)/(2h) + sum_{s>=1} T^s [p_{s+1}(z/h) - p_{s-1}(z/h)]``

    ``bracket_coeffs[0]`` is ``T^1``. The bracket functions vanish at
    ``z = +-h``, so ``F(+-h) = g+-`` whatever the brackets are.
    """

    bracket_coeffs: tuple
    g_minus: object
    g_plus: object
    h: object

    def __post_init__(self):
        object.__setattr__(self, "bracket_coeffs", tuple(self.bracket_coeffs))
        if self.h <= 0:
            raise ValueError("half-thickness must be positive")

    @property
    def affine_part(self) -> tuple:
        return (self.g_minus, self.g_plus)

    def __call__(self, z):
        h = self.h
        x = z / h
        _check_domain(x)
        val = ((h + z) * self.g_plus + (h - z) * self.g_minus) / (2 * h)
        for s, t in enumerate(self.bracket_coeffs, start=1):
            if t:
                val = val + t * (_p(s + 1, x) - _p(s - 1, x))
        return val

    def to_legendre(self) -> LegendreSeries:
        """Same function as an ordinary Legendre series in ``z/h``."""
        n_terms = max(2, len(self.bracket_coeffs) + 2)
        c = [0 * self.g_plus] * n_terms
        c[0] = (self.g_plus + self.g_minus) / 2
        c[1] = (self.g_plus - self.g_minus) / 2
        for s, t in enumerate(self.bracket_coeffs, start=1):
            c[s + 1] = c[s + 1] + t
            c[s - 1] = c[s - 1] - t
        return LegendreSeries(tuple(c), h=self.h)


def reconstruct_face_trace(series: DifferenceBasisSeries, face: str):
    """Evaluate the full series at ``z = +h`` (face "+") or ``z = -h`` (face "-")."""
    if face not in ("+", "-"):
        raise ValueError("face must be '+' or '-'")
    z = series.h if face == "+" else -series.h
    return series(z)
