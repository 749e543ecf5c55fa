"""Hierarchic (Vekua-type) plate system in Legendre displacement moments.

The displacement is ``u_i(x, y, z) = sum_n u_i^n(x, y) p_n(z/h)``, n = 0..N.
Galerkin projection of ``d_j sigma_ij = f_i`` on ``p_m(z/h)``, divided by
``h c_m`` (``c_m = 2/(2m+1)``), gives for each m

    u_+ :  mu lap u_+^m + (lam+mu) grad div u_+^m + sum_k G[m,k] grad u_3^k + sum_k Zp[m,k] u_+^k
    u_3 :  mu lap u_3^m + sum_k Dv[m,k] div u_+^k + sum_k Z3[m,k] u_3^k

with, over k of opposite parity to m,

    G[m,k]  = (2m+1)/h * (lam if k > m else -mu)
    Dv[m,k] = (2m+1)/h * (mu if k > m else -lam)

and, over k of the same parity, with s = min(m, k),

    Zp[m,k] = -mu (2m+1)/(2h^2) s(s+1),   Z3[m,k] = -(lam+2mu) (2m+1)/(2h^2) s(s+1).

The right side is ``(f^m - g^+ + (-1)^m g^-)/(h c_m)``. With the pairing
``(U, V) = sum_m (2m+1)^-1 int u^m . v^m`` the operator is self-adjoint and
``-(L U, U)`` is the elastic energy divided by ``2h``.

The "printed" variant keeps only ``k <= m`` in the zero-order sums, with
weight ``k(k+1)``. It coincides with the Galerkin form for N <= 2.

Spatially, every moment is a double sine series on the rectangle, which
gives homogeneous Dirichlet data on the edge. Quadratic forms are summed
exactly with 1D sine/cosine Gram matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import legendre
from .config import PlateConfig

__all__ = [
    "PlateConfig",
    "MomentField",
    "SurfaceLoads",
    "StressMomentField",
    "MomentOperator",
    "KornReport",
    "FaceTraceDefect",
    "coupling_coefficients",
    "symbol",
    "symbol_discrepancy",
    "assemble_L",
    "rhs_moments",
    "solve",
    "recover_stress_moments",
    "face_trace_defect",
    "korn_check",
    "best_constants",
    "dumps",
]


# --- spatial basis ------------------------------------------------------------


def _gram_1d(k1: str, k2: str, n: int, length: float) -> np.ndarray:
    """``int_0^L f_p g_p'`` for f, g in {sin, cos}(p pi x / L), p = 1..n."""
    if k1 == k2:
        return 0.5 * length * np.eye(n)
    p = np.arange(1, n + 1)[:, None].astype(float)
    q = np.arange(1, n + 1)[None, :].astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (length / math.pi) * p * (1 - (-1.0) ** (p + q)) / (p**2 - q**2)
    g[np.isclose(p - q, 0)] = 0.0
    return g if (k1, k2) == ("s", "c") else g.T


@dataclass
class MomentField:
    """Sine coefficients ``coeffs[n, i, p-1, q-1]`` of ``u_i^n``."""

    coeffs: np.ndarray
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 4 or self.coeffs.shape[1] != 3:
            raise ValueError("coeffs must have shape (N+1, 3, P, Q)")

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def P(self) -> int:
        return self.coeffs.shape[2]

    @property
    def Q(self) -> int:
        return self.coeffs.shape[3]

    @classmethod
    def zeros(cls, N: int, P: int, Q: int, a=1.0, b=1.0) -> "MomentField":
        return cls(np.zeros((N + 1, 3, P, Q)), a, b)

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, P: int, Q: int, a=1.0, b=1.0) -> "MomentField":
        return cls(rng.standard_normal((N + 1, 3, P, Q)), a, b)

    def flat(self) -> np.ndarray:
        return self.coeffs.ravel()

    def evaluate(self, n: int, i: int, x, y):
        return _eval_typed({"ss": self.coeffs[n, i]}, x, y, self.a, self.b)

    def midplane(self, x, y) -> np.ndarray:
        """``u_i(x, y, 0)`` for i = 1, 2, 3; shape (3, *x.shape)."""
        w = np.array([legendre.eval_p(n, 0.0) for n in range(self.N + 1)])
        c = np.tensordot(w, self.coeffs, axes=(0, 0))
        return np.array([_eval_typed({"ss": c[i]}, x, y, self.a, self.b) for i in range(3)])

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "N": self.N, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MomentField":
        return cls(np.array(d["coeffs"]), d["a"], d["b"])


def _basis(kind: str, n: int, x, length: float):
    k = np.arange(1, n + 1)
    arg = np.multiply.outer(np.asarray(x, dtype=float), k * math.pi / length)
    return np.sin(arg) if kind == "s" else np.cos(arg)


def _eval_typed(field_: dict, x, y, a: float, b: float):
    """Evaluate ``sum_t sum_pq c_t[p, q] X_t(x) Y_t(y)`` at points (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    for t, c in field_.items():
        P, Q = c.shape
        bx = _basis(t[0], P, x, a)
        by = _basis(t[1], Q, y, b)
        out = out + np.einsum("...p,pq,...q->...", bx, c, by)
    return out


@dataclass
class SurfaceLoads:
    """Face tractions and body-force moments as sine coefficients.

    ``g_plus``, ``g_minus``: shape (3, P, Q), the values of ``sigma_i3`` at
    ``z = +h`` and ``z = -h``. ``f_moments``: shape (M+1, 3, P, Q), moments
    ``int f_i p_m(t/h) dt``.
    """

    g_plus: np.ndarray
    g_minus: np.ndarray
    f_moments: np.ndarray | None = None

    def __post_init__(self):
        self.g_plus = np.asarray(self.g_plus, dtype=float)
        self.g_minus = np.asarray(self.g_minus, dtype=float)
        if self.g_plus.shape != self.g_minus.shape or self.g_plus.shape[0] != 3:
            raise ValueError("face loads must share shape (3, P, Q)")
        if self.f_moments is not None:
            self.f_moments = np.asarray(self.f_moments, dtype=float)

    @classmethod
    def zeros(cls, P: int, Q: int) -> "SurfaceLoads":
        return cls(np.zeros((3, P, Q)), np.zeros((3, P, Q)))

    @classmethod
    def pressure(cls, q: float, P: int, Q: int, mode=(1, 1), face: str = "-") -> "SurfaceLoads":
        """Single-mode normal load ``sigma_33 = -q`` on the bottom (``"-"``) or top (``"+"``) face."""
        if face not in "+-" or len(face) != 1:
            raise ValueError("face must be '+' or '-'")
        g = np.zeros((2, 3, P, Q))
        g[0 if face == "+" else 1, 2, mode[0] - 1, mode[1] - 1] = -q
        return cls(g[0], g[1])

    def with_body_force(self, profile, h: float, m_max: int, degree: int | None = None) -> "SurfaceLoads":
        """Attach moments of ``profile(t)`` -> array (3, P, Q) of sine coefficients at height t."""
        f = legendre.moments(lambda t: np.stack([profile(ti) for ti in t]), m_max, h, degree=degree)
        return SurfaceLoads(self.g_plus, self.g_minus, f)

    @property
    def shape(self) -> tuple:
        return self.g_plus.shape[1:]


# --- Fourier symbol -----------------------------------------------------------


def coupling_coefficients(config: PlateConfig, N: int, variant: str = "galerkin") -> dict:
    """Matrices G, Dv, Zp, Z3 of shape (N+1, N+1)."""
    if variant not in ("galerkin", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    lam, mu, h = config.lam, config.mu, config.h
    G = np.zeros((N + 1, N + 1))
    Dv = np.zeros((N + 1, N + 1))
    zk = np.zeros((N + 1, N + 1))
    for m in range(N + 1):
        for k in range(N + 1):
            if (m - k) % 2:
                G[m, k] = (2 * m + 1) / h * (lam if k > m else -mu)
                Dv[m, k] = (2 * m + 1) / h * (mu if k > m else -lam)
            elif variant == "galerkin":
                s = min(m, k)
                zk[m, k] = s * (s + 1)
            elif k <= m:
                zk[m, k] = k * (k + 1)
    scale = np.array([(2 * m + 1) / (2 * h * h) for m in range(N + 1)])[:, None]
    return {"G": G, "Dv": Dv, "Zp": -mu * scale * zk, "Z3": -(lam + 2 * mu) * scale * zk}


def symbol(config: PlateConfig, N: int, k1: float, k2: float, variant: str = "galerkin") -> np.ndarray:
    """Symbol of L on ``U exp(i(k1 x + k2 y))``; unknowns ordered (n, i)."""
    lam, mu = config.lam, config.mu
    c = coupling_coefficients(config, N, variant)
    kv = np.array([k1, k2], dtype=float)
    k2n = kv @ kv
    lame = -(mu * k2n * np.eye(2) + (lam + mu) * np.outer(kv, kv))
    S = np.zeros((3 * (N + 1), 3 * (N + 1)), dtype=complex)
    for m in range(N + 1):
        r = 3 * m
        for k in range(N + 1):
            s = 3 * k
            S[r : r + 2, s : s + 2] += c["Zp"][m, k] * np.eye(2)
            S[r : r + 2, s + 2] += c["G"][m, k] * 1j * kv
            S[r + 2, s : s + 2] += c["Dv"][m, k] * 1j * kv
            S[r + 2, s + 2] += c["Z3"][m, k]
        S[r : r + 2, r : r + 2] += lame
        S[r + 2, r + 2] += -mu * k2n
    return S


def symbol_discrepancy(config: PlateConfig, N: int, k1: float, k2: float, reference: np.ndarray) -> dict:
    """Split ``symbol(printed) - reference`` into 2nd, 1st and 0th order parts (max abs)."""

    def parts(f):
        s0 = f(0.0, 0.0)
        sp, sm = f(k1, k2), f(-k1, -k2)
        return (sp + sm) / 2 - s0, (sp - sm) / 2, s0

    printed = parts(lambda x, y: symbol(config, N, x, y, "printed"))
    ref = parts(lambda x, y: reference(x, y))
    names = ("second_order", "first_order", "zero_order")
    return {n: float(np.max(np.abs(p - r))) for n, p, r in zip(names, printed, ref)}


# --- energy form on the sine basis ---------------------------------------------


class _Maps:
    """Linear maps from the flat dof vector to typed coefficient arrays."""

    def __init__(self, N: int, P: int, Q: int, a: float, b: float):
        self.N, self.P, self.Q, self.a, self.b = N, P, Q, a, b
        self.ndof = (N + 1) * 3 * P * Q
        self.gx = {k1 + k2: _gram_1d(k1, k2, P, a) for k1 in "sc" for k2 in "sc"}
        self.gy = {k1 + k2: _gram_1d(k1, k2, Q, b) for k1 in "sc" for k2 in "sc"}
        self.dx = np.kron(np.diag(np.arange(1, P + 1) * math.pi / a), np.eye(Q))
        self.dy = np.kron(np.eye(P), np.diag(np.arange(1, Q + 1) * math.pi / b))

    def sel(self, n: int, i: int) -> dict:
        m = np.zeros((self.P * self.Q, self.ndof))
        start = (n * 3 + i) * self.P * self.Q
        m[:, start : start + self.P * self.Q] = np.eye(self.P * self.Q)
        return {"ss": m}

    def d(self, f: dict, axis: int) -> dict:
        (t, m), = f.items()
        assert t == "ss"
        return {"cs": self.dx @ m} if axis == 0 else {"sc": self.dy @ m}

    def thick(self, j: int, i: int, h: float) -> dict:
        """Legendre coefficient j of ``d_z u_i``: (2j+1)/h sum_{k > j, odd gap} u_i^k."""
        m = np.zeros((self.P * self.Q, self.ndof))
        for k in range(j + 1, self.N + 1, 2):
            m += self.sel(k, i)["ss"]
        return {"ss": (2 * j + 1) / h * m}

    def gram(self, t1: str, t2: str) -> np.ndarray:
        return np.kron(self.gx[t1[0] + t2[0]], self.gy[t1[1] + t2[1]])

    def inner(self, f: dict, g: dict) -> np.ndarray:
        out = np.zeros((self.ndof, self.ndof))
        for t1, m1 in f.items():
            for t2, m2 in g.items():
                out += m1.T @ self.gram(t1, t2) @ m2
        return out

    def sq(self, f: dict) -> np.ndarray:
        return self.inner(f, f)


def _add(*fields, weights=None) -> dict:
    out: dict = {}
    weights = weights or [1.0] * len(fields)
    for f, w in zip(fields, weights):
        for t, m in f.items():
            out[t] = out[t] + w * m if t in out else w * m
    return out


def _strain(mp: _Maps, j: int, h: float) -> dict:
    u = [mp.sel(j, i) for i in range(3)]
    return {
        "11": mp.d(u[0], 0),
        "22": mp.d(u[1], 1),
        "33": mp.thick(j, 2, h),
        "12": _add(mp.d(u[0], 1), mp.d(u[1], 0), weights=[0.5, 0.5]),
        "13": _add(mp.d(u[2], 0), mp.thick(j, 0, h), weights=[0.5, 0.5]),
        "23": _add(mp.d(u[2], 1), mp.thick(j, 1, h), weights=[0.5, 0.5]),
    }


@dataclass
class MomentOperator:
    """The truncated operator on sine-mode moment fields.

    ``K`` is the matrix of ``-(L U, V)``; the norm matrices give the right
    sides of the Korn-type bounds.
    """

    config: PlateConfig
    N: int
    P: int
    Q: int
    K: np.ndarray
    norms: dict = field(repr=False)

    def bilinear(self, U: MomentField, V: MomentField) -> float:
        """``-(L U, V)``."""
        return float(U.flat() @ self.K @ V.flat())

    def quadratic(self, U: MomentField) -> float:
        return self.bilinear(U, U)

    def symbol(self, k1: float, k2: float, variant: str = "galerkin") -> np.ndarray:
        return symbol(self.config, self.N, k1, k2, variant)

    def norm(self, name: str, U: MomentField) -> float:
        return float(U.flat() @ self.norms[name] @ U.flat())


def assemble_L(config: PlateConfig, N: int, P: int = 4, Q: int = 4) -> MomentOperator:
    if N < 0:
        raise ValueError("N must be non-negative")
    lam, mu, h = config.lam, config.mu, config.h
    mp = _Maps(N, P, Q, config.a, config.b)
    K = np.zeros((mp.ndof, mp.ndof))
    grad = np.zeros_like(K)
    div = np.zeros_like(K)
    plus = np.zeros_like(K)
    third = np.zeros_like(K)
    for j in range(N + 1):
        w = 1.0 / (2 * j + 1)
        e = _strain(mp, j, h)
        tr = _add(e["11"], e["22"], e["33"])
        dens = lam * mp.sq(tr) + 2 * mu * (
            mp.sq(e["11"]) + mp.sq(e["22"]) + mp.sq(e["33"])
            + 2 * (mp.sq(e["12"]) + mp.sq(e["13"]) + mp.sq(e["23"]))
        )
        K += w * dens
        u1, u2 = mp.sel(j, 0), mp.sel(j, 1)
        for u in (u1, u2):
            grad += w * (mp.sq(mp.d(u, 0)) + mp.sq(mp.d(u, 1)))
            plus += w * mp.sq(u)
        div += w * mp.sq(_add(mp.d(u1, 0), mp.d(u2, 1)))
        # (2j+1)/h^2 |sum_{k >= j+1, step 2} u_3^k|^2 = (2j+1)^-1 |thick(j, 3)|^2
        third += w * mp.sq(mp.thick(j, 2, h))
    K = 0.5 * (K + K.T)
    norms = {"grad_plus": grad, "div_plus": div, "plus": plus, "third": third}
    return MomentOperator(config, N, P, Q, K, norms)


# --- loads and solve ------------------------------------------------------------


def rhs_moments(config: PlateConfig, loads: SurfaceLoads, N: int, variant: str = "galerkin") -> np.ndarray:
    """Right side of the moment equations, shape (N+1, 3, P, Q).

    "galerkin": ``(f^n - g^+ + (-1)^n g^-)/(h c_n)`` for every n.
    "printed": ``(f^n - (g^+ - g^-)/2 delta_{n0})/(h c_n)``.
    """
    h = config.h
    P, Q = loads.shape
    out = np.zeros((N + 1, 3, P, Q))
    for n in range(N + 1):
        hc = h * 2.0 / (2 * n + 1)
        f = np.zeros((3, P, Q))
        if loads.f_moments is not None and n < loads.f_moments.shape[0]:
            f = loads.f_moments[n]
        if variant == "galerkin":
            out[n] = (f - loads.g_plus + (-1) ** n * loads.g_minus) / hc
        elif variant == "printed":
            face = 0.5 * (loads.g_plus - loads.g_minus) if n == 0 else 0.0
            out[n] = (f - face) / hc
        else:
            raise ValueError(f"unknown variant {variant!r}")
    return out


def solve(config: PlateConfig, loads: SurfaceLoads, N: int) -> MomentField:
    """Galerkin solution of ``L U = R`` in the sine basis of the load's mode count."""
    P, Q = loads.shape
    op = assemble_L(config, N, P, Q)
    R = rhs_moments(config, loads, N)
    w = np.array([1.0 / (2 * n + 1) for n in range(N + 1)])[:, None, None, None]
    # -(L U, V) = -(R, V);  int sin*sin = ab/4 per mode
    F = -(w * R * config.a * config.b / 4).ravel()
    c = np.linalg.solve(op.K, F)
    return MomentField(c.reshape(N + 1, 3, P, Q), config.a, config.b)


# --- stresses ---------------------------------------------------------------------


def _raw_stress(U: MomentField, config: PlateConfig) -> dict:
    """Legendre coefficients of the Hooke stresses as typed sine/cosine arrays."""
    lam, mu, h = config.lam, config.mu, config.h
    N = U.N
    px = (np.arange(1, U.P + 1) * math.pi / U.a)[:, None]
    qy = (np.arange(1, U.Q + 1) * math.pi / U.b)[None, :]
    c = U.coeffs
    out = {k: [] for k in ("11", "22", "12", "13", "23", "33")}
    for j in range(N + 1):
        th = [(2 * j + 1) / h * sum((c[k, i] for k in range(j + 1, N + 1, 2)), np.zeros(c.shape[2:])) for i in range(3)]
        dx = [px * c[j, i] for i in range(3)]  # cos-sin
        dy = [qy * c[j, i] for i in range(3)]  # sin-cos
        div = {"cs": dx[0], "sc": dy[1]}
        out["11"].append(_add({"cs": (lam + 2 * mu) * dx[0]}, {"sc": lam * dy[1]}, {"ss": lam * th[2]}))
        out["22"].append(_add({"cs": lam * dx[0]}, {"sc": (lam + 2 * mu) * dy[1]}, {"ss": lam * th[2]}))
        out["12"].append({"sc": mu * dy[0], "cs": mu * dx[1]})
        out["13"].append({"cs": mu * dx[2], "ss": mu * th[0]})
        out["23"].append({"sc": mu * dy[2], "ss": mu * th[1]})
        out["33"].append(_add({t: lam * v for t, v in div.items()}, {"ss": (lam + 2 * mu) * th[2]}))
    return out


@dataclass
class StressMomentField:
    """Stress moments sampled on a grid.

    ``raw[comp]``: (N+1, nx, ny) Legendre coefficients of the Hooke stress.
    ``brackets[comp]``: (N+1, nx, ny) coefficients ``T^s``, s = 1..N+1, of the
    face-compatible representation of ``sigma_i3`` (comp in 13, 23, 33).
    ``g_plus``, ``g_minus``: (3, nx, ny) face data on the grid.
    """

    x: np.ndarray
    y: np.ndarray
    h: float
    raw: dict
    brackets: dict
    g_plus: np.ndarray
    g_minus: np.ndarray

    @property
    def N(self) -> int:
        return self.raw["11"].shape[0] - 1

    def difference_series(self, comp: str, ix: int, iy: int) -> legendre.DifferenceBasisSeries:
        i = {"13": 0, "23": 1, "33": 2}[comp]
        return legendre.DifferenceBasisSeries(
            tuple(self.brackets[comp][:, ix, iy]),
            g_minus=float(self.g_minus[i, ix, iy]),
            g_plus=float(self.g_plus[i, ix, iy]),
            h=self.h,
        )

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "raw": {k: v.tolist() for k, v in sorted(self.raw.items())},
            "brackets": {k: v.tolist() for k, v in sorted(self.brackets.items())},
        }


def _default_grid(a: float, b: float, n: int = 9):
    return np.linspace(0, a, n), np.linspace(0, b, n)


def recover_stress_moments(
    U: MomentField, config: PlateConfig, loads: SurfaceLoads | None = None, grid=None
) -> StressMomentField:
    """Hooke stresses of U as Legendre moments, and the bracket form of ``sigma_i3``.

    ``T^m = sum_{j >= m+1, step 2} s^j`` where ``s^j`` are the raw moments;
    for ``sigma_a3`` this is
    ``mu sum_{s >= m+1, step 2} [u_{3,a}^s + ((s+1)(s+2) - m(m+1))/(2h) u_a^{s+1}]``.
    """
    x, y = grid if grid is not None else _default_grid(U.a, U.b)
    X, Y = np.meshgrid(x, y, indexing="ij")
    typed = _raw_stress(U, config)
    raw = {k: np.array([_eval_typed(f, X, Y, U.a, U.b) for f in v]) for k, v in typed.items()}
    N = U.N
    brackets = {}
    for comp in ("13", "23", "33"):
        s = raw[comp]
        T = np.zeros((N + 1,) + X.shape)
        for m in range(1, N + 2):
            for j in range(m + 1, N + 1, 2):
                T[m - 1] += s[j]
        brackets[comp] = T
    if loads is None:
        loads = SurfaceLoads.zeros(U.P, U.Q)
    gp = np.array([_eval_typed({"ss": loads.g_plus[i]}, X, Y, U.a, U.b) for i in range(3)])
    gm = np.array([_eval_typed({"ss": loads.g_minus[i]}, X, Y, U.a, U.b) for i in range(3)])
    return StressMomentField(x, y, config.h, raw, brackets, gp, gm)


def _project_ss(f: dict, a: float, b: float) -> np.ndarray:
    """L2 projection of a typed field on the sine-sine modes."""
    out = 0.0
    for t, c in f.items():
        P, Q = c.shape
        gx = _gram_1d("s", t[0], P, a)
        gy = _gram_1d("s", t[1], Q, b)
        out = out + gx @ c @ gy.T
    return out * 4.0 / (a * b)


@dataclass(frozen=True)
class FaceTraceDefect:
    """Face defects ``|sigma_i3(+-h) - g_i^+-|``, sup over components.

    ``difference_*``: bracket (face-compatible) form, per sine mode.
    ``legendre_*``: raw Legendre sum of the Hooke moments, per sine mode
    (projection of the face trace on the sine test space).
    ``grid_legendre_*``: raw sum, pointwise on the sample grid; this also
    contains the cosine-type parts that the test space cannot see.
    """

    difference_plus: float
    difference_minus: float
    legendre_plus: float
    legendre_minus: float
    grid_legendre_plus: float
    grid_legendre_minus: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def face_trace_defect(
    U: MomentField, loads: SurfaceLoads, config: PlateConfig, grid=None
) -> FaceTraceDefect:
    """Face values of ``sigma_i3`` in the bracket form (a) and as a raw Legendre sum (b)."""
    typed = _raw_stress(U, config)
    N = U.N
    dp = dm = lp = lm = 0.0
    for i, comp in enumerate(("13", "23", "33")):
        s = np.array([_project_ss(f, U.a, U.b) for f in typed[comp]])
        plus = s.sum(axis=0)
        minus = sum((-1) ** j * s[j] for j in range(N + 1))
        lp = max(lp, float(np.max(np.abs(plus - loads.g_plus[i]))))
        lm = max(lm, float(np.max(np.abs(minus - loads.g_minus[i]))))
        T = np.zeros((N + 1,) + s.shape[1:])
        for m in range(1, N + 2):
            for j in range(m + 1, N + 1, 2):
                T[m - 1] += s[j]
        for p in range(U.P):
            for q in range(U.Q):
                series = legendre.DifferenceBasisSeries(
                    tuple(T[:, p, q]), loads.g_minus[i, p, q], loads.g_plus[i, p, q], config.h
                )
                dp = max(dp, abs(legendre.reconstruct_face_trace(series, "+") - series.g_plus))
                dm = max(dm, abs(legendre.reconstruct_face_trace(series, "-") - series.g_minus))
    sm = recover_stress_moments(U, config, loads, grid)
    gp = gm = 0.0
    for i, comp in enumerate(("13", "23", "33")):
        s = sm.raw[comp]
        signs = np.array([(-1.0) ** j for j in range(s.shape[0])])
        gp = max(gp, float(np.max(np.abs(s.sum(axis=0) - sm.g_plus[i]))))
        gm = max(gm, float(np.max(np.abs(np.tensordot(signs, s, axes=(0, 0)) - sm.g_minus[i]))))
    return FaceTraceDefect(float(dp), float(dm), lp, lm, gp, gm)


# --- Korn-type bounds -----------------------------------------------------------


@dataclass
class KornReport:
    N: int
    trials: int
    lhs: list
    bound_grad: list
    bound_fried: list
    margin_grad: float
    margin_fried: float
    constant_grad: float
    constant_fried: float
    coercivity_ratio: float
    violations: list
    best_grad: float = float("nan")
    best_fried: float = float("nan")

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "trials": self.trials,
            "min_margin_grad": self.margin_grad,
            "min_margin_fried": self.margin_fried,
            "constant_grad": self.constant_grad,
            "constant_fried": self.constant_fried,
            "coercivity_ratio": self.coercivity_ratio,
            "best_constant_grad": self.best_grad,
            "best_constant_fried": self.best_fried,
            "violations": self.violations,
            "ok": self.ok,
        }


def korn_check(
    config: PlateConfig,
    N: int,
    trials: int,
    rng: np.random.Generator | None = None,
    P: int = 4,
    Q: int = 4,
    tol: float = 1e-10,
) -> KornReport:
    """Compare ``-(L_N U, U)`` with both Korn-type right sides on random fields.

    The gradient bound (``grad``: |grad u_+|^2 + |div u_+|^2 + 2|U_3|^2 in the
    weighted norms) is taken with constant 1; the Friedrichs bound (``fried``)
    uses the rectangle's constant kappa^2. Margins are relative to the size of
    the left side. ``constant_*`` are the smallest sampled ratios; ``best_*`` are the
    exact infima over the whole discrete space (generalized eigenvalues).
    The ratio ``-(LU, U) / (2 mu (|U|_1^2 + |U_3|_2^2))`` is reported only.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = rng if rng is not None else np.random.default_rng(0)
    op = assemble_L(config, N, P, Q)
    mu = config.mu
    lhs, b_grad, b_fried, r3, viol = [], [], [], [], []
    for t in range(trials):
        U = MomentField.random(rng, N, P, Q, config.a, config.b)
        e = op.quadratic(U)
        third = op.norm("third", U)
        r_grad = op.norm("grad_plus", U) + op.norm("div_plus", U) + 2 * third
        r_fried = mu * (config.kappa2 * op.norm("plus", U) + 2 * third)
        lhs.append(e)
        b_grad.append(r_grad)
        b_fried.append(r_fried)
        r3.append(e / (2 * mu * (op.norm("plus", U) + third)))
        if e - max(r_grad, r_fried) < -tol * max(1.0, abs(e)):
            viol.append({"trial": t, "lhs": e, "bound_grad": r_grad, "bound_fried": r_fried, "field": U.coeffs.tolist()})
    lhs_a, b_grad_a, b_fried_a = map(np.array, (lhs, b_grad, b_fried))
    best_grad, best_fried = best_constants(op)
    scale = np.maximum(1.0, np.abs(lhs_a))
    return KornReport(
        N=N,
        trials=trials,
        lhs=lhs,
        bound_grad=b_grad,
        bound_fried=b_fried,
        margin_grad=float(np.min((lhs_a - b_grad_a) / scale)),
        margin_fried=float(np.min((lhs_a - b_fried_a) / scale)),
        constant_grad=float(np.min(lhs_a / b_grad_a)),
        constant_fried=float(np.min(lhs_a / b_fried_a)),
        coercivity_ratio=float(np.min(r3)),
        violations=viol,
        best_grad=best_grad,
        best_fried=best_fried,
    )


def best_constants(op: MomentOperator) -> tuple[float, float]:
    """``inf -(LU, U) / bound(U)`` over the discrete space, for both bounds."""
    n = op.norms
    b_grad = n["grad_plus"] + n["div_plus"] + 2 * n["third"]
    b_fried = op.config.mu * (op.config.kappa2 * n["plus"] + 2 * n["third"])
    li = np.linalg.inv(np.linalg.cholesky(op.K))
    out = []
    for B in (b_grad, b_fried):
        top = np.max(np.linalg.eigvalsh(li @ B @ li.T))
        out.append(float(1.0 / top))
    return out[0], out[1]


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys)."""
    return json.dumps(obj, sort_keys=True, indent=1)
