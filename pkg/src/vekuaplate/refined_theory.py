"""Refined (gamma-parameterized) static bending of a rectangular plate.

Spectral parts work per sine mode on the rectangle ``a x b`` (simply
supported edges), with ``k_1 = p pi/a``, ``k_2 = q pi/b``, ``k^2 = k_1^2 + k_2^2``.
Field types follow the Navier pattern:

    w, g_3, f_3, bracket term     sin sin   ("ss")
    g_1, f_1, Q_1                 cos sin   ("cs")
    g_2, f_2, Q_2                 sin cos   ("sc")

so a ``SurfaceLoads`` array is read as (cs, sc, ss) by component here.

Bending equation (static, isotropic, remainder dropped):

    D lap^2 w = -(1 - c_g lap)(g_3^+ - g_3^-) + 2h (1 - c_n) L + div(g^+ + g^-)
                - int (t div f - (1 - (h^2 - t^2) lap/(1 - nu)) f_3) dt

with ``c_g = h^2 (1+2 gamma)(2-nu)/(3(1-nu))``, ``c_n = 2h^2 (1+2 gamma)/(3(1-nu))``
and ``L`` the Monge-Ampere term supplied by the caller. The "alternate"
reading uses ``+(1 - c_g lap)(g_3^+ - g_3^-)``, ``2h (1 - c_n lap) L`` and
``h div(g^+ - g^-)``.

Thickness integrals of body forces use Legendre moments:
``int t f dt = h f^1`` and ``int (h^2 - t^2) f dt = (2h^2/3)(f^0 - f^2)``.

Polynomial parts (planar system and compatibility equation) are exact in
``QQ[x, y]`` via ``monge_ampere``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import legendre
from . import monge_ampere as ma
from .config import PlateConfig
from .vekua_system import SurfaceLoads

__all__ = [
    "BendingProblem",
    "BendingRHS",
    "StressResultants",
    "ReissnerProfiles",
    "PlanarResidual",
    "Resultants",
    "wavenumbers",
    "bending_rhs",
    "solve_linear_plate",
    "shear_forces",
    "reissner_profiles",
    "planar_residual",
    "kr2_residual",
    "resultant_integrals",
    "exact",
]

REMAINDERS = ("bending remainder", "shear remainder")  # order-tracked only, never evaluated


@dataclass(frozen=True)
class BendingProblem:
    config: PlateConfig
    loads: SurfaceLoads

    @property
    def gamma(self) -> float:
        return self.config.gamma

    @property
    def shape(self) -> tuple:
        return self.loads.shape

    def resized(self, modes: int) -> "BendingProblem":
        """Same problem with loads truncated or zero-padded to ``modes x modes``."""

        def fit(arr):
            out = np.zeros(arr.shape[:-2] + (modes, modes))
            p, q = min(modes, arr.shape[-2]), min(modes, arr.shape[-1])
            out[..., :p, :q] = arr[..., :p, :q]
            return out

        ld = self.loads
        f = None if ld.f_moments is None else fit(ld.f_moments)
        return BendingProblem(self.config, SurfaceLoads(fit(ld.g_plus), fit(ld.g_minus), f))


def wavenumbers(config: PlateConfig, P: int, Q: int):
    """``(k1, k2, k^2)`` as (P, Q) arrays."""
    k1 = (np.arange(1, P + 1) * math.pi / config.a)[:, None] * np.ones((1, Q))
    k2 = np.ones((P, 1)) * (np.arange(1, Q + 1) * math.pi / config.b)[None, :]
    return k1, k2, k1**2 + k2**2


def _moment(loads: SurfaceLoads, m: int, i: int) -> np.ndarray:
    f = loads.f_moments
    if f is None or m >= f.shape[0]:
        return np.zeros(loads.shape)
    return f[m, i]


def _div(c1, c2, k1, k2):
    # d_1 of cos sin and d_2 of sin cos, both to sin sin
    return -(k1 * c1 + k2 * c2)


@dataclass(frozen=True)
class BendingRHS:
    """Right side of the bending equation per sine mode, split by origin."""

    face: np.ndarray
    shear: np.ndarray
    nonlinear: np.ndarray
    body: np.ndarray
    variant: str

    @property
    def total(self) -> np.ndarray:
        return self.face + self.shear + self.nonlinear + self.body


def bending_rhs(prob: BendingProblem, bracket: np.ndarray | None = None, variant: str = "printed") -> BendingRHS:
    """Mode coefficients of the bending right side.

    ``bracket``: sine coefficients of ``L[w, F]``; None means linear.
    """
    cfg, ld = prob.config, prob.loads
    h, nu, g = cfg.h, cfg.nu, cfg.gamma
    P, Q = prob.shape
    k1, k2, kk = wavenumbers(cfg, P, Q)
    c_g = h * h * (1 + 2 * g) * (2 - nu) / (3 * (1 - nu))
    c_n = 2 * h * h * (1 + 2 * g) / (3 * (1 - nu))
    jump = ld.g_plus[2] - ld.g_minus[2]
    div_p = _div(ld.g_plus[0], ld.g_plus[1], k1, k2)
    div_m = _div(ld.g_minus[0], ld.g_minus[1], k1, k2)
    L = np.zeros((P, Q)) if bracket is None else np.asarray(bracket, dtype=float)
    if variant == "printed":
        face = -(1 + c_g * kk) * jump
        shear = div_p + div_m
        nonlinear = 2 * h * (1 - c_n) * L
    elif variant == "alternate":
        face = (1 + c_g * kk) * jump
        shear = h * (div_p - div_m)
        nonlinear = 2 * h * (1 + c_n * kk) * L
    else:
        raise ValueError(f"unknown variant {variant!r}")
    div_f1 = _div(_moment(ld, 1, 0), _moment(ld, 1, 1), k1, k2)
    f30, f32 = _moment(ld, 0, 2), _moment(ld, 2, 2)
    body = -h * div_f1 + f30 + kk * (2 * h * h / 3) * (f30 - f32) / (1 - nu)
    return BendingRHS(face, shear, nonlinear, body, variant)


@dataclass
class StressResultants:
    """Plate fields as mode coefficients on one spectral grid.

    ``w``: (P, Q) sin sin. ``Q``: (2, P, Q), cos sin and sin cos. The other
    fields are filled by callers that compute them.
    """

    config: PlateConfig
    w: np.ndarray
    Q: np.ndarray | None = None
    tau: np.ndarray | None = None
    omega: np.ndarray | None = None
    I_moment: np.ndarray | None = None
    psi: np.ndarray | None = None
    modes: list = field(default_factory=list)

    def _basis(self, x, y):
        a, b = self.config.a, self.config.b
        P, Q = self.w.shape
        p, q = np.arange(1, P + 1) * math.pi / a, np.arange(1, Q + 1) * math.pi / b
        X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
        sx, cx = np.sin(X[..., None] * p), np.cos(X[..., None] * p)
        sy, cy = np.sin(Y[..., None] * q), np.cos(Y[..., None] * q)
        return sx, cx, sy, cy

    def w_grid(self, x, y) -> np.ndarray:
        sx, _, sy, _ = self._basis(x, y)
        return np.einsum("ijp,ijq,pq->ij", sx, sy, self.w)

    def Q_grid(self, x, y) -> np.ndarray:
        if self.Q is None:
            raise ValueError("shear forces not computed")
        sx, cx, sy, cy = self._basis(x, y)
        q1 = np.einsum("ijp,ijq,pq->ij", cx, sy, self.Q[0])
        q2 = np.einsum("ijp,ijq,pq->ij", sx, cy, self.Q[1])
        return np.stack([q1, q2])


def solve_linear_plate(prob: BendingProblem, modes: int | None = None, variant: str = "printed") -> StressResultants:
    """``D k^4 w = RHS`` per mode, nonlinear term dropped."""
    if modes is not None:
        prob = prob.resized(modes)
    cfg = prob.config
    P, Q = prob.shape
    _, _, kk = wavenumbers(cfg, P, Q)
    rhs = bending_rhs(prob, None, variant).total
    w = rhs / (cfg.D * kk**2)
    table = [
        {"p": p + 1, "q": q + 1, "k2": float(kk[p, q]), "rhs": float(rhs[p, q]), "w": float(w[p, q])}
        for p in range(P)
        for q in range(Q)
        if rhs[p, q] != 0
    ]
    return StressResultants(cfg, w, modes=table)


def shear_forces(w: np.ndarray, prob: BendingProblem, bracket: np.ndarray | None = None) -> np.ndarray:
    """Shear forces (2, P, Q) from the modified Helmholtz relation per mode.

    ``(1 + (1+2 gamma) h^2 k^2/3) Q_a = -D lap d_a w
        + h^2 (1+2 gamma)/(3(1-nu)) d_a (g_3^+ - g_3^- + 2h (1+nu) L)
        + g_a^+ + g_a^- - h f_a^1 + (1+nu)/(2(1-nu)) (2h^2/3) d_a (f_3^0 - f_3^2)``
    """
    cfg, ld = prob.config, prob.loads
    h, nu, g = cfg.h, cfg.nu, cfg.gamma
    P, Q = prob.shape
    w = np.asarray(w, dtype=float)
    if w.shape != (P, Q):
        raise ValueError("deflection and loads must share the mode grid")
    k1, k2, kk = wavenumbers(cfg, P, Q)
    L = np.zeros((P, Q)) if bracket is None else np.asarray(bracket, dtype=float)
    inner = ld.g_plus[2] - ld.g_minus[2] + 2 * h * (1 + nu) * L
    body3 = _moment(ld, 0, 2) - _moment(ld, 2, 2)
    out = np.zeros((2, P, Q))
    for a, ka in enumerate((k1, k2)):
        # d_a of sin sin gives k_a times the (cs | sc) coefficient
        rhs = cfg.D * kk * ka * w
        rhs = rhs + h * h * (1 + 2 * g) / (3 * (1 - nu)) * ka * inner
        rhs = rhs + ld.g_plus[a] + ld.g_minus[a] - h * _moment(ld, 1, a)
        rhs = rhs + (1 + nu) / (2 * (1 - nu)) * (2 * h * h / 3) * ka * body3
        out[a] = rhs / (1 + (1 + 2 * g) * h * h * kk / 3)
    return out


# --- Reissner profiles -------------------------------------------------------------


def exact(v) -> Fraction:
    """Exact rational of an int, Fraction or float (its shortest decimal repr)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(repr(float(v)))


@dataclass(frozen=True)
class ReissnerProfiles:
    z: tuple
    sigma_a3: tuple
    sigma_33: tuple
    traces: dict  # exact face values
    checks: dict
    shear_integral_ratio: Fraction  # int sigma_a3 dz / Q_a for the formula as written
    artificial_flux_condition: bool = True

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "z": [float(v) for v in self.z],
            "sigma_a3": [float(v) for v in self.sigma_a3],
            "sigma_33": [float(v) for v in self.sigma_33],
            "traces": {k: str(v) for k, v in self.traces.items()},
            "checks": dict(self.checks),
            "shear_integral_ratio": str(self.shear_integral_ratio),
            "artificial_flux_condition": self.artificial_flux_condition,
        }


def reissner_profiles(Q_alpha, q, h, z_samples=()) -> ReissnerProfiles:
    """Classical Reissner thickness profiles and their face traces.

    ``sigma_a3 = 3 Q/h (1 - z^2/h^2)`` (prefactor as commonly printed; it
    integrates to ``4 Q``), ``sigma_33 = -3q/4 (2/3 - z/h + (z/h)^3/3)``.
    Face values are computed in exact arithmetic.
    """
    Qa, qq, hh = exact(Q_alpha), exact(q), exact(h)
    if hh <= 0:
        raise ValueError("half-thickness must be positive")

    def s_a3(z):
        return 3 * Qa / hh * (1 - (z / hh) ** 2)

    def s_33(z):
        t = z / hh
        return -Fraction(3, 4) * qq * (Fraction(2, 3) - t + t**3 / 3)

    def ds_33(z):
        return -Fraction(3, 4) * qq * (-1 / hh + z**2 / hh**3)

    zs = []
    for z in z_samples:
        z = exact(z)
        if abs(z) > hh:
            raise legendre.DomainError(f"z = {z} outside [-h, h]")
        zs.append(z)
    traces = {
        "sigma_33(+h)": s_33(hh),
        "sigma_33(-h)": s_33(-hh),
        "d3 sigma_33(+h)": ds_33(hh),
        "d3 sigma_33(-h)": ds_33(-hh),
        "sigma_a3(+h)": s_a3(hh),
        "sigma_a3(-h)": s_a3(-hh),
    }
    checks = {
        "top_face_free": traces["sigma_33(+h)"] == 0,
        "bottom_face_pressure": traces["sigma_33(-h)"] == -qq,
        "flux_vanishes_top": traces["d3 sigma_33(+h)"] == 0,
        "flux_vanishes_bottom": traces["d3 sigma_33(-h)"] == 0,
        "shear_free_faces": traces["sigma_a3(+h)"] == 0 == traces["sigma_a3(-h)"],
    }
    # int_{-h}^{h} 3Q/h (1 - z^2/h^2) dz = 4Q
    ratio = Fraction(4) if Qa else Fraction(0)
    return ReissnerProfiles(
        tuple(zs), tuple(s_a3(z) for z in zs), tuple(s_33(z) for z in zs), traces, checks, ratio
    )


# --- polynomial residuals ------------------------------------------------------------


def _materials(config: PlateConfig) -> dict:
    lam, mu, h = exact(config.lam), exact(config.mu), exact(config.h)
    ls = exact(config.lambda_star) if config.lambda_star is not None else 2 * lam * mu / (lam + 2 * mu)
    return {
        "lam": lam,
        "mu": mu,
        "h": h,
        "lam_star": ls,
        "E": mu * (3 * lam + 2 * mu) / (lam + mu),
        "nu": lam / (2 * (lam + mu)),
        "lam_1": lam / (2 * h * (lam + 2 * mu)),
    }


def _qq(c: Fraction):
    return ma.QQ(c.numerator, c.denominator)


def _sup(p) -> float:
    return max((abs(float(c)) for c in p.values()), default=0.0)


@dataclass(frozen=True)
class PlanarResidual:
    r1: object  # Poly2
    r2: object

    @property
    def sup(self) -> float:
        """Largest coefficient magnitude of either residual."""
        return max(_sup(self.r1), _sup(self.r2))

    @property
    def ok(self) -> bool:
        return self.r1 == 0 and self.r2 == 0


def planar_residual(tau, omega, w_bar, config: PlateConfig, f_bar=None, sigma33_int=None) -> PlanarResidual:
    """Residual LHS - RHS of the in-plane equilibrium pair, exact in QQ[x, y].

        (lam* + 2mu) d_1 tau + mu d_2 omega = f_1/(2h) + mu A + lam_1 d_1 S
        (lam* + 2mu) d_2 tau - mu d_1 omega = f_2/(2h) - mu B + lam_1 d_2 S

    ``A``, ``B`` come from the first-order form of ``[w, w]``; ``S`` is the
    thickness integral of ``sigma_33``; ``lam_1 = lam/(2h(lam + 2mu))``.
    """
    X, Y = ma.X, ma.Y
    m = _materials(config)
    f1, f2 = f_bar if f_bar is not None else (ma.R2.zero, ma.R2.zero)
    S = sigma33_int if sigma33_int is not None else ma.R2.zero
    dec = ma.divergence_decomposition(w_bar, w_bar)
    c, mu, l1, inv2h = _qq(m["lam_star"] + 2 * m["mu"]), _qq(m["mu"]), _qq(m["lam_1"]), _qq(1 / (2 * m["h"]))
    r1 = c * tau.diff(X) + mu * omega.diff(Y) - (inv2h * f1 + mu * dec.A + l1 * S.diff(X))
    r2 = c * tau.diff(Y) - mu * omega.diff(X) - (inv2h * f2 - mu * dec.B + l1 * S.diff(Y))
    return PlanarResidual(r1, r2)


def kr2_residual(w, sigma_sum, config: PlateConfig, f_bar=None, sigma33_int=None):
    """Residual of the compatibility equation, exact in QQ[x, y].

    ``lap(s11 + s22) = -E/2 [w, w] + nu/(2h) lap S + (1+nu)/(2h) div f``
    """
    m = _materials(config)
    f1, f2 = f_bar if f_bar is not None else (ma.R2.zero, ma.R2.zero)
    S = sigma33_int if sigma33_int is not None else ma.R2.zero
    rhs = (
        _qq(-m["E"] / 2) * ma.bracket(w, w)
        + _qq(m["nu"] / (2 * m["h"])) * ma.laplacian(S)
        + _qq((1 + m["nu"]) / (2 * m["h"])) * (f1.diff(ma.X) + f2.diff(ma.Y))
    )
    return ma.laplacian(sigma_sum) - rhs


# --- thickness resultants -----------------------------------------------------------


@dataclass(frozen=True)
class Resultants:
    """Thickness resultants of face-compatible stress profiles.

    ``Q[a] = int T_a3``; ``psi[a] = 1/2 int (h^2 - t^2) T_a3``, exact for the
    series; ``psi_short[a] = 2h^3/3 (g^+ + g^- - 17/20 T^1)``, the truncated
    closed form, with ``psi_gap = psi - psi_short``; ``I = int t T_33``, whose
    face part is multiplied by ``(1 + 2 gamma)`` when ``gamma_weighting``.
    """

    Q: tuple
    psi: tuple
    psi_short: tuple
    psi_gap: tuple
    I: object
    gamma_weighting: bool
    remainders: tuple = ("psi remainder",)

    def to_dict(self) -> dict:
        return {
            "Q": [float(v) for v in self.Q],
            "psi": [float(v) for v in self.psi],
            "psi_short": [float(v) for v in self.psi_short],
            "psi_gap": [float(v) for v in self.psi_gap],
            "I": float(self.I),
            "gamma_weighting": self.gamma_weighting,
        }


def resultant_integrals(T_alpha, T_33, config: PlateConfig, gamma_weighting: bool = True) -> Resultants:
    """Q, psi and I from difference-basis profiles ``T_13``, ``T_23``, ``T_33``."""
    h = T_33.h
    if any(abs(float(T.h) - float(config.h)) > 1e-14 * float(config.h) for T in (*T_alpha, T_33)):
        raise ValueError("series half-thickness differs from the plate's")
    Qs, psis, shorts, gaps = [], [], [], []
    for T in T_alpha:
        c = T.to_legendre().coeffs
        c0 = c[0]
        c2 = c[2] if len(c) > 2 else 0 * c0
        # int p_0 = 2, int (1 - x^2) p_0 = 4/3, int (1 - x^2) p_2 = -4/15
        Qs.append(2 * h * c0)
        psi = h**3 * (2 * c0 / 3 - 2 * c2 / 15)
        t1 = T.bracket_coeffs[0] if T.bracket_coeffs else 0 * c0
        short = 2 * h**3 / 3 * (T.g_plus + T.g_minus - Fraction(17, 20) * t1)
        psis.append(psi)
        shorts.append(short)
        gaps.append(psi - short)
    face = (T_33.g_plus - T_33.g_minus) * h * h / 3
    if gamma_weighting:
        w = 1 + 2 * (exact(config.gamma) if isinstance(face, Fraction) else config.gamma)
        face = w * face
    t2 = T_33.bracket_coeffs[1] if len(T_33.bracket_coeffs) > 1 else 0 * face
    # int t T dt = h^2 int x T dx; the bracket p_3 - p_1 contributes -2/3
    I = face - Fraction(2, 3) * h * h * t2
    return Resultants(tuple(Qs), tuple(psis), tuple(shorts), tuple(gaps), I, gamma_weighting)
