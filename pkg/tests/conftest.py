import numpy as np
import pytest
from scipy.special import eval_legendre

from vekuaplate import legendre as lg
from vekuaplate import monge_ampere as ma
from vekuaplate import refined_theory as rt


def q_integral(k, x, n_nodes=40):
    """(2k+1) * int_{-1}^x (x - t) p_k(t) dt by Gauss quadrature on [-1, x]."""
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        s = 0.5 * (xi + 1) * t + 0.5 * (xi - 1)
        out[i] = 0.5 * (xi + 1) * np.sum(w * (xi - s) * eval_legendre(k, s))
    return (2 * k + 1) * out


def chebyshev_grid(n):
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


# --- 3D elasticity oracles for the moment system ------------------------------------------


def oracle_symbol(cfg, N, k1, k2):
    """Projection of the 3D Hooke divergence of ``U exp(i k.x) p_n(z/h)`` by z-quadrature."""
    lam, mu, h = cfg.lam, cfg.mu, cfg.h
    x, w = np.polynomial.legendre.leggauss(N + 4)
    P = np.array([lg.eval_p(n, x) for n in range(N + 1)])
    dP = np.array([lg.eval_dp(n, x) for n in range(N + 1)]) / h
    n = 3 * (N + 1)
    S = np.zeros((n, n), complex)
    for col in range(n):
        Uh = np.zeros((N + 1, 3), complex)
        Uh.flat[col] = 1
        u, uz = Uh.T @ P, Uh.T @ dP
        grad = np.zeros((3, 3, len(x)), complex)
        for i in range(3):
            grad[i, 0], grad[i, 1], grad[i, 2] = 1j * k1 * u[i], 1j * k2 * u[i], uz[i]
        eps = 0.5 * (grad + grad.transpose(1, 0, 2))
        sig = 2 * mu * eps + lam * (eps[0, 0] + eps[1, 1] + eps[2, 2]) * np.eye(3)[:, :, None]
        for m in range(N + 1):
            hc = h * 2 / (2 * m + 1)
            for i in range(3):
                # integrate by parts in z: the face terms belong to the right side
                a1 = h * np.sum(w * (1j * k1 * sig[i, 0] + 1j * k2 * sig[i, 1]) * P[m])
                a2 = np.sum(w * sig[i, 2] * lg.eval_dp(m, x))
                S[3 * m + i, col] = (a1 - a2) / hc
    return S


def _fields_3d(U, cfg, x, y, z):
    """Displacement gradient of U at points; G[i, j] = d_j u_i, shape (3, 3, nx, ny, nz)."""
    a, b, h = cfg.a, cfg.b, cfg.h
    p = np.arange(1, U.P + 1)
    q = np.arange(1, U.Q + 1)
    sx = np.sin(np.outer(x, p) * np.pi / a)
    cx = np.cos(np.outer(x, p) * np.pi / a) * (p * np.pi / a)
    sy = np.sin(np.outer(y, q) * np.pi / b)
    cy = np.cos(np.outer(y, q) * np.pi / b) * (q * np.pi / b)
    Pz = np.array([lg.eval_p(n, z / h) for n in range(U.N + 1)])
    dPz = np.array([lg.eval_dp(n, z / h) for n in range(U.N + 1)]) / h

    def f(bx, by, bz):
        return np.einsum("nipq,xp,yq,nz->ixyz", U.coeffs, bx, by, bz)

    return np.stack([f(cx, sy, Pz), f(sx, cy, Pz), f(sx, sy, dPz)], axis=1)


def _hooke(G, cfg):
    eps = 0.5 * (G + G.transpose(1, 0, 2, 3, 4))
    tr = eps[0, 0] + eps[1, 1] + eps[2, 2]
    return 2 * cfg.mu * eps + cfg.lam * tr * np.eye(3)[:, :, None, None, None], eps


def energy_quadrature(U, cfg, nxy=40):
    """``(1/2h) int sigma : eps`` by tensor Gauss quadrature."""
    h = cfg.h
    xg, wx = np.polynomial.legendre.leggauss(nxy)
    zg, wz = np.polynomial.legendre.leggauss(U.N + 3)
    x, y, z = 0.5 * cfg.a * (xg + 1), 0.5 * cfg.b * (xg + 1), h * zg
    sig, eps = _hooke(_fields_3d(U, cfg, x, y, z), cfg)
    dens = np.sum(sig * eps, axis=(0, 1))
    W = np.einsum("x,y,z->xyz", 0.5 * cfg.a * wx, 0.5 * cfg.b * wx, h * wz)
    return np.sum(W * dens) / (2 * h)


# --- exact polynomial constructions -------------------------------------------------------


def _int_x(p):
    return ma.R2.from_dict({(i + 1, j): c / (i + 1) for (i, j), c in p.items()})


def _int_y(p):
    return ma.R2.from_dict({(i, j + 1): c / (j + 1) for (i, j), c in p.items()})


def poisson(f):
    """Polynomial u with lap u = f: sum_k (-1)^k I_x^{2k+2} d_y^{2k} f."""
    u, term, k = ma.R2.zero, f, 0
    while term:
        v = term
        for _ in range(2 * k + 2):
            v = _int_x(v)
        u += (-1) ** k * v
        term = term.diff(ma.Y).diff(ma.Y)
        k += 1
    return u


def _q(v):
    f = rt.exact(v)
    return ma.QQ(f.numerator, f.denominator)


def _manufacture_planar(w, cfg, f1, f2, S):
    """tau, omega solving the pair, nonlinear terms in independent hand-expanded form."""
    X, Y = ma.X, ma.Y
    lam, mu, h = rt.exact(cfg.lam), rt.exact(cfg.mu), rt.exact(cfg.h)
    ls = 2 * lam * mu / (lam + 2 * mu)
    l1 = lam / (2 * h * (lam + 2 * mu))
    w1, w2 = w.diff(X), w.diff(Y)
    w11, w12, w22 = w1.diff(X), w1.diff(Y), w2.diff(Y)
    F1 = _q(1 / (2 * h)) * f1 + _q(mu) * (w2 * w12 - w1 * w22) + _q(l1) * S.diff(X)
    F2 = _q(1 / (2 * h)) * f2 + _q(mu) * (w1 * w12 - w2 * w11) + _q(l1) * S.diff(Y)
    # T = (lam*+2mu) tau, W = mu omega: T_1 + W_2 = F1, T_2 - W_1 = F2
    T = poisson(F1.diff(X) + F2.diff(Y))
    G1, G2 = T.diff(Y) - F2, F1 - T.diff(X)  # W_1, W_2
    W = _int_x(G1)
    W += _int_y(G2 - W.diff(Y))
    return T * _q(1 / (ls + 2 * mu)), W * _q(1 / mu)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
