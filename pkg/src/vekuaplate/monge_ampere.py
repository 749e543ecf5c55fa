"""Exact polynomial algebra for the Monge-Ampere bracket.

Real polynomials (``Poly2``) live in ``QQ[x, y]`` and complex ones
(``CPoly``) in ``QQ_I[z, zb]``, both sympy sparse rings: dicts from
exponent pairs to exact coefficients, canonical (no stored zeros).

    [u, v] = u_xx v_yy - 2 u_xy v_xy + u_yy v_xx

Its first-order divergence form is

    -[u, v] = d_x A - d_y B,
    A = d_x(u_y v_y) - d_y(u_x v_y),   B = d_x(u_y v_x) - d_y(u_x v_x).

In ``z = x + iy`` the bracket becomes ``-4 (U_bb V_zz - 2 U_zb V_zb + U_zz V_bb)``
where ``b`` stands for ``zb``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from sympy import QQ, QQ_I, ring

__all__ = [
    "R2",
    "X",
    "Y",
    "RC",
    "Z",
    "ZB",
    "NonRealError",
    "poly2",
    "cpoly",
    "random_poly2",
    "laplacian",
    "bracket",
    "bracket_complex",
    "divergence_decomposition",
    "Decomposition",
    "to_complex",
    "from_complex",
    "laplacian_bracket_expansion",
    "LaplacianExpansion",
    "conj",
    "is_real",
]

R2, X, Y = ring("x,y", QQ)
RC, Z, ZB = ring("z,zb", QQ_I)
# auxiliary ring used to substitute z = x + iy back into a CPoly
_RXY, _XC, _YC = ring("x,y", QQ_I)
_I = QQ_I(0, 1)


class NonRealError(ValueError):
    """CPoly is not the image of a real polynomial."""

    def __init__(self, defect):
        super().__init__(f"imaginary part does not vanish: {defect}")
        self.defect = defect


def _q(c):
    if isinstance(c, Fraction):
        return QQ(c.numerator, c.denominator)
    return QQ.convert(c)


def poly2(coeffs: dict) -> "R2.dtype":
    """Poly2 from ``{(i, j): c}`` meaning ``sum c x^i y^j``."""
    return R2.from_dict({k: _q(v) for k, v in coeffs.items() if v})


def _qi(c):
    if isinstance(c, complex):
        return QQ_I(_q(Fraction(c.real)), _q(Fraction(c.imag)))
    if isinstance(c, tuple):
        return QQ_I(_q(c[0]), _q(c[1]))
    return QQ_I.convert(_q(c))


def cpoly(coeffs: dict) -> "RC.dtype":
    """CPoly from ``{(i, j): c}`` meaning ``sum c z^i zb^j``.

    ``c`` may be a rational, a ``(re, im)`` pair or a Python complex with
    exactly representable parts.
    """
    return RC.from_dict({k: _qi(v) for k, v in coeffs.items() if v})


def random_poly2(rnd: random.Random, deg: int, density: float = 0.7, span: int = 9) -> "R2.dtype":
    out = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if rnd.random() < density:
                out[(i, j)] = Fraction(rnd.randint(-span, span), rnd.randint(1, span))
    return poly2(out)


def laplacian(u):
    return u.diff(X).diff(X) + u.diff(Y).diff(Y)


def bracket(u, v):
    """Monge-Ampere bracket of two real polynomials."""
    uxx, uxy, uyy = u.diff(X).diff(X), u.diff(X).diff(Y), u.diff(Y).diff(Y)
    vxx, vxy, vyy = v.diff(X).diff(X), v.diff(X).diff(Y), v.diff(Y).diff(Y)
    return uxx * vyy - 2 * uxy * vxy + uyy * vxx


def bracket_complex(U, V):
    """``U_bb V_zz - 2 U_zb V_zb + U_zz V_bb``; the real bracket is -4 times this."""
    z, zb = U.ring.gens
    Ubb, Uzb, Uzz = U.diff(zb).diff(zb), U.diff(z).diff(zb), U.diff(z).diff(z)
    Vbb, Vzb, Vzz = V.diff(zb).diff(zb), V.diff(z).diff(zb), V.diff(z).diff(z)
    return Ubb * Vzz - 2 * Uzb * Vzb + Uzz * Vbb


@dataclass(frozen=True)
class Decomposition:
    A: object
    B: object
    combination: object  # d_x A - d_y B
    residual: object  # combination + [u, v]; zero when the identity holds

    @property
    def ok(self) -> bool:
        return self.residual == 0


def divergence_decomposition(u, v, variant: str = "canonical") -> Decomposition:
    """First-order form of the bracket.

    ``variant="printed"`` uses ``B = d_y(u_x v_y) - d_x(u_y v_x)``, a grouping
    that does not reproduce the bracket in general; its residual is returned
    rather than raised.
    """
    ux, uy, vx, vy = u.diff(X), u.diff(Y), v.diff(X), v.diff(Y)
    A = (uy * vy).diff(X) - (ux * vy).diff(Y)
    if variant == "canonical":
        B = (uy * vx).diff(X) - (ux * vx).diff(Y)
    elif variant == "printed":
        B = (ux * vy).diff(Y) - (uy * vx).diff(X)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    comb = A.diff(X) - B.diff(Y)
    return Decomposition(A, B, comb, comb + bracket(u, v))


def to_complex(p):
    """Substitute ``x = (z + zb)/2``, ``y = (z - zb)/(2i)``."""
    x = (Z + ZB) * QQ_I(QQ(1, 2), 0)
    y = (Z - ZB) * QQ_I(0, QQ(-1, 2))
    out = RC.zero
    # powers of x and y cached
    xp = [RC.one]
    for _ in range(p.degree(X) if p else 0):
        xp.append(xp[-1] * x)
    yp = [RC.one]
    for _ in range(p.degree(Y) if p else 0):
        yp.append(yp[-1] * y)
    for (i, j), c in p.items():
        out += xp[i] * yp[j] * QQ_I.convert(c)
    return out


def conj(P):
    """Complex conjugate as a function: swap exponents, conjugate coefficients."""
    return RC.from_dict({(j, i): QQ_I(c.x, -c.y) for (i, j), c in P.items()})


def is_real(P) -> bool:
    return P == conj(P)


def from_complex(P):
    """Inverse of ``to_complex``; raises ``NonRealError`` on a non-real input."""
    z = _XC + _YC * _I
    zb = _XC - _YC * _I
    out = _RXY.zero
    zp, bp = [_RXY.one], [_RXY.one]
    for _ in range(P.degree(Z) if P else 0):
        zp.append(zp[-1] * z)
    for _ in range(P.degree(ZB) if P else 0):
        bp.append(bp[-1] * zb)
    for (i, j), c in P.items():
        out += zp[i] * bp[j] * c
    imag = {k: c.y for k, c in out.items() if c.y}
    if imag:
        raise NonRealError(R2.from_dict(imag))
    return R2.from_dict({k: c.x for k, c in out.items()})


@dataclass(frozen=True)
class LaplacianExpansion:
    terms: tuple  # [lap u, v], [u, lap v], 2 sum_a [d_a u, d_a v]
    lhs: object  # lap [u, v]
    residual: object

    @property
    def ok(self) -> bool:
        return self.residual == 0


def laplacian_bracket_expansion(u, v) -> LaplacianExpansion:
    t1 = bracket(laplacian(u), v)
    t2 = bracket(u, laplacian(v))
    t3 = 2 * (bracket(u.diff(X), v.diff(X)) + bracket(u.diff(Y), v.diff(Y)))
    lhs = laplacian(bracket(u, v))
    return LaplacianExpansion((t1, t2, t3), lhs, lhs - (t1 + t2 + t3))
