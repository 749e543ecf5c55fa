import random
from fractions import Fraction

import numpy as np
import pytest

from vekuaplate import monge_ampere as ma
from vekuaplate.monge_ampere import X, Y, Z, ZB


def _eval(p, x, y):
    return sum(float(c) * x**i * y**j for (i, j), c in p.items())


def _fd_bracket(u, v, x, y, e=1e-3):
    def d2(p, a, b):
        if a == b == "x":
            return (_eval(p, x + e, y) - 2 * _eval(p, x, y) + _eval(p, x - e, y)) / e**2
        if a == b == "y":
            return (_eval(p, x, y + e) - 2 * _eval(p, x, y) + _eval(p, x, y - e)) / e**2
        return (
            _eval(p, x + e, y + e) - _eval(p, x + e, y - e) - _eval(p, x - e, y + e) + _eval(p, x - e, y - e)
        ) / (4 * e * e)

    return d2(u, "x", "x") * d2(v, "y", "y") - 2 * d2(u, "x", "y") * d2(v, "x", "y") + d2(u, "y", "y") * d2(v, "x", "x")


def test_bracket_of_paraboloid():
    u = X**2 + Y**2
    assert ma.bracket(u, u) == 8


def test_bracket_affine_vanishes():
    u = ma.poly2({(3, 1): 2, (0, 4): Fraction(1, 3)})
    assert ma.bracket(u, 3 * X - Y + 1) == 0


def test_bracket_vs_finite_differences():
    u, v = X**2 * Y, X * Y**2
    # [x^2 y, x y^2] = 2y * 2x - 2 * (2x)(2y) + 0 = -4xy
    assert ma.bracket(u, v) == -4 * X * Y
    rng = np.random.default_rng(4)
    for x, y in rng.uniform(-1, 1, size=(5, 2)):
        assert abs(_eval(ma.bracket(u, v), x, y) - _fd_bracket(u, v, x, y)) <= 1e-8


def test_bracket_bilinear_symmetric():
    rnd = random.Random(7)
    for _ in range(10):
        u, v, w = (ma.random_poly2(rnd, 5) for _ in range(3))
        assert ma.bracket(u, v) == ma.bracket(v, u)
        assert ma.bracket(3 * u - 2 * w, v) == 3 * ma.bracket(u, v) - 2 * ma.bracket(w, v)
        b = ma.bracket(u, v)
        if b:
            deg = max(i + j for i, j in b.monoms())
            degu = max(i + j for i, j in u.monoms())
            degv = max(i + j for i, j in v.monoms())
            assert deg <= degu + degv - 4


def test_u_equals_v_form():
    rnd = random.Random(11)
    u = ma.random_poly2(rnd, 6)
    uxx, uyy, uxy = u.diff(X).diff(X), u.diff(Y).diff(Y), u.diff(X).diff(Y)
    assert ma.bracket(u, u) == 2 * (uxx * uyy - uxy**2)


def test_decomposition_examples():
    u = X**2 + Y**2
    d = ma.divergence_decomposition(u, u)
    assert d.ok and d.combination == -8
    d = ma.divergence_decomposition(u, 2 * X + 3 * Y)
    assert d.A == 0 and d.B == 0 and d.ok


def test_decomposition_random_sweep():
    rnd = random.Random(2024)
    for _ in range(50):
        u, v = ma.random_poly2(rnd, 6), ma.random_poly2(rnd, 6)
        assert ma.divergence_decomposition(u, v).residual == 0


def test_printed_grouping_residual_reported():
    d = ma.divergence_decomposition(X**2 * Y, X * Y**2, variant="printed")
    assert not d.ok
    with pytest.raises(ValueError):
        ma.divergence_decomposition(X, Y, variant="other")


def test_to_complex_examples():
    assert ma.to_complex(X**2 + Y**2) == Z * ZB
    assert ma.to_complex(X) == (Z + ZB) * ma.QQ_I(ma.QQ(1, 2), 0)


def test_complex_round_trip_and_realness():
    rnd = random.Random(5)
    for _ in range(20):
        p = ma.random_poly2(rnd, 6)
        P = ma.to_complex(p)
        assert ma.is_real(P)
        assert ma.from_complex(P) == p


def test_from_complex_rejects_nonreal():
    with pytest.raises(ma.NonRealError) as exc:
        ma.from_complex(Z**2)
    assert exc.value.defect != 0


def test_complex_bracket_examples():
    U = Z * ZB
    assert ma.bracket_complex(U, U) == -2 * ma.RC.one
    assert ma.bracket_complex(Z**3, Z**4 + 2 * Z) == 0
    U = Z**2 * ZB**2
    assert ma.bracket_complex(U, U) == -24 * Z**2 * ZB**2


def test_complex_invariance_factor():
    rnd = random.Random(9)
    for _ in range(50):
        u, v = ma.random_poly2(rnd, 6), ma.random_poly2(rnd, 6)
        lhs = ma.to_complex(ma.bracket(u, v))
        assert lhs + 4 * ma.bracket_complex(ma.to_complex(u), ma.to_complex(v)) == 0


def test_laplacian_expansion_examples():
    u = X**2 + Y**2
    e = ma.laplacian_bracket_expansion(u, u)
    assert e.lhs == 0 and e.ok
    u, v = X**4, Y**4
    e = ma.laplacian_bracket_expansion(u, v)
    # [x^4, y^4] = 144 x^2 y^2, lap = 288 (x^2 + y^2)
    assert e.lhs == 288 * (X**2 + Y**2)
    assert e.ok


def test_laplacian_expansion_random():
    rnd = random.Random(13)
    for _ in range(50):
        u, v = ma.random_poly2(rnd, 5), ma.random_poly2(rnd, 5)
        assert ma.laplacian_bracket_expansion(u, v).residual == 0
