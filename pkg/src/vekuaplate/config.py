"""Material and geometry parameters shared by the plate modules."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PlateConfig:
    """Isotropic plate of thickness ``2h`` on the rectangle ``a x b``.

    ``lam`` and ``mu`` are the Lame constants. ``lambda_star`` is the
    in-plane Lame constant used by the Airy-function update; by default the
    plane-stress reduction ``2 lam mu / (lam + 2 mu)``.
    """

    lam: float
    mu: float
    h: float
    gamma: float = 0.0
    a: float = 1.0
    b: float = 1.0
    lambda_star: float | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not 3 * self.lam + 2 * self.mu > 0:
            raise ValueError("3 lambda + 2 mu must be positive")
        if not self.h > 0:
            raise ValueError("half-thickness must be positive")
        if not (self.a > 0 and self.b > 0):
            raise ValueError("rectangle sides must be positive")

    @classmethod
    def from_engineering(cls, E: float, nu: float, h: float, **kw) -> "PlateConfig":
        if not -1 < nu < 0.5:
            raise ValueError("Poisson ratio must lie in (-1, 1/2)")
        lam = E * nu / ((1 + nu) * (1 - 2 * nu))
        mu = E / (2 * (1 + nu))
        return cls(lam=lam, mu=mu, h=h, **kw)

    @property
    def E(self) -> float:
        return self.mu * (3 * self.lam + 2 * self.mu) / (self.lam + self.mu)

    @property
    def nu(self) -> float:
        return self.lam / (2 * (self.lam + self.mu))

    @property
    def D(self) -> float:
        """Flexural rigidity ``2 E h^3 / (3 (1 - nu^2))``."""
        return 2 * self.E * self.h**3 / (3 * (1 - self.nu**2))

    @property
    def lam_star(self) -> float:
        if self.lambda_star is not None:
            return self.lambda_star
        return 2 * self.lam * self.mu / (self.lam + 2 * self.mu)

    @property
    def kappa2(self) -> float:
        """Friedrichs constant of the rectangle, ``pi^2 (a^-2 + b^-2)``."""
        return math.pi**2 * (self.a**-2 + self.b**-2)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "h": self.h,
            "gamma": self.gamma,
            "a": self.a,
            "b": self.b,
            "lambda_star": self.lam_star,
            "E": self.E,
            "nu": self.nu,
            "D": self.D,
        }
