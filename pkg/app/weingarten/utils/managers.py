from abc import ABC, abstractmethod

import numpy as np
from numpy.typing import ArrayLike

from app.weingarten import schemes

__all__ = [
    "AbstractRelationManager",
    "PrincipalLinearManager",
    "MeanGaussManager",
    "CircleLocusManager",
    "MANAGERS",
    "get_manager",
]


class AbstractRelationManager(ABC):
    """
    Abstract base class for the governing equation of one relation family.
    The angle equation is always written as theta' = N(theta) / (z * D(theta)).
    Attributes:
        KIND (schemes.RelationKind): the relation family handled by the manager.
    """

    KIND: schemes.RelationKind

    def __init__(self, relation: schemes.WeingartenRelation):
        self.relation = relation

    @abstractmethod
    def numerator(self, theta: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def numerator_prime(self, theta: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def denominator(self, theta: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def denominator_prime(self, theta: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def residual(self, pair: schemes.CurvaturePair) -> float:
        raise NotImplementedError

    def blowup_cos(self) -> float | None:
        """cos(theta) at which D vanishes, None when D never vanishes on [-1, 1]."""
        return None

    def slope(self, z: ArrayLike, theta: ArrayLike) -> np.ndarray:
        """
        Evaluate theta' = N / (z * D).
        Args:
            z: heights, positive.
            theta: tangent angles.
        Returns:
            np.ndarray: theta', +-inf where D vanishes.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.numerator(theta)) / (np.asarray(z) * np.asarray(self.denominator(theta)))

    def contact_exponent(self, theta: float) -> float:
        """
        k with theta - theta1 ~ z^k along the approach to a boundary contact at theta1,
        k = N'(theta1) / (D(theta1) sin(theta1)). theta' then behaves like z^(k - 1).
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.asarray(self.numerator_prime(theta)) / (np.asarray(self.denominator(theta)) * np.sin(theta))
        return float(value)

    def theta_second(self, z: ArrayLike, theta: ArrayLike) -> np.ndarray:
        """
        Analytic theta'' along a solution, from G = N / D and theta' = G / z:
        theta'' = (G * G' - G * sin(theta)) / z^2.
        """
        theta = np.asarray(theta, dtype=float)
        n, d = np.asarray(self.numerator(theta)), np.asarray(self.denominator(theta))
        n_prime, d_prime = np.asarray(self.numerator_prime(theta)), np.asarray(self.denominator_prime(theta))
        with np.errstate(divide="ignore", invalid="ignore"):
            g = n / d
            g_prime = (n_prime * d - n * d_prime) / (d * d)
            return (g * g_prime - g * np.sin(theta)) / np.square(np.asarray(z, dtype=float))


class PrincipalLinearManager(AbstractRelationManager):
    """
    kappa1 = m * kappa2 + n, giving theta' = ((m - 1) cos(theta) + n) / z.
    """

    KIND = schemes.RelationKind.PrincipalLinear

    def numerator(self, theta: ArrayLike) -> np.ndarray:
        return (self.relation.m - 1.0) * np.cos(theta) + self.relation.n  # type: ignore[operator]

    def numerator_prime(self, theta: ArrayLike) -> np.ndarray:
        return -(self.relation.m - 1.0) * np.sin(theta)  # type: ignore[operator]

    def denominator(self, theta: ArrayLike) -> np.ndarray:
        return np.ones_like(np.asarray(theta, dtype=float))

    def denominator_prime(self, theta: ArrayLike) -> np.ndarray:
        return np.zeros_like(np.asarray(theta, dtype=float))

    def residual(self, pair: schemes.CurvaturePair) -> float:
        return pair.kappa1 - self.relation.m * pair.kappa2 - self.relation.n  # type: ignore[operator]


class MeanGaussManager(AbstractRelationManager):
    """
    a * H + b * K = c with H = (kappa1 + kappa2) / 2 and K = kappa1 * kappa2 - 1, giving
    theta' = (c - a cos(theta) + b sin^2(theta)) / (z (a / 2 + b cos(theta))).
    """

    KIND = schemes.RelationKind.MeanGauss

    def numerator(self, theta: ArrayLike) -> np.ndarray:
        a, b, c = self.relation.raw_coefficients
        return c - a * np.cos(theta) + b * np.sin(theta) ** 2

    def numerator_prime(self, theta: ArrayLike) -> np.ndarray:
        a, b, _ = self.relation.raw_coefficients
        return (a + 2.0 * b * np.cos(theta)) * np.sin(theta)

    def denominator(self, theta: ArrayLike) -> np.ndarray:
        a, b, _ = self.relation.raw_coefficients
        return a / 2.0 + b * np.cos(theta)

    def denominator_prime(self, theta: ArrayLike) -> np.ndarray:
        _, b, _ = self.relation.raw_coefficients
        return -b * np.sin(theta)

    def residual(self, pair: schemes.CurvaturePair) -> float:
        a, b, c = self.relation.raw_coefficients
        return a * pair.h + b * pair.k - c

    def blowup_cos(self) -> float | None:
        a, b, _ = self.relation.raw_coefficients
        if b == 0:
            return None
        u = -a / (2.0 * b)
        return u if -1.0 <= u <= 1.0 else None


class CircleLocusManager(MeanGaussManager):
    """
    a * H + b * K = 1 with a^2 + 4b^2 + 4b = 0. N and D share the factor a / 2 + b cos(theta),
    the reduced equation is theta' = -(a / 2 + b cos(theta)) / (b z).
    """

    def numerator(self, theta: ArrayLike) -> np.ndarray:
        a, b, _ = self.relation.raw_coefficients
        return -(a / 2.0 + b * np.cos(theta))

    def numerator_prime(self, theta: ArrayLike) -> np.ndarray:
        _, b, _ = self.relation.raw_coefficients
        return b * np.sin(theta)

    def denominator(self, theta: ArrayLike) -> np.ndarray:
        _, b, _ = self.relation.raw_coefficients
        return np.full_like(np.asarray(theta, dtype=float), b)

    def denominator_prime(self, theta: ArrayLike) -> np.ndarray:
        return np.zeros_like(np.asarray(theta, dtype=float))

    def blowup_cos(self) -> float | None:
        return None


MANAGERS: dict[schemes.RelationKind, type[AbstractRelationManager]] = {
    schemes.RelationKind.PrincipalLinear: PrincipalLinearManager,
    schemes.RelationKind.MeanGauss: MeanGaussManager,
}


def get_manager(relation: schemes.WeingartenRelation) -> AbstractRelationManager:
    if relation.on_circle_locus:
        return CircleLocusManager(relation)
    return MANAGERS[relation.kind](relation)
