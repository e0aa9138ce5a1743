"""
Factories for optimizer test fixtures
"""
import factory
import numpy as np

from .services import DcCoefficients


class DcCoefficientsFactory(factory.Factory):
    """Coefficients of the hand-checked realization at rho = 10, rho_si = 1"""

    class Meta:
        model = DcCoefficients

    A = 10.0
    B = 2.0
    E1v = 5.0
    E2v = 2.0
    C = 1.0
    D = 1.0


def random_coefficients(rng: np.random.Generator) -> DcCoefficients:
    """Log-uniform positive coefficients spanning three decades"""
    A, E1v, E2v, C, D, si = np.exp(rng.uniform(-3.0, 4.0, size=6))
    return DcCoefficientsFactory(A=A, B=1.0 + si, E1v=E1v, E2v=E2v, C=C, D=D)
