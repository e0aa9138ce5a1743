"""
Numerical failure types
"""


class NumericalDomainError(ValueError):
    """Argument outside a special function's domain"""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, message, best_estimate, abs_error):
        self.best_estimate = best_estimate
        self.abs_error = abs_error
        super().__init__(f'{message} (best estimate {best_estimate!r}, abs error {abs_error!r})')
