"""
Error Types
Exceptions raised by the synthesis library; the CLI maps them to exit codes
"""


class CartanError(Exception):
    """Base class for all library errors"""


class DomainError(CartanError, ValueError):
    """Argument outside the domain of an operation"""


class DivergenceError(DomainError):
    """Quantity is infinite at the requested argument (K(1))"""


class StratumError(DomainError):
    """Operation is undefined on the covector's stratum"""


class NoRootError(CartanError, RuntimeError):
    """No sign change found in the search window"""


class ConvergenceError(CartanError, RuntimeError):
    """Shooting exhausted its starts without meeting the tolerance"""

    def __init__(self, message: str, best_residual: float = float("inf")):
        super().__init__(message)
        self.best_residual = best_residual


class ViolationError(CartanError, AssertionError):
    """Engel/Cartan cut-time comparison broken"""


class InputError(CartanError, ValueError):
    """Malformed user input (batch files, command-line values)"""
