"""
Exception hierarchy for the geometry lab

Configuration problems and numerical breakdowns are kept apart so the CLI can
map them to distinct exit codes.
"""

from typing import Optional


class HorolabError(Exception):
    """Root of every error raised by the lab"""


class ConfigurationError(HorolabError, ValueError):
    """Malformed experiment configuration or unknown built-in"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key:
            message = f"{key}: {message}"
        super().__init__(message)


class ExpressionError(ConfigurationError):
    """Expression string rejected by the mini-grammar"""

    def __init__(self, message: str, source: str = "", position: Optional[int] = None):
        self.source = source
        self.position = position
        if position is not None:
            message = f"{message} at position {position} in '{source}'"
        super().__init__(message)


class PinchingViolationError(ConfigurationError):
    """A declared curvature bound does not hold at a sampled point"""

    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} (t={t!r})")


class DomainError(HorolabError, ValueError):
    """Argument outside the domain of a geometric function"""


class NumericalError(HorolabError, RuntimeError):
    """Numerical breakdown during integration, quadrature or root finding"""


class IntegrationError(NumericalError):
    """ODE integration failed (step-size underflow or non-finite state)"""


class ConvergenceError(NumericalError):
    """A limit did not converge to the requested tolerance"""

    def __init__(self, message: str, certificate: float = float("nan")):
        self.certificate = certificate
        super().__init__(f"{message} (certificate={certificate:.3e})")


class RiccatiBlowUpError(NumericalError):
    """Riccati solution leaves every bounded set in finite time"""

    def __init__(self, message: str, blowup_time: float):
        self.blowup_time = blowup_time
        super().__init__(f"{message}; estimated blow-up at t={blowup_time:.6g}")


class BracketingError(NumericalError):
    """Root bracket could not be established"""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} {self.diagnostics}" if self.diagnostics else message)
