"""Error types raised by the numerical core"""

from typing import Optional


class LabError(Exception):
    """Base class for every numerical failure of the lab"""


class DegreeCapError(LabError):
    """Requested size exceeds a documented desk-scale cap"""


class ZeroProximityError(LabError):
    """A Blaschke zero sits too close to the unit circle"""

    def __init__(self, index: int, modulus: float):
        self.index = index
        self.modulus = modulus
        super().__init__(f"zero #{index} has modulus {modulus!r}, too close to the unit circle")

    def __reduce__(self):
        return type(self), (self.index, self.modulus)


class FrontFactorError(LabError):
    """Front factor is not unimodular"""


class TaylorBudgetError(LabError):
    """Taylor section too long for the radius/precision budget"""


class NotSchurClassError(LabError):
    """Coefficients cannot belong to a function bounded by one"""

    def __init__(self, step: int, modulus: float):
        self.step = step
        self.modulus = modulus
        super().__init__(f"input not a Schur-class coefficient sequence (|gamma_{step}| = {modulus!r})")

    def __reduce__(self):
        return type(self), (self.step, self.modulus)


class SchurEarlyTermination(LabError):
    """Schur recursion hit a unimodular parameter before consuming all coefficients.

    The input is (numerically) a Blaschke product of degree ``step``; ``params``
    holds the parameters found so far with the terminal phase as tail.
    """

    def __init__(self, step: int, params):
        self.step = step
        self.params = params
        super().__init__(
            f"early termination: input is (numerically) a Blaschke product of degree {step}"
        )

    def __reduce__(self):
        return type(self), (self.step, self.params)


class ZeroPoleCollisionError(LabError):
    """A zero and a pole coincide; the caller must simplify"""


class PoleProximityError(LabError):
    """Evaluation point too close to a pole"""


class PoleListUnavailableError(LabError):
    """Pole locations are unknown, so exterior clearance cannot be decided"""


class PoleValidationError(LabError):
    """A test family placed a pole on the closed domain or inside the clearance margin"""


class NonIntegrableWeightError(LabError):
    """(1 - r)^beta is not integrable up to the boundary"""


class PrevertexProximityError(LabError):
    """Conformal map evaluated too close to the boundary circle"""


class OutsideDomainError(LabError):
    """Point lies outside the closed domain"""


class RhoOutOfRangeError(LabError):
    """rho must lie strictly between zero and the inradius"""


class InadmissibleRegimeError(LabError):
    """Parameters violate a hypothesis of the weighted estimate"""

    def __init__(self, hypothesis: str):
        self.hypothesis = hypothesis
        super().__init__(f"inadmissible parameters: hypothesis '{hypothesis}' fails")

    def __reduce__(self):
        return type(self), (self.hypothesis,)


class DegenerateFitError(LabError):
    """Least-squares design matrix is rank deficient"""


class ConfigError(LabError):
    """Experiment configuration is invalid"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message)

    def __reduce__(self):
        # survives the trip back from a worker process
        return type(self), (str(self), self.field)
