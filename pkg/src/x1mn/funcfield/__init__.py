"""Function fields of plane curves over finite fields."""
from .curve import (BadPrime, ConstantFunction, CurveFunction, Divisor, NotAbsolutelyIrreducible,
                    Place, PlaneCurveFq, RRBasis, WeilViolation, reduce_model)
from .search import (BudgetExceeded, Found, NoneOfDegreeAtMost, gonality_search,
                     pointcount_gonality_lb, verify_certificate, wdr_count)
from .cusps import IncompleteCuspData, cuspidal_function_search, rational_cusps

__all__ = [
    "BadPrime", "ConstantFunction", "CurveFunction", "Divisor", "NotAbsolutelyIrreducible",
    "Place", "PlaneCurveFq", "RRBasis", "WeilViolation", "reduce_model",
    "BudgetExceeded", "Found", "NoneOfDegreeAtMost", "gonality_search",
    "pointcount_gonality_lb", "verify_certificate", "wdr_count",
    "IncompleteCuspData", "cuspidal_function_search", "rational_cusps",
]
