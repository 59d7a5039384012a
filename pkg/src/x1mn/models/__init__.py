"""Plane models of X1(m, mn)."""
from .raw import (FactorSelectionAmbiguous, RawModel, UnsupportedRange, general_model, raw_model,
                  spurious_divisors)
from .optimized import (OptimizedModel, VerificationReport, printed_model, printed_models,
                        read_model, verify_model, write_model)

__all__ = [
    "FactorSelectionAmbiguous", "RawModel", "UnsupportedRange", "general_model", "raw_model",
    "spurious_divisors", "OptimizedModel", "VerificationReport", "printed_model", "printed_models",
    "read_model", "verify_model", "write_model",
]
