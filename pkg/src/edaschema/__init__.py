"""Schema, parsers, rasterizers and baseline analysis for staged physical-design datasets."""

from .errors import (AvailabilityError, EdaSchemaError, IntegrityError, ParseError, ResolutionError,
                     StoreError, TimingGraphError, UndefinedError, ValidationError)
from .stages import STAGES

__version__ = "0.1.0"

__all__ = [
    "AvailabilityError", "EdaSchemaError", "IntegrityError", "ParseError", "ResolutionError",
    "STAGES", "StoreError", "TimingGraphError", "UndefinedError", "ValidationError", "__version__",
]
