from .model import (
    Distortion,
    RandomCheckReport,
    RelationReport,
    TraceStatistics,
    VerificationSummary,
    Witness,
)

__all__ = [
    "Distortion",
    "Witness",
    "RelationReport",
    "VerificationSummary",
    "RandomCheckReport",
    "TraceStatistics",
]
