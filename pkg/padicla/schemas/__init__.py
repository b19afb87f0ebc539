# Import all schema classes to make them accessible from the schemas package
from .report_schema import (
    CoboundaryRecord,
    CSmallReport,
    ExperimentReport,
    ProjectionRecord,
    SharpSmoothRow,
    TS3Record,
    TS4Record,
    WitnessRecord,
)

__all__ = [
    "WitnessRecord",
    "CSmallReport",
    "SharpSmoothRow",
    "ProjectionRecord",
    "TS3Record",
    "TS4Record",
    "CoboundaryRecord",
    "ExperimentReport",
]
