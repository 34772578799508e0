"""ORM models."""
from inclab.models.sweep_run import SweepRun, SweepKind, SweepStatus

__all__ = ["SweepRun", "SweepKind", "SweepStatus"]
