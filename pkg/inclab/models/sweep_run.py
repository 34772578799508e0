"""Sweep run model."""
from sqlalchemy import Column, Integer, String, DateTime, Enum, Float, Text, Index
from sqlalchemy.sql import func
import enum
from inclab.db.session import Base


def _enum_values(enum_cls):
    return [e.value for e in enum_cls]


class SweepKind(str, enum.Enum):
    """What was swept."""
    CONSTRUCTION = "construction"
    FURSTENBERG = "furstenberg"
    SUMPRODUCT = "sumproduct"


class SweepStatus(str, enum.Enum):
    """Outcome of the sweep's slope assertions."""
    PASSED = "passed"
    FAILED = "failed"


class SweepRun(Base):
    """One persisted δ-sweep with its fit."""
    __tablename__ = "sweep_runs"

    id = Column(Integer, primary_key=True, index=True)
    kind = Column(
        Enum(SweepKind, native_enum=False, values_callable=_enum_values),
        nullable=False,
        index=True,
    )
    construction = Column(String(32))

    # (α, β) for constructions, (u, v) for Furstenberg, (u, v, v′) for sum-product
    param_1 = Column(Float, nullable=False)
    param_2 = Column(Float)
    param_3 = Column(Float)

    k_min = Column(Integer, nullable=False)
    k_max = Column(Integer, nullable=False)

    slope = Column(Float, nullable=False)
    intercept = Column(Float, nullable=False)
    r2 = Column(Float, nullable=False)
    predicted = Column(Float)

    status = Column(
        Enum(SweepStatus, native_enum=False, values_callable=_enum_values),
        nullable=False,
        index=True,
    )
    rows_json = Column(Text, nullable=False, default="[]")

    created_at = Column(DateTime(timezone=True), server_default=func.now(), nullable=False)

    __table_args__ = (
        Index('idx_sweep_runs_kind_created', 'kind', 'created_at'),
    )
