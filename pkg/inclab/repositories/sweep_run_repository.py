"""Sweep run repository."""
from typing import Optional, List
from sqlalchemy.orm import Session
from sqlalchemy import desc
from inclab.models.sweep_run import SweepRun, SweepKind, SweepStatus


class SweepRunRepository:
    """Sweep run repository."""

    def __init__(self, db: Session):
        self.db = db

    def create(self, **fields) -> SweepRun:
        run = SweepRun(**fields)
        self.db.add(run)
        self.db.commit()
        self.db.refresh(run)
        return run

    def get_by_id(self, run_id: int) -> Optional[SweepRun]:
        return self.db.query(SweepRun).filter(SweepRun.id == run_id).first()

    def list_runs(
        self,
        kind: SweepKind = None,
        status: SweepStatus = None,
        skip: int = 0,
        limit: int = 20
    ) -> tuple[List[SweepRun], int]:
        """List runs, newest first."""
        query = self.db.query(SweepRun)

        if kind:
            query = query.filter(SweepRun.kind == kind)

        if status:
            query = query.filter(SweepRun.status == status)

        total = query.count()
        runs = query.order_by(desc(SweepRun.created_at), desc(SweepRun.id)).offset(skip).limit(limit).all()
        return runs, total
