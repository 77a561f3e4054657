"""Run ledger manager"""

from typing import Any, Dict, List, Optional
from sqlalchemy import create_engine, desc
from sqlalchemy.orm import sessionmaker, Session
from .models import Base, RunRecord

DEFAULT_DATABASE_URL = "sqlite:///novikov_lab.db"


class RunLedger:
    """Appends and queries run records"""

    def __init__(self, database_url: Optional[str] = None):
        self.engine = create_engine(database_url or DEFAULT_DATABASE_URL)
        Base.metadata.create_all(self.engine)
        self.SessionLocal = sessionmaker(bind=self.engine, expire_on_commit=False)

    def get_session(self) -> Session:
        """Get database session"""
        return self.SessionLocal()

    def record_run(
        self,
        command: str,
        input_hash: str,
        output_dir: str,
        exit_code: int = 0,
        note: str = "",
        t_star: Optional[float] = None,
        wall_seconds: Optional[float] = None,
        summary: Optional[Dict[str, Any]] = None,
    ) -> RunRecord:
        """Append one run"""
        session = self.get_session()
        try:
            run = RunRecord(
                command=command,
                input_hash=input_hash,
                output_dir=output_dir,
                exit_code=exit_code,
                note=note,
                t_star=t_star,
                wall_seconds=wall_seconds,
                summary=summary or {},
            )
            session.add(run)
            session.commit()
            session.refresh(run)
            return run
        finally:
            session.close()

    def recent_runs(self, limit: int = 20, command: Optional[str] = None) -> List[RunRecord]:
        """Most recent runs first"""
        session = self.get_session()
        try:
            query = session.query(RunRecord)
            if command:
                query = query.filter_by(command=command)
            return query.order_by(desc(RunRecord.created_at), desc(RunRecord.id)).limit(limit).all()
        finally:
            session.close()

    def runs_for_input(self, input_hash: str) -> List[RunRecord]:
        """All runs of one configuration (full hash or prefix), oldest first"""
        session = self.get_session()
        try:
            return (
                session.query(RunRecord)
                .filter(RunRecord.input_hash.startswith(input_hash))
                .order_by(RunRecord.id)
                .all()
            )
        finally:
            session.close()

    def count_runs(self) -> int:
        session = self.get_session()
        try:
            return session.query(RunRecord).count()
        finally:
            session.close()
