"""Database models for the run ledger"""

from datetime import datetime
from sqlalchemy import Column, Integer, String, Float, DateTime, JSON
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class RunRecord(Base):
    """One novikov-lab pipeline run"""
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)

    # Run identity
    command = Column(String, nullable=False, index=True)
    input_hash = Column(String(40), nullable=False, index=True)
    output_dir = Column(String, nullable=False)

    # Outcome
    exit_code = Column(Integer, default=0)
    note = Column(String)  # "blowup", "no collision", ...
    t_star = Column(Float)  # first singular time, when one was found
    wall_seconds = Column(Float)

    # Headline numbers of the run report
    summary = Column(JSON)

    created_at = Column(DateTime, default=datetime.utcnow, index=True)

    def __repr__(self):
        return f"<RunRecord(command='{self.command}', hash='{self.input_hash[:8]}', exit={self.exit_code})>"
