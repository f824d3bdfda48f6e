"""Database models for the experiment run ledger"""

from datetime import datetime
from sqlalchemy import Column, Integer, String, ForeignKey, DateTime, Text, JSON, Enum as SQLEnum
from sqlalchemy.orm import declarative_base, relationship
import enum

Base = declarative_base()


class RunStatus(enum.Enum):
    """Experiment run status"""
    RUNNING = "running"
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class ExperimentRun(Base):
    """One invocation of a subcommand or canned experiment"""
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(64), nullable=False, index=True)  # norms, criteria, reproduce, ...
    experiment = Column(String(128), nullable=True)
    config_hash = Column(String(64), nullable=False, index=True)
    config = Column(JSON, nullable=False)
    seed = Column(Integer, nullable=True)
    toolkit_version = Column(String(32), nullable=False)
    status = Column(SQLEnum(RunStatus), nullable=False, default=RunStatus.RUNNING)
    summary = Column(Text, nullable=True)
    started_at = Column(DateTime, default=datetime.utcnow, nullable=False)
    finished_at = Column(DateTime, nullable=True)

    artifacts = relationship("RunArtifact", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<ExperimentRun(id={self.id}, command='{self.command}', status={self.status})>"


class RunArtifact(Base):
    """A file written by a run"""
    __tablename__ = "run_artifacts"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    kind = Column(String(16), nullable=False)  # json, csv, svg
    path = Column(String(1024), nullable=False)
    sha256 = Column(String(64), nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow, nullable=False)

    run = relationship("ExperimentRun", back_populates="artifacts")

    def __repr__(self):
        return f"<RunArtifact(id={self.id}, kind='{self.kind}', path='{self.path}')>"
