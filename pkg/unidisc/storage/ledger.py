"""Run ledger: records experiment runs and the artifacts they write"""

import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import Session, scoped_session, sessionmaker
from sqlalchemy.pool import StaticPool

from config.settings import settings
from unidisc.storage.models import Base, ExperimentRun, RunArtifact, RunStatus

logger = logging.getLogger(__name__)


def _ensure_sqlite_dir(url: str) -> None:
    """Create the directory of a file-backed SQLite URL"""
    if not url.startswith("sqlite") or ":memory:" in url:
        return
    db_path = url.replace("sqlite:///", "").replace("sqlite://", "")
    db_dir = os.path.dirname(db_path)
    if db_dir:
        os.makedirs(db_dir, exist_ok=True)


def create_session(url: Optional[str] = None) -> Session:
    """Open a session on the ledger database, creating tables as needed"""
    url = settings.DATABASE_URL if url is None else url
    _ensure_sqlite_dir(url)
    engine = create_engine(
        url,
        connect_args={"check_same_thread": False} if "sqlite" in url else {},
        poolclass=StaticPool if "sqlite" in url else None,
        echo=False
    )
    Base.metadata.create_all(engine)
    return scoped_session(sessionmaker(bind=engine))()


class RunLedger:
    """Manage run ledger operations"""

    def __init__(self, db_session: Session):
        """Initialize with database session"""
        self.db = db_session

    def start_run(self, command: str, config: Dict[str, Any], config_hash: str, version: str,
                  experiment: Optional[str] = None, seed: Optional[int] = None) -> ExperimentRun:
        run = ExperimentRun(
            command=command,
            experiment=experiment,
            config_hash=config_hash,
            config=config,
            seed=seed,
            toolkit_version=version,
            status=RunStatus.RUNNING,
        )
        self.db.add(run)
        self.db.commit()
        logger.debug(f"Started run {run.id} ({command})")
        return run

    def add_artifact(self, run: ExperimentRun, kind: str, path: str, sha256: str) -> RunArtifact:
        artifact = RunArtifact(run_id=run.id, kind=kind, path=path, sha256=sha256)
        self.db.add(artifact)
        self.db.commit()
        return artifact

    def finish_run(self, run: ExperimentRun, status: RunStatus, summary: Optional[str] = None) -> None:
        run.status = status
        run.summary = summary
        run.finished_at = datetime.utcnow()
        self.db.commit()
        logger.info(f"Run {run.id} ({run.command}) finished: {status.value}")

    def get_run(self, run_id: int) -> Optional[ExperimentRun]:
        return self.db.query(ExperimentRun).filter_by(id=run_id).first()

    def runs_for_config(self, config_hash: str) -> List[ExperimentRun]:
        """Runs of one configuration, oldest first"""
        return self.db.query(ExperimentRun).filter_by(config_hash=config_hash)\
            .order_by(ExperimentRun.started_at.asc()).all()

    def recent_runs(self, limit: int = 10) -> List[ExperimentRun]:
        return self.db.query(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(limit).all()


# Helper function
def get_run_ledger(db_session: Optional[Session] = None) -> RunLedger:
    """Get a run ledger instance (on the configured database by default)"""
    return RunLedger(db_session if db_session is not None else create_session())
