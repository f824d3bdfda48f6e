import pytest

from unidisc.commands.handlers import get_experiment_handler
from unidisc.storage.ledger import create_session, get_run_ledger


@pytest.fixture
def output_dir(tmp_path):
    return str(tmp_path / "reports")


@pytest.fixture
def ledger():
    """Run ledger on an in-memory SQLite database"""
    run_ledger = get_run_ledger(create_session("sqlite://"))
    yield run_ledger
    run_ledger.db.close()


@pytest.fixture
def handler(ledger):
    return get_experiment_handler(ledger)
