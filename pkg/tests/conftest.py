from __future__ import annotations

from pathlib import Path

import pytest

from acshare.dataset import SAMPLE_RECORD, record_to_payload
from acshare.entities import run_protocol
from acshare.netsim import ScenarioConfig

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return REPO_ROOT / "data"


@pytest.fixture(scope="session")
def sample_payload() -> bytes:
    return record_to_payload(SAMPLE_RECORD)


@pytest.fixture(scope="session")
def honest_config() -> ScenarioConfig:
    return ScenarioConfig(
        n_genuine=1, adversaries=(), dataset="sample", key_length_bits=256, seed=0
    )


@pytest.fixture(scope="session")
def honest_transcript(honest_config, sample_payload):
    return run_protocol(honest_config, [sample_payload])
