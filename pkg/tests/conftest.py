"""Shared fixtures for the relfuzz test suite."""

import pytest

from relfuzz.config import AnalysisConfig, AnalysisThresholds
from relfuzz.main import configure_logging
from relfuzz.targets import ChunkTarget, EchoTarget, NestedCommandTarget, ObjectFileTarget, TlvTarget


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep structlog output on stderr and out of the way."""
    configure_logging("WARNING")


@pytest.fixture
def thresholds():
    return AnalysisThresholds(t_loss=0.05, t_restore=0.2)


@pytest.fixture
def analysis_cfg():
    return AnalysisConfig()


@pytest.fixture
def nestedcmd():
    return NestedCommandTarget()


@pytest.fixture
def chunks():
    return ChunkTarget()


@pytest.fixture
def tlv():
    return TlvTarget()


@pytest.fixture
def objfile():
    return ObjectFileTarget()


@pytest.fixture
def echo():
    return EchoTarget()


@pytest.fixture(params=["nestedcmd", "chunks", "tlv", "objfile"])
def toy_target(request):
    """Every toy target that ships ground truth."""
    return {
        "nestedcmd": NestedCommandTarget,
        "chunks": ChunkTarget,
        "tlv": TlvTarget,
        "objfile": ObjectFileTarget,
    }[request.param]()
