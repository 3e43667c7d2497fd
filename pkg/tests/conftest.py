import pytest

from pusense.detector import SensingConfig
from pusense.traffic import KINDS, TrafficModel, from_mean


def symmetric_model(kind="exponential", mean=5.0, p_b=0.5, shape=None):
    law = from_mean(kind, mean, shape)
    return TrafficModel(law, law, p_b)


@pytest.fixture
def fig1_model():
    return symmetric_model("exponential", 5.0)


@pytest.fixture
def fig1_config():
    return SensingConfig(I=20, t_s=1.0, snr_db=-5.0, N=4)


@pytest.fixture(params=KINDS)
def kind(request):
    return request.param


# (criterion id, passed, detail) recorded by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: _criterion_key(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")


def _criterion_key(cid: str):
    head = "".join(ch for ch in cid if ch.isdigit())
    return (int(head), cid)
