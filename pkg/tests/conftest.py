from pathlib import Path

import numpy as np
import pytest

from skeltex.preprocess import NormalizedSequence
from skeltex.skeleton import BodyFrame, SkeletonSequence
from skeltex.synth import REST_POSE

DATA = Path(__file__).parent / "data"
NTU_FIXTURE = DATA / "S001C002P003R001A023.skeleton"


def static_sequence(T=3, pose=REST_POSE, body_id="1"):
    return SkeletonSequence([[BodyFrame(body_id, pose)] for _ in range(T)], "static")


def normalized(main, aux=None):
    main = np.asarray(main, dtype=float)
    aux = main.copy() if aux is None else np.asarray(aux, dtype=float)
    shadow = np.array_equal(main, aux)
    return NormalizedSequence(main, aux, shadow, np.full(len(main), shadow))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report: tests marked @pytest.mark.criterion(n, "title")
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = (mark.args[0], mark.args[1])
    ok = rep.passed if rep.when == "call" else not rep.failed
    if rep.when == "call" or not ok:
        _CRITERIA[key] = _CRITERIA.get(key, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
