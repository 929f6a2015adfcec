import re

import numpy as np
import pytest

from pwsample import _backend

_ACCEPTANCE = {}


@pytest.fixture(params=sorted(_backend.available_backends()))
def backend(request):
    return _backend.available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed:
        key = props["criterion"]
        prev = _ACCEPTANCE.get(key)
        if prev is None or report.failed:
            _ACCEPTANCE[key] = ("PASS" if report.passed else "FAIL", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")

    def order(k):
        m = re.match(r"(\d+)", k)
        return (int(m.group(1)) if m else 10**6, k)

    for key in sorted(_ACCEPTANCE, key=order):
        verdict, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{verdict} criterion {key} {detail}".rstrip())
