import numpy as np
import pytest

from atrousband import Signal

FS = 48000


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise(rng):
    return Signal(rng.standard_normal(FS) * 0.1, FS)


def tone(freq, seconds=1.0, fs=FS, amp=0.5):
    t = np.arange(int(round(seconds * fs))) / fs
    return Signal(amp * np.sin(2 * np.pi * freq * t), fs)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
