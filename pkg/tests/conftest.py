import numpy as np
import pytest

from anisocs.linops import make_bundle


def mercedes_benz():
    ang = np.deg2rad([90.0, 210.0, 330.0])
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def random_frame(rng, rows, cols, complex_=True):
    a = rng.standard_normal((rows, cols))
    if complex_:
        a = a + 1j * rng.standard_normal((rows, cols))
    return a


@pytest.fixture
def mb_bundle():
    return make_bundle(mercedes_benz())


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {detail}")
