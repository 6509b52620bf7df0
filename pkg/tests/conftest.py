import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from atomchain import (  # noqa: E402
    ChainConfig,
    Thresholds,
    bloch_spectrum,
    detect_gaps,
    label_sweep,
    open_chain_sweep,
    track_branches,
)
from atomchain.spectra import phase_grid  # noqa: E402

REFERENCE = dict(n_atoms=101, spacing=0.1, zeeman_amp=10.0, flux=math.sqrt(5) / 10)

#: wall time spent building the shared session fixtures, by name
TIMINGS = {}


def timed(name, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    TIMINGS[name] = time.perf_counter() - t0
    return out


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    entry = _CRITERIA.setdefault(n, {"text": text, "ok": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed or report.skipped:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        c = _CRITERIA[n]
        status = "PASS" if c["ok"] and c["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {c['text']}")


@pytest.fixture(scope="session")
def ref_config():
    return ChainConfig(**REFERENCE)


@pytest.fixture(scope="session")
def ref_sweep(ref_config):
    return timed("sweep", open_chain_sweep, ref_config, phase_grid(201))


@pytest.fixture(scope="session")
def ref_gaps():
    spec = timed("bloch", bloch_spectrum, REFERENCE["flux"], 16, 8, REFERENCE["spacing"],
                 REFERENCE["zeeman_amp"])
    return timed("gaps", detect_gaps, spec)


@pytest.fixture(scope="session")
def ref_labels(ref_sweep, ref_gaps):
    return timed("labels", label_sweep, ref_sweep, ref_gaps, Thresholds())


@pytest.fixture(scope="session")
def ref_branches(ref_sweep, ref_gaps, ref_labels):
    return timed("branches", track_branches, ref_sweep, ref_gaps, Thresholds(), ref_labels)


@pytest.fixture(scope="session")
def large_gaps(ref_gaps):
    """The two widest gaps, ordered (lower, upper)."""
    return ref_gaps.widest(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
