import numpy as np
import pytest

from secnoma import ChannelPair, SolveOptions, optimize_wiretap

# reference channel pairs, named by (nt, n1, n2)
CH321 = ChannelPair([[0.125, 0.821, 0.087], [0.383, 0.261, 0.037]], [[0.384, 0.703, 0.849]])
CH222 = ChannelPair([[0.783, 0.590], [0.734, 0.092]], [[0.244, 0.617], [0.947, 0.807]])
CH322 = ChannelPair(
    [[0.813, 0.232, 0.085], [0.842, 0.130, 0.203]],
    [[0.315, 0.769, 0.294], [0.025, 0.271, 0.281]],
)

# acceptance results, filled in by test_acceptance.py and echoed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Trigger numba compilation once so timed tests measure the solver only."""
    optimize_wiretap([[1.0, 0.2]], [[0.3, 0.5]], 1.0, SolveOptions(restarts=1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}")
