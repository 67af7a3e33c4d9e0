import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surfbench.bposd import BposdDecoder
from surfbench.code_model import build_code
from surfbench.harness import SyndromeOutcomeTable, run_exhaustive
from surfbench.lut import LutDecoder
from surfbench.mwpm import MwpmDecoder


@pytest.fixture(scope="session")
def code3():
    return build_code(3)


@pytest.fixture(scope="session")
def code5():
    return build_code(5)


@pytest.fixture(scope="session")
def code7():
    return build_code(7)


@pytest.fixture(scope="session")
def mwpm3(code3):
    return MwpmDecoder(code3)


@pytest.fixture(scope="session")
def bposd3(code3):
    return BposdDecoder(code3)


@pytest.fixture(scope="session")
def lut3(code3):
    return LutDecoder(code3)


@pytest.fixture(scope="session")
def mwpm5(code5):
    return MwpmDecoder(code5)


@pytest.fixture(scope="session")
def bposd5(code5):
    return BposdDecoder(code5)


@pytest.fixture(scope="session")
def lut5(code5):
    return LutDecoder(code5)


@pytest.fixture(scope="session")
def table3(code3, mwpm3, bposd3):
    return SyndromeOutcomeTable(code3, mwpm3, bposd3)


@pytest.fixture(scope="session")
def table5(d5_run):
    return d5_run[2]


@pytest.fixture(scope="session")
def stats3(code3, table3):
    return run_exhaustive(code3, table=table3)


@pytest.fixture(scope="session")
def d5_run(code5, mwpm5, bposd5):
    """Timed full d=5 exhaustive run: (stats, wall seconds, outcome table).

    The wall time covers everything the run needs, including decoding
    every one of the 4096 syndromes with both decoders.
    """
    start = time.perf_counter()
    table = SyndromeOutcomeTable(code5, mwpm5, bposd5)
    stats = run_exhaustive(code5, table=table)
    elapsed = time.perf_counter() - start
    return stats, elapsed, table


@pytest.fixture(scope="session")
def stats5(d5_run):
    return d5_run[0]
