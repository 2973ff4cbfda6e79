import sys

import pytest

from sbforge import brace as br
from sbforge import construct as cs
from sbforge.fpalg import build_frame, validate_prime_pair
from sbforge.holo import Holomorph

PAIRS = [(2, 3), (3, 13)]


class Family:
    """Objects for one prime pair, built once per session."""

    def __init__(self, p, q):
        self.p, self.q = p, q
        self.frame = build_frame(validate_prime_pair(p, q))
        self.h = Holomorph(self.frame)
        self.G = cs.build_G(self.h)
        self.Gs = cs.build_G_star(self.h)
        self.B = br.brace_from_regular(self.G)
        self.Bs = br.brace_from_regular(self.Gs)


_cache = {}


def family(p, q) -> Family:
    if (p, q) not in _cache:
        _cache[(p, q)] = Family(p, q)
    return _cache[(p, q)]


@pytest.fixture(scope="session")
def f12():
    return family(2, 3)


@pytest.fixture(scope="session")
def f351():
    return family(3, 13)


@pytest.fixture(scope="session", params=PAIRS, ids=["n12", "n351"])
def fam(request):
    return family(*request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
