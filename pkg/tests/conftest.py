import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fibcalc.fincat import poset, thin_from_matrix

settings.register_profile(
    "fibcalc", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("fibcalc")


@st.composite
def posets(draw, max_size: int = 4):
    """A random finite poset: a random DAG on 0..n-1 closed transitively."""
    n = draw(st.integers(1, max_size))
    rel = np.eye(n, dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            rel[i, j] = True
    for k in range(n):
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    return thin_from_matrix(list(range(n)), rel)


def monotone_maps(p, q):
    out = []
    for img in itertools.product(range(q.n_obj), repeat=p.n_obj):
        if all(q.hom(img[int(p.src[k])], img[int(p.tgt[k])]) for k in range(p.n_mor)):
            out.append(img)
    return out


@pytest.fixture(scope="session")
def chain3():
    return poset([0, 1, 2], [(0, 1), (1, 2)])


# criterion number -> summary line, filled by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
