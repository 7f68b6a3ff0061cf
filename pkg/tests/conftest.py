from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fqm.gf2 import GF2Vector, Subspace

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def subspaces(draw, n=None, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n)) if n is None else n
    k = draw(st.integers(0, n + 1))
    vecs = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=k, max_size=k))
    return Subspace(n, vecs)


@st.composite
def subspace_pairs(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    return draw(subspaces(n=n)), draw(subspaces(n=n))


@st.composite
def vectors(draw, n):
    return GF2Vector(draw(st.integers(0, (1 << n) - 1)), n)


def span_set(s: Subspace) -> set[int]:
    """Brute-force element set, built by closure rather than from the canonical basis."""
    out = {0}
    for r in s.rows:
        out |= {x ^ r for x in out}
    return out


def brute_perp(s: Subspace) -> set[int]:
    elems = span_set(s)
    return {y for y in range(1 << s.n) if all(bin(y & x).count("1") % 2 == 0 for x in elems)}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        name, ok, detail = results[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{k:2d}] {name}: {detail}")
