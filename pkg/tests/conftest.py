import itertools
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from msvote.core import ApprovalBallot, Election, RankedBallot, committee
from msvote.generate import default_labels

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def ranked_elections(draw, min_m=2, max_m=5, min_n=1, max_n=8, max_weight=3):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    ballots = tuple(
        RankedBallot(tuple(draw(st.permutations(range(m)))), draw(st.integers(1, max_weight)))
        for _ in range(n)
    )
    return Election(default_labels(m), ballots)


@st.composite
def approval_elections(draw, min_m=2, max_m=5, min_n=1, max_n=8, max_weight=3):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    ballots = tuple(
        ApprovalBallot(frozenset(draw(st.sets(st.integers(0, m - 1), min_size=1))),
                       draw(st.integers(1, max_weight)))
        for _ in range(n)
    )
    return Election(default_labels(m), ballots)


@st.composite
def strict_vectors(draw, m, max_t=3):
    t = draw(st.integers(1, min(max_t, m - 1)))
    sizes = draw(st.lists(st.integers(1, m - 1), min_size=t, max_size=t, unique=True))
    return tuple(sorted(sizes, reverse=True))


# brute-force oracles, written independently of the engines under test

def naive_score(beta, gamma, pool, k, ballots, S):
    """Per-committee score from scratch: restrict, locate, apply the norm."""
    m = len(pool)
    total = Fraction(0)
    for b in ballots:
        order = [c for c in b.ranking if c in pool]
        scores = [Fraction(gamma(m, k, order.index(c) + 1)) for c in S]
        total += b.weight * (sum(scores) if beta == "l1" else max(scores))
    return total


def naive_winners(beta, gamma, e, pool, k):
    pool = tuple(sorted(pool))
    scored = {S: naive_score(beta, gamma, pool, k, e.ballots, S) for S in itertools.combinations(pool, k)}
    best = max(scored.values())
    return {S for S, v in scored.items() if v == best}


def naive_thiele_winners(omega, e, pool, k):
    scored = {}
    for S in itertools.combinations(sorted(pool), k):
        scored[S] = sum(b.weight * omega(len(set(S) & b.approved)) for b in e.ballots)
    best = max(scored.values())
    return {S for S, v in scored.items() if v == best}


def naive_multistage(stage_fn, e, sizes):
    """All finals by plain recursion over every tied branch."""
    def go(pool, rest):
        if not rest:
            return {committee(pool)}
        k = rest[0]
        if k == len(pool):
            return go(pool, rest[1:])
        out = set()
        for S in stage_fn(e, pool, k):
            out |= go(S, rest[1:])
        return out
    return go(tuple(range(e.m)), tuple(sizes))


def naive_jr(e, S, k, ceiling=False):
    threshold = Fraction(e.n, k)
    if ceiling:
        threshold = Fraction(-(-e.n // k))
    voters = range(len(e.ballots))
    for r in range(1, len(e.ballots) + 1):
        for group in itertools.combinations(voters, r):
            ballots = [e.ballots[i] for i in group]
            if sum(b.weight for b in ballots) < threshold:
                continue
            common = frozenset.intersection(*(b.approved for b in ballots))
            if common and all(not (b.approved & set(S)) for b in ballots):
                return False
    return True


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance summary: one line per criterion, printed after the run
ACCEPTANCE = {}


@contextmanager
def criterion(number, title, budget=None):
    start = time.perf_counter()
    notes = []
    status = "FAIL"
    try:
        yield notes
        status = "PASS"
    except BaseException as exc:
        notes.append(f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        raise
    finally:
        elapsed = time.perf_counter() - start
        if status == "PASS" and budget is not None and elapsed >= budget:
            status = "FAIL"
            notes.append(f"over budget {budget:g}s")
        ACCEPTANCE[number] = (status, title, elapsed, notes)
    if budget is not None:
        assert elapsed < budget, f"criterion {number} took {elapsed:.2f}s (budget {budget:g}s)"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, elapsed, notes = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] {number:>2}. {title} ({elapsed:.2f}s)")
        for note in notes:
            terminalreporter.write_line(f"        {note}")
