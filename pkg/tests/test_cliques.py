from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairprep.cliques import (
    CliquePlan,
    build_plan,
    check_constraints,
    check_constraints_weighted,
    clique_extension,
    clique_initialization,
    delta,
    delta_m,
    exact_clique_search,
    plan_weight,
)
from fairprep.errors import (
    CandidateTooSmallError,
    EmptyCliqueError,
    InfeasibleParamsError,
    MemberAlreadyInCliqueError,
    TooLargeError,
)
from fairprep.info import MIMatrix


def matrix(n, entries=None, fill=0.0):
    w = np.full((n, n), fill)
    np.fill_diagonal(w, 0.0)
    for (a, b), v in (entries or {}).items():
        w[a, b] = w[b, a] = v
    return MIMatrix(tuple(range(n)), w)


def random_matrix(rng, n):
    w = np.round(rng.random((n, n)), 6)
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0.0)
    return MIMatrix(tuple(range(n)), w)


def sample_km(rng, n):
    """Random parameters from the coverable family: m <= k, or at most two cliques."""
    while True:
        k = int(rng.integers(1, n))
        m = int(rng.integers(1, n))
        if k + m > n:
            continue
        if m <= k or math.ceil((n - m) / k) <= 2:
            return k, m


def reference_matrix():
    """Six attributes whose pairwise weights drive the two-stage construction to
    the pattern initial {01}{23}{45} -> merged {01}{023}{345}."""
    return matrix(
        6,
        {
            (1, 3): 0.011, (1, 5): 0.012,               # weakest edges seed centroids 1, 3, 5
            (0, 1): 0.90, (2, 3): 0.85, (4, 5): 0.80,   # intra-pair cohesion
            (0, 2): 0.40, (0, 3): 0.42,                 # pull clique {23} toward 0
            (3, 4): 0.30, (3, 5): 0.28,                 # pull clique {45} toward 3
            (1, 2): 0.05, (1, 4): 0.02,
            (2, 4): 0.04, (2, 5): 0.04,
            (0, 4): 0.03, (0, 5): 0.03,
        },
    )


# ---------------------------------------------------------------- delta

def test_delta_singleton_collapses_to_edge_weight():
    mi = matrix(3, {(0, 1): 0.7})
    assert delta(0, (1,), mi) == pytest.approx(0.7, abs=1e-12)


def test_delta_direct_substitution():
    mi = matrix(3, {(0, 1): 0.4, (0, 2): 0.2, (1, 2): 0.5})
    assert delta(0, (1, 2), mi) == pytest.approx(0.6 / math.sqrt(3.0), abs=1e-12)


def test_delta_matches_independent_reimplementation():
    rng = np.random.default_rng(31)
    mi = random_matrix(rng, 6)
    clique = (1, 2, 3, 4, 5)
    got = delta(0, clique, mi)
    # second, direct evaluation of the same formula
    num = sum(mi.weights[0, j] for j in clique)
    internal = sum(mi.weights[j, l] for j in clique for l in clique if j < l)
    assert got == pytest.approx(num / math.sqrt(len(clique) + 2 * internal), abs=1e-12)


def test_delta_errors():
    mi = matrix(3, {(0, 1): 0.5})
    with pytest.raises(EmptyCliqueError):
        delta(0, (), mi)
    with pytest.raises(MemberAlreadyInCliqueError):
        delta(1, (1, 2), mi)


# ---------------------------------------------------------------- delta_m

def test_delta_m_full_set_and_single():
    rng = np.random.default_rng(7)
    mi = random_matrix(rng, 6)
    active = (0, 1)
    candidate = (2, 3, 4)
    score, attrs = delta_m(active, candidate, mi, 3)
    assert attrs == candidate
    assert score == pytest.approx(np.mean([delta(x, active, mi) for x in candidate]))
    score1, attrs1 = delta_m(active, candidate, mi, 1)
    best = max(candidate, key=lambda x: (delta(x, active, mi), -x))
    assert attrs1 == (best,)


def test_delta_m_matches_subset_oracle():
    rng = np.random.default_rng(13)
    mi = random_matrix(rng, 7)
    active = (0, 1)
    candidate = (2, 3, 4, 5)
    score, _ = delta_m(active, candidate, mi, 2)
    oracle = max(
        np.mean([delta(x, active, mi) for x in sub])
        for sub in itertools.combinations(candidate, 2)
    )
    assert score == pytest.approx(oracle, abs=1e-12)


def test_delta_m_candidate_too_small():
    mi = matrix(4)
    with pytest.raises(CandidateTooSmallError):
        delta_m((0,), (1, 2), mi, 3)


def test_delta_m_subset_choice_scale_invariant():
    rng = np.random.default_rng(17)
    mi = random_matrix(rng, 8)
    _, top = delta_m((0, 1, 2), (3, 4, 5, 6, 7), mi, 2)
    _, top_scaled = delta_m((0, 1, 2), (3, 4, 5, 6, 7), mi.scaled(11.5), 2)
    assert top == top_scaled


# ---------------------------------------------------------------- initialization

def test_initialization_six_attrs_three_cliques():
    mi = reference_matrix()
    init = clique_initialization(tuple(range(6)), mi, 2, 1)
    assert len(init) == 3
    covered = sorted(a for c in init for a in c)
    assert covered == list(range(6))
    sizes = sorted(len(c) for c in init)
    assert sizes in ([2, 2, 2], [1, 2, 3])
    assert sum(1 for c in init if len(c) > 2) <= 1


def test_initialization_single_clique_when_budget_covers_everything():
    mi = matrix(4, fill=0.3)
    init = clique_initialization((0, 1, 2, 3), mi, 3, 1)
    assert init == [(0, 1, 2, 3)]


def test_initialization_recovers_planted_blocks():
    entries = {}
    for blk in ((0, 1, 2), (3, 4, 5)):
        for a, b in itertools.combinations(blk, 2):
            entries[(a, b)] = 1.0
    mi = matrix(6, entries, fill=0.01)
    init = clique_initialization(tuple(range(6)), mi, 3, 0)
    assert {frozenset(c) for c in init} == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}
    # exhaustive check that the planted split is the unique optimal 3+3 partition
    best = None
    for left in itertools.combinations(range(6), 3):
        right = tuple(a for a in range(6) if a not in left)
        weight = plan_weight([left, right], mi)
        if best is None or weight > best[1]:
            best = ({frozenset(left), frozenset(right)}, weight)
    assert best[0] == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}


def test_initialization_seeding_scale_invariant():
    rng = np.random.default_rng(23)
    mi = random_matrix(rng, 8)
    a = clique_initialization(tuple(range(8)), mi, 2, 1)
    b = clique_initialization(tuple(range(8)), mi.scaled(3.0), 2, 1)
    # singleton centroids come from edge-order comparisons, preserved by scaling
    assert [c[0] for c in a][:3] == [c[0] for c in b][:3]


def test_initialization_infeasible_params():
    mi = matrix(3)
    with pytest.raises(InfeasibleParamsError):
        clique_initialization((0, 1, 2), mi, 2, 2)
    with pytest.raises(InfeasibleParamsError):
        clique_initialization((0, 1, 2), mi, 0, 1)


def test_initialization_at_most_one_clique_exceeds_core_size():
    rng = np.random.default_rng(77)
    for _ in range(100):
        n = int(rng.integers(4, 13))
        k, m = sample_km(rng, n)
        init = clique_initialization(tuple(range(n)), random_matrix(rng, n), k, m)
        oversized = [c for c in init if len(c) > k]
        assert len(oversized) <= 1
        assert all(len(c) <= k + m for c in init)
        assert sorted(a for c in init for a in c) == list(range(n))


# ---------------------------------------------------------------- extension

def test_extension_reference_merge_pattern():
    mi = reference_matrix()
    plan = build_plan(tuple(range(6)), mi, 2, 1)
    assert plan.cliques == ((0, 1), (0, 2, 3), (3, 4, 5))
    assert plan.parents == (None, 0, 1)
    assert plan.separators == ((), (0,), (3,))


def test_extension_single_clique_passthrough():
    mi = matrix(4, fill=0.2)
    plan = clique_extension([(0, 1, 2, 3)], mi, 2, k=2)
    assert plan.cliques == ((0, 1, 2, 3),)
    assert plan.separators == ((),)


def test_extension_property_over_random_inits():
    rng = np.random.default_rng(5150)
    for _ in range(1000):
        n = int(rng.integers(4, 13))
        k, m = sample_km(rng, n)
        mi = random_matrix(rng, n)
        plan = build_plan(tuple(range(n)), mi, k, m)
        report = check_constraints_weighted(plan, tuple(range(n)), k, m, mi)
        assert report.all_ok, (n, k, m, plan.cliques, report.violations)


def test_extension_determinism():
    rng = np.random.default_rng(61)
    mi = random_matrix(rng, 9)
    a = build_plan(tuple(range(9)), mi, 3, 2)
    b = build_plan(tuple(range(9)), mi, 3, 2)
    assert a == b


# ---------------------------------------------------------------- constraint checking

def test_check_constraints_reference_plan():
    mi = reference_matrix()
    plan = build_plan(tuple(range(6)), mi, 2, 1)
    report = check_constraints_weighted(plan, tuple(range(6)), 2, 1, mi)
    assert report.size_ok and report.coverage_ok and report.overlap_ok and report.acyclicity_ok
    assert report.total_weight == pytest.approx(plan_weight(plan.cliques, mi))


def test_check_constraints_flags_oversized_clique():
    plan = CliquePlan(((0, 1, 2, 3), (3, 4)), (None, 0), ((), (3,)), k=2, m=1)
    report = check_constraints(plan, tuple(range(5)), 2, 1)
    assert not report.size_ok
    assert any("clique 0" in v for v in report.violations)


def test_check_constraints_flags_overlap_cycle():
    plan = CliquePlan(
        ((0, 1), (1, 2), (0, 2)),
        (None, 0, 1),
        ((), (1,), (2,)),
        k=1,
        m=1,
    )
    report = check_constraints(plan, (0, 1, 2), 1, 1)
    assert not report.acyclicity_ok


def test_check_constraints_flags_missing_coverage():
    plan = CliquePlan(((0, 1),), (None,), ((),), k=2, m=1)
    report = check_constraints(plan, (0, 1, 2), 2, 1)
    assert not report.coverage_ok


# ---------------------------------------------------------------- exact oracle

def test_exact_search_single_clique_case():
    mi = matrix(3, {(0, 1): 0.1, (0, 2): 0.2, (1, 2): 0.3})
    plan, weight = exact_clique_search((0, 1, 2), mi, 3, 0)
    assert plan.cliques == ((0, 1, 2),)
    assert weight == pytest.approx(0.6)


def test_exact_search_recovers_planted_optimum():
    entries = {}
    for blk in ((0, 1, 2), (3, 4, 5)):
        for a, b in itertools.combinations(blk, 2):
            entries[(a, b)] = 1.0
    mi = matrix(6, entries, fill=0.01)
    plan, weight = exact_clique_search(tuple(range(6)), mi, 3, 0)
    assert {frozenset(c) for c in plan.cliques} == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}
    assert weight == pytest.approx(6.0)


def test_exact_search_caps_instance_size():
    mi = matrix(9)
    with pytest.raises(TooLargeError):
        exact_clique_search(tuple(range(9)), mi, 3, 1)


def test_heuristic_never_beats_oracle():
    rng = np.random.default_rng(99)
    for _ in range(60):
        n = int(rng.integers(4, 8))
        k, m = sample_km(rng, n)
        mi = random_matrix(rng, n)
        plan = build_plan(tuple(range(n)), mi, k, m)
        _, optimal = exact_clique_search(tuple(range(n)), mi, k, m)
        assert plan_weight(plan.cliques, mi) <= optimal + 1e-9


def test_oracle_minimize_is_dominated():
    rng = np.random.default_rng(123)
    mi = random_matrix(rng, 5)
    _, best = exact_clique_search(tuple(range(5)), mi, 2, 1)
    _, worst = exact_clique_search(tuple(range(5)), mi, 2, 1, minimize=True)
    assert worst <= best + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_extension_feasibility_hypothesis(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    k, m = sample_km(rng, n)
    plan = build_plan(tuple(range(n)), random_matrix(rng, n), k, m)
    assert check_constraints(plan, tuple(range(n)), k, m).all_ok
