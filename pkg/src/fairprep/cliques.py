"""Constrained clique generation over the pairwise-MI graph.

The goal is an ordered family of attribute cliques that maximizes the total
intra-clique MI weight subject to four structural constraints: every clique
has at most k+m attributes; the cliques jointly cover all attributes; every
clique shares at least m attributes with some other clique (and any pairwise
overlap is either empty or at least m); and the overlap relationships form no
cycle. The family then serves as the skeleton of a junction-tree-style
factorization, so the tree structure is what makes sequential conditional
sampling well-defined.

Exact optimization is intractable in general, so the production path is a
two-phase heuristic: partition the attributes into r = ceil((n-m)/k) disjoint
cliques seeded at the endpoints of the weakest edges and grown greedily by the
affinity score `delta`, then merge them into one overlapping tree by absorbing
m-attribute separators from already-processed cliques. A brute-force exact
search over tiny instances acts as the oracle counterpart.

A structural note that drives the implementation: if any attribute belonged to
three cliques, those cliques would overlap pairwise and form a cycle, so in
every feasible plan each attribute lives in at most two cliques. Separator
attributes are therefore only drawn from a clique's "grantable" pool: members
that no other clique of the plan has absorbed yet. This keeps the overlap
graph a tree by construction instead of by luck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    CandidateTooSmallError,
    CliqueError,
    EmptyCliqueError,
    EmptyInitError,
    InfeasibleParamsError,
    MemberAlreadyInCliqueError,
    TooLargeError,
)
from .info import MIMatrix

EXACT_SEARCH_CAP = 8


@dataclass(frozen=True)
class CliquePlan:
    """Ordered cliques with parent links and separators.

    parents[i] is the position (in this plan) of the clique that clique i was
    attached to, or None for a factorization root; separators[i] is the shared
    attribute set with that parent. Cliques and separators are sorted tuples
    of attribute indices.
    """

    cliques: tuple[tuple[int, ...], ...]
    parents: tuple[int | None, ...]
    separators: tuple[tuple[int, ...], ...]
    k: int
    m: int

    def __post_init__(self):
        if not (len(self.cliques) == len(self.parents) == len(self.separators)):
            raise CliqueError("plan fields disagree in length")
        earlier: set[int] = set()
        for i, (parent, sep) in enumerate(zip(self.parents, self.separators)):
            if parent is None:
                if sep:
                    raise CliqueError(f"clique {i}: root cannot carry a separator")
            else:
                if not 0 <= parent < i:
                    raise CliqueError(f"clique {i}: parent must come earlier in the plan")
                if not set(sep) <= set(self.cliques[i]):
                    raise CliqueError(f"clique {i}: separator is not inside the clique")
                # Sequential sampling needs every separator attribute assigned
                # before the clique is processed. A label clique's separator may
                # span several earlier cliques, so containment is joint.
                if not set(sep) <= earlier:
                    raise CliqueError(f"clique {i}: separator not covered by earlier cliques")
            earlier |= set(self.cliques[i])

    @property
    def r(self) -> int:
        return len(self.cliques)

    def covered(self) -> frozenset[int]:
        return frozenset(a for c in self.cliques for a in c)


@dataclass(frozen=True)
class ConstraintReport:
    size_ok: bool
    coverage_ok: bool
    overlap_ok: bool
    acyclicity_ok: bool
    violations: tuple[str, ...]
    total_weight: float

    @property
    def all_ok(self) -> bool:
        return self.size_ok and self.coverage_ok and self.overlap_ok and self.acyclicity_ok


# ---------------------------------------------------------------- scoring

def clique_weight(clique, mi: MIMatrix) -> float:
    """Sum of pairwise MI weights inside one clique."""
    clique = tuple(clique)
    total = 0.0
    for i, a in enumerate(clique):
        for b in clique[i + 1:]:
            total += mi.weight(a, b)
    return total


def plan_weight(cliques, mi: MIMatrix) -> float:
    """Objective value of a clique family: total intra-clique weight."""
    return sum(clique_weight(c, mi) for c in cliques)


def delta(u: int, clique, mi: MIMatrix) -> float:
    """Affinity of attribute u to a clique.

    Sum of u's edges into the clique, normalized by the clique's internal
    cohesion: sum_j E[u,j] / sqrt(|C| + 2 * sum_{j<k} E[j,k]). The denominator
    is shared by all candidate attributes for a fixed clique, so relative
    ranking there depends on the numerator alone.
    """
    clique = tuple(clique)
    if not clique:
        raise EmptyCliqueError("affinity needs a non-empty clique")
    if u in clique:
        raise MemberAlreadyInCliqueError(f"attribute {u} already belongs to the clique")
    numerator = sum(mi.weight(u, j) for j in clique)
    return numerator / math.sqrt(len(clique) + 2.0 * clique_weight(clique, mi))


def delta_m(active, candidate, mi: MIMatrix, m: int) -> tuple[float, tuple[int, ...]]:
    """Averaged top-m affinity between two cliques.

    Picks the m attributes of `candidate` with the highest individual delta
    against `active` (ties to the lower attribute index) and returns their mean
    score together with the chosen attributes. Because the objective is a mean
    of independent per-attribute terms, the greedy top-m equals the maximum
    over all m-subsets.
    """
    active = tuple(active)
    candidate = tuple(candidate)
    if m < 1 or len(candidate) < m:
        raise CandidateTooSmallError(f"candidate of size {len(candidate)} cannot donate {m} attributes")
    scored = sorted(((delta(x, active, mi), x) for x in candidate), key=lambda t: (-t[0], t[1]))
    chosen = scored[:m]
    score = sum(s for s, _ in chosen) / m
    return score, tuple(sorted(x for _, x in chosen))


# ---------------------------------------------------------------- phase 1: disjoint partition

def clique_initialization(attrs, mi: MIMatrix, k: int, m: int) -> list[tuple[int, ...]]:
    """Partition attributes into r = ceil((n-m)/k) disjoint cliques.

    Centroids are seeded at the endpoints of the smallest-weight edges (weak
    ties suggest separate sub-structures); remaining attributes then join the
    feasible clique maximizing delta, one per iteration, with incremental
    weight updates. All cliques are capped at k except a single overflow
    clique that may grow to k+m: the first insertion that pushes a clique past
    k designates it, after which every other clique is capped at k. That keeps
    total capacity at r*k + m >= n, so coverage never deadlocks.
    """
    attrs = tuple(attrs)
    n = len(attrs)
    if k < 1 or m < 0:
        raise InfeasibleParamsError(f"need k >= 1 and m >= 0, got k={k} m={m}")
    if n < 2:
        raise InfeasibleParamsError("need at least two attributes")
    if k + m > n:
        raise InfeasibleParamsError(f"k+m = {k + m} exceeds the attribute count {n}")
    r = math.ceil((n - m) / k)
    if r < 1:
        raise InfeasibleParamsError("separator size leaves no room for any clique")

    edges = sorted(
        ((mi.weight(a, b), a, b) for i, a in enumerate(attrs) for b in attrs[i + 1:]),
        key=lambda t: (t[0], t[1], t[2]),
    )
    unassigned = set(attrs)
    members: list[list[int]] = []
    for _, a, b in edges:
        for endpoint in (a, b):
            if len(members) < r and endpoint in unassigned:
                members.append([endpoint])
                unassigned.remove(endpoint)
        if len(members) >= r:
            break

    # cross[u][ci] = sum of edges from u into clique ci; internal[ci] = clique weight
    ordered_unassigned = sorted(unassigned)
    cross = {u: [mi.weight(u, c[0]) for c in members] for u in ordered_unassigned}
    internal = [0.0] * r
    big: int | None = None
    flag = True

    while unassigned:
        best: tuple[float, int, int] | None = None  # (score, u, ci)
        for ci in range(r):
            cap = (k + m) if (flag or ci == big) else k
            if len(members[ci]) >= cap:
                continue
            denom = math.sqrt(len(members[ci]) + 2.0 * internal[ci])
            for u in sorted(unassigned):
                score = cross[u][ci] / denom
                if best is None or score > best[0] or (score == best[0] and (u, ci) < (best[1], best[2])):
                    best = (score, u, ci)
        if best is None:
            raise InfeasibleParamsError("no clique can accept the remaining attributes")
        _, u, ci = best
        members[ci].append(u)
        internal[ci] += cross[u][ci]
        unassigned.remove(u)
        del cross[u]
        for v in cross:
            cross[v][ci] += mi.weight(v, u)
        if len(members[ci]) > k and big is None:
            big = ci
            flag = False

    return [tuple(sorted(c)) for c in members]


# ---------------------------------------------------------------- phase 2: tree-structured merge

def _grantable(clique, member_count) -> list[int]:
    """Attributes of a plan clique not yet shared with any other plan clique."""
    return [a for a in clique if member_count[a] == 1]


def _completion_feasible(pools, supplies, m: int) -> bool:
    """Can every remaining clique absorb an m-attribute separator from a
    single pool, given that a processed clique's own attributes become a new
    pool? Pools below m are dead weight and dropped from the state."""

    @lru_cache(maxsize=None)
    def solve(pool_state: tuple[int, ...], supply_state: tuple[int, ...]) -> bool:
        if not supply_state:
            return True
        for si in range(len(supply_state)):
            if si > 0 and supply_state[si] == supply_state[si - 1]:
                continue
            rest_supply = supply_state[:si] + supply_state[si + 1:]
            for pi in range(len(pool_state)):
                if pi > 0 and pool_state[pi] == pool_state[pi - 1]:
                    continue
                new_pools = list(pool_state[:pi] + pool_state[pi + 1:])
                if pool_state[pi] - m >= m:
                    new_pools.append(pool_state[pi] - m)
                if supply_state[si] >= m:
                    new_pools.append(supply_state[si])
                if solve(tuple(sorted(new_pools)), rest_supply):
                    return True
        return False

    return solve(
        tuple(sorted(p for p in pools if p >= m)),
        tuple(sorted(supplies)),
    )


def clique_extension(init, mi: MIMatrix, m: int, k: int | None = None) -> CliquePlan:
    """Merge disjoint cliques into an ordered, overlapping, acyclic plan.

    The seed is the k+m-sized clique when one exists, otherwise the largest
    (ties to the lowest index). Each iteration attaches the unprocessed clique
    maximizing delta_m against some processed clique, absorbing the top-m
    grantable attributes of that parent as its separator. Candidate grants are
    screened so the remaining cliques can still be attached; if no parent can
    donate m attributes, the attachment degrades gracefully (separator smaller
    than m, reported by check_constraints) instead of failing.
    """
    init = [tuple(sorted(c)) for c in init]
    if not init:
        raise EmptyInitError("no cliques to extend")
    seen: set[int] = set()
    for c in init:
        if not c:
            raise EmptyInitError("initial cliques must be non-empty")
        if seen & set(c):
            raise EmptyInitError("initial cliques must be disjoint")
        seen |= set(c)
    if k is None:
        k = max(len(c) for c in init)

    if len(init) == 1:
        return CliquePlan((init[0],), (None,), ((),), k, m)
    if m == 0:
        # Disjoint cliques already satisfy every constraint; nothing to absorb.
        return CliquePlan(tuple(init), (None,) * len(init), ((),) * len(init), k, m)

    seed_pos = max(range(len(init)), key=lambda i: (len(init[i]), -i))
    plan_cliques: list[tuple[int, ...]] = [init[seed_pos]]
    plan_parents: list[int | None] = [None]
    plan_seps: list[tuple[int, ...]] = [()]
    member_count = {a: 1 for a in init[seed_pos]}
    unprocessed: list[tuple[int, int]] = [  # (init index, clique) in init order
        (i, c) for i, c in enumerate(init) if i != seed_pos
    ]

    while unprocessed:
        by_init = dict(unprocessed)
        candidates = []  # (score, init_idx, plan_pos, separator)
        for init_idx, active in unprocessed:
            for j, parent in enumerate(plan_cliques):
                pool = _grantable(parent, member_count)
                if len(pool) < m:
                    continue
                score, top = delta_m(active, tuple(pool), mi, m)
                candidates.append((score, init_idx, j, top))
        candidates.sort(key=lambda t: (-t[0], t[1], t[2]))

        accepted = None
        for score, init_idx, j, top in candidates:
            pools = [len(_grantable(c, member_count)) for c in plan_cliques]
            pools[j] -= m
            supplies = [len(c) for i, c in unprocessed if i != init_idx]
            if _completion_feasible(pools + [len(by_init[init_idx])], supplies, m):
                accepted = (init_idx, j, top)
                break
        if accepted is None and candidates:
            _, init_idx, j, top = candidates[0]
            accepted = (init_idx, j, top)

        if accepted is None:
            # No parent can donate m attributes: attach with the largest pool
            # (possibly empty) of the best-scoring parent instead of failing.
            fallback = []
            for init_idx, active in unprocessed:
                for j, parent in enumerate(plan_cliques):
                    pool = _grantable(parent, member_count)
                    if pool:
                        score, top = delta_m(active, tuple(pool), mi, len(pool))
                    else:
                        score, top = -math.inf, ()
                    fallback.append((score, init_idx, j, top))
            fallback.sort(key=lambda t: (-t[0], t[1], t[2]))
            _, init_idx, j, top = fallback[0]
            accepted = (init_idx, j, top)

        init_idx, j, top = accepted
        active = by_init[init_idx]
        new_clique = tuple(sorted(active + top))
        plan_cliques.append(new_clique)
        plan_parents.append(j)
        plan_seps.append(top)
        for a in active:
            member_count[a] = 1
        for a in top:
            member_count[a] += 1
        unprocessed = [(i, c) for i, c in unprocessed if i != init_idx]

    return CliquePlan(tuple(plan_cliques), tuple(plan_parents), tuple(plan_seps), k, m)


def build_plan(attrs, mi: MIMatrix, k: int, m: int) -> CliquePlan:
    """Full heuristic: disjoint partition followed by tree-structured merge."""
    return clique_extension(clique_initialization(attrs, mi, k, m), mi, m, k=k)


# ---------------------------------------------------------------- validation

def check_constraints(plan: CliquePlan, attrs, k: int, m: int) -> ConstraintReport:
    """Literal evaluation of the four plan constraints.

    Reports total_weight as 0; check_constraints_weighted takes the MI matrix
    and fills in the objective value as well.
    """
    return check_constraints_weighted(plan, attrs, k, m, mi=None)


def check_constraints_weighted(
    plan: CliquePlan, attrs, k: int, m: int, mi: MIMatrix | None
) -> ConstraintReport:
    attrs = set(attrs)
    cliques = [set(c) for c in plan.cliques]
    r = len(cliques)
    violations: list[str] = []

    size_ok = True
    for i, c in enumerate(cliques):
        if len(c) > k + m:
            size_ok = False
            violations.append(f"clique {i} has {len(c)} attributes, cap is k+m={k + m}")

    union = set().union(*cliques) if cliques else set()
    coverage_ok = union == attrs
    if union - attrs:
        violations.append(f"plan covers attributes outside the target set: {sorted(union - attrs)}")
    if attrs - union:
        violations.append(f"attributes not covered by any clique: {sorted(attrs - union)}")

    overlap_ok = True
    if r > 1:
        for i in range(r):
            if not any(len(cliques[i] & cliques[j]) >= m for j in range(r) if j != i):
                overlap_ok = False
                violations.append(f"clique {i} shares fewer than m={m} attributes with every other clique")
        for i in range(r):
            for j in range(i + 1, r):
                shared = len(cliques[i] & cliques[j])
                if 0 < shared < m:
                    overlap_ok = False
                    violations.append(f"cliques {i} and {j} overlap in {shared} < m={m} attributes")

    # Overlap graph must be a forest: any cycle breaks the factorization.
    parent_of = list(range(r))

    def find(x: int) -> int:
        while parent_of[x] != x:
            parent_of[x] = parent_of[parent_of[x]]
            x = parent_of[x]
        return x

    acyclicity_ok = True
    for i in range(r):
        for j in range(i + 1, r):
            if cliques[i] & cliques[j]:
                ri, rj = find(i), find(j)
                if ri == rj:
                    acyclicity_ok = False
                    violations.append(f"cliques {i} and {j} close a cycle of overlaps")
                else:
                    parent_of[ri] = rj

    weight = plan_weight(plan.cliques, mi) if mi is not None else 0.0
    return ConstraintReport(size_ok, coverage_ok, overlap_ok, acyclicity_ok, tuple(violations), weight)


# ---------------------------------------------------------------- exact oracle

def exact_clique_search(
    attrs, mi: MIMatrix, k: int, m: int, minimize: bool = False
) -> tuple[CliquePlan, float]:
    """Exhaustive search over all feasible plans of r = ceil((n-m)/k) distinct
    cliques on a tiny instance; returns an optimal plan and its weight.

    Ties break to the lexicographically smallest plan encoding (subsets are
    enumerated as ascending bitmasks). The minimize flag searches for the
    worst feasible plan instead, which test suites use as a reference point.
    """
    attrs = tuple(attrs)
    n = len(attrs)
    if n > EXACT_SEARCH_CAP:
        raise TooLargeError(f"exact search is capped at {EXACT_SEARCH_CAP} attributes")
    if k < 1 or m < 0 or k + m > n:
        raise InfeasibleParamsError(f"invalid parameters k={k} m={m} for {n} attributes")
    r = math.ceil((n - m) / k)

    masks = [mask for mask in range(1, 1 << n) if mask.bit_count() <= k + m]
    mask_weight = []
    for mask in masks:
        members = [attrs[i] for i in range(n) if mask >> i & 1]
        mask_weight.append(clique_weight(members, mi))
    suffix_union = [0] * (len(masks) + 1)
    for i in range(len(masks) - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | masks[i]
    suffix_max_w = [0.0] * (len(masks) + 1)
    for i in range(len(masks) - 1, -1, -1):
        suffix_max_w[i] = max(suffix_max_w[i + 1], mask_weight[i])

    full = (1 << n) - 1
    best: tuple[float, list[int]] | None = None

    def overlap_feasible(chosen: list[int], new: int) -> bool:
        for prior in chosen:
            shared = (prior & new).bit_count()
            if 0 < shared < m:
                return False
        return True

    def acyclic(chosen: list[int]) -> bool:
        parent_of = list(range(len(chosen)))

        def find(x: int) -> int:
            while parent_of[x] != x:
                parent_of[x] = parent_of[parent_of[x]]
                x = parent_of[x]
            return x

        for i in range(len(chosen)):
            for j in range(i + 1, len(chosen)):
                if chosen[i] & chosen[j]:
                    ri, rj = find(i), find(j)
                    if ri == rj:
                        return False
                    parent_of[ri] = rj
        return True

    def leaf_ok(chosen: list[int]) -> bool:
        if len(chosen) > 1:
            for i, c in enumerate(chosen):
                if not any((c & d).bit_count() >= m for j, d in enumerate(chosen) if j != i):
                    return False
        return acyclic(chosen)

    def recurse(start: int, chosen: list[int], covered: int, weight: float):
        nonlocal best
        remaining = r - len(chosen)
        if remaining == 0:
            if covered == full and leaf_ok(chosen):
                if best is None or (weight < best[0] if minimize else weight > best[0]):
                    best = (weight, list(chosen))
            return
        if covered | suffix_union[start] != full:
            return
        if best is not None:
            if minimize:
                if weight >= best[0]:
                    return
            elif weight + remaining * suffix_max_w[start] <= best[0]:
                return
        for idx in range(start, len(masks) - remaining + 1):
            mask = masks[idx]
            if not overlap_feasible(chosen, mask):
                continue
            chosen.append(mask)
            recurse(idx + 1, chosen, covered | mask, weight + mask_weight[idx])
            chosen.pop()

    recurse(0, [], 0, 0.0)
    if best is None:
        raise CliqueError(f"no feasible plan of {r} cliques exists for k={k} m={m}")

    weight, chosen = best
    cliques = [tuple(attrs[i] for i in range(n) if mask >> i & 1) for mask in chosen]
    parents: list[int | None] = []
    separators: list[tuple[int, ...]] = []
    for i, c in enumerate(cliques):
        parent = None
        for j in range(i):
            if set(c) & set(cliques[j]):
                parent = j
                break
        parents.append(parent)
        separators.append(tuple(sorted(set(c) & set(cliques[parent]))) if parent is not None else ())
    plan = CliquePlan(tuple(cliques), tuple(parents), tuple(separators), k, m)
    return plan, weight
