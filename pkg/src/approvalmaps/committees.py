"""Committee rules and cohesive-group statistics.

AV picks the k best approval scores (all tied committees, capped). PAV
maximizes the harmonic satisfaction sum; it is NP-hard, so the solver here
is an exact branch-and-bound with combinatorial bounds: a greedy committee
seeds the incumbent, candidates are added in increasing index order, and a
node's subtree is bounded by its score plus the largest remaining marginal
gains (valid because marginal gains only shrink as committees grow). All
harmonic arithmetic is exact -- integers scaled by lcm(1..k) inside the
solver, Fractions at the API boundary -- so ties are never decided by
float noise.

Cohesive groups: a group of voters deserving l committee seats must have
at least l*n/k members jointly approving at least l candidates. The level
search is a binary search on l; each existence check is a depth-first
search over candidate sets with support pruning (a set is extendable only
while its common-approver count stays above the group-size threshold).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import CapExceededError, Election

__all__ = [
    "Committee",
    "PavResult",
    "CohesivenessResult",
    "av_committee",
    "pav_score",
    "pav_score_exact",
    "pav_committee",
    "cohesiveness_level",
    "voters_in_1cohesive_fraction",
    "max_approval_score",
    "DEFAULT_COMMITTEE_SIZE",
    "DEFAULT_PAV_TIME_BUDGET",
]

Committee = frozenset

#: Committee size used by the election statistics unless overridden.
DEFAULT_COMMITTEE_SIZE = 10

#: Per-election wall-clock budget for the exact PAV solver, in seconds.
DEFAULT_PAV_TIME_BUDGET = 600.0


def _check_committee_size(election: Election, k: int) -> None:
    if not 1 <= k <= election.num_candidates:
        raise ValueError(
            f"committee size {k} out of range [1, {election.num_candidates}]"
        )


def av_committee(
    election: Election, k: int, max_ties: int = 10_000
) -> list[frozenset]:
    """All committees of size k maximizing the total approval score.

    Ties are enumerated exactly; if more than ``max_ties`` committees are
    tied, refuses with CapExceededError rather than returning a sample.
    """
    _check_committee_size(election, k)
    counts = election.approval_counts()
    order = sorted(range(election.num_candidates), key=lambda c: (-counts[c], c))
    threshold = counts[order[k - 1]]
    forced = [c for c in range(election.num_candidates) if counts[c] > threshold]
    tied = [c for c in range(election.num_candidates) if counts[c] == threshold]
    slots = k - len(forced)
    n_committees = math.comb(len(tied), slots)
    if n_committees > max_ties:
        raise CapExceededError(
            f"{n_committees} tied approval committees exceed the cap of {max_ties}"
        )
    return [
        frozenset(forced) | frozenset(combo)
        for combo in itertools.combinations(tied, slots)
    ]


def _harmonic_fractions(upto: int) -> list[Fraction]:
    out = [Fraction(0)]
    for j in range(1, upto + 1):
        out.append(out[-1] + Fraction(1, j))
    return out


def pav_score_exact(election: Election, committee: Iterable[int]) -> Fraction:
    """Exact PAV score of a committee: sum over voters of h(|ballot ∩ W|),
    with h the harmonic function."""
    members = frozenset(int(c) for c in committee)
    for c in members:
        if not 0 <= c < election.num_candidates:
            raise ValueError(f"committee member {c} out of range")
    harmonic = _harmonic_fractions(len(members))
    total = Fraction(0)
    for ballot in election.ballots:
        total += harmonic[len(ballot & members)]
    return total


def pav_score(election: Election, committee: Iterable[int]) -> float:
    return float(pav_score_exact(election, committee))


@dataclass(frozen=True)
class PavResult:
    """Outcome of the exact PAV solver.

    ``optimal`` is False only when the time budget ran out; the committee is
    then the best incumbent and ``bound_gap`` bounds how far below the true
    optimum it can be (in PAV score units).
    """

    committee: frozenset
    score: Fraction
    seconds: float
    optimal: bool
    bound_gap: float = 0.0

    @property
    def score_float(self) -> float:
        return float(self.score)


def _compact_ballots(election: Election) -> tuple[np.ndarray, np.ndarray]:
    """Distinct ballots as a 0/1 matrix plus multiplicities."""
    tally: dict[frozenset, int] = {}
    for ballot in election.ballots:
        tally[ballot] = tally.get(ballot, 0) + 1
    distinct = list(tally)
    mat = np.zeros((len(distinct), election.num_candidates), dtype=np.int64)
    for i, ballot in enumerate(distinct):
        if ballot:
            mat[i, list(ballot)] = 1
    weights = np.array([tally[b] for b in distinct], dtype=np.int64)
    return mat, weights


def pav_committee(
    election: Election,
    k: int,
    time_budget: float = DEFAULT_PAV_TIME_BUDGET,
    lexicographic_ties: bool = True,
) -> PavResult:
    """One PAV-optimal committee of size k, with the wall-clock runtime.

    Exact (worst-case exponential). With ``lexicographic_ties`` the search
    runs in candidate-index order and returns the lexicographically
    smallest optimum; with it off, candidates are explored by decreasing
    approval score with the greedy committee as the starting incumbent,
    which is much faster on large structured instances but breaks ties by
    search order instead (still deterministic). The optimal score is
    identical either way.

    If ``time_budget`` seconds pass first, returns the best incumbent with
    ``optimal=False`` and the remaining bound gap in PAV score units.
    """
    _check_committee_size(election, k)
    start = time.perf_counter()
    m = election.num_candidates
    raw_ballots, weights = _compact_ballots(election)
    scale = math.lcm(*range(1, k + 1))
    # marginal[j] = scale/(j+1): exact integer gain of a voter's (j+1)-th
    # approved committee member; harmonic[j] = scale*h(j)
    marginal = np.array([scale // (j + 1) for j in range(k + 1)], dtype=np.int64)
    harmonic = np.concatenate(([0], np.cumsum(marginal[:k])))

    candidate_scores = weights @ raw_ballots
    if lexicographic_ties:
        order = np.arange(m)
    else:
        order = np.argsort(-candidate_scores, kind="stable")
    ballots = np.ascontiguousarray(raw_ballots[:, order])
    scores = candidate_scores[order]

    # suffix_approvals[v, i] = how many of voter v's approvals have index >= i
    suffix_approvals = np.zeros((len(weights), m + 1), dtype=np.int64)
    suffix_approvals[:, :m] = np.cumsum(ballots[:, ::-1], axis=1)[:, ::-1]
    # supply[i, r] = largest possible number of approvals that r committee
    # members drawn from indices >= i can soak up, i.e. the top-r score sum
    supply = np.zeros((m + 1, k + 1), dtype=np.int64)
    for i in range(m):
        tail = np.sort(scores[i:])[::-1][:k]
        supply[i, 1 : len(tail) + 1] = np.cumsum(tail)

    def gains_for(overlap: np.ndarray) -> np.ndarray:
        return (weights * marginal[overlap]) @ ballots

    def allocation_bound(overlap: np.ndarray, first_free: int, missing: int) -> int:
        """Upper-bounds any completion: voters claim harmonic increments
        (levels overlap, overlap+1, ...) best-first, each voter capped by
        its reachable approvals, the total capped by the approval supply of
        the best ``missing`` remaining candidates. Exact on identity-like
        profiles, capacity-aware on dense ones."""
        cap = np.minimum(missing, suffix_approvals[:, first_free])
        starts = np.bincount(overlap, weights=weights, minlength=k + 1)
        ends = np.bincount(overlap + cap, weights=weights, minlength=k + 1)
        counts = np.cumsum(starts - ends)[:k].astype(np.int64)
        budget = int(supply[first_free, missing])
        total = 0
        for level in range(k):
            take = counts[level] if counts[level] < budget else budget
            if take <= 0:
                continue
            total += take * int(marginal[level])
            budget -= take
            if budget <= 0:
                break
        return int(total)

    # greedy committee: repeatedly add the candidate with the largest
    # marginal gain (smallest index on ties); seeds the score bound, and in
    # fast mode also the incumbent
    overlap = np.zeros(len(weights), dtype=np.int64)
    greedy: list[int] = []
    greedy_score = 0
    for _ in range(k):
        gains = gains_for(overlap)
        gains[greedy] = -1
        c = int(np.argmax(gains))
        greedy_score += int(gains[c])
        greedy.append(c)
        overlap += ballots[:, c]
    greedy_committee = frozenset(greedy)

    best_score = greedy_score
    incumbent: frozenset | None = None if lexicographic_ties else greedy_committee

    def prunable(bound: int) -> bool:
        if incumbent is None:
            return bound < best_score
        return bound <= best_score

    # Stack nodes: (last added candidate, committee size, exact scaled
    # score, per-ballot overlaps, member tuple, an upper bound valid for
    # the whole subtree). Children are pushed in reverse so DFS visits
    # committees in lexicographic order, making the first tie canonical.
    stack = [(-1, 0, 0, np.zeros(len(weights), dtype=np.int64), (), None)]
    timed_out = False
    pops = 0
    while stack:
        last, size, score, overlap, members, node_ub = stack.pop()
        pops += 1
        if pops % 512 == 0 and time.perf_counter() - start > time_budget:
            timed_out = True
            stack.append((last, size, score, overlap, members, node_ub))
            break
        if node_ub is not None and prunable(node_ub):
            continue
        missing = k - size
        if m - (last + 1) < missing:
            continue
        upper_alloc = score + allocation_bound(overlap, last + 1, missing)
        if prunable(upper_alloc):
            continue
        gains = gains_for(overlap)
        if missing == 1:
            # children are complete committees; evaluate in index order
            for c in range(last + 1, m):
                leaf_score = score + int(gains[c])
                if leaf_score > best_score:
                    best_score = leaf_score
                    incumbent = frozenset(members + (c,))
                elif leaf_score == best_score and incumbent is None:
                    incumbent = frozenset(members + (c,))
            continue
        tail = gains[last + 1 :]
        top = np.partition(tail, len(tail) - missing)[len(tail) - missing :]
        upper = min(score + int(top.sum()), upper_alloc)
        if prunable(upper):
            continue
        for c in range(m - missing, last, -1):
            stack.append(
                (
                    c,
                    size + 1,
                    score + int(gains[c]),
                    overlap + ballots[:, c],
                    members + (c,),
                    upper,
                )
            )

    if incumbent is None:
        incumbent = greedy_committee
    gap = 0.0
    if timed_out:
        open_bounds = [node[5] for node in stack if node[5] is not None]
        ceiling = max(open_bounds, default=best_score)
        gap = max(0.0, (ceiling - best_score) / scale)
    committee = frozenset(int(order[c]) for c in incumbent)
    return PavResult(
        committee=committee,
        score=Fraction(best_score, scale),
        seconds=time.perf_counter() - start,
        optimal=not timed_out,
        bound_gap=gap,
    )


@dataclass(frozen=True)
class CohesivenessResult:
    """Largest cohesiveness level and a certifying group.

    ``witness`` is a (voters, candidates) pair: the voters all approve every
    listed candidate, the voter set has the minimum size required at this
    level, and no group exists one level higher. Level 0 holds vacuously
    and carries no witness.
    """

    level: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None


def _find_group(
    candidate_masks: list[int], n: int, level: int, min_size: int
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """A set of ``level`` candidates commonly approved by >= min_size voters,
    or None. Depth-first over candidate sets, pruning on common-approver
    support (anti-monotone in the candidate set)."""
    viable = [c for c, mask in enumerate(candidate_masks) if mask.bit_count() >= min_size]
    viable.sort(key=lambda c: -candidate_masks[c].bit_count())
    all_voters = (1 << n) - 1

    def dfs(start: int, voters: int, chosen: list[int]):
        if len(chosen) == level:
            picked = []
            mask = voters
            while mask and len(picked) < max(min_size, 0):
                low = mask & -mask
                picked.append(low.bit_length() - 1)
                mask ^= low
            return tuple(sorted(picked)), tuple(sorted(chosen))
        for idx in range(start, len(viable) - (level - len(chosen)) + 1):
            narrowed = voters & candidate_masks[viable[idx]]
            if narrowed.bit_count() >= min_size:
                chosen.append(viable[idx])
                found = dfs(idx + 1, narrowed, chosen)
                if found:
                    return found
                chosen.pop()
        return None

    return dfs(0, all_voters, [])


def cohesiveness_level(election: Election, k: int) -> CohesivenessResult:
    """Largest l in [0, k] such that an l-cohesive group exists.

    If any l-cohesive group exists, one of size exactly ceil(l*n/k) exists
    (dropping voters never shrinks the common approval set), so each
    existence check looks for that size; l itself is found by binary search
    (cohesiveness is monotone in l). The search is capped at l = k.
    """
    _check_committee_size(election, k)
    n = election.num_voters
    masks = election.candidate_voter_masks()
    witnesses: dict[int, tuple] = {}

    def exists(level: int) -> bool:
        min_size = -((-level * n) // k)  # ceil(level * n / k)
        found = _find_group(masks, n, level, min_size)
        if found:
            witnesses[level] = found
        return found is not None

    lo, hi = 0, k
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if exists(mid):
            lo = mid
        else:
            hi = mid - 1
    return CohesivenessResult(level=lo, witness=witnesses.get(lo))


def voters_in_1cohesive_fraction(election: Election, k: int) -> float:
    """Fraction of voters belonging to at least one 1-cohesive group.

    A voter qualifies exactly when it approves some candidate whose
    approval score reaches n/k: the approvers of that candidate form a
    1-cohesive group, and any 1-cohesive group arises this way.
    """
    _check_committee_size(election, k)
    n = election.num_voters
    counts = election.approval_counts()
    popular = {c for c in range(election.num_candidates) if counts[c] * k >= n}
    if not popular:
        return 0.0
    member = sum(1 for ballot in election.ballots if ballot & popular)
    return member / n


def max_approval_score(election: Election) -> float:
    """Highest approval score over all candidates, normalized by the number
    of voters."""
    return float(election.approval_counts().max()) / election.num_voters
