"""Independent reference implementations used to validate the fast paths.

Everything here is deliberately brute force -- full enumeration, no
pruning, no shared code with the library internals -- so a test agreeing
with an oracle is genuine evidence, not a tautology.
"""

from fractions import Fraction
from itertools import combinations, permutations

import numpy as np

from approvalmaps import Election


def naive_isomorphic_hamming(e: Election, f: Election) -> int:
    """Minimum total ballot Hamming distance over every candidate bijection
    and every voter permutation, by full m!*n! enumeration."""
    m = e.num_candidates
    n = e.num_voters
    assert f.num_candidates == m and f.num_voters == n
    best = None
    for sigma in permutations(range(m)):
        renamed = [frozenset(sigma[c] for c in ballot) for ballot in e.ballots]
        for rho in permutations(range(n)):
            total = sum(
                len(renamed[i] ^ f.ballots[rho[i]]) for i in range(n)
            )
            if best is None or total < best:
                best = total
    return best


def brute_force_pav(e: Election, k: int) -> tuple[Fraction, frozenset]:
    """Exact PAV optimum by scoring every size-k committee with Fractions.

    Returns (max score, lexicographically smallest committee attaining it).
    """
    harmonic = [Fraction(0)]
    for j in range(1, k + 1):
        harmonic.append(harmonic[-1] + Fraction(1, j))
    best_score = None
    best_committee = None
    for committee in combinations(range(e.num_candidates), k):
        members = frozenset(committee)
        score = sum(
            (harmonic[len(ballot & members)] for ballot in e.ballots), Fraction(0)
        )
        if best_score is None or score > best_score:
            best_score = score
            best_committee = members
    return best_score, best_committee


def brute_force_cohesiveness(e: Election, k: int) -> int:
    """Largest level certified by any candidate subset: a subset T of size t
    whose common approvers number a supports every level up to
    min(t, a*k//n). Enumerates all 2^m candidate subsets."""
    n = e.num_voters
    best = 0
    candidates = list(range(e.num_candidates))
    for size in range(1, min(e.num_candidates, k) + 1):
        for subset in combinations(candidates, size):
            wanted = set(subset)
            approvers = sum(1 for ballot in e.ballots if wanted <= ballot)
            level = min(size, (approvers * k) // n)
            if level > best:
                best = level
    return min(best, k)


def brute_force_1cohesive_members(e: Election, k: int) -> set[int]:
    """Voters belonging to some 1-cohesive group, by enumerating all voter
    subsets (exponential; small n only)."""
    n = e.num_voters
    members: set[int] = set()
    voters = list(range(n))
    for size in range(1, n + 1):
        if size * k < n:
            continue  # too small to be 1-cohesive
        for group in combinations(voters, size):
            common = frozenset(range(e.num_candidates))
            for v in group:
                common &= e.ballots[v]
                if not common:
                    break
            if common:
                members.update(group)
    return members


def random_election(rng: np.random.Generator, m: int, n: int, density: float | None = None) -> Election:
    """Uniform-ish random election for property tests."""
    if density is None:
        density = rng.uniform(0.1, 0.9)
    votes = rng.random((n, m)) < density
    return Election.from_bool_array(votes)


def relabel_election(e: Election, rng: np.random.Generator) -> Election:
    """Random candidate bijection + voter permutation of an election."""
    sigma = rng.permutation(e.num_candidates)
    order = rng.permutation(e.num_voters)
    ballots = tuple(
        frozenset(int(sigma[c]) for c in e.ballots[int(v)]) for v in order
    )
    return Election(num_candidates=e.num_candidates, ballots=ballots)
