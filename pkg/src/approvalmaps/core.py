"""Approval election data model, ballot distances, and RNG plumbing.

Candidates are anonymous indices 0..m-1; any real-world names live in
sidecar label tables kept by the ingest layer, never here. Elections and
approvalwise vectors are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = [
    "Election",
    "ApprovalwiseVector",
    "CapExceededError",
    "approval_score",
    "approvalwise_vector",
    "vote_hamming",
    "vote_jaccard",
    "election_to_text",
    "election_from_text",
    "election_to_json",
    "election_from_json",
    "save_election",
    "load_election",
    "make_rng",
    "spawn_seed",
]


class CapExceededError(RuntimeError):
    """An operation refused to run past a configured resource cap.

    Raised instead of silently approximating (e.g. the exact isomorphic
    distance above its candidate cap, or approval-committee tie explosion).
    """


@dataclass(frozen=True)
class Election:
    """An approval election: ``num_candidates`` and one ballot per voter.

    Ballots are sets of candidate indices in ``[0, num_candidates)``. The
    voter list is ordered so elections reproduce byte-for-byte, but every
    statistic and distance in this package is order-invariant.
    """

    num_candidates: int
    ballots: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.num_candidates < 1:
            raise ValueError("need at least one candidate")
        coerced = tuple(frozenset(int(c) for c in ballot) for ballot in self.ballots)
        object.__setattr__(self, "ballots", coerced)
        if len(coerced) < 1:
            raise ValueError("need at least one voter")
        for i, ballot in enumerate(coerced):
            if ballot and (min(ballot) < 0 or max(ballot) >= self.num_candidates):
                raise ValueError(
                    f"ballot {i} approves a candidate outside [0, {self.num_candidates})"
                )

    @property
    def num_voters(self) -> int:
        return len(self.ballots)

    def approval_counts(self) -> np.ndarray:
        """Number of approvals per candidate, as an int array of length m."""
        counts = np.zeros(self.num_candidates, dtype=np.int64)
        for ballot in self.ballots:
            for c in ballot:
                counts[c] += 1
        return counts

    def to_bool_array(self) -> np.ndarray:
        """(n, m) boolean approval matrix; row per voter."""
        arr = np.zeros((self.num_voters, self.num_candidates), dtype=bool)
        for i, ballot in enumerate(self.ballots):
            if ballot:
                arr[i, list(ballot)] = True
        return arr

    @classmethod
    def from_bool_array(cls, approvals: np.ndarray) -> "Election":
        approvals = np.asarray(approvals, dtype=bool)
        if approvals.ndim != 2:
            raise ValueError("approval matrix must be 2-dimensional")
        ballots = tuple(
            frozenset(np.flatnonzero(row).tolist()) for row in approvals
        )
        return cls(num_candidates=approvals.shape[1], ballots=ballots)

    def ballot_bitmasks(self) -> list[int]:
        """One int per voter; bit c set iff the voter approves candidate c."""
        return [
            sum(1 << c for c in ballot) for ballot in self.ballots
        ]

    def candidate_voter_masks(self) -> list[int]:
        """One int per candidate; bit v set iff voter v approves the candidate."""
        masks = [0] * self.num_candidates
        for v, ballot in enumerate(self.ballots):
            bit = 1 << v
            for c in ballot:
                masks[c] |= bit
        return masks


@dataclass(frozen=True)
class ApprovalwiseVector:
    """Sorted (non-increasing) normalized approval scores of an election.

    This is the fingerprint used by the cheap election distance: candidate
    identity is deliberately erased by the sorting.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1:
            raise ValueError("empty approvalwise vector")
        for x in vals:
            if not (-1e-12 <= x <= 1 + 1e-12):
                raise ValueError(f"approvalwise value {x} outside [0, 1]")
        for a, b in zip(vals, vals[1:]):
            if b > a + 1e-12:
                raise ValueError("approvalwise vector must be non-increasing")

    def __len__(self) -> int:
        return len(self.values)

    def l1_distance(self, other: "ApprovalwiseVector") -> float:
        if len(self) != len(other):
            raise ValueError("approvalwise vectors have different lengths")
        return float(sum(abs(a - b) for a, b in zip(self.values, other.values)))


def approval_score(election: Election, candidate: int) -> int:
    """Number of voters approving ``candidate``."""
    if not 0 <= candidate < election.num_candidates:
        raise IndexError(f"candidate {candidate} out of range")
    return sum(1 for ballot in election.ballots if candidate in ballot)


def approvalwise_vector(election: Election) -> ApprovalwiseVector:
    """Normalized per-candidate approval scores, sorted non-increasing."""
    counts = election.approval_counts()
    n = election.num_voters
    vals = sorted((float(c) / n for c in counts), reverse=True)
    return ApprovalwiseVector(tuple(vals))


def vote_hamming(u: Iterable[int], v: Iterable[int]) -> int:
    """Size of the symmetric difference of two ballots."""
    return len(frozenset(u) ^ frozenset(v))


def vote_jaccard(u: Iterable[int], v: Iterable[int]) -> float:
    """Hamming distance divided by the union size; 0 for two empty ballots.

    The empty/empty case is defined as 0 so identity of indiscernibles
    holds on the whole ballot space.
    """
    a, b = frozenset(u), frozenset(v)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a ^ b) / union


# ---------------------------------------------------------------------------
# Canonical election file format
#
# Text: a header line "m n", then n lines, each a comma-separated sorted
# list of approved indices (an empty line is an empty ballot). JSON mirror:
# {"num_candidates": m, "ballots": [[...], ...]}.
# ---------------------------------------------------------------------------


def election_to_text(election: Election) -> str:
    lines = [f"{election.num_candidates} {election.num_voters}"]
    for ballot in election.ballots:
        lines.append(",".join(str(c) for c in sorted(ballot)))
    return "\n".join(lines) + "\n"


def election_from_text(text: str) -> Election:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty election file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header {lines[0]!r}: expected 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ValueError(f"bad header {lines[0]!r}: expected two integers") from exc
    body = lines[1:]
    if len(body) < n:
        raise ValueError(f"expected {n} ballot lines, found {len(body)}")
    for extra in body[n:]:
        if extra.strip():
            raise ValueError("trailing non-empty lines after the last ballot")
    ballots = []
    for i, line in enumerate(body[:n]):
        line = line.strip()
        if not line:
            ballots.append(frozenset())
            continue
        try:
            ballots.append(frozenset(int(tok) for tok in line.split(",")))
        except ValueError as exc:
            raise ValueError(f"ballot line {i + 2}: {line!r} is not a list of ints") from exc
    return Election(num_candidates=m, ballots=tuple(ballots))


def election_to_json(election: Election) -> str:
    payload = {
        "num_candidates": election.num_candidates,
        "ballots": [sorted(ballot) for ballot in election.ballots],
    }
    return json.dumps(payload)


def election_from_json(text: str) -> Election:
    payload = json.loads(text)
    return Election(
        num_candidates=int(payload["num_candidates"]),
        ballots=tuple(frozenset(b) for b in payload["ballots"]),
    )


def save_election(election: Election, path: str | Path) -> None:
    """Write in the canonical format; ``.json`` suffix selects the mirror."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(election_to_json(election), encoding="utf-8")
    else:
        path.write_text(election_to_text(election), encoding="utf-8")


def load_election(path: str | Path) -> Election:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return election_from_json(text)
    return election_from_text(text)


# ---------------------------------------------------------------------------
# RNG plumbing
#
# All sampling in this package flows through numpy's PCG64 generator: the
# same 64-bit seed plus the same parameters give bit-identical elections on
# every platform. Batch jobs derive one independent stream per item via
# spawn_seed.
# ---------------------------------------------------------------------------


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    """A PCG64 generator for ``seed``; passes through existing generators."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def spawn_seed(seed: int, index: int) -> int:
    """Deterministic child seed for item ``index`` of a batch.

    Uses SeedSequence spawn keys, so streams for different indices are
    statistically independent and stable across platforms and runs.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def floor_fraction(p: float, m: int) -> int:
    """⌊p·m⌋ computed robustly against float noise (0.29*100 == 28.999...)."""
    return int(math.floor(p * m + 1e-9))


def ceil_fraction(p: float, m: int) -> int:
    """⌈p·m⌉ with the same float-noise guard as :func:`floor_fraction`."""
    return int(math.ceil(p * m - 1e-9))
