"""Distances between whole elections.

Two (pseudo)metrics, both invariant under renaming candidates and voters:

* the approvalwise distance -- L1 between sorted normalized score vectors;
  cheap, a pseudometric (distinct elections can collide);
* the exact isomorphic Hamming distance -- minimum total ballot Hamming
  distance over all candidate bijections and voter matchings; exact but
  exponential, so it refuses to run above a candidate cap instead of
  approximating.

Plus the closed-form score-vector oracle for resampling-model grid points,
used to validate samplers and distance code against each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import ApprovalwiseVector, CapExceededError, Election, approvalwise_vector

__all__ = [
    "GridPoint",
    "DistanceMatrix",
    "approvalwise_distance",
    "isomorphic_hamming",
    "analytic_av",
    "analytic_distance",
    "pairwise_distances",
    "ISOMORPHIC_CANDIDATE_CAP",
    "METRICS",
]

#: Exhaustive-search ceiling for the exact isomorphic distance.
ISOMORPHIC_CANDIDATE_CAP = 10

METRICS = ("approvalwise", "isomorphic_hamming")


@dataclass(frozen=True)
class GridPoint:
    """A resampling-model configuration (p, phi, m) with p*m integral, the
    validity condition of the closed-form score-vector formula."""

    p: float
    phi: float
    m: int

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.phi <= 1.0):
            raise ValueError("p and phi must be in [0, 1]")
        if self.m < 1:
            raise ValueError("m must be positive")
        if abs(self.p * self.m - round(self.p * self.m)) > 1e-6:
            raise ValueError(f"p*m = {self.p * self.m} is not an integer")

    @property
    def approved_count(self) -> int:
        return int(round(self.p * self.m))


def analytic_av(point: GridPoint) -> ApprovalwiseVector:
    """Limit approvalwise vector of the resampling model at ``point``:
    p*m entries of (1-phi) + phi*p followed by (1-p)*m entries of phi*p.

    A centrally approved candidate keeps its approval with probability
    1-phi and is re-approved with probability phi*p otherwise; the two
    plateau values follow, and they are already sorted.
    """
    k = point.approved_count
    high = (1.0 - point.phi) + point.phi * point.p
    low = point.phi * point.p
    return ApprovalwiseVector((high,) * k + (low,) * (point.m - k))


def analytic_distance(a: GridPoint, b: GridPoint) -> float:
    """Approvalwise distance between two grid points.

    Closed forms: m*|p-p'| at equal phi and 2*m*p*(1-p)*|phi-phi'| at equal
    p; any other pair falls back to the L1 of the analytic vectors (the
    closed forms agree with the fallback on their slices).
    """
    if a.m != b.m:
        raise ValueError("grid points must share the candidate count")
    if a.phi == b.phi:
        return a.m * abs(a.p - b.p)
    if a.p == b.p:
        return 2.0 * a.m * a.p * (1.0 - a.p) * abs(a.phi - b.phi)
    return analytic_av(a).l1_distance(analytic_av(b))


def approvalwise_distance(e: Election, f: Election) -> float:
    """L1 distance between the approvalwise vectors of two elections.

    Voter counts may differ (scores are normalized); candidate counts must
    match. This is a pseudometric: non-isomorphic elections with equal
    sorted score vectors are at distance zero.
    """
    if e.num_candidates != f.num_candidates:
        raise ValueError(
            f"candidate counts differ: {e.num_candidates} vs {f.num_candidates}"
        )
    return approvalwise_vector(e).l1_distance(approvalwise_vector(f))


def _hamming_cost_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """All-pairs ballot Hamming distances between rows of two 0/1 matrices."""
    rx = x.sum(axis=1)
    ry = y.sum(axis=1)
    return rx[:, None] + ry[None, :] - 2 * (x @ y.T)


def _assignment_cost(cost: np.ndarray) -> int:
    rows, cols = linear_sum_assignment(cost)
    return int(cost[rows, cols].sum())


def isomorphic_hamming(
    e: Election, f: Election, max_candidates: int = ISOMORPHIC_CANDIDATE_CAP
) -> int:
    """Exact isomorphic Hamming distance between two elections.

    Minimizes the total ballot Hamming distance over all candidate
    bijections and voter matchings. The search is branch-and-bound over
    partial candidate bijections: for a fixed bijection the inner voter
    matching is an optimal assignment on the ballot-Hamming cost matrix,
    and partial nodes are pruned with two admissible relaxations (an
    assignment on per-voter-pair cost floors, and an assignment on the
    candidate score-profile discrepancy).

    Refuses elections with more than ``max_candidates`` candidates: the
    problem is NP-hard and this implementation is exact, never approximate.
    """
    if e.num_candidates != f.num_candidates:
        raise ValueError(
            f"candidate counts differ: {e.num_candidates} vs {f.num_candidates}"
        )
    if e.num_voters != f.num_voters:
        raise ValueError(f"voter counts differ: {e.num_voters} vs {f.num_voters}")
    m = e.num_candidates
    if m > max_candidates:
        raise CapExceededError(
            f"isomorphic Hamming is exact and exponential; {m} candidates exceeds "
            f"the cap of {max_candidates} (raise max_candidates explicitly to force)"
        )

    x = e.to_bool_array().astype(np.int32)
    y = f.to_bool_array().astype(np.int32)
    n = x.shape[0]
    scores_e = x.sum(axis=0)
    scores_f = y.sum(axis=0)

    # Greedy incumbent: match candidates by score rank, then solve the voter
    # assignment exactly. Often already optimal, which makes pruning bite.
    order_e = np.argsort(-scores_e, kind="stable")
    order_f = np.argsort(-scores_f, kind="stable")
    sigma0 = np.empty(m, dtype=int)
    sigma0[order_e] = order_f
    best = _assignment_cost(_hamming_cost_matrix(x[:, sigma0], y))
    if best == 0:
        return 0

    cols_x = [x[:, c] for c in range(m)]
    cols_y = [y[:, d] for d in range(m)]
    fixed = np.zeros((n, n), dtype=np.int32)
    rem_e = x.sum(axis=1).astype(np.int32)
    rem_f = y.sum(axis=1).astype(np.int32)
    used_f = np.zeros(m, dtype=bool)
    branch_order = order_e.tolist()
    state = {"best": best, "score_cost": 0}

    def dfs(depth: int) -> None:
        if depth == m:
            # fixed is now the exact ballot-Hamming matrix for this bijection
            cost = _assignment_cost(fixed)
            if cost < state["best"]:
                state["best"] = cost
            return
        free_f = np.flatnonzero(~used_f)
        free_e = branch_order[depth:]
        # score-profile relaxation: each assigned pair already pays at least
        # its score gap, and the free candidates at best pair up optimally
        gaps = np.abs(scores_e[free_e][:, None] - scores_f[free_f][None, :])
        lb = state["score_cost"] + _assignment_cost(gaps)
        if lb >= state["best"]:
            return
        # voter-matching relaxation: unassigned candidates can cancel at most
        # the smaller of the two remaining approval counts per voter pair
        floors = fixed + np.abs(rem_e[:, None] - rem_f[None, :])
        if _assignment_cost(floors) >= state["best"]:
            return
        c = branch_order[depth]
        col_c = cols_x[c]
        for d in sorted(free_f, key=lambda d: abs(int(scores_e[c]) - int(scores_f[d]))):
            col_d = cols_y[d]
            delta = np.abs(col_c[:, None] - col_d[None, :])
            pair_gap = abs(int(scores_e[c]) - int(scores_f[d]))
            np.add(fixed, delta, out=fixed)
            np.subtract(rem_e, col_c, out=rem_e)
            np.subtract(rem_f, col_d, out=rem_f)
            used_f[d] = True
            state["score_cost"] += pair_gap
            dfs(depth + 1)
            state["score_cost"] -= pair_gap
            used_f[d] = False
            np.add(rem_f, col_d, out=rem_f)
            np.add(rem_e, col_c, out=rem_e)
            np.subtract(fixed, delta, out=fixed)
            if state["best"] == 0:
                return

    dfs(0)
    return state["best"]


@dataclass(frozen=True)
class DistanceMatrix:
    """A labeled symmetric matrix of pairwise election distances."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(str(lb) for lb in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError("distance matrix labels must be unique")
        values = np.array(self.values, dtype=float)
        if values.shape != (len(labels), len(labels)):
            raise ValueError(
                f"matrix shape {values.shape} does not match {len(labels)} labels"
            )
        if values.size:
            if not np.allclose(values, values.T, atol=1e-9):
                raise ValueError("distance matrix must be symmetric")
            if np.any(np.diag(values) != 0):
                raise ValueError("distance matrix must have a zero diagonal")
            if np.any(values < 0):
                raise ValueError("distances must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.labels)

    def lookup(self, a: str, b: str) -> float:
        i = self.labels.index(a)
        j = self.labels.index(b)
        return float(self.values[i, j])

    def to_csv(self) -> str:
        lines = ["label," + ",".join(self.labels)]
        for label, row in zip(self.labels, self.values):
            lines.append(label + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty distance matrix CSV")
        header = lines[0].split(",")
        if header[0] != "label":
            raise ValueError("distance matrix CSV must start with a 'label' column")
        labels = tuple(header[1:])
        rows = []
        for ln in lines[1:]:
            cells = ln.split(",")
            rows.append([float(v) for v in cells[1:]])
        return cls(labels=labels, values=np.array(rows, dtype=float))

    def to_json(self) -> str:
        return json.dumps(
            {"labels": list(self.labels), "values": self.values.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "DistanceMatrix":
        payload = json.loads(text)
        return cls(
            labels=tuple(payload["labels"]),
            values=np.array(payload["values"], dtype=float),
        )


def pairwise_distances(
    elections: Sequence[Election],
    metric: str = "approvalwise",
    labels: Sequence[str] | None = None,
    max_candidates: int = ISOMORPHIC_CANDIDATE_CAP,
) -> DistanceMatrix:
    """Full symmetric distance matrix over a list of elections.

    All elections must share the candidate count; the isomorphic metric
    additionally requires a shared voter count and respects the candidate
    cap. Element errors are re-raised annotated with the offending pair.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    if not elections:
        raise ValueError("need at least one election")
    if labels is None:
        labels = [f"e{i:03d}" for i in range(len(elections))]
    if len(labels) != len(elections):
        raise ValueError("label count does not match election count")
    m = elections[0].num_candidates
    for i, e in enumerate(elections):
        if e.num_candidates != m:
            raise ValueError(f"election {labels[i]} has {e.num_candidates} candidates, expected {m}")
    if metric == "isomorphic_hamming":
        if m > max_candidates:
            raise CapExceededError(
                f"isomorphic Hamming capped at {max_candidates} candidates; got {m}"
            )
        n = elections[0].num_voters
        for i, e in enumerate(elections):
            if e.num_voters != n:
                raise ValueError(f"election {labels[i]} has {e.num_voters} voters, expected {n}")

    size = len(elections)
    out = np.zeros((size, size), dtype=float)
    if metric == "approvalwise":
        vectors = [approvalwise_vector(e) for e in elections]
        arr = np.array([v.values for v in vectors], dtype=float)
        for i in range(size):
            out[i, i + 1 :] = np.abs(arr[i + 1 :] - arr[i]).sum(axis=1)
    else:
        for i in range(size):
            for j in range(i + 1, size):
                try:
                    out[i, j] = isomorphic_hamming(
                        elections[i], elections[j], max_candidates=max_candidates
                    )
                except (ValueError, CapExceededError) as exc:
                    raise type(exc)(
                        f"pair ({i}, {j}) [{labels[i]} vs {labels[j]}]: {exc}"
                    ) from exc
    out = out + out.T
    return DistanceMatrix(labels=tuple(labels), values=out)
