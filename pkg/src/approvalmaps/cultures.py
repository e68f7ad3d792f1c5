"""Samplers for parameterized random models of approval elections.

Every sampler is a pure function of its parameters and a seed: the same
(spec, seed) pair always yields the same election, bit for bit. Models:

* resampling   -- votes start from a common central ballot; each candidate's
                  approval is independently re-drawn with probability phi
                  (phi=0 is the identity model, phi=1 the impartial culture).
* disjoint     -- candidates are partitioned into g groups; each voter
                  resamples around one group's indicator ballot.
* noise        -- votes drawn with probability proportional to
                  phi^distance(central, vote) for Hamming or Jaccard distance.
* euclidean    -- voters approve all candidates within a radius in [0,1]^dim.
* urn          -- Polya urn over candidate orderings, truncated to the top
                  ceil(p*m) candidates; alpha is the contagion strength.
* empty / full / ic / id -- the degenerate reference models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import Election, ceil_fraction, floor_fraction, make_rng

__all__ = [
    "CultureSpec",
    "CULTURE_KINDS",
    "VOTE_DISTANCES",
    "sample_resampling",
    "sample_disjoint",
    "noise_weight",
    "sample_noise",
    "sample_euclidean",
    "sample_urn",
    "make_extreme",
    "sample_culture",
    "open_interval_grid",
]

CULTURE_KINDS = (
    "resampling",
    "disjoint",
    "noise",
    "euclidean",
    "urn",
    "ic",
    "id",
    "empty",
    "full",
)

VOTE_DISTANCES = ("hamming", "jaccard")

# parameter name -> kinds that require it
_REQUIRED: dict[str, tuple[str, ...]] = {
    "p": ("resampling", "disjoint", "noise", "urn", "ic", "id"),
    "phi": ("resampling", "disjoint", "noise"),
    "g": ("disjoint",),
    "alpha": ("urn",),
    "radius": ("euclidean",),
    "dim": ("euclidean",),
    "vote_distance": ("noise",),
}


@dataclass(frozen=True)
class CultureSpec:
    """A tagged description of one statistical culture and its parameters.

    Parameters must be present iff the kind requires them; see _REQUIRED.
    Serializes to the flat JSON object
    ``{kind, p, phi, g, alpha, radius, dim, vote_distance}`` with absent
    fields omitted.
    """

    kind: str
    p: float | None = None
    phi: float | None = None
    g: int | None = None
    alpha: float | None = None
    radius: float | None = None
    dim: int | None = None
    vote_distance: str | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in CULTURE_KINDS:
            raise ValueError(f"unknown culture kind {self.kind!r}")
        for name in _REQUIRED:
            value = getattr(self, name)
            required = kind in _REQUIRED[name]
            if required and value is None:
                raise ValueError(f"culture {kind!r} requires parameter {name!r}")
            if not required and value is not None:
                raise ValueError(f"culture {kind!r} does not take parameter {name!r}")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        if self.phi is not None and not 0.0 <= self.phi <= 1.0:
            raise ValueError("phi must be in [0, 1]")
        if self.g is not None and self.g < 1:
            raise ValueError("g must be a positive integer")
        if self.alpha is not None and self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.radius is not None and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.dim is not None and self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.vote_distance is not None and self.vote_distance not in VOTE_DISTANCES:
            raise ValueError(f"vote_distance must be one of {VOTE_DISTANCES}")

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        for name in ("p", "phi", "g", "alpha", "radius", "dim", "vote_distance"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    @classmethod
    def from_json_dict(cls, payload: dict[str, Any]) -> "CultureSpec":
        known = {"kind", "p", "phi", "g", "alpha", "radius", "dim", "vote_distance"}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown culture spec fields: {sorted(unknown)}")
        return cls(**payload)

    def sample(self, m: int, n: int, seed: int) -> Election:
        """Draw one election with m candidates and n voters."""
        return sample_culture(self, m, n, seed)


def _check_sizes(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 candidates and n >= 1 voters")


def _central_ballot_mask(m: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform random central ballot of size ⌊p·m⌋ as a boolean mask."""
    size = floor_fraction(p, m)
    mask = np.zeros(m, dtype=bool)
    if size:
        mask[rng.choice(m, size=size, replace=False)] = True
    return mask


def _resample_votes(
    central: np.ndarray, n: int, p: float, phi: float, rng: np.random.Generator
) -> np.ndarray:
    """Each vote copies ``central``, then re-draws every candidate's approval
    with probability phi (approved with probability p when re-drawn)."""
    m = central.shape[0]
    resample = rng.random((n, m)) < phi
    redrawn = rng.random((n, m)) < p
    return np.where(resample, redrawn, central[np.newaxis, :])


def sample_resampling(m: int, n: int, p: float, phi: float, seed: int) -> Election:
    """Resampling model: common central ballot of size ⌊p·m⌋, per-candidate
    re-draw probability phi. phi=0 gives identical votes; phi=1 gives the
    impartial culture with approval probability p."""
    _check_sizes(m, n)
    if not (0.0 <= p <= 1.0 and 0.0 <= phi <= 1.0):
        raise ValueError("p and phi must be in [0, 1]")
    rng = make_rng(seed)
    central = _central_ballot_mask(m, p, rng)
    votes = _resample_votes(central, n, p, phi, rng)
    return Election.from_bool_array(votes)


def sample_disjoint(
    m: int, n: int, p: float, phi: float, g: int, seed: int
) -> Election:
    """Disjoint model: a uniform random partition of the candidates into g
    non-empty groups; each voter picks a group uniformly and resamples
    around that group's indicator ballot (re-draw probability phi, re-drawn
    approvals use p)."""
    _check_sizes(m, n)
    if g < 1:
        raise ValueError("g must be positive")
    if g > m:
        raise ValueError(f"cannot partition {m} candidates into {g} non-empty groups")
    rng = make_rng(seed)
    # uniform group labels, re-drawn until every group is inhabited
    while True:
        assignment = rng.integers(g, size=m)
        if len(np.unique(assignment)) == g:
            break
    group_of_voter = rng.integers(g, size=n)
    central_per_voter = assignment[np.newaxis, :] == group_of_voter[:, np.newaxis]
    resample = rng.random((n, m)) < phi
    redrawn = rng.random((n, m)) < p
    votes = np.where(resample, redrawn, central_per_voter)
    return Election.from_bool_array(votes)


def _pair_distance(kept: int, added: int, central_size: int, vote_distance: str) -> float:
    """Distance between the central ballot and any vote keeping ``kept`` of
    its approvals and adding ``added`` outside ones."""
    ham = (central_size - kept) + added
    if vote_distance == "hamming":
        return float(ham)
    if vote_distance == "jaccard":
        union = central_size + added
        return 0.0 if union == 0 else ham / union
    raise ValueError(f"vote_distance must be one of {VOTE_DISTANCES}")


def noise_weight(
    kept: int,
    added: int,
    central_size: int,
    m: int,
    phi: float,
    vote_distance: str = "hamming",
) -> float:
    """Unnormalized probability mass of the (kept, added) vote shape under
    the noise model: C(z, kept) * C(m-z, added) * phi^distance, with the
    0^0 = 1 convention so phi=0 concentrates all mass on the central vote.
    """
    if not 0 <= central_size <= m:
        raise ValueError("central_size must be in [0, m]")
    if not 0 <= kept <= central_size:
        raise ValueError("kept must be in [0, central_size]")
    if not 0 <= added <= m - central_size:
        raise ValueError("added must be in [0, m - central_size]")
    d = _pair_distance(kept, added, central_size, vote_distance)
    if phi == 0.0:
        weight = 1.0 if d == 0.0 else 0.0
    else:
        weight = phi**d
    return math.comb(central_size, kept) * math.comb(m - central_size, added) * weight


def sample_noise(
    m: int,
    n: int,
    p: float,
    phi: float,
    vote_distance: str = "hamming",
    seed: int = 0,
) -> Election:
    """Noise model: central ballot as in resampling; each vote is drawn with
    probability proportional to phi^distance(central, vote).

    Sampling goes through the (kept, added) shape distribution -- the number
    of approvals retained from the central ballot and added outside it --
    which is exact for any distance depending only on ballot sizes and
    overlap (Hamming and Jaccard both qualify).
    """
    _check_sizes(m, n)
    if not (0.0 <= p <= 1.0 and 0.0 <= phi <= 1.0):
        raise ValueError("p and phi must be in [0, 1]")
    if vote_distance not in VOTE_DISTANCES:
        raise ValueError(f"vote_distance must be one of {VOTE_DISTANCES}")
    rng = make_rng(seed)
    central = _central_ballot_mask(m, p, rng)
    z = int(central.sum())
    inside = np.flatnonzero(central)
    outside = np.flatnonzero(~central)

    shapes = [(x, y) for x in range(z + 1) for y in range(m - z + 1)]
    weights = np.array(
        [noise_weight(x, y, z, m, phi, vote_distance) for x, y in shapes], dtype=float
    )
    total = weights.sum()
    if total <= 0:
        raise ValueError("noise model has no admissible vote shape")
    cells = rng.choice(len(shapes), size=n, p=weights / total)

    votes = np.zeros((n, m), dtype=bool)
    for i, cell in enumerate(cells):
        x, y = shapes[cell]
        if x:
            votes[i, rng.choice(inside, size=x, replace=False)] = True
        if y:
            votes[i, rng.choice(outside, size=y, replace=False)] = True
    return Election.from_bool_array(votes)


def sample_euclidean(m: int, n: int, dim: int, radius: float, seed: int) -> Election:
    """Euclidean model: candidate and voter points uniform on [0,1]^dim; a
    voter approves every candidate within ``radius`` (ties included)."""
    _check_sizes(m, n)
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    if radius <= 0:
        raise ValueError("radius must be positive")
    rng = make_rng(seed)
    candidates = rng.random((m, dim))
    voters = rng.random((n, dim))
    diff = voters[:, np.newaxis, :] - candidates[np.newaxis, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    return Election.from_bool_array(dist <= radius)


def sample_urn(m: int, n: int, p: float, alpha: float, seed: int) -> Election:
    """Truncated urn model: orders drawn from a Polya urn over all candidate
    permutations; each ballot approves the top ⌈p·m⌉ candidates of its order.

    The urn starts with every permutation once and each draw returns
    alpha*m! copies of the drawn order, so the t-th draw is a fresh uniform
    permutation with probability 1/(1 + t*alpha) and otherwise a uniform
    copy of one of the t earlier draws. alpha=0 is i.i.d. fixed-size
    ballots; large alpha makes all ballots identical.
    """
    _check_sizes(m, n)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    rng = make_rng(seed)
    top = ceil_fraction(p, m)
    orders: list[np.ndarray] = []
    votes = np.zeros((n, m), dtype=bool)
    for t in range(n):
        if t == 0 or rng.random() < 1.0 / (1.0 + t * alpha):
            order = rng.permutation(m)
        else:
            order = orders[rng.integers(t)]
        orders.append(order)
        if top:
            votes[t, order[:top]] = True
    return Election.from_bool_array(votes)


def make_extreme(
    m: int, n: int, which: str, seed: int = 0, p: float | None = None
) -> Election:
    """Reference elections: ``empty``, ``full``, ``p_id`` (identical ballots
    of size ⌊p·m⌋) and ``p_ic`` (independent approvals with probability p)."""
    _check_sizes(m, n)
    if which == "empty":
        return Election.from_bool_array(np.zeros((n, m), dtype=bool))
    if which == "full":
        return Election.from_bool_array(np.ones((n, m), dtype=bool))
    if which in ("p_id", "p_ic"):
        if p is None:
            raise ValueError(f"{which!r} requires p")
        phi = 0.0 if which == "p_id" else 1.0
        return sample_resampling(m, n, p, phi, seed)
    raise ValueError(f"unknown extreme {which!r}")


def sample_culture(spec: CultureSpec, m: int, n: int, seed: int) -> Election:
    """Dispatch a CultureSpec to its sampler."""
    kind = spec.kind
    if kind == "resampling":
        return sample_resampling(m, n, spec.p, spec.phi, seed)
    if kind == "disjoint":
        return sample_disjoint(m, n, spec.p, spec.phi, spec.g, seed)
    if kind == "noise":
        return sample_noise(m, n, spec.p, spec.phi, spec.vote_distance, seed)
    if kind == "euclidean":
        return sample_euclidean(m, n, spec.dim, spec.radius, seed)
    if kind == "urn":
        return sample_urn(m, n, spec.p, spec.alpha, seed)
    if kind == "ic":
        return make_extreme(m, n, "p_ic", seed, p=spec.p)
    if kind == "id":
        return make_extreme(m, n, "p_id", seed, p=spec.p)
    if kind == "empty":
        return make_extreme(m, n, "empty", seed)
    if kind == "full":
        return make_extreme(m, n, "full", seed)
    raise ValueError(f"unknown culture kind {kind!r}")


def open_interval_grid(low: float, high: float, count: int) -> list[float]:
    """``count`` evenly spaced values strictly inside (low, high):
    low + i*(high-low)/(count+1) for i = 1..count."""
    if count < 1:
        raise ValueError("count must be positive")
    step = (high - low) / (count + 1)
    return [low + i * step for i in range(1, count + 1)]
