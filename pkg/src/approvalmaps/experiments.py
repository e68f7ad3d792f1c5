"""Dataset orchestration: the background grid, the culture datasets, the
per-election statistics table, and the two-metric correlation study.

Manifests are declarative: a list of (culture spec, seed, label) rows plus
the election dimensions, so any dataset regenerates bit-identically from
its JSON form. Seeds are derived from a single master seed with the
spawn rule in core, one independent stream per entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .committees import (
    DEFAULT_COMMITTEE_SIZE,
    DEFAULT_PAV_TIME_BUDGET,
    cohesiveness_level,
    max_approval_score,
    pav_committee,
    voters_in_1cohesive_fraction,
)
from .core import Election, load_election, spawn_seed
from .cultures import CultureSpec, open_interval_grid
from .metrics import pairwise_distances

__all__ = [
    "ManifestEntry",
    "DatasetManifest",
    "StatRow",
    "CorrelationReport",
    "build_background",
    "build_culture_datasets",
    "build_correlation_manifest",
    "run_statistics",
    "run_correlation",
    "stats_to_csv",
    "stats_from_csv",
]


@dataclass(frozen=True)
class ManifestEntry:
    """One dataset row: a culture spec to sample or a file to load."""

    label: str
    seed: int
    spec: CultureSpec | None = None
    path: str | None = None

    def __post_init__(self):
        if (self.spec is None) == (self.path is None):
            raise ValueError("entry needs exactly one of spec or path")

    @property
    def culture(self) -> str:
        return self.spec.kind if self.spec is not None else "file"


@dataclass
class DatasetManifest:
    name: str
    m: int
    n: int
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        labels = [entry.label for entry in self.entries]
        if len(set(labels)) != len(labels):
            raise ValueError(f"manifest {self.name!r} has duplicate labels")

    @property
    def labels(self) -> list[str]:
        return [entry.label for entry in self.entries]

    def generate(self) -> list[tuple[str, Election]]:
        """Sample or load every entry, in manifest order."""
        out = []
        for entry in self.entries:
            if entry.spec is not None:
                election = entry.spec.sample(self.m, self.n, entry.seed)
            else:
                election = load_election(entry.path)
            out.append((entry.label, election))
        return out

    def to_json(self) -> str:
        rows = []
        for entry in self.entries:
            row: dict = {"label": entry.label, "seed": entry.seed}
            if entry.spec is not None:
                row["spec"] = entry.spec.to_json_dict()
            else:
                row["path"] = entry.path
            rows.append(row)
        return json.dumps(
            {"name": self.name, "m": self.m, "n": self.n, "entries": rows}, indent=2
        )

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        payload = json.loads(text)
        entries = []
        for row in payload["entries"]:
            spec = CultureSpec.from_json_dict(row["spec"]) if "spec" in row else None
            entries.append(
                ManifestEntry(
                    label=row["label"],
                    seed=int(row["seed"]),
                    spec=spec,
                    path=row.get("path"),
                )
            )
        return cls(
            name=payload["name"], m=int(payload["m"]), n=int(payload["n"]), entries=entries
        )

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _spec_entries(specs: Sequence[tuple[str, CultureSpec]], seed: int) -> list[ManifestEntry]:
    return [
        ManifestEntry(label=label, seed=spawn_seed(seed, i), spec=spec)
        for i, (label, spec) in enumerate(specs)
    ]


def build_background(
    m: int = 100,
    n: int = 1000,
    seed: int = 0,
    p_line_count: int = 16,
    phi_line_count: int = 13,
) -> DatasetManifest:
    """The 241-election resampling grid spanning the whole election space.

    Two line families: p in {0, 0.1, ..., 1} with phi interpolated inside
    (0, 1), and phi in {0, 0.25, 0.5, 0.75, 1} with p interpolated inside
    (0, 1). The defaults (16 and 13 per line) make 11*16 + 5*13 = 241.
    """
    specs: list[tuple[str, CultureSpec]] = []
    for i in range(11):
        p = i / 10
        for phi in open_interval_grid(0.0, 1.0, p_line_count):
            label = f"resampling_p{p:.4f}_phi{phi:.4f}"
            specs.append((label, CultureSpec("resampling", p=p, phi=phi)))
    for phi in (0.0, 0.25, 0.5, 0.75, 1.0):
        for p in open_interval_grid(0.0, 1.0, phi_line_count):
            label = f"resampling_p{p:.4f}_phi{phi:.4f}"
            specs.append((label, CultureSpec("resampling", p=p, phi=phi)))
    return DatasetManifest(
        name="background", m=m, n=n, entries=_spec_entries(specs, seed)
    )


def build_culture_datasets(
    seed: int = 0, m: int = 100, n: int = 1000
) -> list[DatasetManifest]:
    """The five generated culture datasets with their published counts and
    parameter intervals: 250 disjoint, 225 noise, 225 urn, 200 Euclidean.

    The disjoint dataset's resampling probability is not pinned anywhere,
    so it is set to 1/g, matching the expected density of the group ballots.
    """
    datasets: list[DatasetManifest] = []

    disjoint: list[tuple[str, CultureSpec]] = []
    for g in (2, 3, 4, 5, 6):
        for i, phi in enumerate(open_interval_grid(0.05, 1.0 / g, 50)):
            spec = CultureSpec("disjoint", p=1.0 / g, phi=phi, g=g)
            disjoint.append((f"disjoint_g{g}_{i:03d}", spec))
    datasets.append(
        DatasetManifest(
            name="disjoint", m=m, n=n, entries=_spec_entries(disjoint, spawn_seed(seed, 1))
        )
    )

    noise: list[tuple[str, CultureSpec]] = []
    for pi in range(1, 10):
        p = pi / 10
        for i, phi in enumerate(open_interval_grid(0.0, 1.0, 25)):
            spec = CultureSpec("noise", p=p, phi=phi, vote_distance="hamming")
            noise.append((f"noise_p{p:.1f}_{i:03d}", spec))
    datasets.append(
        DatasetManifest(
            name="noise", m=m, n=n, entries=_spec_entries(noise, spawn_seed(seed, 2))
        )
    )

    urn: list[tuple[str, CultureSpec]] = []
    for pi in range(1, 10):
        p = pi / 10
        for i, alpha in enumerate(open_interval_grid(0.0, 1.0, 25)):
            spec = CultureSpec("urn", p=p, alpha=alpha)
            urn.append((f"urn_p{p:.1f}_{i:03d}", spec))
    datasets.append(
        DatasetManifest(
            name="urn", m=m, n=n, entries=_spec_entries(urn, spawn_seed(seed, 3))
        )
    )

    euclidean: list[tuple[str, CultureSpec]] = []
    for i, radius in enumerate(open_interval_grid(0.0025, 0.25, 100)):
        euclidean.append(
            (f"euclidean_1d_{i:03d}", CultureSpec("euclidean", dim=1, radius=radius))
        )
    for i, radius in enumerate(open_interval_grid(0.005, 0.5, 100)):
        euclidean.append(
            (f"euclidean_2d_{i:03d}", CultureSpec("euclidean", dim=2, radius=radius))
        )
    datasets.append(
        DatasetManifest(
            name="euclidean", m=m, n=n, entries=_spec_entries(euclidean, spawn_seed(seed, 4))
        )
    )

    return datasets


def _correlation_specs(scale: str) -> list[tuple[str, CultureSpec]]:
    specs: list[tuple[str, CultureSpec]] = []

    def add(kind: str, spec: CultureSpec):
        specs.append((f"{kind}_{len(specs):03d}", spec))

    if scale == "desk":
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            for phi in open_interval_grid(0.0, 1.0, 4):
                add("resampling", CultureSpec("resampling", p=p, phi=phi))
        for g in (2, 3):
            for phi in open_interval_grid(0.05, 1.0 / g, 4):
                add("disjoint", CultureSpec("disjoint", p=1.0 / g, phi=phi, g=g))
        for p in (0.3, 0.7):
            for phi in open_interval_grid(0.0, 1.0, 4):
                add("noise", CultureSpec("noise", p=p, phi=phi, vote_distance="hamming"))
        for p in (0.3, 0.7):
            for alpha in open_interval_grid(0.0, 1.0, 4):
                add("urn", CultureSpec("urn", p=p, alpha=alpha))
        for radius in open_interval_grid(0.0025, 0.25, 4):
            add("euclidean", CultureSpec("euclidean", dim=1, radius=radius))
        for radius in open_interval_grid(0.005, 0.5, 4):
            add("euclidean", CultureSpec("euclidean", dim=2, radius=radius))
        for p in open_interval_grid(0.0, 1.0, 2):
            add("ic", CultureSpec("ic", p=p))
        for p in open_interval_grid(0.0, 1.0, 2):
            add("id", CultureSpec("id", p=p))
    elif scale == "paper":
        # 134 resampling points: a 12x12 open lattice truncated row-major
        # (the exact grid is unrecorded; this is a reproduction approximation)
        lattice = [
            (p, phi)
            for p in open_interval_grid(0.0, 1.0, 12)
            for phi in open_interval_grid(0.0, 1.0, 12)
        ][:134]
        for p, phi in lattice:
            add("resampling", CultureSpec("resampling", p=p, phi=phi))
        for g in (2, 3, 4, 5):
            for phi in open_interval_grid(0.05, 1.0 / g, 10):
                add("disjoint", CultureSpec("disjoint", p=1.0 / g, phi=phi, g=g))
        for pi in range(1, 10):
            for phi in open_interval_grid(0.0, 1.0, 5):
                add("noise", CultureSpec("noise", p=pi / 10, phi=phi, vote_distance="hamming"))
        for p in open_interval_grid(0.0, 1.0, 10):
            for alpha in open_interval_grid(0.0, 1.0, 5):
                add("urn", CultureSpec("urn", p=p, alpha=alpha))
        for radius in open_interval_grid(0.0025, 0.25, 25):
            add("euclidean", CultureSpec("euclidean", dim=1, radius=radius))
        for radius in open_interval_grid(0.005, 0.5, 25):
            add("euclidean", CultureSpec("euclidean", dim=2, radius=radius))
        for p in open_interval_grid(0.0, 1.0, 20):
            add("ic", CultureSpec("ic", p=p))
        for p in open_interval_grid(0.0, 1.0, 20):
            add("id", CultureSpec("id", p=p))
    else:
        raise ValueError(f"scale must be 'desk' or 'paper', got {scale!r}")

    add("extreme_ic", CultureSpec("ic", p=0.5))
    add("extreme_id", CultureSpec("id", p=0.5))
    add("extreme_empty", CultureSpec("empty"))
    add("extreme_full", CultureSpec("full"))
    return specs


def build_correlation_manifest(
    scale: str = "desk", seed: int = 0, m: int | None = None, n: int | None = None
) -> DatasetManifest:
    """Election set for the two-metric comparison: 60 elections across all
    cultures at desk scale (default m=6, n=12), or the published 363-election
    composition at paper scale (m=10, n=50)."""
    if scale == "paper":
        m, n = 10, 50
    else:
        m = 6 if m is None else m
        n = 12 if n is None else n
    return DatasetManifest(
        name=f"correlation_{scale}",
        m=m,
        n=n,
        entries=_spec_entries(_correlation_specs(scale), seed),
    )


@dataclass
class StatRow:
    """Per-election statistics; None with a non-empty error means the
    statistic could not be computed."""

    label: str
    culture: str
    max_score: float | None = None
    cohesiveness_level: int | None = None
    cohesive_fraction: float | None = None
    pav_runtime_seconds: float | None = None
    pav_score: float | None = None
    error: str = ""


def run_statistics(
    manifest: DatasetManifest,
    k: int = DEFAULT_COMMITTEE_SIZE,
    pav_time_budget: float = DEFAULT_PAV_TIME_BUDGET,
    elections: Sequence[tuple[str, Election]] | None = None,
) -> list[StatRow]:
    """The four election statistics for every manifest entry, sorted by
    label. PAV timeouts land in the error column with the bound gap; they
    are not fatal, and the recorded runtime/score are the incumbent's.
    """
    if elections is None:
        elections = manifest.generate()
    by_label = {entry.label: entry for entry in manifest.entries}
    rows = []
    for label, election in elections:
        row = StatRow(label=label, culture=by_label[label].culture)
        try:
            row.max_score = max_approval_score(election)
            row.cohesiveness_level = cohesiveness_level(election, k).level
            row.cohesive_fraction = voters_in_1cohesive_fraction(election, k)
            # survey mode: any optimum is fine, score-ordered search is
            # far faster on large structured instances
            pav = pav_committee(
                election, k, time_budget=pav_time_budget, lexicographic_ties=False
            )
            row.pav_runtime_seconds = pav.seconds
            row.pav_score = float(pav.score)
            if not pav.optimal:
                row.error = f"pav_timeout(bound_gap={pav.bound_gap:.6g})"
        except Exception as exc:  # per-election error column, never fatal
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    rows.sort(key=lambda r: r.label)
    return rows


_STAT_COLUMNS = (
    "label",
    "culture",
    "max_score",
    "cohesiveness_level",
    "cohesive_fraction",
    "pav_runtime_seconds",
    "pav_score",
    "error",
)


def stats_to_csv(rows: Sequence[StatRow]) -> str:
    lines = [",".join(_STAT_COLUMNS)]
    for row in rows:
        cells = []
        for col in _STAT_COLUMNS:
            value = getattr(row, col)
            cells.append("" if value is None else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def stats_from_csv(text: str) -> list[StatRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",") != list(_STAT_COLUMNS):
        raise ValueError("not a statistics CSV (unexpected header)")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",", maxsplit=len(_STAT_COLUMNS) - 1)
        if len(cells) != len(_STAT_COLUMNS):
            raise ValueError(f"bad statistics row: {ln!r}")
        get = dict(zip(_STAT_COLUMNS, cells))
        rows.append(
            StatRow(
                label=get["label"],
                culture=get["culture"],
                max_score=float(get["max_score"]) if get["max_score"] else None,
                cohesiveness_level=(
                    int(get["cohesiveness_level"]) if get["cohesiveness_level"] else None
                ),
                cohesive_fraction=(
                    float(get["cohesive_fraction"]) if get["cohesive_fraction"] else None
                ),
                pav_runtime_seconds=(
                    float(get["pav_runtime_seconds"]) if get["pav_runtime_seconds"] else None
                ),
                pav_score=float(get["pav_score"]) if get["pav_score"] else None,
                error=get["error"],
            )
        )
    return rows


@dataclass
class CorrelationReport:
    """All-pairs comparison of the exact and the cheap metric.

    ``pairs`` holds (label_a, label_b, isomorphic Hamming, approvalwise)
    with raw distance values; the correlation and the identical-pair
    fraction are computed on max-normalized axes (Hamming by m*n,
    approvalwise by m). ``degenerate`` flags an all-constant axis, where
    the correlation is undefined and reported as 0.
    """

    pearson: float
    fraction_identical: float
    pairs: list[tuple[str, str, float, float]]
    degenerate: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "pearson": self.pearson,
                "fraction_identical": self.fraction_identical,
                "degenerate": self.degenerate,
                "pairs": [list(p) for p in self.pairs],
            },
            indent=2,
        )


def run_correlation(
    scale: str = "desk",
    seed: int = 0,
    m: int | None = None,
    n: int | None = None,
    manifest: DatasetManifest | None = None,
) -> CorrelationReport:
    """Generate the correlation dataset, compute both metrics on all pairs,
    and report the Pearson coefficient between the normalized distances.

    Paper scale is exact but expensive (quadratically many NP-hard
    distances); callers gate it explicitly. A pre-built manifest overrides
    the scale composition.
    """
    if manifest is None:
        manifest = build_correlation_manifest(scale=scale, seed=seed, m=m, n=n)
    labelled = manifest.generate()
    labels = [label for label, _ in labelled]
    elections = [e for _, e in labelled]
    dm_ham = pairwise_distances(elections, metric="isomorphic_hamming", labels=labels)
    dm_app = pairwise_distances(elections, metric="approvalwise", labels=labels)

    pairs = []
    ham_norm = []
    app_norm = []
    scale_ham = manifest.m * manifest.n
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            dh = float(dm_ham.values[i, j])
            da = float(dm_app.values[i, j])
            pairs.append((labels[i], labels[j], dh, da))
            ham_norm.append(dh / scale_ham)
            app_norm.append(da / manifest.m)

    x = np.array(ham_norm)
    y = np.array(app_norm)
    identical = float(np.mean(np.abs(x - y) <= 1e-9)) if len(x) else 0.0
    if len(x) == 0 or x.std() == 0.0 or y.std() == 0.0:
        return CorrelationReport(
            pearson=0.0, fraction_identical=identical, pairs=pairs, degenerate=True
        )
    pearson = float(np.corrcoef(x, y)[0, 1])
    return CorrelationReport(
        pearson=pearson, fraction_identical=identical, pairs=pairs, degenerate=False
    )
