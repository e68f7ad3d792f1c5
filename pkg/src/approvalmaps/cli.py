"""Command-line interface.

Subcommands: sample, ingest, distance, stats, embed, map, correlate, and
reproduce (which regenerates the desk-scale study artifacts in one run).
Every command is a thin wrapper over the library; all randomness flows
from a single --seed flag.

Exit codes: 0 success, 1 usage error, 2 data error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .committees import DEFAULT_COMMITTEE_SIZE
from .core import (
    CapExceededError,
    Election,
    load_election,
    election_to_text,
    spawn_seed,
)
from .cultures import CULTURE_KINDS, VOTE_DISTANCES, CultureSpec
from .embedding import EmbeddingConfig, MapPoint, embed, map_points_to_csv
from .experiments import (
    DatasetManifest,
    ManifestEntry,
    build_background,
    build_culture_datasets,
    run_correlation,
    run_statistics,
    stats_from_csv,
    stats_to_csv,
)
from .ingest import PabulibParseError, parse_pabulib_file, subsample, to_election
from .metrics import (
    ISOMORPHIC_CANDIDATE_CAP,
    METRICS,
    DistanceMatrix,
    pairwise_distances,
)
from .render import RenderConfig, render_svg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAP = 3

OUT_DIR_ENV = "APPROVALMAPS_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    # spec'd exit codes: usage errors are 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _write_text(path: Path, text: str) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _discover_elections(directory: Path) -> tuple[list[str], list[Election]]:
    """Load every election file in a directory, sorted by name.

    Recognizes the canonical text format (.elec) and the JSON mirror,
    skipping manifests and label sidecars.
    """
    paths = sorted(
        p
        for p in Path(directory).iterdir()
        if p.suffix == ".elec"
        or (
            p.suffix == ".json"
            and p.name != "manifest.json"
            and not p.name.endswith(".labels.json")
        )
    )
    if not paths:
        raise ValueError(f"no election files found in {directory}")
    labels = [p.stem for p in paths]
    return labels, [load_election(p) for p in paths]


def _spec_from_args(args) -> CultureSpec:
    if args.spec:
        text = args.spec
        if Path(text).is_file():
            text = Path(text).read_text(encoding="utf-8")
        return CultureSpec.from_json_dict(json.loads(text))
    if not args.kind:
        raise ValueError("either --kind or --spec is required")
    params = {}
    for name in ("p", "phi", "g", "alpha", "radius", "dim", "vote_distance"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    return CultureSpec(kind=args.kind, **params)


def _cmd_sample(args) -> int:
    spec = _spec_from_args(args)
    out_dir = Path(args.out_dir) if args.out_dir else _default_out_dir()
    entries = []
    for i in range(args.count):
        label = f"{spec.kind}_{i:03d}"
        seed = spawn_seed(args.seed, i)
        election = spec.sample(args.m, args.n, seed)
        _write_text(out_dir / f"{label}.elec", election_to_text(election))
        entries.append(ManifestEntry(label=label, seed=seed, spec=spec))
    manifest = DatasetManifest(name=spec.kind, m=args.m, n=args.n, entries=entries)
    _write_text(out_dir / "manifest.json", manifest.to_json())
    print(f"wrote {args.count} election(s) to {out_dir}")
    return EXIT_OK


def _cmd_ingest(args) -> int:
    instance = parse_pabulib_file(args.file)
    election, project_ids = to_election(instance)
    if (args.m_target is None) != (args.n_target is None):
        raise ValueError("--m-target and --n-target must be given together")
    if args.m_target is not None:
        election = subsample(election, args.m_target, args.n_target, args.seed)
        project_ids = None  # indices no longer align with the sidecar
    out = Path(args.out) if args.out else _default_out_dir() / (Path(args.file).stem + ".elec")
    _write_text(out, election_to_text(election))
    sidecar = {
        "meta": instance.meta,
        "projects": project_ids,
        "subsampled": args.m_target is not None,
    }
    _write_text(out.with_suffix(".labels.json"), json.dumps(sidecar, indent=2))
    print(
        f"wrote {out} ({election.num_candidates} candidates, "
        f"{election.num_voters} voters)"
    )
    return EXIT_OK


def _cmd_distance(args) -> int:
    labels, elections = _discover_elections(Path(args.dir))
    dm = pairwise_distances(
        elections,
        metric=args.metric,
        labels=labels,
        max_candidates=args.max_candidates,
    )
    _write_text(Path(args.out), dm.to_csv())
    print(f"wrote {len(labels)}x{len(labels)} {args.metric} matrix to {args.out}")
    return EXIT_OK


def _load_dataset(source: str) -> tuple[DatasetManifest, list[tuple[str, Election]]]:
    path = Path(source)
    if path.is_file():
        manifest = DatasetManifest.load(path)
        return manifest, manifest.generate()
    labels, elections = _discover_elections(path)
    entries = [
        ManifestEntry(label=label, seed=0, path=str(Path(path) / f"{label}.elec"))
        for label in labels
    ]
    manifest = DatasetManifest(
        name=path.name,
        m=elections[0].num_candidates,
        n=elections[0].num_voters,
        entries=entries,
    )
    return manifest, list(zip(labels, elections))


def _cmd_stats(args) -> int:
    manifest, elections = _load_dataset(args.source)
    rows = run_statistics(
        manifest, k=args.k, pav_time_budget=args.pav_budget, elections=elections
    )
    _write_text(Path(args.out), stats_to_csv(rows))
    timeouts = sum(1 for r in rows if r.error.startswith("pav_timeout"))
    print(f"wrote statistics for {len(rows)} election(s) to {args.out}"
          + (f" ({timeouts} PAV timeout(s))" if timeouts else ""))
    return EXIT_OK


def _cmd_embed(args) -> int:
    dm = DistanceMatrix.from_csv(Path(args.matrix).read_text(encoding="utf-8"))
    cfg = EmbeddingConfig(iterations=args.iterations)
    points = embed(dm, cfg, seed=args.seed)
    _write_text(Path(args.out), map_points_to_csv(points))
    print(f"embedded {len(points)} point(s) to {args.out}")
    return EXIT_OK


def _cmd_map(args) -> int:
    dm = DistanceMatrix.from_csv(Path(args.matrix).read_text(encoding="utf-8"))
    rows = stats_from_csv(Path(args.stats).read_text(encoding="utf-8"))
    stat_labels = {row.label for row in rows}
    if stat_labels != set(dm.labels):
        missing = sorted(set(dm.labels) ^ stat_labels)[:5]
        raise ValueError(
            f"labels in matrix and statistics disagree (e.g. {missing})"
        )
    cfg = EmbeddingConfig(iterations=args.iterations)
    points = embed(dm, cfg, seed=args.seed)
    by_label = {row.label: row for row in rows}
    decorated = []
    for pt in points:
        row = by_label[pt.label]
        stats = {
            name: float(value)
            for name, value in (
                ("max_score", row.max_score),
                ("cohesiveness_level", row.cohesiveness_level),
                ("cohesive_fraction", row.cohesive_fraction),
                ("pav_runtime_seconds", row.pav_runtime_seconds),
                ("pav_score", row.pav_score),
            )
            if value is not None
        }
        decorated.append(MapPoint(label=pt.label, x=pt.x, y=pt.y, stats=stats))
    categories = {row.label: row.culture for row in rows}
    render_cfg = RenderConfig(
        color_by=args.color_by,
        palette=args.palette,
        point_radius=args.point_radius,
        width=args.width,
        height=args.height,
        legend=not args.no_legend,
    )
    svg = render_svg(decorated, render_cfg, categories=categories)
    out = Path(args.out)
    _write_text(out, svg)
    coords_out = Path(args.coords_out) if args.coords_out else out.with_suffix(".coords.csv")
    _write_text(coords_out, map_points_to_csv(decorated))
    print(f"wrote {out} and {coords_out}")
    return EXIT_OK


def _cmd_correlate(args) -> int:
    if args.scale == "paper" and not args.expensive:
        raise CapExceededError(
            "paper-scale correlation is exponential-time work on ~65k pairs; "
            "pass --expensive to run it anyway"
        )
    report = run_correlation(scale=args.scale, seed=args.seed, m=args.m, n=args.n)
    _write_text(Path(args.out), report.to_json())
    if report.degenerate:
        print("degenerate dataset: all pairwise distances identical; pearson undefined")
    else:
        print(
            f"pearson={report.pearson:.4f} identical={report.fraction_identical:.2%} "
            f"pairs={len(report.pairs)}"
        )
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else _default_out_dir() / "reproduction"
    if args.expensive:
        m, n, pav_budget = 100, 1000, 600.0
    else:
        m, n, pav_budget = args.m, args.n, args.pav_budget
    seed = args.seed
    k = min(args.k, m)

    background = build_background(m=m, n=n, seed=spawn_seed(seed, 0))
    datasets = [background] + build_culture_datasets(seed=spawn_seed(seed, 1), m=m, n=n)
    stats_targets = {"background"} if not args.all_stats else {d.name for d in datasets}

    embed_cfg = EmbeddingConfig(iterations=args.embed_iterations)
    for dataset in datasets:
        base = out_dir / dataset.name
        _write_text(base / "manifest.json", dataset.to_json())
        labelled = dataset.generate()
        for label, election in labelled:
            _write_text(base / f"{label}.elec", election_to_text(election))
        labels = [label for label, _ in labelled]
        elections = [e for _, e in labelled]
        dm = pairwise_distances(elections, metric="approvalwise", labels=labels)
        _write_text(base / "distances.csv", dm.to_csv())
        points = embed(dm, embed_cfg, seed=seed)
        _write_text(base / "coords.csv", map_points_to_csv(points))
        print(f"[{dataset.name}] {len(labels)} elections embedded")
        if dataset.name in stats_targets:
            rows = run_statistics(
                dataset, k=k, pav_time_budget=pav_budget, elections=labelled
            )
            _write_text(base / "stats.csv", stats_to_csv(rows))
            by_label = {row.label: row for row in rows}
            for stat in (
                "max_score",
                "cohesiveness_level",
                "cohesive_fraction",
                "pav_runtime_seconds",
            ):
                decorated = [
                    MapPoint(
                        label=pt.label,
                        x=pt.x,
                        y=pt.y,
                        stats=(
                            {stat: float(getattr(by_label[pt.label], stat))}
                            if getattr(by_label[pt.label], stat) is not None
                            else {}
                        ),
                    )
                    for pt in points
                ]
                svg = render_svg(decorated, RenderConfig(color_by=stat, palette="continuous"))
                _write_text(base / f"map_{stat}.svg", svg)
            print(f"[{dataset.name}] statistics + maps written")

    report = run_correlation(
        scale="paper" if args.expensive else "desk",
        seed=spawn_seed(seed, 2),
        m=args.correlation_m,
        n=args.correlation_n,
    )
    _write_text(out_dir / "correlation.json", report.to_json())
    print(f"[correlation] pearson={report.pearson:.4f}")
    print(f"all artifacts in {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="approvalmaps", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample elections from a culture")
    p.add_argument("--kind", choices=CULTURE_KINDS)
    p.add_argument("--spec", help="culture spec as a JSON object or a path to one")
    p.add_argument("--p", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--g", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--vote-distance", dest="vote_distance", choices=VOTE_DISTANCES)
    p.add_argument("--m", type=int, required=True, help="number of candidates")
    p.add_argument("--n", type=int, required=True, help="number of voters")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("ingest", help="parse a participatory-budgeting .pb file")
    p.add_argument("file")
    p.add_argument("--m-target", type=int)
    p.add_argument("--n-target", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("distance", help="pairwise distance matrix for a directory")
    p.add_argument("dir")
    p.add_argument("--metric", choices=METRICS, default="approvalwise")
    p.add_argument("--max-candidates", type=int, default=ISOMORPHIC_CANDIDATE_CAP)
    p.add_argument("--out", default="distances.csv")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("stats", help="per-election statistics table")
    p.add_argument("source", help="directory of elections or a manifest.json")
    p.add_argument("--k", type=int, default=DEFAULT_COMMITTEE_SIZE)
    p.add_argument("--pav-budget", type=float, default=600.0)
    p.add_argument("--out", default="stats.csv")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("embed", help="2D embedding of a distance matrix")
    p.add_argument("matrix")
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="coords.csv")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("map", help="render an SVG map from a matrix + statistics")
    p.add_argument("matrix")
    p.add_argument("--stats", required=True)
    p.add_argument("--color-by", dest="color_by", default="culture")
    p.add_argument("--palette", choices=("auto", "continuous", "categorical"), default="auto")
    p.add_argument("--point-radius", type=float, default=4.0)
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=640)
    p.add_argument("--no-legend", action="store_true")
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="map.svg")
    p.add_argument("--coords-out")
    p.set_defaults(func=_cmd_map)

    p = sub.add_parser("correlate", help="compare the exact and cheap metrics")
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p.add_argument("--m", type=int, help="desk-scale candidate count (<= cap)")
    p.add_argument("--n", type=int, help="desk-scale voter count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expensive", action="store_true")
    p.add_argument("--out", default="correlation.json")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser(
        "reproduce", help="regenerate the desk-scale study artifacts in one run"
    )
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--k", type=int, default=DEFAULT_COMMITTEE_SIZE)
    p.add_argument("--pav-budget", type=float, default=1.0)
    p.add_argument("--embed-iterations", type=int, default=1000)
    p.add_argument("--correlation-m", type=int, help="desk correlation candidate count")
    p.add_argument("--correlation-n", type=int, help="desk correlation voter count")
    p.add_argument("--all-stats", action="store_true",
                   help="also run statistics on every culture dataset (slow)")
    p.add_argument("--expensive", action="store_true",
                   help="full published scale: m=100, n=1000, paper-scale correlation")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PabulibParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
