"""Participatory-budgeting file ingestion.

Parses the semicolon-delimited ``.pb`` text format (META / PROJECTS /
VOTES sections, each with a header row) into a structured instance, maps
it onto the anonymous-index election model (project names go to a sidecar
label list, never into the election), and subsamples to a target size.
Costs and any other columns are parsed and preserved but unused: only the
approval sets matter here.

Every parse failure is a PabulibParseError carrying a line number; the
parser never raises anything else, whatever the input bytes were.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .core import Election, make_rng

__all__ = [
    "PabulibInstance",
    "PabulibParseError",
    "parse_pabulib",
    "parse_pabulib_file",
    "to_election",
    "subsample",
    "meets_paper_scale",
    "PAPER_MIN_PROJECTS",
    "PAPER_MIN_VOTERS",
]

# "large enough" thresholds: instances smaller than the subsample target
# dimensions are filtered out of batch ingestion
PAPER_MIN_PROJECTS = 50
PAPER_MIN_VOTERS = 1000

_SECTIONS = ("META", "PROJECTS", "VOTES")


class PabulibParseError(ValueError):
    """Structured parse failure; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class PabulibInstance:
    """One parsed participatory-budgeting file."""

    meta: dict[str, str] = field(default_factory=dict)
    projects: list[tuple[str, dict[str, str]]] = field(default_factory=list)
    votes: list[tuple[str, frozenset[str]]] = field(default_factory=list)

    @property
    def project_ids(self) -> list[str]:
        return [pid for pid, _ in self.projects]


def _split_sections(lines: list[str]) -> dict[str, tuple[int, list[tuple[int, str]]]]:
    """Map section name -> (header line number, numbered data lines)."""
    sections: dict[str, tuple[int, list[tuple[int, str]]]] = {}
    current: str | None = None
    seen: list[str] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if stripped in _SECTIONS:
            if stripped in sections:
                raise PabulibParseError(f"duplicate section {stripped}", lineno)
            sections[stripped] = (lineno, [])
            current = stripped
            seen.append(stripped)
            continue
        if not stripped:
            continue
        if current is None:
            raise PabulibParseError(
                f"content before the first section header: {stripped!r}", lineno
            )
        sections[current][1].append((lineno, line))
    for name in _SECTIONS:
        if name not in sections:
            raise PabulibParseError(f"missing section {name}")
    if seen != list(_SECTIONS):
        raise PabulibParseError(
            f"sections must appear in order {', '.join(_SECTIONS)}; got {', '.join(seen)}"
        )
    return sections


def _parse_header(rows: list[tuple[int, str]], section: str) -> tuple[list[str], list[tuple[int, str]]]:
    if not rows:
        raise PabulibParseError(f"section {section} has no header row")
    lineno, header = rows[0]
    columns = [c.strip() for c in header.split(";")]
    if any(not c for c in columns):
        raise PabulibParseError(f"section {section} header has an empty column name", lineno)
    return columns, rows[1:]


def _parse_row(
    lineno: int, line: str, columns: list[str], section: str
) -> dict[str, str]:
    cells = line.split(";")
    if len(cells) != len(columns):
        raise PabulibParseError(
            f"{section} row has {len(cells)} cells, header has {len(columns)}", lineno
        )
    return dict(zip(columns, (c.strip() for c in cells)))


def parse_pabulib(text: str) -> PabulibInstance:
    """Parse ``.pb`` text into a PabulibInstance.

    Tolerates a UTF-8 BOM and CRLF line endings. Raises PabulibParseError
    (with a line number) for a missing/misordered section, a malformed row,
    a vote naming an unknown project, or an empty VOTES section.
    """
    if not isinstance(text, str):
        raise PabulibParseError("input is not text")
    text = text.lstrip("﻿")
    sections = _split_sections(text.splitlines())

    instance = PabulibInstance()

    meta_cols, meta_rows = _parse_header(sections["META"][1], "META")
    if meta_cols != ["key", "value"]:
        raise PabulibParseError(
            f"META header must be 'key;value', got {';'.join(meta_cols)!r}",
            sections["META"][0] + 1,
        )
    for lineno, line in meta_rows:
        row = _parse_row(lineno, line, meta_cols, "META")
        instance.meta[row["key"]] = row["value"]

    project_cols, project_rows = _parse_header(sections["PROJECTS"][1], "PROJECTS")
    if "project_id" not in project_cols:
        raise PabulibParseError(
            "PROJECTS header lacks a project_id column", sections["PROJECTS"][0] + 1
        )
    known: set[str] = set()
    for lineno, line in project_rows:
        row = _parse_row(lineno, line, project_cols, "PROJECTS")
        pid = row.pop("project_id")
        if not pid:
            raise PabulibParseError("empty project_id", lineno)
        if pid in known:
            raise PabulibParseError(f"duplicate project_id {pid!r}", lineno)
        known.add(pid)
        instance.projects.append((pid, row))

    vote_cols, vote_rows = _parse_header(sections["VOTES"][1], "VOTES")
    for required in ("voter_id", "vote"):
        if required not in vote_cols:
            raise PabulibParseError(
                f"VOTES header lacks a {required} column", sections["VOTES"][0] + 1
            )
    if not vote_rows:
        raise PabulibParseError("no voters: VOTES section has no data rows")
    for lineno, line in vote_rows:
        row = _parse_row(lineno, line, vote_cols, "VOTES")
        raw_vote = row["vote"]
        approved = frozenset(tok.strip() for tok in raw_vote.split(",") if tok.strip())
        for pid in approved:
            if pid not in known:
                raise PabulibParseError(f"vote references unknown project {pid!r}", lineno)
        instance.votes.append((row["voter_id"], approved))

    return instance


def parse_pabulib_file(path: str | Path) -> PabulibInstance:
    """Read and parse a ``.pb`` file; decoding failures become parse errors."""
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise PabulibParseError(f"not valid UTF-8: {exc}") from exc
    return parse_pabulib(text)


def to_election(instance: PabulibInstance) -> tuple[Election, list[str]]:
    """Convert to an anonymous-index election plus the project-id sidecar.

    Candidate i is the i-th project of the PROJECTS section; the returned
    list maps indices back to project ids.
    """
    ids = instance.project_ids
    index = {pid: i for i, pid in enumerate(ids)}
    ballots = tuple(
        frozenset(index[pid] for pid in approved) for _, approved in instance.votes
    )
    return Election(num_candidates=len(ids), ballots=ballots), ids


def meets_paper_scale(election: Election) -> bool:
    """The "large enough" ingestion filter: at least 50 candidates and
    1000 voters, the subsample target dimensions."""
    return (
        election.num_candidates >= PAPER_MIN_PROJECTS
        and election.num_voters >= PAPER_MIN_VOTERS
    )


def subsample(election: Election, m_target: int, n_target: int, seed: int) -> Election:
    """Uniform random candidate and voter subsample.

    Kept candidates are relabeled to 0..m_target-1 preserving index order;
    kept voters preserve their original order. Each output ballot is the
    intersection of the original ballot with the kept candidate set, so
    ballots may become empty -- they are kept, because dropping them would
    change the voter count and bias every statistic.
    """
    if not 1 <= m_target <= election.num_candidates:
        raise ValueError(
            f"instance too small: wanted {m_target} of {election.num_candidates} candidates"
        )
    if not 1 <= n_target <= election.num_voters:
        raise ValueError(
            f"instance too small: wanted {n_target} of {election.num_voters} voters"
        )
    rng = make_rng(seed)
    kept_candidates = sorted(
        int(c) for c in rng.choice(election.num_candidates, size=m_target, replace=False)
    )
    kept_voters = sorted(
        int(v) for v in rng.choice(election.num_voters, size=n_target, replace=False)
    )
    relabel = {old: new for new, old in enumerate(kept_candidates)}
    kept_set = set(kept_candidates)
    ballots = tuple(
        frozenset(relabel[c] for c in election.ballots[v] if c in kept_set)
        for v in kept_voters
    )
    return Election(num_candidates=m_target, ballots=ballots)
