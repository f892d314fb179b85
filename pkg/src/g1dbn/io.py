"""Tab-separated file formats.

All files are TSV with Unix line endings; floats are written with 17
significant digits so values round-trip exactly and replays are
byte-identical.  Variable indices in files are 1-based; the in-memory
types stay 0-based.

Formats:

* series: optional header of variable names, then one row per time point.
* model: ``A`` block (p rows), blank line, ``B`` block (one row), blank
  line, ``SIGMA`` block (always a full p x p matrix).
* scores: one row per target, ``<target index>\\t<p scores>``; a file may
  hold any subset of rows (a shard), a full matrix needs each of 1..p
  exactly once.
* edges: header ``parent\\tchild[\\ts1\\ts2]``; plain truth lists carry two
  columns, inference output carries both scores and is sorted by
  (s2, s1, child, parent).
"""

from __future__ import annotations

import numpy as np

from .model import AR1Model, EdgeSet, ScoreMatrix, TimeSeries

__all__ = [
    "read_series",
    "write_series",
    "read_model",
    "write_model",
    "read_scores",
    "read_score_rows",
    "write_score_rows",
    "write_scores",
    "read_edges",
    "write_edge_pairs",
    "write_scored_edges",
]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_row(values) -> str:
    return "\t".join(_fmt(v) for v in values)


def _parse_row(line: str, path, lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in line.split("\t")]
    except ValueError:
        raise ValueError(f"{path}:{lineno}: malformed numeric row")


def write_series(path, ts: TimeSeries) -> None:
    with open(path, "w") as fh:
        if ts.variable_names is not None:
            fh.write("\t".join(ts.variable_names) + "\n")
        for row in ts.data:
            fh.write(_fmt_row(row) + "\n")


def read_series(path) -> TimeSeries:
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty series file")
    names = None
    start = 0
    try:
        [float(tok) for tok in lines[0].split("\t")]
    except ValueError:
        names = tuple(lines[0].split("\t"))
        start = 1
    rows = [_parse_row(line, path, i + start + 1) for i, line in enumerate(lines[start:])]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have inconsistent widths {sorted(widths)}")
    return TimeSeries(np.array(rows), variable_names=names)


def write_model(path, model: AR1Model) -> None:
    with open(path, "w") as fh:
        fh.write("A\n")
        for row in model.a:
            fh.write(_fmt_row(row) + "\n")
        fh.write("\nB\n")
        fh.write(_fmt_row(model.b) + "\n")
        fh.write("\nSIGMA\n")
        for row in model.sigma_matrix():
            fh.write(_fmt_row(row) + "\n")


def read_model(path) -> AR1Model:
    sections: dict[str, list[list[float]]] = {}
    current: str | None = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                current = None
                continue
            if line in ("A", "B", "SIGMA"):
                if line in sections:
                    raise ValueError(f"{path}:{lineno}: duplicate section {line}")
                current = line
                sections[line] = []
                continue
            if current is None:
                raise ValueError(f"{path}:{lineno}: data outside any section")
            sections[current].append(_parse_row(line, path, lineno))
    missing = {"A", "B", "SIGMA"} - set(sections)
    if missing:
        raise ValueError(f"{path}: missing sections {sorted(missing)}")
    a = np.array(sections["A"])
    if len(sections["B"]) != 1:
        raise ValueError(f"{path}: B section must be a single row")
    b = np.array(sections["B"][0])
    sigma = np.array(sections["SIGMA"])
    try:
        return AR1Model(a, b, sigma)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}")


def write_score_rows(path, rows: np.ndarray, targets) -> None:
    """Write score rows for the given 0-based targets (1-based on disk)."""
    rows = np.asarray(rows, dtype=float)
    targets = list(targets)
    if rows.shape[0] != len(targets):
        raise ValueError("one target index per score row required")
    with open(path, "w") as fh:
        for target, row in zip(targets, rows):
            fh.write(f"{target + 1}\t" + _fmt_row(row) + "\n")


def write_scores(path, scores: ScoreMatrix) -> None:
    write_score_rows(path, scores.scores, range(scores.p))


def read_score_rows(path) -> dict[int, list[float]]:
    """Raw score rows keyed by 0-based target; duplicates are an error."""
    out: dict[int, list[float]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            head, _, rest = line.partition("\t")
            try:
                target = int(head)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed target index {head!r}")
            if target < 1:
                raise ValueError(f"{path}:{lineno}: target index must be >= 1")
            if target - 1 in out:
                raise ValueError(f"{path}:{lineno}: duplicate row for target {target}")
            out[target - 1] = _parse_row(rest, path, lineno)
    return out


def read_scores(path, expected_p: int | None = None) -> ScoreMatrix:
    """Read a complete score matrix (rows 1..p each exactly once)."""
    rows = read_score_rows(path)
    if not rows:
        raise ValueError(f"{path}: empty score file")
    p = expected_p if expected_p is not None else max(rows) + 1
    missing = sorted(set(range(p)) - set(rows))
    extra = sorted(set(rows) - set(range(p)))
    if missing or extra:
        raise ValueError(
            f"{path}: score rows do not cover 1..{p} exactly "
            f"(missing {[i + 1 for i in missing]}, unexpected {[i + 1 for i in extra]})"
        )
    matrix = np.array([rows[i] for i in range(p)])
    if matrix.shape[1] != p:
        raise ValueError(
            f"{path}: rows have {matrix.shape[1]} scores but {p} targets"
        )
    return ScoreMatrix(matrix)


def write_edge_pairs(path, edges: EdgeSet) -> None:
    """Plain parent/child list, 1-based, sorted by (parent, child)."""
    with open(path, "w") as fh:
        fh.write("parent\tchild\n")
        for parent, child in edges:
            fh.write(f"{parent + 1}\t{child + 1}\n")


def write_scored_edges(path, edges: EdgeSet, s1: ScoreMatrix, s2: ScoreMatrix) -> None:
    """Edge list with both scores, sorted by (s2, s1, child, parent)."""
    rows = []
    for parent, child in edges:
        rows.append(
            (float(s2[child, parent]), float(s1[child, parent]), child, parent)
        )
    rows.sort()
    with open(path, "w") as fh:
        fh.write("parent\tchild\ts1\ts2\n")
        for v2, v1, child, parent in rows:
            fh.write(f"{parent + 1}\t{child + 1}\t{_fmt(v1)}\t{_fmt(v2)}\n")


def read_edges(path) -> EdgeSet:
    """Read an edge list (2 or 4 column); only parent/child are used."""
    pairs = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["parent", "child"]:
            raise ValueError(f"{path}: expected a parent\\tchild header")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise ValueError(f"{path}:{lineno}: expected at least 2 columns")
            try:
                parent, child = int(fields[0]), int(fields[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed edge indices")
            if parent < 1 or child < 1:
                raise ValueError(f"{path}:{lineno}: edge indices must be >= 1")
            pairs.append((parent - 1, child - 1))
    if len(pairs) != len(set(pairs)):
        raise ValueError(f"{path}: duplicate edges")
    return EdgeSet.from_pairs(pairs)
