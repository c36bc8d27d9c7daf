"""Plain-text graph serialization.

Two line-oriented UTF-8 formats, both diff-friendly and written in sorted
order so equal graphs produce byte-identical files:

* digraph: header ``# digraph n=<N>``, then one ``u v`` edge per line
  (zero-based source, target).
* bipartite: header ``# bipartite n=<N> m=<M>``, then ``A i k`` lines
  (actor i demands attribute k) followed by ``S k i`` lines (attribute k
  is supplied by actor i).

Lines starting with ``#`` after the header are comments; blank lines are
ignored.  Readers accept edges in any order but reject self-loops,
out-of-range ids, duplicates, and malformed lines, always naming the
offending line number.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .generator import BipartiteDigraph
from .projection import Digraph


class GraphFormatError(ValueError):
    """Parse failure; carries the file path and 1-based line number."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def write_digraph(path, D: Digraph, comments=()) -> None:
    lines = [f"# digraph n={D.n}"]
    lines.extend(f"# {c}" for c in comments)
    lines.extend(f"{u} {v}" for u, v in D.edge_array().tolist())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_bipartite(path, H: BipartiteDigraph, comments=()) -> None:
    lines = [f"# bipartite n={H.n} m={H.m}"]
    lines.extend(f"# {c}" for c in comments)
    for i in range(H.n):
        lines.extend(f"A {i} {k}" for k in H.demanded_by(i).tolist())
    for k in range(H.m):
        lines.extend(f"S {k} {i}" for i in H.suppliers_of(k).tolist())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(path, line: str):
    tokens = line.split()
    if tokens[:2] == ["#", "digraph"]:
        fields = _header_fields(path, tokens[2:], ("n",))
        return "digraph", fields
    if tokens[:2] == ["#", "bipartite"]:
        fields = _header_fields(path, tokens[2:], ("n", "m"))
        return "bipartite", fields
    raise GraphFormatError(
        path, 1, "expected header '# digraph n=<N>' or '# bipartite n=<N> m=<M>'"
    )


def _header_fields(path, tokens, names) -> dict[str, int]:
    if len(tokens) != len(names):
        raise GraphFormatError(path, 1, f"header must declare exactly {list(names)}")
    out = {}
    for token, name in zip(tokens, names):
        key, sep, value = token.partition("=")
        if key != name or not sep or not value.isdigit():
            raise GraphFormatError(path, 1, f"bad header field {token!r}, expected {name}=<int>")
        out[name] = int(value)
        if out[name] < 1:
            raise GraphFormatError(path, 1, f"header {name} must be >= 1")
    return out


def _body_lines(raw_lines):
    for lineno, raw in enumerate(raw_lines, start=1):
        if lineno == 1:
            continue
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _int_token(path, lineno: int, token: str, label: str, upper: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(path, lineno, f"{label} {token!r} is not an integer") from None
    if not 0 <= value < upper:
        raise GraphFormatError(path, lineno, f"{label} {value} out of range [0, {upper})")
    return value


def read_digraph(path) -> Digraph:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    if not raw:
        raise GraphFormatError(path, None, "empty file")
    kind, fields = _parse_header(path, raw[0])
    if kind != "digraph":
        raise GraphFormatError(path, 1, "expected a digraph file, found a bipartite header")
    n = fields["n"]
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, line in _body_lines(raw):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(path, lineno, f"expected 'u v', got {line!r}")
        u = _int_token(path, lineno, tokens[0], "source id", n)
        v = _int_token(path, lineno, tokens[1], "target id", n)
        if u == v:
            raise GraphFormatError(path, lineno, f"self-loop {u} -> {v} is not allowed")
        if (u, v) in seen:
            raise GraphFormatError(
                path, lineno, f"duplicate edge {u} -> {v} (first seen on line {seen[(u, v)]})"
            )
        seen[(u, v)] = lineno
        edges.append((u, v))
    return Digraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def read_bipartite(path) -> BipartiteDigraph:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    if not raw:
        raise GraphFormatError(path, None, "empty file")
    kind, fields = _parse_header(path, raw[0])
    if kind != "bipartite":
        raise GraphFormatError(path, 1, "expected a bipartite file, found a digraph header")
    n, m = fields["n"], fields["m"]
    demand: list[tuple[int, int]] = []
    supply: list[tuple[int, int]] = []
    seen: dict[tuple[str, int, int], int] = {}
    for lineno, line in _body_lines(raw):
        tokens = line.split()
        if len(tokens) != 3 or tokens[0] not in ("A", "S"):
            raise GraphFormatError(path, lineno, f"expected 'A i k' or 'S k i', got {line!r}")
        if tokens[0] == "A":
            i = _int_token(path, lineno, tokens[1], "actor id", n)
            k = _int_token(path, lineno, tokens[2], "attribute id", m)
            key = ("A", i, k)
            demand.append((i, k))
        else:
            k = _int_token(path, lineno, tokens[1], "attribute id", m)
            i = _int_token(path, lineno, tokens[2], "actor id", n)
            key = ("S", k, i)
            supply.append((k, i))
        if key in seen:
            raise GraphFormatError(
                path, lineno, f"duplicate {key[0]} line (first seen on line {seen[key]})"
            )
        seen[key] = lineno
    return BipartiteDigraph.from_edges(
        n, m,
        np.array(demand, dtype=np.int64).reshape(-1, 2),
        np.array(supply, dtype=np.int64).reshape(-1, 2),
    )


def read_graph_file(path):
    """Open either format, dispatching on the header."""
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    if not raw:
        raise GraphFormatError(path, None, "empty file")
    kind, _ = _parse_header(path, raw[0])
    return read_digraph(path) if kind == "digraph" else read_bipartite(path)
