"""Edge-list ingestion and adjacency dump formats.

Edge lists are whitespace-separated integer pairs, one edge per line; lines
starting with '%' are comments and blank lines are skipped.  Indexing is
auto-detected: files mentioning node 0 are 0-based, otherwise 1-based.  The
parsed graph is simple and undirected: duplicate and reversed pairs collapse,
self-loops are dropped with a warning.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError

__all__ = ["EdgeListData", "read_edge_list", "write_adjacency", "read_adjacency"]


@dataclass(frozen=True)
class EdgeListData:
    n: int
    edges: tuple[tuple[int, int], ...]  # 0-based, i < j, sorted
    one_based: bool
    warnings: tuple[str, ...]

    def adjacency(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for i, j in self.edges:
            a[i, j] = 1
            a[j, i] = 1
        return a


def read_edge_list(path) -> EdgeListData:
    raw_pairs: list[tuple[int, int]] = []
    warnings: list[str] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise DomainError(f"{path}:{lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: non-integer node id in {line!r}") from exc
        if u < 0 or v < 0:
            raise DomainError(f"{path}:{lineno}: negative node id")
        raw_pairs.append((u, v))
    if not raw_pairs:
        raise DomainError(f"{path}: no edges found")
    one_based = min(min(u, v) for u, v in raw_pairs) >= 1
    shift = 1 if one_based else 0
    edges = set()
    loops = 0
    for u, v in raw_pairs:
        u -= shift
        v -= shift
        if u == v:
            loops += 1
            continue
        edges.add((min(u, v), max(u, v)))
    if loops:
        warnings.append(f"dropped {loops} self-loop(s)")
    n = 1 + max(max(e) for e in edges) if edges else 0
    if n < 2:
        raise DomainError(f"{path}: graph has fewer than 2 nodes")
    return EdgeListData(
        n=n, edges=tuple(sorted(edges)), one_based=one_based, warnings=tuple(warnings)
    )


# ---------------------------------------------------------------------------
# adjacency dumps: run-length-encoded upper triangle, or dense 0/1 rows

_MAGIC = "ngg-adjacency"


def _upper_bits(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    iu = np.triu_indices(n, k=1)
    return adj[iu].astype(np.uint8)


def write_adjacency(path, adj: np.ndarray, fmt: str = "rle"):
    adj = np.asarray(adj)
    n = adj.shape[0]
    if fmt == "dense":
        lines = [f"{_MAGIC} 1 dense", f"n {n}"]
        lines.extend("".join("1" if x else "0" for x in row) for row in adj.astype(bool))
    elif fmt == "rle":
        bits = _upper_bits(adj)
        lines = [f"{_MAGIC} 1 rle", f"n {n}", f"start {int(bits[0]) if bits.size else 0}"]
        if bits.size:
            change = np.flatnonzero(np.diff(bits)) + 1
            bounds = np.concatenate(([0], change, [bits.size]))
            runs = np.diff(bounds)
            lines.extend(
                " ".join(str(int(r)) for r in runs[i : i + 64]) for i in range(0, runs.size, 64)
            )
    else:
        raise DomainError(f"unknown adjacency format {fmt!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_adjacency(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(_MAGIC):
        raise DomainError(f"{path}: not an adjacency dump")
    header = lines[0].split()
    fmt = header[2] if len(header) >= 3 else ""
    n = int(lines[1].split()[1])
    if fmt == "dense":
        rows = [list(map(int, line)) for line in lines[2 : 2 + n]]
        adj = np.asarray(rows, dtype=np.uint8)
        if adj.shape != (n, n):
            raise DomainError(f"{path}: dense dump has wrong shape")
        return adj.astype(np.float64)
    if fmt == "rle":
        start = int(lines[2].split()[1])
        runs = [int(tok) for line in lines[3:] for tok in line.split()]
        total = n * (n - 1) // 2
        bits = np.zeros(total, dtype=np.uint8)
        pos = 0
        val = start
        for r in runs:
            if val:
                bits[pos : pos + r] = 1
            pos += r
            val ^= 1
        if pos != total and runs:
            raise DomainError(f"{path}: run lengths cover {pos} of {total} pairs")
        adj = np.zeros((n, n), dtype=np.float64)
        iu = np.triu_indices(n, k=1)
        adj[iu] = bits
        adj += adj.T
        return adj
    raise DomainError(f"{path}: unknown adjacency dump format {fmt!r}")
