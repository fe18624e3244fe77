"""Distance signatures, resolving-set verification, and embeddings.

A sensor set R assigns every vertex v two fingerprints: the metric signature
(the vector of distances to R's members, in a fixed order) and the multiset
signature (how many members sit at each distance, order forgotten).  A set is
resolving when the chosen fingerprint separates all relevant vertex pairs.

Disconnected graphs are supported by an extra "unreachable" coordinate on
multiset signatures and an infinite entry on metric ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import (
    DENSE_LIMIT,
    Graph,
    bfs_distances,
    diameter,
    distance_matrix,
    distances_from,
    is_connected,
)

KIND_METRIC = "metric"
KIND_MULTISET = "multiset"
KIND_OUTER = "outer-multiset"
KINDS = (KIND_METRIC, KIND_MULTISET, KIND_OUTER)


@dataclass(frozen=True)
class MultisetSignature:
    """Count of sensors at each distance; entry k is |{r in R : d(v,r) = k}|.

    `unreachable` counts sensors in other components (zero when connected).
    Entries sum to |R| and entry 0 is 1 exactly when v itself is a sensor.
    """

    counts: tuple[int, ...]
    unreachable: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts) + self.unreachable

    def as_vector(self) -> tuple[int, ...]:
        return self.counts + ((self.unreachable,) if self.unreachable else ())


@dataclass(frozen=True)
class MetricSignature:
    """Distances from one vertex to the members of R, in `order`.

    Unreachable members appear as math.inf.
    """

    order: tuple[int, ...]
    dists: tuple[float, ...]


@dataclass(frozen=True)
class ResolvingVerdict:
    """Outcome of a resolving-set check.

    `witness` is a colliding pair (u, v) when not resolving, with the shared
    signature attached; resolving verdicts carry neither.
    """

    kind: str
    resolving: bool
    witness: tuple[int, int] | None = None
    witness_signature: tuple | None = None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "resolving": self.resolving,
            "witness": list(self.witness) if self.witness else None,
        }


def _canonical_members(g: Graph, R: Sequence[int]) -> tuple[int, ...]:
    members = [int(r) for r in R]
    if not members:
        raise ValueError("sensor set must be non-empty")
    for r in members:
        g._check_vertex(r)
    if len(set(members)) != len(members):
        raise ValueError("sensor set contains duplicates")
    return tuple(members)


def _signature_length(g: Graph) -> int:
    """Length of the finite part of multiset signatures: diam(G) + 1.

    For disconnected graphs the finite part spans the largest finite distance
    and the unreachable coordinate is carried separately.
    """
    d = diameter(g)
    if math.isinf(d):
        dm = distance_matrix(g) if g.n <= DENSE_LIMIT else None
        if dm is not None:
            return int(dm.max()) + 1
        return int(max(int(bfs_distances(g, [v]).max()) for v in range(g.n))) + 1
    return int(d) + 1


def _count_matrix(rows: np.ndarray, length: int) -> np.ndarray:
    """(n, length+1) per-vertex distance histograms; last column = unreachable."""
    _, n = rows.shape
    vals = np.where(rows < 0, length, rows).astype(np.int64)
    flat = np.arange(n, dtype=np.int64) * (length + 1)
    flat = (vals + flat[None, :]).ravel()
    counts = np.bincount(flat, minlength=n * (length + 1))
    return counts.reshape(n, length + 1)


def multiset_signature(
    g: Graph,
    R: Sequence[int],
    v: int,
    rows: np.ndarray | None = None,
    length: int | None = None,
) -> MultisetSignature:
    """Multiset signature of v with respect to R.

    Pass `rows` (the output of distances_from(g, R)) and `length` to amortize
    repeated queries; otherwise one BFS from v suffices and the finite length
    defaults to diam(G) + 1.
    """
    members = _canonical_members(g, R)
    g._check_vertex(v)
    if rows is not None:
        dists = rows[:, v]
    else:
        from_v = bfs_distances(g, [v])
        dists = from_v[list(members)]
    if length is None:
        length = _signature_length(g)
    finite = dists[dists >= 0]
    if finite.size and int(finite.max()) >= length:
        raise ValueError(f"signature length {length} too short for distance {int(finite.max())}")
    counts = np.bincount(finite, minlength=length)
    return MultisetSignature(
        counts=tuple(int(c) for c in counts),
        unreachable=int((dists < 0).sum()),
    )


def metric_signature(
    g: Graph, R: Sequence[int], v: int, rows: np.ndarray | None = None
) -> MetricSignature:
    """Distance vector from v to R, indexed by R's given order."""
    members = _canonical_members(g, R)
    g._check_vertex(v)
    if rows is not None:
        dists = rows[:, v]
    else:
        from_v = bfs_distances(g, [v])
        dists = from_v[list(members)]
    return MetricSignature(
        order=members,
        dists=tuple(math.inf if d < 0 else float(d) for d in dists),
    )


def all_multiset_signatures(
    g: Graph,
    R: Sequence[int],
    rows: np.ndarray | None = None,
    length: int | None = None,
) -> tuple[np.ndarray, int]:
    """Histogram matrix for every vertex: shape (n, length+1), last column
    counts unreachable sensors.  Returns (matrix, length)."""
    members = _canonical_members(g, R)
    if rows is None:
        rows = distances_from(g, members)
    if length is None:
        length = _signature_length(g)
    return _count_matrix(rows, length), length


def _first_collision(keys: "list[bytes] | list[tuple]", skip: set[int]) -> tuple[int, int] | None:
    seen: dict = {}
    for v, key in enumerate(keys):
        if v in skip:
            continue
        if key in seen:
            return seen[key], v
        seen[key] = v
    return None


def _recheck_pair(g: Graph, members: tuple[int, ...], kind: str, u: int, v: int) -> tuple:
    """Recompute the two witness signatures straight from fresh BFS runs.

    Guards the hashed scan: the collision must survive direct comparison.
    Returns the shared signature as a plain tuple.
    """
    member_list = list(members)
    row_u = bfs_distances(g, [u])[member_list]
    row_v = bfs_distances(g, [v])[member_list]
    if kind == KIND_METRIC:
        sig_u, sig_v = tuple(row_u.tolist()), tuple(row_v.tolist())
    else:
        top = max(int(row_u.max(initial=0)), int(row_v.max(initial=0)), 0)
        def hist(row: np.ndarray) -> tuple:
            fin = row[row >= 0]
            return tuple(np.bincount(fin, minlength=top + 1).tolist()) + (int((row < 0).sum()),)
        sig_u, sig_v = hist(row_u), hist(row_v)
    if sig_u != sig_v:
        raise RuntimeError(
            f"hashed scan reported a collision ({u}, {v}) that direct "
            f"comparison rejects; kind={kind}"
        )
    return sig_u


def verify_resolving(
    g: Graph,
    R: Sequence[int],
    kind: str = KIND_MULTISET,
    rows: np.ndarray | None = None,
) -> ResolvingVerdict:
    """Check whether R resolves the graph under the given notion.

    multiset compares count histograms over all vertex pairs, outer-multiset
    only over pairs outside R, metric compares ordered distance vectors.
    Signatures are hashed for an O(n) scan; any collision is re-checked by
    direct comparison before being reported.  The witness is the first
    collision in ascending vertex order.

    `rows`, when supplied, must be distances_from(g, R) aligned with R's
    order; passing a precomputed slice of a distance matrix avoids repeating
    the |R| BFS runs.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    members = _canonical_members(g, R)
    if rows is None:
        rows = distances_from(g, members)
    if kind == KIND_METRIC:
        keys: list = [rows[:, v].tobytes() for v in range(g.n)]
        skip: set[int] = set()
    else:
        length = max(int(rows.max(initial=0)), 0) + 1
        counts = _count_matrix(rows, length)
        keys = [counts[v].tobytes() for v in range(g.n)]
        skip = set(members) if kind == KIND_OUTER else set()
    hit = _first_collision(keys, skip)
    if hit is None:
        return ResolvingVerdict(kind=kind, resolving=True)
    u, v = hit
    shared = _recheck_pair(g, members, kind, u, v)
    return ResolvingVerdict(
        kind=kind, resolving=False, witness=(u, v), witness_signature=shared
    )


def naive_verify_resolving(g: Graph, R: Sequence[int], kind: str = KIND_MULTISET) -> ResolvingVerdict:
    """All-pairs reference verifier (quadratic; test oracle for the hashed scan).

    Computes each vertex's signature from its own BFS and compares every pair
    directly, scanning v ascending with inner u < v, so witnesses match the
    hashed implementation on agreement.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    members = _canonical_members(g, R)
    member_list = list(members)
    sigs = []
    top = 0
    raw = []
    for v in range(g.n):
        row = bfs_distances(g, [v])[member_list]
        raw.append(row)
        top = max(top, int(row.max(initial=0)))
    for row in raw:
        if kind == KIND_METRIC:
            sigs.append(tuple(row.tolist()))
        else:
            fin = row[row >= 0]
            sigs.append(
                tuple(np.bincount(fin, minlength=top + 1).tolist())
                + (int((row < 0).sum()),)
            )
    skip = set(members) if kind == KIND_OUTER else set()
    for v in range(g.n):
        if v in skip:
            continue
        for u in range(v):
            if u in skip:
                continue
            if sigs[u] == sigs[v]:
                return ResolvingVerdict(
                    kind=kind, resolving=False, witness=(u, v), witness_signature=sigs[v]
                )
    return ResolvingVerdict(kind=kind, resolving=True)


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionSummary:
    """Statistics of |euclidean(row_u, row_v) - d(u, v)| over all pairs."""

    pairs: int
    min_abs_error: float
    mean_abs_error: float
    max_abs_error: float


def _distortion(matrix: np.ndarray, dm: np.ndarray) -> DistortionSummary:
    from scipy.spatial.distance import pdist, squareform

    embed_d = pdist(matrix.astype(np.float64))
    graph_d = squareform(dm.astype(np.float64), checks=False)
    err = np.abs(embed_d - graph_d)
    return DistortionSummary(
        pairs=int(err.size),
        min_abs_error=float(err.min()) if err.size else 0.0,
        mean_abs_error=float(err.mean()) if err.size else 0.0,
        max_abs_error=float(err.max()) if err.size else 0.0,
    )


def embed_multiset(g: Graph, R: Sequence[int]) -> tuple[np.ndarray, DistortionSummary]:
    """Rows are multiset signatures: an n x (diam+1) integer matrix.

    Connected graphs only; n is capped at DENSE_LIMIT because the distortion
    summary touches all vertex pairs.
    """
    members = _canonical_members(g, R)
    if not is_connected(g):
        raise ValueError("embedding requires a connected graph")
    if g.n > DENSE_LIMIT:
        raise ValueError(f"embedding supported up to n={DENSE_LIMIT}")
    dm = distance_matrix(g)
    length = int(dm.max()) + 1
    rows = dm[list(members), :]
    matrix = _count_matrix(rows, length)[:, :length]
    return matrix, _distortion(matrix, dm)


def embed_metric(g: Graph, R: Sequence[int]) -> tuple[np.ndarray, DistortionSummary]:
    """Rows are ordered distance vectors: an n x |R| integer matrix."""
    members = _canonical_members(g, R)
    if not is_connected(g):
        raise ValueError("embedding requires a connected graph")
    if g.n > DENSE_LIMIT:
        raise ValueError(f"embedding supported up to n={DENSE_LIMIT}")
    dm = distance_matrix(g)
    matrix = dm[:, list(members)].copy()
    return matrix, _distortion(matrix, dm)


# ---------------------------------------------------------------------------
# Dump format
# ---------------------------------------------------------------------------


def signature_csv_lines(g: Graph, R: Sequence[int]) -> list[str]:
    """Signature dump: header `vertex,k0,...,kD` then one row per vertex.

    A trailing `kinf` column is appended when the graph is disconnected.
    """
    matrix, length = all_multiset_signatures(g, R)
    disconnected = bool(matrix[:, length].any())
    cols = [f"k{i}" for i in range(length)] + (["kinf"] if disconnected else [])
    lines = ["vertex," + ",".join(cols)]
    width = length + (1 if disconnected else 0)
    for v in range(g.n):
        vals = ",".join(str(int(c)) for c in matrix[v, :width])
        lines.append(f"{v},{vals}")
    return lines
