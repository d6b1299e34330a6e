"""Random graph models driven by a graphon.

The main generator grows a graph process: vertices arrive by a Poisson
point process on time x feature space and every unordered pair is joined
independently with the kernel probability of the endpoint features.  All
randomness flows through addressed substreams (see ``_rng``), which makes
traces bit-reproducible and extendable in the horizon without
re-randomizing history: vertices are drawn per unit time window and edge
coins per arrival-rank row, so a longer horizon only appends draws.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import (
    TAG_EDGE_ROW,
    TAG_SEQ_EDGE,
    TAG_SEQ_FEATURE,
    TAG_WINDOW,
    TAG_WRANDOM,
    substream,
)
from .graphon_core import (
    AnalyticGraphon,
    GraphonError,
    MixedMembershipGraphon,
    StepGraphon,
    evaluate,
    graphon_to_spec,
    load_graphon_spec,
)

__all__ = [
    "VertexRecord",
    "ProcessTrace",
    "SampledGraph",
    "ArrivalSchedule",
    "sample_graphon_process",
    "snapshot_at",
    "sample_sequential",
    "sample_dense_wrandom",
    "xi_box_counts",
    "trace_to_json",
    "trace_from_json",
    "save_trace_file",
    "load_trace_file",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VertexRecord:
    """One sampled vertex: appearance-order label, birth time, feature."""

    label: int
    birth: float
    feature: tuple[float, ...]


@dataclass(frozen=True)
class SampledGraph:
    """A simple undirected labeled graph with optional sampling metadata."""

    labels: np.ndarray
    edges: np.ndarray
    births: np.ndarray | None = None
    features: np.ndarray | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if labels.size != np.unique(labels).size:
            raise GraphonError("vertex labels must be unique")
        if edges.size:
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphonError("self-loops are not allowed")
            known = set(labels.tolist())
            for u, v in edges.tolist():
                if u not in known or v not in known:
                    raise GraphonError(f"edge ({u}, {v}) references an unknown vertex")
            norm = np.sort(edges, axis=1)
            if np.unique(norm, axis=0).shape[0] != norm.shape[0]:
                raise GraphonError("duplicate edges are not allowed")
            edges = norm[np.lexsort((norm[:, 1], norm[:, 0]))]
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", edges)

    # -- derived statistics ---------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return int(self.labels.size)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def edge_density(self) -> float:
        """rho(G) = 2 |E| / |V|^2 (0 for the empty graph)."""
        n = self.num_vertices
        return 2.0 * self.num_edges / (n * n) if n else 0.0

    def degree_map(self) -> dict[int, int]:
        deg = dict.fromkeys(self.labels.tolist(), 0)
        for u, v in self.edges.tolist():
            deg[u] += 1
            deg[v] += 1
        return deg

    def degree_sequence(self) -> np.ndarray:
        """Degrees aligned with ``labels``."""
        deg = self.degree_map()
        return np.array([deg[lab] for lab in self.labels.tolist()], dtype=np.int64)

    def edge_list(self):
        return [tuple(e) for e in self.edges.tolist()]

    def birth_of(self, label: int) -> float:
        idx = int(np.flatnonzero(self.labels == label)[0])
        return float(self.births[idx])

    def feature_of(self, label: int) -> tuple[float, ...]:
        idx = int(np.flatnonzero(self.labels == label)[0])
        return tuple(np.atleast_1d(self.features[idx]).tolist())

    def induced(self, keep_labels) -> "SampledGraph":
        keep = set(int(k) for k in keep_labels)
        mask = np.array([lab in keep for lab in self.labels.tolist()], dtype=bool)
        if self.edges.size:
            emask = np.array([(u in keep and v in keep) for u, v in self.edges.tolist()], dtype=bool)
            edges = self.edges[emask]
        else:
            edges = self.edges
        return SampledGraph(
            self.labels[mask],
            edges,
            self.births[mask] if self.births is not None else None,
            self.features[mask] if self.features is not None else None,
        )

    def drop_isolated(self) -> "SampledGraph":
        deg = self.degree_map()
        return self.induced([lab for lab, d in deg.items() if d > 0])


@dataclass(frozen=True)
class ProcessTrace:
    """Full projective history of one graphon process run.

    ``vertices`` are sorted by birth time and labeled by appearance order;
    ``edges`` join labels, and an edge is considered created at the larger
    of its endpoint births.  Snapshots at any time up to the horizon are
    induced subgraphs of one another.
    """

    graphon: object
    horizon: float
    seed: int
    keep_isolated: bool
    vertices: tuple[VertexRecord, ...]
    edges: np.ndarray

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def edge_creation_times(self) -> np.ndarray:
        birth = {v.label: v.birth for v in self.vertices}
        return np.array([max(birth[u], birth[v]) for u, v in self.edges.tolist()])


# ---------------------------------------------------------------------------
# Graphon process sampling
# ---------------------------------------------------------------------------


def _sampling_region(w) -> float:
    """Mass of the materialized sampling region (explicit blocks / truncation)."""
    if isinstance(w, StepGraphon):
        return w.total_mass
    if isinstance(w, AnalyticGraphon):
        return w.region_mass()
    raise GraphonError(f"not a graphon: {type(w).__name__}")


def _check_probability_kernel(w) -> None:
    if isinstance(w, StepGraphon) and not w.is_probability_kernel():
        raise GraphonError("sampling requires a [0,1]-valued kernel")


def _feature_dim(w) -> int:
    return w.feature_dim if isinstance(w, AnalyticGraphon) else 1


def _draw_features(w, count: int, rng: np.random.Generator) -> np.ndarray:
    """iid features from the normalized region measure, as (count, dim) array."""
    if count == 0:
        return np.zeros((0, _feature_dim(w)))
    if isinstance(w, StepGraphon):
        return rng.uniform(0.0, w.total_mass, size=(count, 1))
    return np.asarray(w.sample_features(count, rng), dtype=float).reshape(count, -1)


def _pair_probabilities(w, prior: np.ndarray, new_feature: np.ndarray) -> np.ndarray:
    if prior.shape[1] == 1:
        return np.atleast_1d(evaluate(w, prior[:, 0], new_feature[0]))
    return np.atleast_1d(evaluate(w, prior, new_feature[None, :]))


def sample_graphon_process(w, horizon: float, seed: int, keep_isolated: bool = False) -> ProcessTrace:
    """Sample one graphon-process trace up to the horizon.

    Vertices arrive as a Poisson process with intensity (time) x (region
    measure); every unordered pair is connected independently with the
    kernel probability of its features.  ``keep_isolated`` controls the
    default snapshot view only -- the trace always records every vertex of
    the truncated region, so both process variants are recoverable.
    Rejected: infinite-mass ambient space with ``keep_isolated=True`` (the
    process would have infinitely many isolated vertices at every time).
    """
    if horizon < 0:
        raise GraphonError("horizon must be non-negative")
    _check_probability_kernel(w)
    if keep_isolated and isinstance(w, StepGraphon) and w.ambient_infinite:
        raise GraphonError(
            "keep_isolated=True on an infinite-mass ambient space: the process has "
            "infinitely many isolated vertices; truncate to the explicit blocks first"
        )
    mass = _sampling_region(w)

    births: list[float] = []
    feats: list[np.ndarray] = []
    if mass > 0:
        for k in range(int(math.ceil(horizon))):
            rng = substream(seed, TAG_WINDOW, k)
            count = int(rng.poisson(mass))
            window_births = rng.uniform(float(k), float(k + 1), size=count)
            window_feats = _draw_features(w, count, rng)
            keep = window_births <= horizon
            births.extend(window_births[keep].tolist())
            feats.extend(window_feats[keep])
    order = np.argsort(np.asarray(births), kind="stable")
    births_sorted = [births[i] for i in order]
    feats_sorted = [feats[i] for i in order]
    if len(set(births_sorted)) != len(births_sorted):
        logger.info("birth-time tie broken by draw order (seed=%s horizon=%s)", seed, horizon)

    vertices = tuple(
        VertexRecord(i + 1, float(b), tuple(np.atleast_1d(f).tolist()))
        for i, (b, f) in enumerate(zip(births_sorted, feats_sorted))
    )
    feature_matrix = (
        np.array([np.atleast_1d(f) for f in feats_sorted], dtype=float)
        if vertices
        else np.zeros((0, 1))
    )

    edges: list[tuple[int, int]] = []
    for v in range(2, len(vertices) + 1):
        rng = substream(seed, TAG_EDGE_ROW, v)
        coins = rng.random(v - 1)
        probs = _pair_probabilities(w, feature_matrix[: v - 1], feature_matrix[v - 1])
        hits = np.flatnonzero(coins < probs)
        edges.extend((int(u) + 1, v) for u in hits)
    edge_arr = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    return ProcessTrace(w, float(horizon), int(seed), bool(keep_isolated), vertices, edge_arr)


def snapshot_at(trace: ProcessTrace, s: float, keep_isolated: bool | None = None) -> SampledGraph:
    """Induced subgraph on vertices born at time ``s`` or earlier.

    With ``keep_isolated=False`` (the trace default unless overridden)
    vertices of degree zero in the snapshot are removed, giving the
    finite-graph view of the process.
    """
    if s < 0 or s > trace.horizon:
        raise GraphonError(f"snapshot time {s} outside the sampled horizon [0, {trace.horizon}]")
    keep = trace.keep_isolated if keep_isolated is None else keep_isolated
    recs = [v for v in trace.vertices if v.birth <= s]
    labels = np.array([v.label for v in recs], dtype=np.int64)
    label_set = set(labels.tolist())
    edges = np.array(
        [e for e in trace.edges.tolist() if e[0] in label_set and e[1] in label_set],
        dtype=np.int64,
    ).reshape(-1, 2)
    width = max((len(v.feature) for v in recs), default=1)
    g = SampledGraph(
        labels,
        edges,
        births=np.array([v.birth for v in recs]),
        features=np.array([list(v.feature) + [0.0] * (width - len(v.feature)) for v in recs])
        if recs
        else np.zeros((0, width)),
    )
    return g if keep else g.drop_isolated()


# ---------------------------------------------------------------------------
# Sequential arrival model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrivalSchedule:
    """Growing prefixes ``S_n = [0, s_n]`` of the feature half line.

    Families: ``linear`` (``s_n = c n``), ``exponential`` (``s_n = c 2^n``,
    capped at the float maximum) and ``constant`` (``s_n = c``).
    """

    family: str
    c: float = 1.0

    def bound(self, n: int) -> float:
        if self.family == "linear":
            return self.c * n
        if self.family == "exponential":
            return self.c * float(2.0 ** min(n, 1020))
        if self.family == "constant":
            return self.c
        raise GraphonError(f"unknown schedule family {self.family!r}")


def sample_sequential(w, schedule: ArrivalSchedule, steps: int, seed: int,
                      checkpoints: Sequence[int] | None = None) -> list[SampledGraph]:
    """One-vertex-per-step arrivals with features from renormalized prefixes.

    At step ``n`` the new feature is uniform on ``S_n`` (intersected with
    the finite block support unless the ambient space is infinite), and
    edges to all earlier vertices are drawn independently from the kernel.
    Returns the graph at every checkpoint (default: every step); each graph
    is an induced subgraph of the next.
    """
    if isinstance(w, MixedMembershipGraphon):
        raise GraphonError("sequential arrivals need a scalar feature space")
    _check_probability_kernel(w)
    if steps < 1:
        raise GraphonError("steps must be at least 1")
    marks = sorted(set(int(c) for c in (checkpoints if checkpoints is not None else range(1, steps + 1))))
    if any(c < 1 or c > steps for c in marks):
        raise GraphonError("checkpoints must lie in [1, steps]")

    if isinstance(w, StepGraphon):
        support_cap = math.inf if w.ambient_infinite else w.total_mass
    else:
        support_cap = math.inf  # scalar analytic families live on all of R_+
    features = np.zeros((steps, 1))
    graphs: list[SampledGraph] = []
    edges: list[tuple[int, int]] = []
    for n in range(1, steps + 1):
        s_n = min(schedule.bound(n), support_cap)
        if not (s_n > 0):
            raise GraphonError(f"schedule gives a zero-mass prefix at step {n}")
        rng = substream(seed, TAG_SEQ_FEATURE, n)
        x = rng.uniform(0.0, s_n)
        features[n - 1, 0] = x
        if n > 1:
            probs = np.atleast_1d(evaluate(w, features[: n - 1, 0], x))
            nonzero = np.flatnonzero(probs > 0)
            if nonzero.size:
                coins = substream(seed, TAG_SEQ_EDGE, n).random(n - 1)
                for u in np.flatnonzero(coins < probs):
                    edges.append((int(u) + 1, n))
        if n in marks:
            graphs.append(
                SampledGraph(
                    np.arange(1, n + 1, dtype=np.int64),
                    np.array(sorted(edges), dtype=np.int64).reshape(-1, 2),
                    births=np.arange(1, n + 1, dtype=float),
                    features=features[:n].copy(),
                )
            )
    return graphs


# ---------------------------------------------------------------------------
# Dense W-random graphs
# ---------------------------------------------------------------------------


def sample_dense_wrandom(w: StepGraphon, n: int, seed: int) -> SampledGraph:
    """Classical W-random graph: n iid features from the normalized measure."""
    if not isinstance(w, StepGraphon):
        raise GraphonError("dense W-random sampling needs a step graphon")
    if w.ambient_infinite:
        raise GraphonError("space has infinite total mass; truncate to the explicit blocks first")
    _check_probability_kernel(w)
    if n < 0:
        raise GraphonError("vertex count must be non-negative")
    rng = substream(seed, TAG_WRANDOM, 0)
    feats = rng.uniform(0.0, w.total_mass, size=n)
    edges = []
    for v in range(2, n + 1):
        coins = substream(seed, TAG_WRANDOM, v).random(v - 1)
        probs = np.atleast_1d(evaluate(w, feats[: v - 1], feats[v - 1]))
        for u in np.flatnonzero(coins < probs):
            edges.append((int(u) + 1, v))
    return SampledGraph(
        np.arange(1, n + 1, dtype=np.int64),
        np.array(sorted(edges), dtype=np.int64).reshape(-1, 2),
        births=np.arange(1, n + 1, dtype=float),
        features=feats.reshape(-1, 1),
    )


# ---------------------------------------------------------------------------
# Edge birth-pair measure
# ---------------------------------------------------------------------------


def xi_box_counts(trace: ProcessTrace, h: float, horizon: float | None = None) -> np.ndarray:
    """Symmetric box counts of the edge birth-pair point measure.

    Entry ``(i, j)`` counts ordered endpoint-birth pairs ``(t_u, t_v)`` with
    ``t_u`` in the i-th and ``t_v`` in the j-th interval of width ``h``;
    every edge contributes both orders, so the matrix sums to ``2 |E|``
    whenever the grid covers the horizon.
    """
    horizon = trace.horizon if horizon is None else float(horizon)
    if not (0 < h <= horizon):
        raise GraphonError("grid width must satisfy 0 < h <= horizon")
    nbins = int(math.ceil(horizon / h - 1e-12))
    birth = {v.label: v.birth for v in trace.vertices}
    counts = np.zeros((nbins, nbins), dtype=np.int64)
    for u, v in trace.edges.tolist():
        bi = min(int(birth[u] / h), nbins - 1)
        bj = min(int(birth[v] / h), nbins - 1)
        counts[bi, bj] += 1
        counts[bj, bi] += 1
    return counts


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def trace_to_json(trace: ProcessTrace) -> dict:
    return {
        "spec": graphon_to_spec(trace.graphon),
        "horizon": trace.horizon,
        "seed": trace.seed,
        "keep_isolated": trace.keep_isolated,
        "vertices": [
            {"label": v.label, "birth": v.birth, "feature": list(v.feature)} for v in trace.vertices
        ],
        "edges": [[int(u), int(v)] for u, v in trace.edges.tolist()],
    }


def trace_from_json(payload: dict) -> ProcessTrace:
    try:
        graphon = load_graphon_spec(payload["spec"])
        vertices = tuple(
            VertexRecord(int(v["label"]), float(v["birth"]), tuple(float(x) for x in v["feature"]))
            for v in payload["vertices"]
        )
        edges = np.array(payload["edges"], dtype=np.int64).reshape(-1, 2)
        return ProcessTrace(
            graphon,
            float(payload["horizon"]),
            int(payload["seed"]),
            bool(payload.get("keep_isolated", False)),
            vertices,
            edges,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphonError(f"malformed trace payload: {exc}") from exc


def save_trace_file(trace: ProcessTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_to_json(trace), fh)
        fh.write("\n")


def load_trace_file(path) -> ProcessTrace:
    with open(path, "r", encoding="utf-8") as fh:
        return trace_from_json(json.load(fh))
