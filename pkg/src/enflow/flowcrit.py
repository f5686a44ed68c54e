"""Maximum flows and arc criticality.

The criticality of an arc is the relative drop in the total max flow of the
network caused by deleting that arc: with m_base the sum of the max-flow
values over a fixed set of ordered node pairs and m_removed the same sum
recomputed from scratch without the arc,

    index = 1 - m_removed / m_base.

Deleting capacity can never increase a max flow, so the index lies in
[0, 1]; it reaches 1 exactly when the arc was the only carrier of every
positive pair flow (removal of a global bridge), and 0 when the arc is
redundant for every pair.

Max flows are computed with a blocking-flow (level graph) augmenting-path
solver, which handles real-valued capacities exactly enough for the min-cut
identity to be exact on integer inputs. In exact mode the pair set is all
ordered pairs; in sampled mode it is a seeded fixed sample of ordered pairs
reused for the baseline and for every arc removal, so sampled runs are
reproducible given (seed, pair count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError, ZeroBaselineError
from .multinet import SupraAdjacency, aggregate_to_layers

__all__ = [
    "FlowNetwork",
    "AllPairsFlow",
    "ArcRemovalRow",
    "ArcCriticalityReport",
    "max_flow",
    "all_pairs_total",
    "arc_criticality",
    "country_level_criticality",
    "EXACT_MODE_NODE_LIMIT",
    "DEFAULT_SAMPLE_PAIRS",
]

# Exact all-ordered-pairs mode is the default up to this many nodes; beyond,
# the quadratic number of max-flow calls per arc removal calls for sampling.
EXACT_MODE_NODE_LIMIT = 250
DEFAULT_SAMPLE_PAIRS = 2000


class FlowNetwork:
    """Immutable capacitated digraph.

    Parallel arcs are merged by adding capacities; self-loops are rejected
    (they can never carry flow between distinct endpoints). Arcs are kept in
    sorted (tail, head) order, which fixes the iteration order everywhere.
    """

    def __init__(self, node_count: int, arcs: Iterable[tuple[int, int, float]]):
        if node_count < 1:
            raise ValidationError("node_count must be >= 1")
        merged: dict[tuple[int, int], float] = {}
        for tail, head, capacity in arcs:
            tail, head = int(tail), int(head)
            if not (0 <= tail < node_count and 0 <= head < node_count):
                raise ValidationError(
                    f"arc ({tail}, {head}) outside node range 0..{node_count - 1}"
                )
            if tail == head:
                raise ValidationError(f"self-loop arc at node {tail} is not allowed")
            capacity = float(capacity)
            if not np.isfinite(capacity) or capacity < 0:
                raise ValidationError(
                    f"arc ({tail}, {head}) capacity must be finite and >= 0, got {capacity}"
                )
            merged[(tail, head)] = merged.get((tail, head), 0.0) + capacity
        self.node_count = int(node_count)
        self.arcs: tuple[tuple[int, int, float], ...] = tuple(
            (t, h, c) for (t, h), c in sorted(merged.items())
        )
        self._engine: _BlockingFlowEngine | None = None

    @classmethod
    def from_matrix(cls, matrix) -> "FlowNetwork":
        """Build from a square capacity matrix; diagonal entries are dropped."""
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"capacity matrix must be square, got shape {m.shape}")
        rows, cols = np.nonzero(m)
        arcs = [
            (int(r), int(c), float(m[r, c])) for r, c in zip(rows, cols) if r != c
        ]
        return cls(m.shape[0], arcs)

    @property
    def engine(self) -> "_BlockingFlowEngine":
        if self._engine is None:
            self._engine = _BlockingFlowEngine(self.node_count, self.arcs)
        return self._engine

    def __repr__(self) -> str:
        return f"FlowNetwork(nodes={self.node_count}, arcs={len(self.arcs)})"


class _BlockingFlowEngine:
    """Reusable residual-graph solver over one arc list.

    Each arc a occupies residual slots 2a (forward) and 2a+1 (reverse); a
    solve resets residual capacities, so one engine serves many queries.
    """

    def __init__(self, node_count: int, arcs: Sequence[tuple[int, int, float]]):
        self.n = node_count
        to: list[int] = []
        base_cap: list[float] = []
        adj: list[list[int]] = [[] for _ in range(node_count)]
        for tail, head, capacity in arcs:
            adj[tail].append(len(to))
            to.append(head)
            base_cap.append(capacity)
            adj[head].append(len(to))
            to.append(tail)
            base_cap.append(0.0)
        self.to = to
        self.base_cap = base_cap
        self.adj = adj
        self.scale = max(1.0, max(base_cap, default=0.0))

    def max_flow(self, source: int, target: int, disabled_arc: int | None = None) -> float:
        cap = self.base_cap.copy()
        if disabled_arc is not None:
            cap[2 * disabled_arc] = 0.0
        to = self.to
        adj = self.adj
        n = self.n
        total = 0.0
        while True:
            level = [-1] * n
            level[source] = 0
            queue = [source]
            qi = 0
            target_level = -1
            while qi < len(queue):
                v = queue[qi]
                qi += 1
                next_level = level[v] + 1
                if target_level >= 0 and next_level > target_level:
                    break  # deeper nodes cannot lie on a shortest path
                for e in adj[v]:
                    if cap[e] > 0.0 and level[to[e]] < 0:
                        level[to[e]] = next_level
                        queue.append(to[e])
                        if to[e] == target:
                            target_level = next_level
            if level[target] < 0:
                self._certify(cap, source, target, total, disabled_arc)
                return total
            pointer = [0] * n
            path: list[int] = []
            v = source
            while True:
                if v == target:
                    bottleneck = min(cap[e] for e in path)
                    total += bottleneck
                    for e in path:
                        cap[e] -= bottleneck
                        cap[e ^ 1] += bottleneck
                    cut = 0
                    while cut < len(path) and cap[path[cut]] > 0.0:
                        cut += 1
                    v = source if cut == 0 else to[path[cut - 1]]
                    del path[cut:]
                    continue
                edges = adj[v]
                i = pointer[v]
                want_level = level[v] + 1
                while i < len(edges):
                    e = edges[i]
                    if cap[e] > 0.0 and level[to[e]] == want_level:
                        break
                    i += 1
                pointer[v] = i
                if i < len(edges):
                    e = edges[i]
                    path.append(e)
                    v = to[e]
                else:
                    level[v] = -2  # dead end in this phase
                    if not path:
                        break
                    e = path.pop()
                    v = to[e ^ 1]
                    pointer[v] += 1

    def _certify(
        self,
        cap: Sequence[float],
        source: int,
        target: int,
        value: float,
        disabled_arc: int | None,
    ) -> None:
        """Certify the computed assignment: capacity bounds plus conservation."""
        net = [0.0] * self.n
        tol = 1e-9 * self.scale
        for arc in range(len(self.base_cap) // 2):
            bound = 0.0 if arc == disabled_arc else self.base_cap[2 * arc]
            f = bound - cap[2 * arc]
            if f < -tol or f > bound + tol:
                raise AssertionError(f"flow on arc {arc} violates its capacity bound")
            net[self.to[2 * arc + 1]] -= f
            net[self.to[2 * arc]] += f
        for v in range(self.n):
            expected = -value if v == source else value if v == target else 0.0
            if abs(net[v] - expected) > 1e-6 * self.scale:
                raise AssertionError(f"flow conservation violated at node {v}")


def max_flow(net: FlowNetwork, source: int, target: int) -> float:
    """Value of a maximum source-to-target flow (equals the min-cut capacity)."""
    if source == target:
        raise ValidationError("source and target must differ")
    for name, v in (("source", source), ("target", target)):
        if not 0 <= v < net.node_count:
            raise ValidationError(f"{name} node {v} outside 0..{net.node_count - 1}")
    return net.engine.max_flow(source, target)


@dataclass(frozen=True)
class AllPairsFlow:
    """Matrix of pairwise max-flow values, zero on the diagonal."""

    matrix: np.ndarray


def _pair_set(node_count: int, mode: str, pairs: int, seed: int) -> list[tuple[int, int]]:
    total = node_count * (node_count - 1)
    if total == 0:
        return []
    if mode == "exact" or pairs >= total:
        indices = range(total)
    else:
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(total, size=pairs, replace=False)).tolist()
    out = []
    for idx in indices:
        s, r = divmod(int(idx), node_count - 1)
        out.append((s, r if r < s else r + 1))
    return out


def _total_over_pairs(
    engine: _BlockingFlowEngine,
    pair_list: Sequence[tuple[int, int]],
    disabled_arc: int | None = None,
) -> np.ndarray:
    values = np.empty(len(pair_list))
    for i, (s, t) in enumerate(pair_list):
        values[i] = engine.max_flow(s, t, disabled_arc)
    return values


def all_pairs_total(net: FlowNetwork) -> tuple[AllPairsFlow, float]:
    """Max flow for every ordered node pair, plus the grand total over pairs.

    Disconnected pairs contribute zero; the diagonal is excluded (a
    source-equals-target flow is undefined).
    """
    m = net.node_count
    matrix = np.zeros((m, m))
    engine = net.engine
    for s in range(m):
        for t in range(m):
            if s != t:
                matrix[s, t] = engine.max_flow(s, t)
    return AllPairsFlow(matrix=matrix), float(matrix.sum())


@dataclass(frozen=True)
class ArcRemovalRow:
    tail: int
    head: int
    removed_total: float
    index: float


@dataclass(frozen=True)
class ArcCriticalityReport:
    """Criticality index per arc, sorted by descending index.

    ``mode`` is "exact" or "sampled"; sampled reports carry the pair count
    and seed that reproduce them.
    """

    baseline_total: float
    rows: tuple[ArcRemovalRow, ...]
    mode: str
    pair_count: int | None = None
    seed: int | None = None

    def top(self, k: int) -> tuple[ArcRemovalRow, ...]:
        return self.rows[:k]


def arc_criticality(
    net: FlowNetwork,
    mode: str = "exact",
    *,
    pairs: int = DEFAULT_SAMPLE_PAIRS,
    seed: int = 0,
) -> ArcCriticalityReport:
    """Delete each arc in turn and measure the drop in the total max flow.

    In exact mode the total runs over all ordered node pairs; in sampled
    mode over a fixed seeded sample of ordered pairs shared by the baseline
    and every removal. The removal totals are recomputed from scratch per
    arc (no incremental updates).

    Raises
    ------
    ZeroBaselineError
        The baseline total is zero, so the index is undefined.
    """
    if mode not in ("exact", "sampled"):
        raise ValidationError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "sampled" and pairs < 1:
        raise ValidationError("sampled mode needs at least one pair")
    pair_list = _pair_set(net.node_count, mode, pairs, seed)
    engine = net.engine
    baseline_values = _total_over_pairs(engine, pair_list)
    baseline = float(baseline_values.sum())
    if baseline <= 0.0:
        raise ZeroBaselineError(
            "baseline total max flow is zero; the criticality index is undefined"
        )
    # Pairs with zero baseline flow stay zero after any removal.
    active_pairs = [p for p, v in zip(pair_list, baseline_values) if v > 0.0]
    rows = []
    for arc_id, (tail, head, _) in enumerate(net.arcs):
        removed = float(_total_over_pairs(engine, active_pairs, disabled_arc=arc_id).sum())
        # Deleting capacity cannot raise the total; clip float dust so the
        # reported pair (removed, index) stays exactly on the defining line.
        removed = min(removed, baseline)
        rows.append(
            ArcRemovalRow(
                tail=tail, head=head, removed_total=removed, index=1.0 - removed / baseline
            )
        )
    rows.sort(key=lambda r: (-r.index, r.tail, r.head))
    return ArcCriticalityReport(
        baseline_total=baseline,
        rows=tuple(rows),
        mode=mode,
        pair_count=len(pair_list) if mode == "sampled" else None,
        seed=seed if mode == "sampled" else None,
    )


def country_level_criticality(
    w: SupraAdjacency,
    mode: str = "exact",
    *,
    pairs: int = DEFAULT_SAMPLE_PAIRS,
    seed: int = 0,
) -> ArcCriticalityReport:
    """Arc criticality on the layer-aggregated network.

    Sectors are collapsed first (summing all sector-level weights per ordered
    layer pair), so intra-layer structure becomes inert diagonal mass and is
    dropped; nodes of the resulting flow network are the layers.
    """
    aggregated = aggregate_to_layers(w)
    net = FlowNetwork.from_matrix(aggregated)
    return arc_criticality(net, mode, pairs=pairs, seed=seed)
