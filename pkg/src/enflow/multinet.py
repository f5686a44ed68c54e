"""Directed, weighted, node-aligned temporal multilayer networks.

A multilayer network with N nodes (sectors) and L layers (economies) is stored
as a sparse supra-adjacency matrix of order N*L: the L-by-L grid of N-square
blocks has intra-layer flows on the diagonal blocks and inter-layer flows off
the diagonal. A temporal network is an ordered sequence of such matrices over
a shared node/layer universe.

Index conventions
-----------------
Array storage is 0-based throughout. The :func:`flat_index` /
:func:`unflat_index` pair and the layer arguments of :func:`block_view` follow
the conventional 1-based block-matrix numbering

    h = N * (alpha - 1) + i,

which is how positions are usually written in the input-output literature;
subtract one when indexing into the stored arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse

from .errors import ValidationError

__all__ = [
    "NetworkShape",
    "SupraAdjacency",
    "TemporalMultilayerNetwork",
    "EntityCodes",
    "flat_index",
    "unflat_index",
    "block_view",
    "aggregate_to_layers",
]


@dataclass(frozen=True)
class NetworkShape:
    """Dimensions of a temporal multilayer network.

    n_nodes
        Number of nodes per layer (sectors), N >= 1.
    n_layers
        Number of layers (economies), L >= 1.
    n_periods
        Number of time instants, T >= 1.
    """

    n_nodes: int
    n_layers: int
    n_periods: int = 1

    def __post_init__(self):
        for name in ("n_nodes", "n_layers", "n_periods"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")

    @property
    def supra_dim(self) -> int:
        """Order of the supra-adjacency matrix, N*L."""
        return self.n_nodes * self.n_layers

    def single_period(self) -> "NetworkShape":
        return NetworkShape(self.n_nodes, self.n_layers, 1)


def flat_index(alpha: int, i: int, n_nodes: int) -> int:
    """Map a (layer, node) pair to its supra-matrix position, 1-based.

    Returns h = N*(alpha-1) + i for 1 <= i <= N. The layer bound is not
    checkable here and is enforced by the callers that know L.
    """
    if not 1 <= i <= n_nodes:
        raise ValidationError(f"node index {i} out of range 1..{n_nodes}")
    if alpha < 1:
        raise ValidationError(f"layer index {alpha} out of range (must be >= 1)")
    return n_nodes * (alpha - 1) + i


def unflat_index(h: int, n_nodes: int, n_layers: int | None = None) -> tuple[int, int]:
    """Invert :func:`flat_index`: return the 1-based (layer, node) pair for h.

    When ``n_layers`` is given, h is range-checked against N*L.
    """
    if h < 1:
        raise ValidationError(f"supra index {h} out of range (must be >= 1)")
    if n_layers is not None and h > n_nodes * n_layers:
        raise ValidationError(f"supra index {h} out of range 1..{n_nodes * n_layers}")
    alpha = (h - 1) // n_nodes + 1
    i = h - n_nodes * (alpha - 1)
    return alpha, i


class SupraAdjacency:
    """Sparse nonnegative supra-adjacency matrix for one time instant.

    Stored entries are strictly positive; an absent entry means weight zero.
    Instances are immutable: mutating helpers return new objects.
    """

    def __init__(self, shape: NetworkShape, matrix):
        self.shape = shape.single_period()
        m = sparse.csr_array(matrix, dtype=np.float64)
        if m.shape != (shape.supra_dim, shape.supra_dim):
            raise ValidationError(
                f"matrix shape {m.shape} does not match supra dimension {shape.supra_dim}"
            )
        if m.nnz and not np.all(np.isfinite(m.data)):
            raise ValidationError("supra-adjacency weights must be finite")
        if m.nnz and m.data.min() < 0:
            raise ValidationError("supra-adjacency weights must be nonnegative")
        m.eliminate_zeros()
        self.matrix = m

    @classmethod
    def from_entries(
        cls, shape: NetworkShape, entries: Iterable[tuple[int, int, float]]
    ) -> "SupraAdjacency":
        """Build from 0-based (row, col, weight) triplets; duplicates are summed."""
        rows, cols, vals = [], [], []
        dim = shape.supra_dim
        for h, k, w in entries:
            if not (0 <= h < dim and 0 <= k < dim):
                raise ValidationError(f"entry ({h}, {k}) outside supra dimension {dim}")
            rows.append(h)
            cols.append(k)
            vals.append(w)
        m = sparse.coo_array((vals, (rows, cols)), shape=(dim, dim), dtype=np.float64)
        return cls(shape, m)

    @classmethod
    def empty(cls, shape: NetworkShape) -> "SupraAdjacency":
        dim = shape.supra_dim
        return cls(shape, sparse.csr_array((dim, dim), dtype=np.float64))

    def weight(self, h: int, k: int) -> float:
        """Weight of the arc at 0-based supra position (h, k); 0 when absent."""
        dim = self.shape.supra_dim
        if not (0 <= h < dim and 0 <= k < dim):
            raise ValidationError(f"supra position ({h}, {k}) outside dimension {dim}")
        return float(self.matrix[h, k])

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @property
    def total_weight(self) -> float:
        return float(self.matrix.sum())

    def entries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (rows, cols, weights) arrays of the stored arcs, 0-based."""
        coo = self.matrix.tocoo()
        return coo.row.copy(), coo.col.copy(), coo.data.copy()

    def pruned(self, min_weight: float) -> "SupraAdjacency":
        """Copy with every arc of weight < ``min_weight`` removed."""
        if min_weight < 0:
            raise ValidationError("min_weight must be nonnegative")
        if min_weight == 0:
            return self
        m = self.matrix.copy()
        m.data[m.data < min_weight] = 0.0
        return SupraAdjacency(self.shape, m)

    def without_self_loops(self) -> "SupraAdjacency":
        """Copy with intra-layer diagonal arcs (same sector, same economy) removed."""
        m = self.matrix.tolil(copy=True)
        m.setdiag(0.0)
        return SupraAdjacency(self.shape, m)

    def __repr__(self) -> str:
        s = self.shape
        return f"SupraAdjacency(N={s.n_nodes}, L={s.n_layers}, nnz={self.nnz})"


def block_view(w: SupraAdjacency, alpha: int, beta: int) -> sparse.csr_array:
    """Return the (alpha, beta) block of the supra matrix as a sparse N-square array.

    Layer indices are 1-based; ``block_view(w, a, a)`` is the intra-layer
    adjacency matrix of layer a.
    """
    n, n_layers = w.shape.n_nodes, w.shape.n_layers
    for name, value in (("alpha", alpha), ("beta", beta)):
        if not 1 <= value <= n_layers:
            raise ValidationError(f"layer index {name}={value} out of range 1..{n_layers}")
    r0 = n * (alpha - 1)
    c0 = n * (beta - 1)
    return w.matrix[r0 : r0 + n, c0 : c0 + n]


def aggregate_to_layers(w: SupraAdjacency) -> np.ndarray:
    """Collapse sectors: entry (a, b) is the sum of all weights from layer a+1
    to layer b+1 (0-based array over ordered layer pairs). Total mass is
    preserved exactly up to float addition order.
    """
    n, n_layers = w.shape.n_nodes, w.shape.n_layers
    out = np.zeros((n_layers, n_layers))
    rows, cols, vals = w.entries()
    np.add.at(out, (rows // n, cols // n), vals)
    return out


@dataclass(frozen=True)
class EntityCodes:
    """Short code labels for sectors and countries, aligned with a NetworkShape."""

    sector_codes: tuple[str, ...]
    country_codes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "sector_codes", tuple(self.sector_codes))
        object.__setattr__(self, "country_codes", tuple(self.country_codes))
        for name, codes in (("sector", self.sector_codes), ("country", self.country_codes)):
            if not codes:
                raise ValidationError(f"{name} code list is empty")
            if len(set(codes)) != len(codes):
                raise ValidationError(f"{name} codes are not unique")

    @property
    def n_nodes(self) -> int:
        return len(self.sector_codes)

    @property
    def n_layers(self) -> int:
        return len(self.country_codes)

    def check_shape(self, shape: NetworkShape) -> None:
        if shape.n_nodes != self.n_nodes or shape.n_layers != self.n_layers:
            raise ValidationError(
                f"code lists ({self.n_nodes} sectors, {self.n_layers} countries) do not "
                f"match shape ({shape.n_nodes} nodes, {shape.n_layers} layers)"
            )


class TemporalMultilayerNetwork:
    """Ordered sequence of supra-adjacency matrices over one node/layer universe."""

    def __init__(self, periods: Sequence[tuple[int, SupraAdjacency]]):
        periods = list(periods)
        if not periods:
            raise ValidationError("a temporal network needs at least one period")
        base = periods[0][1].shape
        labels = []
        for label, matrix in periods:
            if (matrix.shape.n_nodes, matrix.shape.n_layers) != (base.n_nodes, base.n_layers):
                raise ValidationError(
                    f"period {label} has shape {matrix.shape}, expected "
                    f"(N={base.n_nodes}, L={base.n_layers})"
                )
            labels.append(int(label))
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise ValidationError(f"period labels must be strictly increasing, got {labels}")
        self.shape = NetworkShape(base.n_nodes, base.n_layers, len(periods))
        self.periods: tuple[tuple[int, SupraAdjacency], ...] = tuple(
            (int(label), matrix) for label, matrix in periods
        )

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(label for label, _ in self.periods)

    @property
    def matrices(self) -> tuple[SupraAdjacency, ...]:
        return tuple(matrix for _, matrix in self.periods)

    def period(self, label: int) -> SupraAdjacency:
        for plabel, matrix in self.periods:
            if plabel == label:
                return matrix
        raise ValidationError(f"no period labelled {label}")

    def restrict_periods(self, labels: Iterable[int]) -> "TemporalMultilayerNetwork":
        wanted = set(labels)
        kept = [(label, m) for label, m in self.periods if label in wanted]
        if not kept:
            raise ValidationError("period restriction removed every period")
        return TemporalMultilayerNetwork(kept)

    def tensor_entries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Concatenate all stored arcs as (t, row, col, weight) arrays.

        t is the 0-based period position (not the year label).
        """
        ts, rows, cols, vals = [], [], [], []
        for t, (_, matrix) in enumerate(self.periods):
            r, c, v = matrix.entries()
            ts.append(np.full(r.shape, t, dtype=np.int64))
            rows.append(r.astype(np.int64))
            cols.append(c.astype(np.int64))
            vals.append(v)
        return (
            np.concatenate(ts) if ts else np.empty(0, dtype=np.int64),
            np.concatenate(rows),
            np.concatenate(cols),
            np.concatenate(vals),
        )

    @property
    def total_weight(self) -> float:
        return float(sum(m.total_weight for m in self.matrices))

    def __len__(self) -> int:
        return len(self.periods)

    def __iter__(self) -> Iterator[tuple[int, SupraAdjacency]]:
        return iter(self.periods)

    def __repr__(self) -> str:
        s = self.shape
        return (
            f"TemporalMultilayerNetwork(N={s.n_nodes}, L={s.n_layers}, T={s.n_periods}, "
            f"periods={self.labels[0]}..{self.labels[-1]})"
        )
