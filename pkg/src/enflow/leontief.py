"""Embodied energy flows from multi-region input-output accounts.

Per period, the raw accounts are the intermediate-use matrix U (monetary),
the total-output vector o (monetary), technical energy consumption c by
carrier (TJ), and bilateral final demand d (monetary). The derived objects:

* input coefficients  a_hk = u_hk / o_k  (zero where o_k = 0);
* total requirements  x = (I - A)^-1 v, never materialized as a dense
  inverse - solved iteratively, which converges because the spectral radius
  of A is below one for a productive economy;
* the embodied flow from sector i in economy alpha to sector j in economy
  beta: the energy consumed by sector i anywhere, propagated through the
  total-requirements matrix into the output of (j, alpha), times the final
  demand of sector j traded from alpha to beta.

Arc weights are stored only when strictly positive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, NonProductiveEconomyError, ValidationError
from .multinet import NetworkShape, SupraAdjacency, TemporalMultilayerNetwork

__all__ = [
    "SourceClass",
    "RENEWABLE_SOURCES",
    "NONRENEWABLE_SOURCES",
    "ENERGY_SOURCES",
    "MrioPeriod",
    "InputCoefficients",
    "EmbodiedIntensity",
    "input_coefficients",
    "leontief_apply",
    "spectral_radius_estimate",
    "embodied_intensity",
    "embodied_flow_matrix",
    "build_temporal_network",
]

RENEWABLE_SOURCES = frozenset({"biomass_waste", "hydro", "other_renewable"})
NONRENEWABLE_SOURCES = frozenset({"coal", "natural_gas", "petroleum", "nuclear"})
ENERGY_SOURCES = RENEWABLE_SOURCES | NONRENEWABLE_SOURCES


class SourceClass(enum.Enum):
    """Partition of energy carriers into renewable and non-renewable classes."""

    ALL = "all"
    RENEWABLE = "renewable"
    NONRENEWABLE = "nonrenewable"

    @property
    def carriers(self) -> frozenset[str]:
        if self is SourceClass.RENEWABLE:
            return RENEWABLE_SOURCES
        if self is SourceClass.NONRENEWABLE:
            return NONRENEWABLE_SOURCES
        return ENERGY_SOURCES


class MrioPeriod:
    """One period of raw multi-region input-output accounts.

    Parameters
    ----------
    label : int
        Period label (year).
    shape : NetworkShape
        Node/layer dimensions; the supra dimension M = N*L indexes all
        (economy, sector) pairs, sector fastest.
    intermediate_use : sparse or dense M-square matrix
        u[h, k]: monetary deliveries from pair h to pair k.
    total_output : length-M vector
        o[k]: total output of pair k.
    energy_consumption : mapping carrier -> length-M vector
        c[h]: technical energy consumption (TJ) of pair h, per carrier.
        Carrier names must belong to the seven known carriers.
    final_demand : mapping (sector j, economy a, economy b) -> value
        Final demand of sector j's goods traded from economy a to economy b,
        0-based indices, strictly positive values.
    """

    def __init__(
        self,
        label: int,
        shape: NetworkShape,
        intermediate_use,
        total_output,
        energy_consumption: Mapping[str, np.ndarray],
        final_demand: Mapping[tuple[int, int, int], float],
    ):
        self.label = int(label)
        self.shape = shape.single_period()
        dim = shape.supra_dim

        u = sparse.csr_array(intermediate_use, dtype=np.float64)
        if u.shape != (dim, dim):
            raise ValidationError(
                f"period {label}: intermediate use shape {u.shape}, expected ({dim}, {dim})"
            )
        if u.nnz and (not np.all(np.isfinite(u.data)) or u.data.min() < 0):
            raise ValidationError(f"period {label}: intermediate use must be finite and >= 0")
        u.eliminate_zeros()

        o = np.asarray(total_output, dtype=np.float64).reshape(-1)
        if o.shape != (dim,):
            raise ValidationError(f"period {label}: total output length {o.size}, expected {dim}")
        if not np.all(np.isfinite(o)) or o.min(initial=0.0) < 0:
            raise ValidationError(f"period {label}: total output must be finite and >= 0")

        col_use = np.asarray(u.sum(axis=0)).reshape(-1)
        # Column use may not exceed output; allow harmless float slack.
        bad = col_use > o * (1 + 1e-9) + 1e-12
        if np.any(bad):
            k = int(np.argmax(bad))
            raise ValidationError(
                f"period {label}: column {k} uses {col_use[k]} but output is {o[k]}"
            )
        zero_out = (o == 0) & (col_use > 0)
        if np.any(zero_out):
            k = int(np.argmax(zero_out))
            raise ValidationError(
                f"period {label}: column {k} has zero output but positive intermediate use"
            )

        consumption: dict[str, np.ndarray] = {}
        for carrier, vec in energy_consumption.items():
            if carrier not in ENERGY_SOURCES:
                raise ValidationError(
                    f"period {label}: unknown energy source {carrier!r}; "
                    f"expected one of {sorted(ENERGY_SOURCES)}"
                )
            v = np.asarray(vec, dtype=np.float64).reshape(-1)
            if v.shape != (dim,):
                raise ValidationError(
                    f"period {label}: consumption vector for {carrier!r} has length {v.size}, "
                    f"expected {dim}"
                )
            if not np.all(np.isfinite(v)) or v.min(initial=0.0) < 0:
                raise ValidationError(
                    f"period {label}: consumption for {carrier!r} must be finite and >= 0"
                )
            consumption[carrier] = v

        demand: dict[tuple[int, int, int], float] = {}
        n, n_layers = shape.n_nodes, shape.n_layers
        for (j, a, b), value in final_demand.items():
            if not (0 <= j < n and 0 <= a < n_layers and 0 <= b < n_layers):
                raise ValidationError(
                    f"period {label}: final demand key ({j}, {a}, {b}) out of range"
                )
            value = float(value)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(
                    f"period {label}: final demand ({j}, {a}, {b}) must be finite and >= 0"
                )
            if value > 0:
                demand[(j, a, b)] = value

        self.intermediate_use = u
        self.total_output = o
        self.energy_consumption = consumption
        self.final_demand = demand

    def consumption_for(self, source: SourceClass) -> np.ndarray:
        """Total consumption vector over the carriers of one source class."""
        total = np.zeros(self.shape.supra_dim)
        for carrier in source.carriers:
            vec = self.energy_consumption.get(carrier)
            if vec is not None:
                total += vec
        return total

    def __repr__(self) -> str:
        s = self.shape
        return f"MrioPeriod({self.label}, N={s.n_nodes}, L={s.n_layers})"


@dataclass(frozen=True)
class InputCoefficients:
    """Sparse input-coefficient matrix A with a_hk = u_hk / o_k."""

    matrix: sparse.csr_array
    period_label: int | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def input_coefficients(period: MrioPeriod) -> InputCoefficients:
    """Column-normalize intermediate use by total output (0/0 treated as 0)."""
    o = period.total_output
    inv = np.zeros_like(o)
    np.divide(1.0, o, out=inv, where=o > 0)
    a = period.intermediate_use @ sparse.diags_array(inv, format="csr")
    a = sparse.csr_array(a)
    a.eliminate_zeros()
    return InputCoefficients(matrix=a, period_label=period.label)


def spectral_radius_estimate(matrix, iters: int = 200) -> float:
    """Power-iteration estimate of the spectral radius of a nonnegative matrix.

    Iterates on (I + A), whose dominant eigenvalue is 1 + rho(A) for
    nonnegative A regardless of periodicity; deterministic uniform start.
    """
    m = sparse.csr_array(matrix, dtype=np.float64)
    dim = m.shape[0]
    if m.nnz == 0:
        return 0.0
    x = np.full(dim, 1.0 / dim)
    ratio = 1.0
    for _ in range(iters):
        y = x + m @ x
        total = y.sum()
        if total <= 0 or not np.isfinite(total):
            return 0.0
        ratio = total
        x = y / total
    return float(ratio - 1.0)


def leontief_apply(
    coeffs: InputCoefficients,
    rhs,
    transpose: bool = False,
    tol: float = 1e-10,
    max_iter: int = 10_000,
):
    """Solve the total-requirements system (I - A) x = v, or (I - A^T) x = v.

    Parameters
    ----------
    coeffs : InputCoefficients
        Coefficient matrix A; the solve requires rho(A) < 1.
    rhs : length-M vector or (M, k) array
        Right-hand side(s); multiple columns are solved together.
    transpose : bool
        Solve against A^T instead of A. The transposed direction applies the
        requirements matrix on the consumption side (x = L^T v), the plain
        direction on the demand side (x = L v).
    tol, max_iter
        The stationary iteration x <- v + A x stops once the residual
        1-norm of every column is <= tol * (1 + ||v||_1); it is capped at
        ``max_iter`` steps.

    Raises
    ------
    NonProductiveEconomyError
        If the iteration fails and the spectral radius estimate is >= 1.
    ConvergenceError
        If the cap is reached while the system still looks productive.
    """
    a = coeffs.matrix.T.tocsr() if transpose else coeffs.matrix
    v = np.asarray(rhs, dtype=np.float64)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    if v.shape[0] != coeffs.dim:
        raise ValidationError(f"rhs has {v.shape[0]} rows, expected {coeffs.dim}")

    v_norm = np.abs(v).sum(axis=0)
    threshold = tol * (1.0 + v_norm)
    x = v.copy()
    ax = a @ x
    residuals: list[float] = []
    for _ in range(max_iter):
        x_new = v + ax
        ax_new = a @ x_new
        r = v + ax_new - x_new
        r_norm = np.abs(r).sum(axis=0)
        residuals.append(float(r_norm.max()))
        if np.all(r_norm <= threshold):
            return x_new[:, 0] if squeeze else x_new
        if not np.all(np.isfinite(r_norm)) or np.any(r_norm > 1e12 * (1.0 + v_norm)):
            break
        x, ax = x_new, ax_new

    rho = spectral_radius_estimate(coeffs.matrix)
    where = "" if coeffs.period_label is None else f" in period {coeffs.period_label}"
    if rho >= 1.0 - 1e-6:
        raise NonProductiveEconomyError(
            f"input coefficients{where} have spectral radius ~{rho:.6f} >= 1; "
            "the economy is not productive",
            period=coeffs.period_label,
        )
    last = f"{residuals[-1]:.3e}" if residuals else "n/a"
    raise ConvergenceError(
        f"total-requirements solve{where} did not reach tolerance {tol} in "
        f"{max_iter} iterations (last residual {last})",
        residuals=residuals[-10:],
    )


@dataclass(frozen=True)
class EmbodiedIntensity:
    """Energy embodied per unit of final output, for one source class.

    ``by_sector[i, k]`` is the consumption of sector i (summed over all the
    economies where i consumes) propagated into the final output of the
    receiving pair k = (economy, sector). ``vector`` aggregates the sending
    sectors into a single length-M intensity.
    """

    by_sector: np.ndarray
    source: SourceClass

    @property
    def vector(self) -> np.ndarray:
        return self.by_sector.sum(axis=0)


def embodied_intensity(
    period: MrioPeriod,
    source: SourceClass,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> EmbodiedIntensity:
    """Propagate per-sector consumption through the total-requirements matrix.

    One multi-column transposed solve per source class: column i of the
    right-hand side is the class consumption masked to sector i's positions,
    so row i of the result keeps the sending sector resolved.
    """
    n = period.shape.n_nodes
    dim = period.shape.supra_dim
    c = period.consumption_for(source)
    if not c.any():
        return EmbodiedIntensity(by_sector=np.zeros((n, dim)), source=source)
    coeffs = input_coefficients(period)
    rhs = np.zeros((dim, n))
    sector_of = np.arange(dim) % n
    rhs[np.arange(dim), sector_of] = c
    solved = leontief_apply(coeffs, rhs, transpose=True, tol=tol, max_iter=max_iter)
    return EmbodiedIntensity(by_sector=np.ascontiguousarray(solved.T), source=source)


def embodied_flow_matrix(
    period: MrioPeriod,
    source: SourceClass,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> SupraAdjacency:
    """Assemble the supra-adjacency of embodied energy flows for one period.

    The arc from (sector i, economy a) to (sector j, economy b) weighs
    intensity(i -> (j, a)) * demand(j, a, b); zero products are not stored.
    """
    n = period.shape.n_nodes
    shape = period.shape
    intensity = embodied_intensity(period, source, tol=tol, max_iter=max_iter)
    demand = period.final_demand
    if not demand or not intensity.by_sector.any():
        return SupraAdjacency.empty(shape)

    bracket = intensity.by_sector
    sectors = np.arange(n)
    rows, cols, vals = [], [], []
    for (j, a, b), value in demand.items():
        q = bracket[:, a * n + j] * value
        keep = q > 0
        if not keep.any():
            continue
        rows.append(a * n + sectors[keep])
        cols.append(np.full(int(keep.sum()), b * n + j))
        vals.append(q[keep])
    if not rows:
        return SupraAdjacency.empty(shape)
    m = sparse.coo_array(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(shape.supra_dim, shape.supra_dim),
    )
    return SupraAdjacency(shape, m)


def build_temporal_network(
    periods: Sequence[MrioPeriod] | Iterable[MrioPeriod],
    source: SourceClass,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> TemporalMultilayerNetwork:
    """Build one supra-adjacency per period, ordered by period label."""
    period_list = sorted(periods, key=lambda p: p.label)
    if not period_list:
        raise ValidationError("no periods to build from")
    base = period_list[0].shape
    for p in period_list:
        if (p.shape.n_nodes, p.shape.n_layers) != (base.n_nodes, base.n_layers):
            raise ValidationError(
                f"period {p.label} has shape {p.shape}, expected (N={base.n_nodes}, "
                f"L={base.n_layers})"
            )
    built = [
        (p.label, embodied_flow_matrix(p, source, tol=tol, max_iter=max_iter))
        for p in period_list
    ]
    return TemporalMultilayerNetwork(built)
