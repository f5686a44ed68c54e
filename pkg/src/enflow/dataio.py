"""Dataset ingestion, synthetic data, consumption analytics and result files.

File contracts (CSV, UTF-8, header row, '.' decimal separator):

* transactions.csv   year,src_country,src_sector,dst_country,dst_sector,value
* outputs.csv        year,country,sector,total_output
* energy.csv         year,country,sector,source,value
* final_demand.csv   year,src_country,sector,dst_country,value
* sectors.csv        code,name
* countries.csv      code,name

``source`` must be one of coal, natural_gas, petroleum, nuclear,
biomass_waste, hydro, other_renewable. A manifest (JSON) names the data
files, an optional inclusive year range, the code lists and the units.

Loading is strict: unknown codes, duplicate keys, negative or non-finite
values and column use exceeding output are reported with file and line.
Saving writes canonical files (sorted rows, shortest round-trip float
formatting), so load -> save is byte-stable on canonical data.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .centrality import MdHitsScores, RankingTable, RankingRow
from .errors import DataFormatError, ValidationError
from .flowcrit import ArcCriticalityReport, ArcRemovalRow
from .leontief import ENERGY_SOURCES, MrioPeriod, SourceClass, input_coefficients, spectral_radius_estimate
from .multinet import EntityCodes, NetworkShape, SupraAdjacency, TemporalMultilayerNetwork

__all__ = [
    "CodeBook",
    "DatasetManifest",
    "MrioDataset",
    "SyntheticSpec",
    "ConsumptionSummary",
    "bundled_codebook",
    "load_code_list",
    "load_dataset",
    "save_dataset",
    "generate_synthetic",
    "consumption_summary",
    "export_results",
    "import_results",
    "save_network",
    "load_network",
    "write_csv",
    "DEFAULT_UNITS",
    "DEFAULT_SOURCE_MIX",
]

DEFAULT_UNITS = {"monetary": "kUSD", "energy": "TJ"}

DEFAULT_SOURCE_MIX = {
    "coal": 1.0,
    "natural_gas": 0.8,
    "petroleum": 0.9,
    "nuclear": 0.3,
    "biomass_waste": 0.4,
    "hydro": 0.5,
    "other_renewable": 0.2,
}

_SCHEMAS = {
    "transactions": ["year", "src_country", "src_sector", "dst_country", "dst_sector", "value"],
    "outputs": ["year", "country", "sector", "total_output"],
    "energy": ["year", "country", "sector", "source", "value"],
    "final_demand": ["year", "src_country", "sector", "dst_country", "value"],
    "codes": ["code", "name"],
}


def _fmt(value: float) -> str:
    """Shortest decimal string that round-trips the float exactly."""
    return repr(float(value))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Code lists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CodeBook:
    """Sector and country code lists with display names, in file order."""

    sectors: tuple[tuple[str, str], ...]
    countries: tuple[tuple[str, str], ...]

    @property
    def sector_codes(self) -> tuple[str, ...]:
        return tuple(code for code, _ in self.sectors)

    @property
    def country_codes(self) -> tuple[str, ...]:
        return tuple(code for code, _ in self.countries)

    @property
    def entity_codes(self) -> EntityCodes:
        return EntityCodes(self.sector_codes, self.country_codes)

    def truncated(self, n_sectors: int, n_countries: int) -> "CodeBook":
        if n_sectors > len(self.sectors) or n_countries > len(self.countries):
            raise ValidationError(
                f"cannot truncate code book of ({len(self.sectors)}, {len(self.countries)}) "
                f"to ({n_sectors}, {n_countries})"
            )
        return CodeBook(self.sectors[:n_sectors], self.countries[:n_countries])


def load_code_list(path: Path) -> tuple[tuple[str, str], ...]:
    """Read a code,name CSV; codes must be unique and nonempty."""
    entries: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _SCHEMAS["codes"]:
            raise DataFormatError(
                f"expected header {','.join(_SCHEMAS['codes'])}, got "
                f"{','.join(reader.fieldnames or [])}",
                path=str(path),
                line=1,
            )
        for row in reader:
            code = (row["code"] or "").strip()
            if not code:
                raise DataFormatError("empty code", path=str(path), line=reader.line_num)
            if code in seen:
                raise DataFormatError(
                    f"duplicate code {code!r}", path=str(path), line=reader.line_num
                )
            seen.add(code)
            entries.append((code, row["name"] or ""))
    if not entries:
        raise DataFormatError("code list is empty", path=str(path))
    return tuple(entries)


def bundled_codebook() -> CodeBook:
    """The built-in 26-sector / 189-country code lists."""
    base = resources.files("enflow") / "data"
    with resources.as_file(base / "sectors.csv") as p:
        sectors = load_code_list(p)
    with resources.as_file(base / "countries.csv") as p:
        countries = load_code_list(p)
    return CodeBook(sectors=sectors, countries=countries)


# ---------------------------------------------------------------------------
# Manifest and dataset loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetManifest:
    """Resolved paths and options describing one on-disk dataset."""

    transactions: Path
    outputs: Path
    energy: Path
    final_demand: Path
    sectors: Path | None = None
    countries: Path | None = None
    years: tuple[int, int] | None = None
    units: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_UNITS))

    @classmethod
    def from_json(cls, path: Path | str) -> "DatasetManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON: {exc}", path=str(path)) from exc
        base = path.parent
        required = ["transactions", "outputs", "energy", "final_demand"]
        missing = [key for key in required if key not in raw]
        if missing:
            raise ValidationError(f"manifest {path} is missing keys: {missing}")

        def resolve(key: str) -> Path | None:
            if raw.get(key) is None:
                return None
            p = base / raw[key]
            if not p.exists():
                raise ValidationError(f"manifest {path}: file for {key!r} not found: {p}")
            return p

        years = raw.get("years")
        if years is not None:
            if (
                not isinstance(years, (list, tuple))
                or len(years) != 2
                or not all(isinstance(y, int) for y in years)
                or years[0] > years[1]
            ):
                raise ValidationError(
                    f"manifest {path}: 'years' must be [first, last] with first <= last"
                )
            years = (years[0], years[1])
        units = dict(DEFAULT_UNITS)
        units.update(raw.get("units") or {})
        return cls(
            transactions=resolve("transactions"),
            outputs=resolve("outputs"),
            energy=resolve("energy"),
            final_demand=resolve("final_demand"),
            sectors=resolve("sectors"),
            countries=resolve("countries"),
            years=years,
            units=units,
        )

    def codebook(self) -> CodeBook:
        if self.sectors is None or self.countries is None:
            bundled = bundled_codebook()
        sectors = load_code_list(self.sectors) if self.sectors else bundled.sectors
        countries = load_code_list(self.countries) if self.countries else bundled.countries
        return CodeBook(sectors=sectors, countries=countries)


@dataclass(frozen=True)
class MrioDataset:
    """Validated per-period accounts plus the code universe they live in."""

    periods: tuple[MrioPeriod, ...]
    codebook: CodeBook
    units: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_UNITS))

    @property
    def codes(self) -> EntityCodes:
        return self.codebook.entity_codes

    @property
    def shape(self) -> NetworkShape:
        base = self.periods[0].shape
        return NetworkShape(base.n_nodes, base.n_layers, len(self.periods))

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(p.label for p in self.periods)


class _Parser:
    """Shared strict-parse helpers carrying file/line context."""

    def __init__(self, path: Path, kind: str):
        self.path = path
        self.fh = open(path, newline="", encoding="utf-8")
        self.reader = csv.DictReader(self.fh)
        expected = _SCHEMAS[kind]
        if self.reader.fieldnames != expected:
            self.fh.close()
            raise DataFormatError(
                f"expected header {','.join(expected)}, got "
                f"{','.join(self.reader.fieldnames or [])}",
                path=str(path),
                line=1,
            )

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.fh.close()
        return False

    def __iter__(self):
        return iter(self.reader)

    @property
    def line(self) -> int:
        return self.reader.line_num

    def fail(self, message: str):
        raise DataFormatError(message, path=str(self.path), line=self.line)

    def year(self, row) -> int:
        try:
            return int(row["year"])
        except (TypeError, ValueError):
            self.fail(f"invalid year {row['year']!r}")

    def value(self, row, column: str) -> float:
        try:
            v = float(row[column])
        except (TypeError, ValueError):
            self.fail(f"invalid number {row[column]!r} in column {column!r}")
        if not np.isfinite(v):
            self.fail(f"non-finite value in column {column!r}")
        if v < 0:
            self.fail(f"negative value {v} in column {column!r}")
        return v

    def code(self, row, column: str, table: Mapping[str, int], what: str) -> int:
        raw = (row[column] or "").strip()
        if raw not in table:
            self.fail(f"unknown {what} code {raw!r} in column {column!r}")
        return table[raw]


def load_dataset(manifest: DatasetManifest) -> MrioDataset:
    """Parse and validate one dataset into per-period accounts.

    Periods are the years present in the outputs file (restricted to the
    manifest's year range); rows in the other files must refer to those
    years. Every violation is reported with its file and line.
    """
    codebook = manifest.codebook()
    sector_idx = {code: i for i, code in enumerate(codebook.sector_codes)}
    country_idx = {code: i for i, code in enumerate(codebook.country_codes)}
    n = len(sector_idx)
    n_layers = len(country_idx)
    dim = n * n_layers
    lo, hi = manifest.years if manifest.years else (None, None)

    def in_range(year: int) -> bool:
        return (lo is None or year >= lo) and (hi is None or year <= hi)

    outputs: dict[int, np.ndarray] = {}
    output_lines: dict[tuple[int, int], int] = {}
    with _Parser(manifest.outputs, "outputs") as parser:
        for row in parser:
            year = parser.year(row)
            if not in_range(year):
                continue
            a = parser.code(row, "country", country_idx, "country")
            i = parser.code(row, "sector", sector_idx, "sector")
            value = parser.value(row, "total_output")
            key = (year, a * n + i)
            if key in output_lines:
                parser.fail(f"duplicate output for year {year}, {row['country']}/{row['sector']}")
            output_lines[key] = parser.line
            outputs.setdefault(year, np.zeros(dim))[key[1]] = value

    if not outputs:
        raise ValidationError(
            f"no periods found in {manifest.outputs}"
            + (f" within years {lo}..{hi}" if manifest.years else "")
        )
    years = sorted(outputs)

    use: dict[int, dict[tuple[int, int], float]] = {y: {} for y in years}
    with _Parser(manifest.transactions, "transactions") as parser:
        seen_tx: set[tuple[int, int, int]] = set()
        for row in parser:
            year = parser.year(row)
            if not in_range(year):
                continue
            if year not in use:
                parser.fail(f"year {year} has transactions but no outputs")
            a = parser.code(row, "src_country", country_idx, "country")
            i = parser.code(row, "src_sector", sector_idx, "sector")
            b = parser.code(row, "dst_country", country_idx, "country")
            j = parser.code(row, "dst_sector", sector_idx, "sector")
            value = parser.value(row, "value")
            key = (year, a * n + i, b * n + j)
            if key in seen_tx:
                parser.fail("duplicate transaction key")
            seen_tx.add(key)
            if value > 0:
                use[year][key[1:]] = value
        # Column use must not exceed the declared output.
        for year in years:
            col_use = np.zeros(dim)
            for (_, k), v in use[year].items():
                col_use[k] += v
            o = outputs[year]
            bad = np.flatnonzero(col_use > o * (1 + 1e-9) + 1e-12)
            if bad.size:
                k = int(bad[0])
                line = output_lines.get((year, k))
                raise DataFormatError(
                    f"year {year}: column {codebook.country_codes[k // n]}/"
                    f"{codebook.sector_codes[k % n]} uses {col_use[k]} "
                    f"but output is {o[k]}",
                    path=str(manifest.outputs),
                    line=line,
                )

    energy: dict[int, dict[str, np.ndarray]] = {y: {} for y in years}
    with _Parser(manifest.energy, "energy") as parser:
        seen: set[tuple[int, int, str]] = set()
        for row in parser:
            year = parser.year(row)
            if not in_range(year):
                continue
            if year not in energy:
                parser.fail(f"year {year} has energy rows but no outputs")
            a = parser.code(row, "country", country_idx, "country")
            i = parser.code(row, "sector", sector_idx, "sector")
            source = (row["source"] or "").strip()
            if source not in ENERGY_SOURCES:
                parser.fail(
                    f"unknown energy source {source!r}; expected one of "
                    f"{sorted(ENERGY_SOURCES)}"
                )
            value = parser.value(row, "value")
            key = (year, a * n + i, source)
            if key in seen:
                parser.fail("duplicate energy key")
            seen.add(key)
            if value > 0:
                energy[year].setdefault(source, np.zeros(dim))[a * n + i] = value

    demand: dict[int, dict[tuple[int, int, int], float]] = {y: {} for y in years}
    with _Parser(manifest.final_demand, "final_demand") as parser:
        seen_fd: set[tuple[int, int, int, int]] = set()
        for row in parser:
            year = parser.year(row)
            if not in_range(year):
                continue
            if year not in demand:
                parser.fail(f"year {year} has final demand but no outputs")
            a = parser.code(row, "src_country", country_idx, "country")
            j = parser.code(row, "sector", sector_idx, "sector")
            b = parser.code(row, "dst_country", country_idx, "country")
            value = parser.value(row, "value")
            if (year, j, a, b) in seen_fd:
                parser.fail("duplicate final demand key")
            seen_fd.add((year, j, a, b))
            if value > 0:
                demand[year][(j, a, b)] = value

    shape = NetworkShape(n, n_layers, 1)
    periods = []
    for year in years:
        entries = use[year]
        if entries:
            rows_, cols_, vals_ = zip(*((h, k, v) for (h, k), v in entries.items()))
            u = sparse.coo_array((vals_, (rows_, cols_)), shape=(dim, dim))
        else:
            u = sparse.csr_array((dim, dim))
        periods.append(
            MrioPeriod(
                label=year,
                shape=shape,
                intermediate_use=u,
                total_output=outputs[year],
                energy_consumption=energy[year],
                final_demand=demand[year],
            )
        )
    return MrioDataset(periods=tuple(periods), codebook=codebook, units=dict(manifest.units))


def save_dataset(dataset: MrioDataset, directory: Path | str) -> Path:
    """Write canonical dataset files plus a manifest; returns the manifest path.

    Rows are sorted, zero entries are omitted and floats use their shortest
    round-trip form, so a load/save cycle reproduces the files byte for byte.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    codebook = dataset.codebook
    n = len(codebook.sectors)
    ccodes = codebook.country_codes
    scodes = codebook.sector_codes

    write_csv(directory / "sectors.csv", _SCHEMAS["codes"], codebook.sectors)
    write_csv(directory / "countries.csv", _SCHEMAS["codes"], codebook.countries)

    def pair(h: int) -> tuple[str, str]:
        return ccodes[h // n], scodes[h % n]

    tx_rows = []
    out_rows = []
    energy_rows = []
    demand_rows = []
    for period in dataset.periods:
        year = period.label
        coo = period.intermediate_use.tocoo()
        for h, k, v in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())):
            sc, ss = pair(h)
            dc, ds = pair(k)
            tx_rows.append((year, sc, ss, dc, ds, _fmt(v)))
        for h in np.flatnonzero(period.total_output):
            c, s = pair(int(h))
            out_rows.append((year, c, s, _fmt(period.total_output[h])))
        for source in sorted(period.energy_consumption):
            vec = period.energy_consumption[source]
            for h in np.flatnonzero(vec):
                c, s = pair(int(h))
                energy_rows.append((year, c, s, source, _fmt(vec[h])))
        for (j, a, b), v in sorted(period.final_demand.items()):
            demand_rows.append((year, ccodes[a], scodes[j], ccodes[b], _fmt(v)))

    energy_rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    write_csv(directory / "transactions.csv", _SCHEMAS["transactions"], tx_rows)
    write_csv(directory / "outputs.csv", _SCHEMAS["outputs"], out_rows)
    write_csv(directory / "energy.csv", _SCHEMAS["energy"], energy_rows)
    write_csv(directory / "final_demand.csv", _SCHEMAS["final_demand"], demand_rows)

    manifest = {
        "transactions": "transactions.csv",
        "outputs": "outputs.csv",
        "energy": "energy.csv",
        "final_demand": "final_demand.csv",
        "sectors": "sectors.csv",
        "countries": "countries.csv",
        "years": [dataset.labels[0], dataset.labels[-1]],
        "units": dict(dataset.units),
    }
    manifest_path = directory / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return manifest_path


# ---------------------------------------------------------------------------
# Synthetic datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a random but fully valid dataset.

    The generated input coefficients have spectral radius <= rho_cap by
    columnwise construction, both source classes carry positive consumption,
    and the same seed always reproduces the same dataset.
    """

    shape: NetworkShape
    density: float = 0.3
    seed: int = 0
    rho_cap: float = 0.9
    source_mix: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SOURCE_MIX))
    start_year: int = 1990

    def __post_init__(self):
        if not 0 < self.density <= 1:
            raise ValidationError(f"density must be in (0, 1], got {self.density}")
        if not 0 < self.rho_cap < 1:
            raise ValidationError(f"rho_cap must be in (0, 1), got {self.rho_cap}")
        unknown = set(self.source_mix) - ENERGY_SOURCES
        if unknown:
            raise ValidationError(f"unknown energy sources in mix: {sorted(unknown)}")
        if any(w < 0 for w in self.source_mix.values()):
            raise ValidationError("source mix weights must be >= 0")
        for cls in (SourceClass.RENEWABLE, SourceClass.NONRENEWABLE):
            if not any(self.source_mix.get(c, 0) > 0 for c in cls.carriers):
                raise ValidationError(
                    f"source mix must give positive weight to at least one "
                    f"{cls.value} carrier"
                )

    @classmethod
    def from_json(cls, path: Path | str) -> "SyntheticSpec":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        shape = NetworkShape(
            raw.get("n_sectors", 4), raw.get("n_countries", 3), raw.get("n_periods", 2)
        )
        return cls(
            shape=shape,
            density=raw.get("density", 0.3),
            seed=raw.get("seed", 0),
            rho_cap=raw.get("rho_cap", 0.9),
            source_mix=raw.get("source_mix", dict(DEFAULT_SOURCE_MIX)),
            start_year=raw.get("start_year", 1990),
        )


def generate_synthetic(spec: SyntheticSpec) -> MrioDataset:
    """Draw a dataset from the spec; deterministic in the seed."""
    rng = np.random.default_rng(spec.seed)
    n, n_layers, n_periods = spec.shape.n_nodes, spec.shape.n_layers, spec.shape.n_periods
    dim = n * n_layers
    shape = NetworkShape(n, n_layers, 1)

    codebook = bundled_codebook()
    if n <= len(codebook.sectors) and n_layers <= len(codebook.countries):
        codebook = codebook.truncated(n, n_layers)
    else:
        codebook = CodeBook(
            sectors=tuple((f"S{i:03d}", f"Sector {i}") for i in range(n)),
            countries=tuple((f"C{i:03d}", f"Country {i}") for i in range(n_layers)),
        )

    mix = {c: w for c, w in spec.source_mix.items() if w > 0}
    periods = []
    for t in range(n_periods):
        u = rng.uniform(0.1, 1.0, (dim, dim)) * (rng.random((dim, dim)) < spec.density)
        col_use = u.sum(axis=0)
        scale = spec.rho_cap * rng.uniform(0.3, 1.0, dim)
        output = np.where(col_use > 0, col_use / scale, rng.uniform(0.5, 2.0, dim))

        consumption: dict[str, np.ndarray] = {}
        for carrier in sorted(mix):
            keep = rng.random(dim) < max(spec.density, 0.25)
            consumption[carrier] = mix[carrier] * rng.uniform(0.1, 1.0, dim) * keep
        for cls in (SourceClass.RENEWABLE, SourceClass.NONRENEWABLE):
            carriers = sorted(c for c in cls.carriers if c in mix)
            if not any(consumption[c].any() for c in carriers):
                consumption[carriers[0]][int(rng.integers(dim))] = mix[carriers[0]] * 0.5

        demand: dict[tuple[int, int, int], float] = {}
        keep = rng.random((n, n_layers, n_layers)) < spec.density
        values = rng.uniform(0.1, 2.0, (n, n_layers, n_layers))
        for j, a, b in zip(*np.nonzero(keep)):
            demand[(int(j), int(a), int(b))] = float(values[j, a, b])
        if not demand:
            demand[(0, 0, n_layers - 1)] = float(values[0, 0, n_layers - 1])

        periods.append(
            MrioPeriod(
                label=spec.start_year + t,
                shape=shape,
                intermediate_use=sparse.csr_array(u),
                total_output=output,
                energy_consumption=consumption,
                final_demand=demand,
            )
        )
    return MrioDataset(periods=tuple(periods), codebook=codebook, units=dict(DEFAULT_UNITS))


# ---------------------------------------------------------------------------
# Consumption analytics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsumptionSummary:
    """Energy consumption aggregates per period, entity and source class."""

    period_labels: tuple[int, ...]
    codes: EntityCodes
    values: Mapping[SourceClass, np.ndarray]  # (T, N*L) each, sector fastest

    def entity_values(self, source: SourceClass) -> np.ndarray:
        return self.values[source]

    def country_totals(self, source: SourceClass) -> np.ndarray:
        t = len(self.period_labels)
        return self.values[source].reshape(t, self.codes.n_layers, self.codes.n_nodes).sum(axis=2)

    def sector_totals(self, source: SourceClass) -> np.ndarray:
        t = len(self.period_labels)
        return self.values[source].reshape(t, self.codes.n_layers, self.codes.n_nodes).sum(axis=1)

    def world_series(self, source: SourceClass) -> np.ndarray:
        return self.values[source].sum(axis=1)

    def renewable_incidence(self, totals_of) -> np.ndarray:
        """Share of renewable consumption in the given aggregate (NaN where
        the total is zero). ``totals_of`` is one of the aggregate methods.
        """
        renewable = totals_of(SourceClass.RENEWABLE)
        total = totals_of(SourceClass.ALL)
        out = np.full_like(total, np.nan, dtype=np.float64)
        np.divide(renewable, total, out=out, where=total > 0)
        return out


def consumption_summary(dataset: MrioDataset) -> ConsumptionSummary:
    """Aggregate raw consumption by period, country, sector and source class."""
    t = len(dataset.periods)
    dim = dataset.periods[0].shape.supra_dim
    values = {cls: np.zeros((t, dim)) for cls in SourceClass}
    for row, period in enumerate(dataset.periods):
        for cls in SourceClass:
            values[cls][row] = period.consumption_for(cls)
    return ConsumptionSummary(
        period_labels=dataset.labels, codes=dataset.codes, values=values
    )


# ---------------------------------------------------------------------------
# Result serialization
# ---------------------------------------------------------------------------


def _score_sections(scores: MdHitsScores, codes, period_labels):
    sectors = list(codes.sector_codes) if codes else None
    countries = list(codes.country_codes) if codes else None
    periods = list(period_labels) if period_labels else None

    def labels(n, preferred):
        if preferred and len(preferred) == n:
            return [str(v) for v in preferred]
        return [str(i) for i in range(n)]

    return [
        ("node_hub", labels(len(scores.node_hub), sectors), scores.node_hub),
        ("node_authority", labels(len(scores.node_authority), sectors), scores.node_authority),
        ("layer_broadcast", labels(len(scores.layer_broadcast), countries), scores.layer_broadcast),
        ("layer_receive", labels(len(scores.layer_receive), countries), scores.layer_receive),
        ("time", labels(len(scores.time), periods), scores.time),
    ]


def export_results(
    obj,
    path: Path | str,
    fmt: str = "csv",
    *,
    codes: EntityCodes | None = None,
    period_labels: Sequence[int] | None = None,
    node_labels: Sequence[str] | None = None,
) -> Path:
    """Write a result object to ``path`` as csv or json.

    Supported objects: RankingTable, MdHitsScores, ArcCriticalityReport.
    JSON files are lossless and can be read back with :func:`import_results`;
    the CSV layouts are the plot-ready long formats.
    """
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ValidationError(f"format must be 'csv' or 'json', got {fmt!r}")

    if isinstance(obj, RankingTable):
        if fmt == "csv":
            write_csv(path, ["rank", "label", "score"], ((r.rank, r.label, _fmt(r.score)) for r in obj))
        else:
            payload = {
                "kind": "ranking",
                "rows": [{"rank": r.rank, "label": r.label, "score": r.score} for r in obj],
            }
            path.write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
        return path

    if isinstance(obj, MdHitsScores):
        sections = _score_sections(obj, codes, period_labels)
        if fmt == "csv":
            rows = []
            for component, labels, vector in sections:
                rows.extend(
                    (component, label, _fmt(v)) for label, v in zip(labels, vector.tolist())
                )
            write_csv(path, ["component", "label", "score"], rows)
        else:
            payload = {
                "kind": "md_hits_scores",
                "gamma": list(obj.gamma),
                "iterations": obj.iterations,
                "components": {
                    component: {"labels": labels, "scores": vector.tolist()}
                    for component, labels, vector in sections
                },
            }
            path.write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
        return path

    if isinstance(obj, ArcCriticalityReport):
        def label(node: int) -> str:
            if node_labels is not None and node < len(node_labels):
                return str(node_labels[node])
            return str(node)

        if fmt == "csv":
            rows = [
                (label(r.tail), label(r.head), _fmt(r.removed_total), _fmt(r.index), i + 1)
                for i, r in enumerate(obj.rows)
            ]
            write_csv(path, ["tail_code", "head_code", "removed_total", "index", "rank"], rows)
        else:
            payload = {
                "kind": "arc_criticality",
                "baseline_total": obj.baseline_total,
                "mode": obj.mode,
                "pair_count": obj.pair_count,
                "seed": obj.seed,
                "rows": [
                    {
                        "tail": r.tail,
                        "head": r.head,
                        "tail_label": label(r.tail),
                        "head_label": label(r.head),
                        "removed_total": r.removed_total,
                        "index": r.index,
                    }
                    for r in obj.rows
                ],
            }
            path.write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
        return path

    raise ValidationError(f"cannot export object of type {type(obj).__name__}")


def import_results(path: Path | str):
    """Read back a JSON file written by :func:`export_results`."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    kind = raw.get("kind")
    if kind == "ranking":
        return RankingTable(
            rows=tuple(
                RankingRow(rank=r["rank"], label=r["label"], score=r["score"])
                for r in raw["rows"]
            )
        )
    if kind == "md_hits_scores":
        comp = raw["components"]
        return MdHitsScores(
            node_hub=np.array(comp["node_hub"]["scores"]),
            node_authority=np.array(comp["node_authority"]["scores"]),
            layer_broadcast=np.array(comp["layer_broadcast"]["scores"]),
            layer_receive=np.array(comp["layer_receive"]["scores"]),
            time=np.array(comp["time"]["scores"]),
            gamma=tuple(raw["gamma"]),
            iterations=raw.get("iterations", 0),
        )
    if kind == "arc_criticality":
        return ArcCriticalityReport(
            baseline_total=raw["baseline_total"],
            rows=tuple(
                ArcRemovalRow(
                    tail=r["tail"],
                    head=r["head"],
                    removed_total=r["removed_total"],
                    index=r["index"],
                )
                for r in raw["rows"]
            ),
            mode=raw["mode"],
            pair_count=raw.get("pair_count"),
            seed=raw.get("seed"),
        )
    raise ValidationError(f"unrecognized result kind {kind!r} in {path}")


# ---------------------------------------------------------------------------
# Network artifacts
# ---------------------------------------------------------------------------


def save_network(
    net: TemporalMultilayerNetwork,
    codes: EntityCodes,
    source: SourceClass,
    directory: Path | str,
    units: Mapping[str, str] | None = None,
) -> Path:
    """Persist a built network as an arc-list CSV plus a shared meta file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    codes.check_shape(net.shape)
    n = net.shape.n_nodes
    rows = []
    for label, matrix in net.periods:
        r, c, v = matrix.entries()
        order = np.lexsort((c, r))
        for h, k, w in zip(r[order].tolist(), c[order].tolist(), v[order].tolist()):
            rows.append(
                (
                    label,
                    codes.country_codes[h // n],
                    codes.sector_codes[h % n],
                    codes.country_codes[k // n],
                    codes.sector_codes[k % n],
                    _fmt(w),
                )
            )
    path = directory / f"network_{source.value}.csv"
    write_csv(
        path,
        ["year", "src_country", "src_sector", "dst_country", "dst_sector", "weight"],
        rows,
    )

    meta_path = directory / "network_meta.json"
    fields = {
        "n_sectors": net.shape.n_nodes,
        "n_countries": net.shape.n_layers,
        "periods": list(net.labels),
        "sectors": list(codes.sector_codes),
        "countries": list(codes.country_codes),
        "units": dict(units or DEFAULT_UNITS),
    }
    sources = {source.value}
    if meta_path.exists():
        previous = json.loads(meta_path.read_text(encoding="utf-8"))
        # Accumulate sources only when the artifacts describe the same universe.
        if all(previous.get(k) == v for k, v in fields.items()):
            sources |= set(previous.get("sources", []))
    meta = dict(fields, sources=sorted(sources))
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", "utf-8")
    return path


def load_network(
    directory: Path | str, source: SourceClass
) -> tuple[TemporalMultilayerNetwork, EntityCodes]:
    """Read back a network artifact written by :func:`save_network`."""
    directory = Path(directory)
    meta_path = directory / "network_meta.json"
    if not meta_path.exists():
        raise ValidationError(f"no network artifacts found in {directory} (missing meta file)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    codes = EntityCodes(tuple(meta["sectors"]), tuple(meta["countries"]))
    n, n_layers = codes.n_nodes, codes.n_layers
    shape = NetworkShape(n, n_layers, 1)
    sector_idx = {code: i for i, code in enumerate(codes.sector_codes)}
    country_idx = {code: i for i, code in enumerate(codes.country_codes)}

    path = directory / f"network_{source.value}.csv"
    if not path.exists():
        raise ValidationError(
            f"network artifact for source {source.value!r} not found: {path}; "
            "run the build step first"
        )
    per_year: dict[int, list[tuple[int, int, float]]] = {int(y): [] for y in meta["periods"]}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            year = int(row["year"])
            if year not in per_year:
                raise DataFormatError(
                    f"year {year} not listed in network meta",
                    path=str(path),
                    line=reader.line_num,
                )
            h = country_idx[row["src_country"]] * n + sector_idx[row["src_sector"]]
            k = country_idx[row["dst_country"]] * n + sector_idx[row["dst_sector"]]
            per_year[year].append((h, k, float(row["weight"])))
    periods = [
        (year, SupraAdjacency.from_entries(shape, entries))
        for year, entries in sorted(per_year.items())
    ]
    return TemporalMultilayerNetwork(periods), codes


def dataset_spectral_radii(dataset: MrioDataset) -> dict[int, float]:
    """Power-iteration spectral radius estimate of each period's coefficients."""
    return {
        p.label: spectral_radius_estimate(input_coefficients(p).matrix)
        for p in dataset.periods
    }
