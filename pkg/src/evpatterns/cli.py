"""Command-line front end: reproducible, file-based pipeline runs.

Subcommands:
  generate   write a synthetic transaction CSV (plus ground truth) from archetypes
  matrices   ingest a transaction CSV and emit per-pool charging matrices
  rules      rule-based pattern signatures and groups over existing matrices
  cluster    hierarchical clustering: dendrogram, assignments, representatives, heatmaps
  sweep      the (o, p) parameter sweep report over existing matrices

Every command writes a manifest.json capturing tool version, configuration,
and SHA-256 digests of inputs and outputs; reruns with identical inputs and
configuration produce byte-identical artifacts. Exit codes: 0 success,
1 usage/config error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from . import __version__
from . import ingest, preprocess, synth
from .dissim import DissimParams, distance_matrix, write_distance_csv, write_params_sidecar
from .errors import ConfigError, DataError
from .hac import (
    DEFAULT_SWEEP_PARAMS,
    agglomerate,
    cluster_representative_mean,
    cut,
    medoid,
    sweep,
    write_assignments_csv,
    write_dendrogram_json,
    write_sweep_csv,
)
from .heatmap import write_heatmap_svg
from .matrix import (
    ChargingMatrix,
    build_matrix,
    read_matrix_json,
    value_frequency_report,
    write_matrix_json,
    write_nonzero_cells_csv,
    write_value_frequency_csv,
)
from .rules import (
    DEFAULT_THETA,
    RuleConfig,
    group_by_signature,
    load_band_scheme,
    signature,
    top_k_groups,
    write_band_scheme,
    write_groups_csv,
    write_signatures_csv,
)


@dataclass
class RunConfig:
    """Resolved parameters of one CLI run (defaults mirror the analysis defaults)."""

    input: str | None = None
    out: str = "out"
    period_start: date | None = None
    period_end: date | None = None
    merge_radius: float = preprocess.DEFAULT_MERGE_RADIUS_M
    min_transactions: int = preprocess.DEFAULT_MIN_TRANSACTIONS
    max_duration_hours: float = preprocess.DEFAULT_MAX_DURATION_HOURS
    bands: str | None = None
    theta: float = DEFAULT_THETA
    theta_grid: str | None = None
    o: float = 1.0
    p: float = 2 / 3
    k: int = 10
    sweep: bool = False
    seed: int = 0
    stations_per_archetype: int = 20
    tx_per_station: int = 200
    extra: dict = field(default_factory=dict)

    def as_manifest_dict(self) -> dict:
        # The output directory is deliberately omitted: artifacts must not
        # depend on where they are written.
        d = {
            "input": self.input,
            "period_start": self.period_start.isoformat() if self.period_start else None,
            "period_end": self.period_end.isoformat() if self.period_end else None,
            "merge_radius": self.merge_radius,
            "min_transactions": self.min_transactions,
            "max_duration_hours": self.max_duration_hours,
            "bands": self.bands,
            "theta": self.theta,
            "theta_grid": self.theta_grid,
            "o": self.o,
            "p": self.p,
            "k": self.k,
            "sweep": self.sweep,
            "seed": self.seed,
            "stations_per_archetype": self.stations_per_archetype,
            "tx_per_station": self.tx_per_station,
        }
        d.update(self.extra)
        return d


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: Path, command: str, config: RunConfig, inputs: list[Path]) -> None:
    """Record version, config, and digests of inputs and all written artifacts."""
    outputs = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            outputs[path.relative_to(out_dir).as_posix()] = _sha256(path)
    payload = {
        "tool": "evpatterns",
        "version": __version__,
        "command": command,
        "config": config.as_manifest_dict(),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


_SAFE_NAME = re.compile(r"[^A-Za-z0-9._-]+")


def _safe_filename(name: str, taken: set[str]) -> str:
    base = _SAFE_NAME.sub("_", name) or "pool"
    candidate, suffix = base, 2
    while candidate in taken:
        candidate = f"{base}-{suffix}"
        suffix += 1
    taken.add(candidate)
    return candidate


def _read_transactions(config: RunConfig) -> ingest.ParseResult:
    if not config.input:
        raise ConfigError("--input is required")
    try:
        result = ingest.parse_transactions(config.input)
    except OSError as exc:
        raise DataError(f"cannot read input {config.input}: {exc}") from exc
    if config.period_start and config.period_end:
        window = ingest.PeriodFilter(config.period_start, config.period_end)
        result.transactions = ingest.filter_period(result.transactions, window)
    return result


def _matrix_files(config: RunConfig) -> list[Path]:
    if not config.input:
        raise ConfigError("--input is required")
    root = Path(config.input)
    matrices_dir = root / "matrices" if (root / "matrices").is_dir() else root
    if not matrices_dir.is_dir():
        raise DataError(f"no matrices directory at {config.input}")
    return sorted(matrices_dir.glob("*.json"))


def _load_matrices(config: RunConfig) -> tuple[list[tuple[str, ChargingMatrix]], list[Path]]:
    """Load pool matrices from a matrices step's output directory."""
    files = _matrix_files(config)
    labeled = []
    for path in files:
        try:
            labeled.append(read_matrix_json(path))
        except (KeyError, ValueError) as exc:
            raise DataError(f"invalid matrix file {path}: {exc}") from exc
    if not labeled:
        raise DataError(f"no matrix files found under {config.input}")
    labeled.sort(key=lambda item: item[0])
    return labeled, files


def _rule_config(config: RunConfig, theta: float | None = None) -> RuleConfig:
    scheme = load_band_scheme(config.bands) if config.bands else None
    if scheme is None:
        return RuleConfig(theta=theta if theta is not None else config.theta)
    return RuleConfig(scheme=scheme, theta=theta if theta is not None else config.theta)


def _theta_values(grid_text: str) -> list[float]:
    """Parse a theta grid: either comma-separated values or start:stop:step."""
    try:
        if ":" in grid_text:
            start_s, stop_s, step_s = grid_text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError("grid must have step > 0 and stop >= start")
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(v) for v in grid_text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --theta-grid {grid_text!r}: {exc}") from exc


def cmd_generate(config: RunConfig) -> None:
    archetypes = synth.load_archetypes(config.input) if config.input else synth.DEFAULT_ARCHETYPES
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    transactions, truth = synth.generate_fleet(
        archetypes,
        stations_per_archetype=config.stations_per_archetype,
        tx_per_station=config.tx_per_station,
        seed=config.seed,
    )
    ingest.write_transactions(transactions, out / "transactions.csv")
    synth.write_ground_truth(truth, out / "ground_truth.csv")
    synth.write_archetypes(archetypes, out / "archetypes.json")

    inputs = [Path(config.input)] if config.input else []
    write_manifest(out, "generate", config, inputs)
    print(f"wrote {len(transactions)} transactions for {len(truth)} stations to {out}")


def cmd_matrices(config: RunConfig) -> None:
    result = _read_transactions(config)
    pools = preprocess.prepare_pools(
        result.transactions,
        merge_radius=config.merge_radius,
        min_count=config.min_transactions,
        max_duration_hours=config.max_duration_hours,
    )
    if not pools:
        raise DataError("zero surviving pools")

    out = Path(config.out)
    matrices_dir = out / "matrices"
    matrices_dir.mkdir(parents=True, exist_ok=True)

    labeled = [(pool.pool_id, build_matrix(pool.transactions)) for pool in pools]
    taken: set[str] = set()
    for pool_id, m in labeled:
        write_matrix_json(pool_id, m, matrices_dir / f"{_safe_filename(pool_id, taken)}.json")

    preprocess.write_pool_map(pools, out / "pools.csv")
    ingest.write_rejections(result.rejections, out / "rejections.csv")
    write_nonzero_cells_csv(labeled, out / "matrix_cells.csv")
    write_value_frequency_csv(value_frequency_report(m for _, m in labeled), out / "value_frequencies.csv")

    write_manifest(out, "matrices", config, [Path(config.input)])
    print(f"wrote {len(labeled)} charging matrices to {matrices_dir}")


def cmd_rules(config: RunConfig) -> None:
    labeled, matrix_files = _load_matrices(config)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    cfg = _rule_config(config)
    write_band_scheme(cfg.scheme, out / "band_scheme.json")
    signatures = [(pool_id, signature(m, cfg)) for pool_id, m in labeled]
    groups = group_by_signature(labeled, cfg)
    write_signatures_csv(signatures, out / "signatures.csv")
    write_groups_csv(groups, out / "groups.csv")
    with open(out / "top_groups.csv", "w", encoding="utf-8", newline="") as stream:
        stream.write("signature,size\n")
        for sig, size in top_k_groups(groups, config.k):
            stream.write(f"{sig.bitstring()},{size}\n")

    if config.theta_grid:
        for theta in _theta_values(config.theta_grid):
            grid_cfg = _rule_config(config, theta=theta)
            write_groups_csv(group_by_signature(labeled, grid_cfg), out / f"groups_theta_{theta:.4f}.csv")

    inputs = list(matrix_files)
    if config.bands:
        inputs.append(Path(config.bands))
    write_manifest(out, "rules", config, inputs)
    print(f"grouped {len(labeled)} pools into {len(groups)} patterns (theta={cfg.theta})")


def cmd_cluster(config: RunConfig) -> None:
    labeled, matrix_files = _load_matrices(config)
    if len(labeled) < 2:
        raise DataError("clustering needs at least 2 matrices")
    labels = [pool_id for pool_id, _ in labeled]
    matrices = [m for _, m in labeled]

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    params = DissimParams(config.o, config.p)
    D = distance_matrix(matrices, params, labels)
    write_distance_csv(D, out / "distances.csv")
    write_params_sidecar(params, out / "distances_params.json")

    dendrogram = agglomerate(D)
    write_dendrogram_json(dendrogram, out / "dendrogram.json")

    k = min(config.k, D.n)
    assignment = cut(dendrogram, k)
    write_assignments_csv(labels, assignment, out / "assignments.csv")

    for cluster_index, members in enumerate(assignment.clusters()):
        mean_matrix = cluster_representative_mean([matrices[i] for i in members])
        stem = f"cluster_{cluster_index:02d}"
        write_matrix_json(f"{stem}_mean", mean_matrix, out / f"{stem}_mean.json")
        write_heatmap_svg(
            mean_matrix,
            f"cluster {cluster_index} mean ({len(members)} pools)",
            out / f"{stem}_mean.svg",
        )
        medoid_leaf = medoid(members, D)
        write_matrix_json(labels[medoid_leaf], matrices[medoid_leaf], out / f"{stem}_medoid.json")

    if config.sweep:
        write_sweep_csv(sweep(matrices, DEFAULT_SWEEP_PARAMS, k=k, labels=labels), out / "sweep.csv")

    write_manifest(out, "cluster", config, list(matrix_files))
    print(f"clustered {len(labels)} pools into {k} clusters (o={params.o}, p={params.p})")


def cmd_sweep(config: RunConfig) -> None:
    labeled, matrix_files = _load_matrices(config)
    if len(labeled) < 2:
        raise DataError("sweep needs at least 2 matrices")
    labels = [pool_id for pool_id, _ in labeled]
    matrices = [m for _, m in labeled]
    k = min(config.k, len(matrices))

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(sweep(matrices, DEFAULT_SWEEP_PARAMS, k=k, labels=labels), out / "sweep.csv")

    write_manifest(out, "sweep", config, list(matrix_files))
    print(f"swept {len(DEFAULT_SWEEP_PARAMS)} parameter sets over {len(labels)} pools at k={k}")


class _Parser(argparse.ArgumentParser):
    # Spec contract: usage errors exit 1 (argparse defaults to 2).
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _ratio(text: str) -> float:
    """Float argument that also accepts fractions such as 2/3."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evpatterns", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"evpatterns {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, input_help: str) -> None:
        p.add_argument("--input", help=input_help)
        p.add_argument("--out", default="out", help="output directory (default: out)")

    g = sub.add_parser("generate", help="write a synthetic transaction CSV from archetypes")
    add_common(g, "archetype JSON file (default: built-in work/home/errand archetypes)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--stations-per-archetype", type=int, default=20)
    g.add_argument("--tx-per-station", type=int, default=200)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("matrices", help="build per-pool charging matrices from a transaction CSV")
    add_common(m, "transaction CSV")
    m.add_argument("--period-start", type=date.fromisoformat, metavar="YYYY-MM-DD")
    m.add_argument("--period-end", type=date.fromisoformat, metavar="YYYY-MM-DD")
    m.add_argument("--merge-radius", type=float, default=preprocess.DEFAULT_MERGE_RADIUS_M, help="meters")
    m.add_argument("--min-transactions", type=int, default=preprocess.DEFAULT_MIN_TRANSACTIONS)
    m.add_argument("--max-duration-hours", type=float, default=preprocess.DEFAULT_MAX_DURATION_HOURS)
    m.set_defaults(func=cmd_matrices)

    r = sub.add_parser("rules", help="rule-based pattern signatures over existing matrices")
    add_common(r, "matrices directory (or a matrices-step output directory)")
    r.add_argument("--bands", help="band scheme JSON file (default: built-in scheme)")
    r.add_argument("--theta", type=float, default=DEFAULT_THETA)
    r.add_argument("--theta-grid", help="sweep grid: START:STOP:STEP or comma-separated values")
    r.add_argument("--k", type=int, default=10, help="rows in the top-groups table")
    r.set_defaults(func=cmd_rules)

    c = sub.add_parser("cluster", help="hierarchical clustering over existing matrices")
    add_common(c, "matrices directory (or a matrices-step output directory)")
    c.add_argument("--o", type=_ratio, default=1.0, help="outer root (>= 1)")
    c.add_argument("--p", type=_ratio, default=2 / 3, help="inner exponent (> 0); fractions like 2/3 work")
    c.add_argument("--k", type=int, default=10, help="number of clusters to cut")
    c.add_argument("--sweep", action="store_true", help="also write the (o, p) sweep report")
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("sweep", help="the 8-configuration (o, p) sweep report")
    add_common(s, "matrices directory (or a matrices-step output directory)")
    s.add_argument("--k", type=int, default=10)
    s.set_defaults(func=cmd_sweep)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    for name in vars(config):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    if (config.period_start is None) != (config.period_end is None):
        raise ConfigError("--period-start and --period-end must be given together")
    if config.period_start is not None and config.period_start >= config.period_end:
        raise ConfigError("--period-start must precede --period-end")
    if config.merge_radius <= 0:
        raise ConfigError("--merge-radius must be positive")
    if config.min_transactions < 1:
        raise ConfigError("--min-transactions must be >= 1")
    if config.max_duration_hours <= 0:
        raise ConfigError("--max-duration-hours must be positive")
    if config.k < 1:
        raise ConfigError("--k must be >= 1")
    if config.stations_per_archetype < 1 or config.tx_per_station < 1:
        raise ConfigError("station and transaction counts must be >= 1")
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        args.func(config)
    except ConfigError as exc:
        print(f"evpatterns: config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"evpatterns: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
