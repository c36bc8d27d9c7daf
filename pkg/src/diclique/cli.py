"""Command-line front end.

Four commands: ``generate`` (draw one graph and serialize it),
``coeffs`` (motif counts and coefficients of a graph file),
``experiment`` (Monte Carlo sweep against the limit formulas), and
``degree-compare`` (pooled degree pmf against its limiting law).

Exit codes: 0 success, 1 runtime failure (e.g. a kernel violation or a
failed cell), 2 configuration or parse error.  All outputs are
deterministic for a fixed seed and config, independent of thread count.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .config import ConfigError, RunConfig, load_config
from .estimators import compare_degree_law, run_experiment
from .generator import KernelViolationError, sample_bipartite
from .graphio import (
    GraphFormatError,
    read_bipartite,
    read_graph_file,
    write_bipartite,
    write_digraph,
)
from .motifs import motif_report
from .projection import Digraph, project
from .rng import MAX_SEED, TAG_EXPERIMENT, StreamRoot
from . import plots, reports
from .weights import draw_weight_sample

EXIT_RUNTIME = 1
EXIT_CONFIG = 2


@dataclass
class CliContext:
    seed: int | None
    threads: int
    out_dir: Path
    formats: tuple[str, ...]
    render_plots: bool


def _fail_config(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


def _fail_runtime(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_RUNTIME)


def _load(path: str) -> RunConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        _fail_config(str(exc))


def _write_csv(path: Path, header: list[str], rows: list[list[str]]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, document: dict):
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _emit(ctx: CliContext, stem: str, header: list[str], rows: list[list[str]],
          document: dict) -> list[Path]:
    written = []
    if "csv" in ctx.formats:
        path = ctx.out_dir / f"{stem}.csv"
        _write_csv(path, header, rows)
        written.append(path)
    if "json" in ctx.formats:
        path = ctx.out_dir / f"{stem}.json"
        _write_json(path, document)
        written.append(path)
    return written


@click.group()
@click.option("--seed", type=click.IntRange(0, MAX_SEED), default=None,
              help="Master seed; overrides the config's seed field.")
@click.option("--threads", type=click.IntRange(1, None), default=1, show_default=True,
              help="Worker threads for replicate execution.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True, help="Output directory.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "both"]),
              default="both", show_default=True, help="Report formats to write.")
@click.option("--no-plots", is_flag=True, help="Skip figure rendering.")
@click.pass_context
def main(ctx, seed, threads, out_dir, fmt, no_plots):
    """Random intersection digraphs: generation, motif analytics, and
    Monte Carlo validation against closed-form limits."""
    formats = ("csv", "json") if fmt == "both" else (fmt,)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx.obj = CliContext(seed=seed, threads=threads, out_dir=out_dir,
                         formats=formats, render_plots=not no_plots)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Model config (single parameter cell).")
@click.option("--from-bipartite", "bipartite_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Project an existing bipartite graph file instead of sampling.")
@click.pass_obj
def generate(ctx: CliContext, config_path, bipartite_path):
    """Draw one graph (or project a given bipartite file) and serialize it."""
    if (config_path is None) == (bipartite_path is None):
        _fail_config("generate needs exactly one of --config or --from-bipartite")

    if bipartite_path is not None:
        try:
            H = read_bipartite(bipartite_path)
        except GraphFormatError as exc:
            _fail_config(str(exc))
        D = project(H)
        digraph_path = ctx.out_dir / "digraph.txt"
        write_digraph(digraph_path, D)
        metadata = {
            "command": "generate",
            "source": str(bipartite_path),
            "n": H.n,
            "m": H.m,
            "edge_counts": {
                "demand": H.demand_edge_count,
                "supply": H.supply_edge_count,
                "digraph": D.edge_count,
            },
        }
        _write_json(ctx.out_dir / "metadata.json", metadata)
        click.echo(f"projected {bipartite_path}: n={H.n} m={H.m} edges={D.edge_count}")
        click.echo(f"wrote {digraph_path}")
        return

    config = _load(config_path)
    if len(config.cells) != 1:
        _fail_config("generate expects a single parameter cell, not a sweep")
    params = config.cells[0]
    seed = ctx.seed if ctx.seed is not None else (config.seed or 0)
    # Same stream layout as the first replicate of the first experiment
    # cell, so a generated graph can be cross-checked against experiment
    # internals.
    root = StreamRoot(seed, TAG_EXPERIMENT, 0, 0)
    weights = draw_weight_sample(config.node_config, config.z_dist,
                                 params.n, params.m, root)
    try:
        H = sample_bipartite(params, weights, config.kernel, root,
                             method=config.sampling_method)
    except KernelViolationError as exc:
        _fail_runtime(str(exc))
    D = project(H)

    bipartite_file = ctx.out_dir / "bipartite.txt"
    digraph_file = ctx.out_dir / "digraph.txt"
    write_bipartite(bipartite_file, H)
    write_digraph(digraph_file, D)
    metadata = {
        "command": "generate",
        "seed": seed,
        "params": reports.params_to_dict(params),
        "kernel": reports.kernel_to_dict(config.kernel),
        "weights": reports.weights_to_dict(config.node_config, config.z_dist),
        "sampling_method": config.sampling_method,
        "edge_counts": {
            "demand": H.demand_edge_count,
            "supply": H.supply_edge_count,
            "digraph": D.edge_count,
        },
    }
    _write_json(ctx.out_dir / "metadata.json", metadata)
    click.echo(f"generated n={params.n} m={params.m}: "
               f"demand={H.demand_edge_count} supply={H.supply_edge_count} "
               f"edges={D.edge_count}")
    click.echo(f"wrote {bipartite_file}")
    click.echo(f"wrote {digraph_file}")


@main.command()
@click.argument("graph_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def coeffs(ctx: CliContext, graph_path):
    """Motif counts and clustering coefficients of a graph file."""
    try:
        graph = read_graph_file(graph_path)
    except GraphFormatError as exc:
        _fail_config(str(exc))
    D = graph if isinstance(graph, Digraph) else project(graph)
    report = motif_report(D)
    header, rows = reports.coeffs_to_rows(D.n, D.edge_count, report)
    document = reports.coeffs_to_dict(D.n, D.edge_count, report, source=str(graph_path))
    written = _emit(ctx, "coeffs", header, rows, document)
    click.echo(f"n={D.n} edges={D.edge_count}")
    click.echo(f"dicc={reports.fmt_cell(report.dicc) or 'null'} "
               f"({report.diclique_ordered}/{report.open_ordered})")
    click.echo(f"trcc={reports.fmt_cell(report.trcc) or 'null'} "
               f"({report.transitive_ordered}/{report.path2_ordered})")
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def experiment(ctx: CliContext, config_path):
    """Run a Monte Carlo sweep and compare against limit values."""
    config = _load(config_path)
    spec = config.experiment_spec(seed_override=ctx.seed)
    result = run_experiment(spec, threads=ctx.threads)

    header, rows = reports.result_to_rows(result)
    document = reports.result_to_dict(result)
    written = _emit(ctx, "experiment", header, rows, document)
    if ctx.render_plots:
        written.extend(plots.save_experiment_figures(result, ctx.out_dir))

    for index, cell in enumerate(result.cells):
        if not cell.ok:
            click.echo(f"cell {index}: FAILED ({cell.failure})")
            continue
        bits = [f"cell {index}: n={cell.params.n} m={cell.params.m} "
                f"alpha={cell.params.alpha:.6g}"]
        if cell.dicc is not None:
            bits.append(f"dicc={reports.fmt_cell(cell.dicc.value) or 'null'}"
                        + (f" (limit {cell.dicc_reference:.6g})"
                           if cell.dicc_reference is not None else ""))
        if cell.trcc is not None:
            bits.append(f"trcc={reports.fmt_cell(cell.trcc.value) or 'null'}"
                        + (f" (limit {cell.trcc_reference:.6g})"
                           if cell.trcc_reference is not None else ""))
        click.echo(" ".join(bits))
    for path in written:
        click.echo(f"wrote {path}")
    if not result.all_ok:
        sys.exit(EXIT_RUNTIME)


@main.command("degree-compare")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def degree_compare(ctx: CliContext, config_path):
    """Compare a pooled empirical degree pmf to its limiting law."""
    config = _load(config_path)
    if config.degree is None:
        _fail_config("degree-compare needs a 'degree' block in the config")
    try:
        limit_params = config.limit_degree_params()
    except (ConfigError, ValueError) as exc:
        _fail_config(str(exc))
    spec = config.experiment_spec(seed_override=ctx.seed)
    try:
        result, comparison = compare_degree_law(
            spec, limit_params, threads=ctx.threads, r_max=config.degree.r_max
        )
    except RuntimeError as exc:
        _fail_runtime(str(exc))

    header, rows = reports.degree_to_rows(comparison)
    document = reports.degree_to_dict(
        comparison, limit_params, spec.cells[0], spec.master_seed, spec.replicates
    )
    written = _emit(ctx, "degree", header, rows, document)
    if ctx.render_plots:
        written.append(plots.save_degree_figure(comparison, ctx.out_dir))

    click.echo(f"direction={comparison.direction} regime={config.degree.regime}")
    click.echo(f"tv_distance={comparison.tv!r}")
    click.echo(f"zero_fraction={comparison.zero_fraction!r}")
    for path in written:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
