"""CLI interface for the missing-digit laboratory."""

import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import typer
from dotenv import load_dotenv
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis.exp_sums import double_quadratic_sum, prime_square_sum, r2_exp_sum
from src.analysis.laboratory import Laboratory
from src.contracts import LaboratoryProtocol
from src.data.cache import SummaryCache
from src.data.primes import prime_count
from src.errors import InvalidConfigError, LabError
from src.models.experiment import (
    DEFAULT_CONFIG_PATH,
    ExperimentConfig,
    ExperimentResult,
    LabConfig,
    Mode,
    parse_forbidden,
    parse_k_range,
)
from src.report.csv_export import export_csv, format_frame
from src.report.json_export import export_json
from src.report.markdown_gen import MarkdownReportGenerator

load_dotenv()

app = typer.Typer(
    name="digit-lab",
    help="Missing-digit laboratory - sums of two prime squares over digit-restricted integers",
)
primes_app = typer.Typer(help="Prime table smoke tests")
app.add_typer(primes_app, name="primes")

console = Console()
err_console = Console(stderr=True)

PREVIEW_ROWS = 20


def setup_logging(verbose: bool = False):
    """Configure logging."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def load_lab_config() -> LabConfig:
    return LabConfig.from_config(os.getenv("DIGIT_LAB_CONFIG", DEFAULT_CONFIG_PATH))


def default_output_dir(lab: LabConfig) -> str:
    return os.getenv("DIGIT_LAB_OUTPUT", lab.output_directory)


def fail(error: LabError) -> None:
    """Print the machine-readable error object and exit with its code."""
    err_console.print_json(json.dumps(error.to_dict(), ensure_ascii=False))
    raise typer.Exit(error.exit_code)


def print_result(result: ExperimentResult) -> None:
    """Render the primary table and the summary."""
    df = format_frame(result.table.head(PREVIEW_ROWS))
    table = Table(title=f"{result.config.mode.value} {result.config.digit_set()}")
    for column in df.columns:
        table.add_column(column, justify="right")
    for row in df.iter_rows():
        table.add_row(*(str(v) for v in row))
    console.print(table)
    if result.table.height > PREVIEW_ROWS:
        console.print(f"[dim]... {result.table.height - PREVIEW_ROWS} more rows in the CSV[/dim]")

    if result.summary:
        summary = Table(title="Summary")
        summary.add_column("Quantity", style="cyan")
        summary.add_column("Value", justify="right")
        for key, value in result.summary.items():
            summary.add_row(key, f"{value:.12g}" if isinstance(value, float) else str(value))
        console.print(summary)


PER_DIGIT_MODES = {Mode.BIAS_TABLE, Mode.SIEVE_CHECK, Mode.LOCALFACTORS}


def resolve_forbidden(mode: Mode, forbidden: Optional[str]) -> str:
    """Unset --forbidden means 7, except for modes that loop over every digit."""
    if forbidden is not None:
        return forbidden
    return "" if mode in PER_DIGIT_MODES else "7"


def execute(
    mode: Mode,
    g: int,
    forbidden: Optional[str],
    k: Optional[str],
    k_range: Optional[str],
    output_dir: Optional[str],
    workers: Optional[int],
    budget: Optional[int],
    seed: int,
    use_cache: bool,
    verbose: bool,
    params: Optional[dict] = None,
) -> None:
    """Build the configuration, run one mode, write every report."""
    setup_logging(verbose)
    try:
        lab = load_lab_config()
        config = ExperimentConfig(
            mode=mode,
            g=g,
            forbidden=parse_forbidden(resolve_forbidden(mode, forbidden)),
            k_values=parse_k_range(k_range or k or "4"),
            output_dir=output_dir or default_output_dir(lab),
            workers=workers if workers is not None else lab.workers,
            seed=seed,
            use_cache=use_cache,
            budget=budget,
            params={key: v for key, v in (params or {}).items() if v is not None},
        )
        cache = SummaryCache(lab.cache_directory) if use_cache else None
        laboratory: LaboratoryProtocol = Laboratory(lab_config=lab, cache=cache)

        console.print(f"\n[bold blue]Missing-digit laboratory[/bold blue]")
        console.print(f"Mode: [green]{mode.value}[/green] {config.digit_set()} k={config.k_values}\n")

        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
        ) as progress:
            task = progress.add_task("Starting...", total=None)

            def progress_callback(step: int, total: int, message: str):
                progress.update(task, description=f"[{step}/{total}] {message}")

            result = laboratory.run(config, progress_callback=progress_callback)

        csv_paths = export_csv(result, config.output_dir)
        json_path = export_json(result, config.output_dir)
        md_path = MarkdownReportGenerator().save_report(result, config.output_dir)
    except LabError as e:
        fail(e)

    print_result(result)
    console.print(f"\n[bold]Done in {result.wall_time:.2f}s[/bold]")
    for path in [*csv_paths, json_path, md_path]:
        console.print(f"  [green]{path}[/green]")


# Shared options
G_OPTION = typer.Option(10, "--g", help="Base g >= 2")
FORBIDDEN_OPTION = typer.Option(
    None, "--forbidden", help="Forbidden digits, comma list (e.g. 7 or 0,7); default 7"
)
K_OPTION = typer.Option(None, "--k", help="Exponent k, X = g^k")
K_RANGE_OPTION = typer.Option(None, "--k-range", help="Inclusive range a..b")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory (default $DIGIT_LAB_OUTPUT or config)")
WORKERS_OPTION = typer.Option(None, "--workers", "-w", help="Worker processes for the ledger")
BUDGET_OPTION = typer.Option(None, "--budget", help="Override the ledger budget max X")
SEED_OPTION = typer.Option(0, "--seed", help="Seed for any sampling")
CACHE_OPTION = typer.Option(True, "--cache/--no-cache", help="Reuse cached ledger summaries")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable verbose logging")


@app.command()
def run(
    mode: str = typer.Option(..., "--mode", "-m", help="avg-r2, bias-table, offdiag, nonzero, arcs, fourier, sieve-check, localfactors"),
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    output_dir: Optional[str] = OUT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    seed: int = SEED_OPTION,
    use_cache: bool = CACHE_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """
    Run any experiment mode with default mode parameters.

    Example:
        digit-lab run --mode avg-r2 --g 10 --forbidden 7 --k-range 4..6
    """
    try:
        selected = Mode.from_string(mode)
    except InvalidConfigError as e:
        setup_logging(verbose)
        fail(e)
    execute(selected, g, forbidden, k, k_range, output_dir, workers, budget, seed, use_cache, verbose)


@app.command("avg-r2")
def avg_r2(
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    output_dir: Optional[str] = OUT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    seed: int = SEED_OPTION,
    use_cache: bool = CACHE_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Σ r₂(n) over the digit set against the singular-series prediction."""
    execute(Mode.AVG_R2, g, forbidden, k, k_range, output_dir, workers, budget, seed, use_cache, verbose)


@app.command("bias-table")
def bias_table(
    g: int = G_OPTION,
    k: Optional[str] = K_OPTION,
    output_dir: Optional[str] = OUT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    use_cache: bool = CACHE_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """One row per forbidden digit b = 0..g-1 at X = g^k."""
    execute(Mode.BIAS_TABLE, g, "", k, None, output_dir, workers, budget, 0, use_cache, verbose)


@app.command()
def offdiag(
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    output_dir: Optional[str] = OUT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    use_cache: bool = CACHE_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Off-diagonal quadruples, defect sum and Gaussian collision splits."""
    execute(Mode.OFFDIAG, g, forbidden, k, k_range, output_dir, workers, budget, 0, use_cache, verbose)


@app.command()
def nonzero(
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    output_dir: Optional[str] = OUT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    use_cache: bool = CACHE_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Count of members that are a sum of two prime squares."""
    execute(Mode.NONZERO, g, forbidden, k, k_range, output_dir, workers, budget, 0, use_cache, verbose)


@app.command()
def arcs(
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    B: Optional[float] = typer.Option(None, "--B", help="Width exponent: s <= (log X)^B"),
    arc_mode: str = typer.Option("power-log", "--arc-mode", help="power-log or eta"),
    output_dir: Optional[str] = OUT_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Plancherel reconstruction split over major and minor arcs."""
    execute(
        Mode.ARCS, g, forbidden, k, k_range, output_dir, None, budget, 0, False, verbose,
        params={"B": B, "arc_mode": arc_mode},
    )


@app.command()
def fourier(
    g: int = G_OPTION,
    forbidden: Optional[str] = FORBIDDEN_OPTION,
    k: Optional[str] = K_OPTION,
    k_range: Optional[str] = K_RANGE_OPTION,
    D: Optional[int] = typer.Option(None, "--D", help="Outer range for the hybrid sums"),
    output_dir: Optional[str] = OUT_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    seed: int = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """L¹ constant, rational decay and hybrid sums of the digit transform."""
    execute(
        Mode.FOURIER, g, forbidden, k, k_range, output_dir, None, budget, seed, False, verbose,
        params={"D": D},
    )


@app.command("sieve-check")
def sieve_check(
    z: int = typer.Option(30, "--z", help="Sifting level"),
    s: int = typer.Option(3, "--s", help="Sieve parameter, D = z^s"),
    kappa: Optional[float] = typer.Option(None, "--kappa", help="Sieve dimension"),
    N: int = typer.Option(100_000, "--N", help="Scan the upper-bound property over n <= N"),
    excluded_modulus: int = typer.Option(1, "--excluded-modulus", help="Primes dividing this are not sifted"),
    output_dir: Optional[str] = OUT_OPTION,
    budget: Optional[int] = BUDGET_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """β-sieve upper-bound scan and ρ_quad density sums."""
    execute(
        Mode.SIEVE_CHECK, 10, "", None, None, output_dir, None, budget, 0, False, verbose,
        params={"z": z, "s": s, "kappa": kappa, "N": N, "excluded_modulus": excluded_modulus},
    )


@app.command()
def localfactors(
    g: int = G_OPTION,
    forbidden: str = typer.Option("", "--forbidden", help="Optional multi-digit set for the vector series"),
    q_max: int = typer.Option(60, "--q-max", help="Largest modulus for the density contracts"),
    q_table: Optional[int] = typer.Option(None, "--q-table", help="Largest modulus in the residue table (default g)"),
    output_dir: Optional[str] = OUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Local densities, contracts and singular series for every digit."""
    execute(
        Mode.LOCALFACTORS, g, forbidden, None, None, output_dir, None, None, 0, False, verbose,
        params={"q_max": q_max, "q_table": q_table},
    )


@app.command()
def expsum(
    kind: str = typer.Argument(..., help="prime-square, r2 or double"),
    alpha: str = typer.Option(..., "--alpha", help="Frequency as a fraction (e.g. 1/3) or decimal"),
    x: int = typer.Option(10_000, "--x", help="Length x (prime-square) or N (r2, double)"),
    M1: int = typer.Option(30, "--M1", help="First inner length (double)"),
    M2: int = typer.Option(30, "--M2", help="Second inner length (double)"),
    h: int = typer.Option(1, "--h", help="Congruence modulus (double)"),
    verbose: bool = VERBOSE_OPTION,
):
    """
    Evaluate one exponential sum directly and compare it to its envelope.

    Example:
        digit-lab expsum prime-square --alpha 1/3 --x 10000
    """
    setup_logging(verbose)
    try:
        try:
            frequency = Fraction(alpha)
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidConfigError(f"malformed alpha {alpha!r}") from e
        budgets = load_lab_config().budgets
        if kind == "prime-square":
            value = prime_square_sum(frequency, x, budgets)
        elif kind == "r2":
            value = r2_exp_sum(frequency, x, budgets)
        elif kind == "double":
            value = double_quadratic_sum(frequency, x, M1, M2, h=h, budgets=budgets)
        else:
            raise InvalidConfigError(f"unknown sum {kind!r} (choose prime-square, r2, double)")
    except LabError as e:
        fail(e)

    table = Table(title=f"{kind} sum at alpha={alpha}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for key, v in value.to_dict().items():
        table.add_row(key, f"{v:.12g}" if isinstance(v, float) else str(v))
    console.print(table)


@primes_app.command("count")
def primes_count(
    upto: int = typer.Option(..., "--upto", help="Count primes <= N"),
    verbose: bool = VERBOSE_OPTION,
):
    """π(N) by segmented sieve."""
    setup_logging(verbose)
    try:
        lab = load_lab_config()
        count = prime_count(upto, budgets=lab.budgets)
    except LabError as e:
        fail(e)
    console.print(f"pi({upto}) = {count}")


@app.command()
def cache_stats():
    """Show cache statistics."""
    cache = SummaryCache(load_lab_config().cache_directory)
    stats = cache.get_stats()

    console.print("\n[bold]Cache Statistics[/bold]")
    console.print(f"Location: {stats['cache_dir']}")
    console.print(f"Version: {stats['version']}")
    console.print(f"Entries: {stats['total_entries']} ({stats['current_entries']} current, {stats['stale_entries']} stale)")
    console.print(f"Size: {stats['total_size_mb']} MB")


@app.command()
def cache_clear():
    """Clear all cached ledger summaries."""
    cache = SummaryCache(load_lab_config().cache_directory)
    count = cache.clear_all()
    console.print(f"Cleared {count} cache entries.")


@app.command()
def version():
    """Show version information."""
    from src import __version__
    console.print(f"Missing-digit laboratory v{__version__}")


if __name__ == "__main__":
    app()
