"""sgcov command-line interface.

Thresholds and SNR are given in dB here and converted to linear exactly once.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 validation
failed (the report is still written).
"""
import functools
import logging
import re

import click
from pydantic import ValidationError

from sgcov.config import configure_logging
from sgcov.core.errors import ParameterError, QuadratureError, SimulationError
from sgcov.models.run_config import GridSpec, config_from_dict, parse_config_file, preset_names
from sgcov.services.exports import columns_for, export_service
from sgcov.services.runner import (
    EXIT_INVALID,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION_FAILED,
    RunService,
)
from sgcov.services.validation import REGRESSION_PRESETS, regression_suite

logger = logging.getLogger(__name__)

RULE_ALIASES = {
    "avg": "average_power",
    "average": "average_power",
    "average_power": "average_power",
    "inst": "instantaneous_power",
    "instantaneous": "instantaneous_power",
    "instantaneous_power": "instantaneous_power",
}


class SgcovGroup(click.Group):
    """Click group that reports bad command-line input with exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.show()
            ctx.exit(EXIT_INVALID)


def handle_errors(func):
    """Map library exceptions onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except (ParameterError, ValidationError, ValueError) as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_INVALID)
        except (QuadratureError, SimulationError) as e:
            click.echo(f"Numerical failure: {e}", err=True)
            ctx.exit(EXIT_NUMERICAL)

    return wrapper


def output_options(func):
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default=None,
        help="Output format [default: csv, or the run config's format].",
    )(func)
    func = click.option(
        "--out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted)."
    )(func)
    return func


MODES = click.Choice(["analytic", "simulate", "validate"])


def run_options(func):
    """Grid, mode and simulation flags shared by the scenario commands."""
    options = [
        click.option("--tau-db", type=str, default=None, help="Single threshold in dB."),
        click.option("--grid", type=str, default=None, help="Threshold grid start:step:stop (dB)."),
        click.option("--mode", type=MODES, default="analytic", show_default=True),
        click.option("--trials", type=int, default=None, help="Monte Carlo trials."),
        click.option("--seed", type=int, default=None, help="Master seed."),
        click.option("--delta", type=float, default=None, help="Interference truncation fraction."),
        click.option("--workers", type=int, default=None, help="Worker processes for simulation."),
        click.option("--tolerance", type=float, default=None, help="Validation tolerance (max gap)."),
    ]
    for option in reversed(options):
        func = option(func)
    return output_options(func)


def _parse_db(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"not a number: {text!r}", field=name) from None


def _grid(tau_db: str | None, grid: str | None, default: GridSpec) -> dict:
    if tau_db is not None and grid is not None:
        raise ParameterError("give either --tau-db or --grid, not both", field="grid")
    if tau_db is not None:
        spec = GridSpec.single(_parse_db(tau_db, "tau_db"))
    elif grid is not None:
        spec = GridSpec.parse(grid)
    else:
        spec = default
    return spec.model_dump()


def _sigma2_from_snr(snr_db: str | None, power: float) -> float:
    if snr_db is None:
        return 0.0
    value = snr_db.strip().lower()
    if value in ("inf", "+inf", "infinity"):
        return 0.0
    return power / 10.0 ** (_parse_db(value, "snr_db") / 10.0)


def _sim_block(trials, seed, delta, workers) -> dict:
    pairs = (("trials", trials), ("master_seed", seed), ("delta", delta), ("workers", workers))
    return {key: value for key, value in pairs if value is not None}


def parse_tiers(text: str) -> list[dict]:
    """Parse ``"lambda,p,tau;lambda,p,tau;..."`` with linear values."""
    tiers = []
    for index, chunk in enumerate(t for t in re.split(r";", text) if t.strip()):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise ParameterError(f"tier {index} must be 'lambda,p,tau', got {chunk!r}", field="tiers")
        try:
            density, power, tau = (float(p) for p in parts)
        except ValueError:
            raise ParameterError(f"tier {index} is not numeric: {chunk!r}", field="tiers") from None
        tiers.append({"density": density, "power": power, "tau": tau})
    if not tiers:
        raise ParameterError("at least one tier is required", field="tiers")
    return tiers


def _write_or_echo(text: str, out: str | None) -> None:
    if out:
        export_service.write(text, out)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _emit(outcome, fmt: str | None, out: str | None) -> int:
    result = outcome.result
    if fmt == "json":
        text = export_service.result_json(result, outcome.config)
    else:
        text = export_service.result_csv(result)
    _write_or_echo(text, out)
    if out:
        logger.info(f"Wrote {len(result.rows())} rows to {out}")
    return outcome.exit_code


def _emit_points(outcomes, fmt: str | None, out: str | None) -> int:
    """Long-format output of a sweep: the point's values lead every row."""
    if fmt == "json":
        text = export_service.points_json(outcomes)
    else:
        rows = []
        for point, outcome in outcomes:
            rows.extend({**point, **row} for row in outcome.result.rows())
        columns = list(outcomes[0][0]) + columns_for(outcomes[0][1].result)
        text = export_service.rows_csv(rows, columns)
    _write_or_echo(text, out)
    return max(o.exit_code for _, o in outcomes)


def _execute(data: dict, fmt: str | None, out: str | None, source: str) -> None:
    config = config_from_dict(data, source=source)
    outcomes = RunService().run(config)
    if config.sweep:
        code = _emit_points(outcomes, fmt, out)
    else:
        code = _emit(outcomes[0][1], fmt, out)
    for point, outcome in outcomes:
        if outcome.exit_code != EXIT_VALIDATION_FAILED:
            continue
        summary = outcome.result.summary()
        where = "".join(f" {k}={v:g}" for k, v in point.items())
        click.echo(
            f"Validation failed{where}: max gap {summary['max_gap']:.4g} > {summary['tolerance']:g}",
            err=True,
        )
    click.get_current_context().exit(code)


def _run_scenario(scenario: str, block: dict, default_grid: GridSpec, run: dict) -> None:
    """Build a run config from scenario flags and execute it."""
    data = {
        "scenario": scenario,
        scenario: block,
        "grid": _grid(run["tau_db"], run["grid"], default_grid),
        "mode": run["mode"],
        "sim": _sim_block(run["trials"], run["seed"], run["delta"], run["workers"]),
    }
    if run["tolerance"] is not None:
        data["tolerance"] = run["tolerance"]
    _execute(data, run["fmt"], run["out"], f"{scenario} flags")


@click.group(cls=SgcovGroup)
@click.option("--log-level", default=None, help="Logging level (default from SGCOV_LOG_LEVEL).")
def cli(log_level):
    """Cellular SINR coverage: analytic curves and Monte Carlo validation."""
    configure_logging(log_level)


@cli.command("downlink")
@click.option("--density", type=float, default=1.0, show_default=True, help="BS density.")
@click.option("--power", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=4.0, show_default=True)
@click.option(
    "--snr-db", type=str, default="inf", show_default=True, help="SNR at unit distance; 'inf' = no noise."
)
@click.option("--shadowing-db", type=float, default=None, help="Lognormal shadowing spread in dB.")
@run_options
@handle_errors
def downlink_command(density, power, alpha, snr_db, shadowing_db, **run):
    """Single-tier downlink coverage."""
    block = {
        "density": density,
        "power": power,
        "alpha": alpha,
        "sigma2": _sigma2_from_snr(snr_db, power),
    }
    if shadowing_db is not None:
        block["shadowing"] = {"kind": "lognormal", "sigma_db": shadowing_db}
    _run_scenario("downlink", block, GridSpec(), run)


@cli.command("uplink")
@click.option("--density", type=float, default=1.0, show_default=True, help="BS density.")
@click.option("--power", type=float, default=1.0, show_default=True)
@click.option("--alpha", type=float, default=4.0, show_default=True)
@click.option("--epsilon", type=float, default=1.0, show_default=True, help="Power-control fraction.")
@click.option("--snr-db", type=str, default="inf", show_default=True)
@click.option("--user-density", type=float, default=None, help="User density (simulation only).")
@run_options
@handle_errors
def uplink_command(density, power, alpha, epsilon, snr_db, user_density, **run):
    """Uplink coverage with fractional power control."""
    block = {
        "density": density,
        "power": power,
        "alpha": alpha,
        "epsilon": epsilon,
        "sigma2": _sigma2_from_snr(snr_db, power),
    }
    if user_density is not None:
        block["user_density"] = user_density
    _run_scenario("uplink", block, GridSpec(), run)


@cli.command("hetnet")
@click.option("--tiers", required=True, help="Tier list 'lambda,p,tau;...' (linear values).")
@click.option("--rule", default="avg", show_default=True, help="avg | inst (or the full names).")
@click.option("--alpha", type=float, default=4.0, show_default=True)
@click.option("--sigma2", type=float, default=0.0, show_default=True, help="Noise power.")
@click.option("--no-noise", is_flag=True, help="Force sigma2 = 0.")
@run_options
@handle_errors
def hetnet_command(tiers, rule, alpha, sigma2, no_noise, **run):
    """k-tier HetNet coverage; grid values scale every tier threshold."""
    if rule not in RULE_ALIASES:
        raise ParameterError(f"unknown rule {rule!r}; use avg or inst", field="rule")
    block = {
        "tiers": parse_tiers(tiers),
        "alpha": alpha,
        "sigma2": 0.0 if no_noise else sigma2,
        "rule": RULE_ALIASES[rule],
    }
    _run_scenario("hetnet", block, GridSpec.single(0.0), run)


@cli.command("run")
@click.option("--config", "config_path", required=True, help="JSON run config or preset:<name>.")
@click.option("--mode", type=click.Choice(["analytic", "simulate", "validate"]), default=None)
@output_options
@handle_errors
def run_command(config_path, mode, fmt, out):
    """Execute a JSON run config."""
    config = parse_config_file(config_path)
    data = config.model_dump(mode="json", exclude_none=True)
    if mode is not None:
        data["mode"] = mode
    _execute(data, fmt or config.format, out or config.out, config_path)


@cli.command("validate")
@click.option("--config", "config_path", default=None, help="Validate one config, not the suite.")
@click.option("--preset", "names", multiple=True, help="Limit the suite to these presets.")
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@output_options
@handle_errors
def validate_command(config_path, names, trials, seed, workers, fmt, out):
    """Compare analytic curves with simulation; exit 3 if any comparison fails."""
    ctx = click.get_current_context()
    if config_path:
        config = parse_config_file(config_path)
        data = config.model_dump(mode="json", exclude_none=True)
        data["mode"] = "validate"
        data["sim"] = {**data.get("sim", {}), **_sim_block(trials, seed, None, workers)}
        _execute(data, fmt or config.format, out or config.out, config_path)
        return

    unknown = [n for n in names if n not in REGRESSION_PRESETS]
    if unknown:
        raise ParameterError(f"not regression presets: {unknown}", field="preset")
    reports = regression_suite(list(names) or None, trials=trials, seed=seed, workers=workers)
    if fmt == "json":
        text = export_service.reports_json(reports)
    else:
        rows = []
        for report in reports:
            rows.extend({"scenario": report.name, **row} for row in report.rows())
        columns = ["scenario"] + (columns_for(reports[0]) if reports else [])
        text = export_service.rows_csv(rows, columns)
    _write_or_echo(text, out)
    for report in reports:
        click.echo(
            f"{report.status.value} {report.name}: max gap {report.max_gap:.4g} "
            f"(tol {report.tolerance:g}), {report.inside_ci_fraction:.0%} inside CI",
            err=True,
        )
    ctx.exit(EXIT_OK if all(r.passed for r in reports) else EXIT_VALIDATION_FAILED)


def _parse_axis(text: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise ParameterError(f"sweep axis must be name=v1,v2,..., got {text!r}", field="param")
    name, values = text.split("=", 1)
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"non-numeric sweep values in {text!r}", field=name) from None
    if not parsed:
        raise ParameterError(f"no values for sweep axis {name!r}", field=name)
    return name.strip(), parsed


@cli.command("sweep")
@click.option("--config", "config_path", required=True, help="Base JSON run config or preset:<name>.")
@click.option(
    "--param", "axes", multiple=True, help="Axis name=v1,v2,... (repeatable; default: the config's sweep)."
)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="One output file per point.")
@output_options
@handle_errors
def sweep_command(config_path, axes, out_dir, fmt, out):
    """Cartesian sweep over scenario parameters, long-format output."""
    config = parse_config_file(config_path)
    grid = dict(_parse_axis(a) for a in axes) or config.sweep
    if not grid:
        raise ParameterError("no --param given and the config has no sweep", field="param")
    outcomes = RunService().sweep(config, grid)
    fmt = fmt or config.format

    if out_dir:
        for index, (point, outcome) in enumerate(outcomes):
            label = "_".join(f"{k}={v:g}" for k, v in point.items())
            ext = "json" if fmt == "json" else "csv"
            text = (
                export_service.result_json(outcome.result, outcome.config)
                if fmt == "json"
                else export_service.result_csv(outcome.result)
            )
            export_service.write(text, f"{out_dir}/{index:03d}_{label}.{ext}")
        worst = max(o.exit_code for _, o in outcomes)
    else:
        worst = _emit_points(outcomes, fmt, out or config.out)
    click.get_current_context().exit(worst)


@cli.command("presets")
def presets_command():
    """List built-in presets."""
    for name in preset_names():
        config = parse_config_file(f"preset:{name}")
        click.echo(f"{name}\t{config.scenario}")


def main():
    cli()


if __name__ == "__main__":
    main()
