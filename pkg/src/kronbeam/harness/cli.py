"""Command line entry point: ``kronbeam se-sweep | complexity | imperfect-csi``."""

from __future__ import annotations

import logging

import click

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import run_complexity_sweep, run_imperfect_csi, run_se_vs_snr, summarize
from .output import emit_complexity_csv, emit_csv, emit_plot_script


def _common(f):
    f = click.option("--plot-script", type=click.Path(dir_okay=False),
                     help="Also write a matplotlib script plotting the CSV.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), help="Output CSV path.")(f)
    f = click.option("--delta-deg", type=float, help="Elevation spread in degrees.")(f)
    f = click.option("--trials", type=int, help="Monte-Carlo trials per point.")(f)
    f = click.option("--seed", type=int, help="Base RNG seed.")(f)
    f = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="key = value experiment config file.")(f)
    return f


def _load(config_path, **overrides) -> ExperimentConfig:
    try:
        return load_config(config_path).replace(**overrides)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from None


def _print_summary(records) -> None:
    click.echo(f"{'method':<9} {'snr_db':>7} {'sigma_z_db':>10} {'n':>6} {'mean_se':>9} {'stderr':>8}")
    for p in summarize(records):
        sigma = "-" if p.sigma_z_db is None else f"{p.sigma_z_db:g}"
        click.echo(f"{p.method:<9} {p.snr_db:>7g} {sigma:>10} {p.n:>6} {p.mean:>9.4f} {p.stderr:>8.4f}")


def _write_outputs(records, cfg, plot_script, kind):
    try:
        path = emit_csv(records, cfg.out)
        if plot_script:
            emit_plot_script(path, plot_script, kind)
    except OSError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(f"wrote {len(records)} records to {path}", err=True)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Kronecker-structured IRS beamforming experiments."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("se-sweep")
@_common
@click.option("--workers", type=int, help="Worker processes for the trials.")
def se_sweep(config_path, seed, trials, delta_deg, out, plot_script, workers):
    """Spectral efficiency of every designer against SNR (perfect CSI)."""
    cfg = _load(config_path, seed=seed, trials=trials, delta_deg=delta_deg, out=out, workers=workers)
    records = run_se_vs_snr(cfg)
    _write_outputs(records, cfg, plot_script, "snr")
    _print_summary(records)


@main.command("imperfect-csi")
@_common
@click.option("--workers", type=int, help="Worker processes for the trials.")
def imperfect_csi(config_path, seed, trials, delta_deg, out, plot_script, workers):
    """Spectral efficiency against the channel estimation noise level."""
    cfg = _load(config_path, seed=seed, trials=trials, delta_deg=delta_deg, out=out, workers=workers)
    records = run_imperfect_csi(cfg)
    _write_outputs(records, cfg, plot_script, "sigma")
    _print_summary(records)


@main.command("complexity")
@_common
def complexity(config_path, seed, trials, delta_deg, out, plot_script):
    """Model operation counts against the IRS size (no simulation)."""
    cfg = _load(config_path, seed=seed, trials=trials, delta_deg=delta_deg, out=out)
    rows = run_complexity_sweep(cfg)
    try:
        path = emit_complexity_csv(rows, cfg.out)
        if plot_script:
            emit_plot_script(path, plot_script, "complexity")
    except OSError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(f"{'method':<9} {'n_y':>8} {'n_z':>8} {'ops':>12} {'baseline/x':>10}")
    for r in rows:
        click.echo(f"{r.method:<9} {r.n_y:>8.4g} {r.n_z:>8.4g} {r.complexity:>12.1f} {r.baseline_ratio:>10.2f}")


if __name__ == "__main__":
    main()
