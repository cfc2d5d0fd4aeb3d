"""Command-line driver for the verification suites."""

from __future__ import annotations

import sys

import click

from .suites import DEFAULT_SEED, SUITES, build_report, emit_report, parse_n_range


def _n_range(ctx, param, value):
    try:
        return parse_n_range(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@click.command()
@click.option("--suite", "suite", type=click.Choice(list(SUITES) + ["all"]), default="all", show_default=True)
@click.option("--n", "n_range", default="2..5", show_default=True, callback=_n_range,
              help="Rank range MIN..MAX (or a single value).")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the report here instead of stdout.")
@click.option("--deep", is_flag=True, help="Include expensive checks (kostant n=5, maxpref n=4).")
@click.option("--no-timestamp", is_flag=True, help="Omit timings and the generation time.")
def main(suite, n_range, seed, fmt, out, deep, no_timestamp):
    """Run exact verification checks and report pass/fail with witnesses."""
    report = build_report(suite, n_range, seed, deep, timestamps=not no_timestamp)
    try:
        text = emit_report(report, fmt, out)
    except OSError as exc:
        raise click.FileError(out, hint=str(exc)) from None
    if out is None:
        click.echo(text, nl=False)
    else:
        s = report.summary
        click.echo(f"{suite}: pass {s['pass']} fail {s['fail']} skipped {s['skipped']} -> {out}")
    sys.exit(0 if report.ok else 1)


if __name__ == "__main__":
    main()
