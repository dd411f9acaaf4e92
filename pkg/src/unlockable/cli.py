"""Command-line harness: ``unlockable <command> [options]``.

Exit status: 0 when every check passes, 1 when any check fails (or the
report cannot be written), 2 on usage errors.
"""

from __future__ import annotations

import dataclasses
import os
import sys

import click

from . import __version__, suites
from .errors import UnsupportedScenarioError
from .report import ReportDocument, emit_report

TOL_ENV = "UNLOCKABLE_TOL"


def _tolerances(ppt_tol, fidelity_tol) -> suites.Tolerances:
    tol = suites.Tolerances()
    env = os.environ.get(TOL_ENV)
    if env is not None:
        try:
            tol = dataclasses.replace(tol, ppt=float(env))
        except ValueError:
            raise click.UsageError(f"{TOL_ENV}={env!r} is not a number") from None
    if ppt_tol is not None:
        tol = dataclasses.replace(tol, ppt=ppt_tol)
    if fidelity_tol is not None:
        tol = dataclasses.replace(tol, fidelity=fidelity_tol)
    return tol


def _parse_merge(ctx, param, value):
    if value is None:
        return None
    parts = value.split(",") if "," in value else list(value)
    parts = [p.strip().upper() for p in parts]
    if len(parts) != 2 or len(set(parts)) != 2 or not set(parts) <= set("ABCD"):
        raise click.BadParameter("expected two distinct parties out of A, B, C, D (e.g. CD or B,D)")
    return "".join(sorted(parts))


def common_options(f):
    f = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                     show_default=True, help="Report format.")(f)
    f = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                     help="Write the report here instead of stdout.")(f)
    f = click.option("--ppt-tol", type=float, default=None,
                     help=f"PPT tolerance (default 1e-10, or ${TOL_ENV}).")(f)
    f = click.option("--fidelity-tol", type=float, default=None, help="Fidelity tolerance (default 1e-9).")(f)
    return f


def _finish(ctx, command: dict, checks, fmt, output) -> None:
    doc = ReportDocument(__version__, command, checks)
    try:
        if output is None:
            emit_report(doc, fmt, sys.stdout)
        else:
            with open(output, "w", encoding="utf-8") as fh:
                emit_report(doc, fmt, fh)
    except OSError as exc:
        click.echo(f"error: cannot write report: {exc}", err=True)
        ctx.exit(1)
    ctx.exit(0 if doc.passed else 1)


def _echo_command(name, ppt_tol, fidelity_tol, fmt, **extra):
    cmd = {"name": name, "format": fmt}
    cmd.update({k: v for k, v in extra.items() if v is not None})
    if ppt_tol is not None:
        cmd["ppt_tol"] = ppt_tol
    if fidelity_tol is not None:
        cmd["fidelity_tol"] = fidelity_tol
    return cmd


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="unlockable")
def cli():
    """Verify and simulate the four-party unlockable bound-entangled state."""


@cli.command("check-cuts")
@common_options
@click.pass_context
def check_cuts(ctx, fmt, output, ppt_tol, fidelity_tol):
    """PPT across all seven bipartitions plus explicit 2:2 ensembles."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("check-cuts", ppt_tol, fidelity_tol, fmt), suites.check_cuts(tol), fmt, output)


@cli.command("check-invariance")
@common_options
@click.pass_context
def check_invariance(ctx, fmt, output, ppt_tol, fidelity_tol):
    """Invariance under subsystem swaps and the full permutation orbit."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("check-invariance", ppt_tol, fidelity_tol, fmt),
            suites.check_invariance(tol), fmt, output)


@cli.command("expansion-check")
@common_options
@click.pass_context
def expansion_check(ctx, fmt, output, ppt_tol, fidelity_tol):
    """Equality of the two written-out mixtures (B and C interchanged)."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("expansion-check", ppt_tol, fidelity_tol, fmt),
            suites.expansion_check(tol), fmt, output)


@cli.command("unlock")
@click.option("--merge", required=True, callback=_parse_merge, help="The two parties that meet, e.g. CD.")
@click.option("--corrector", default=None, help="Remaining party applying the rotation.")
@click.option("--d", "d", type=click.IntRange(2, 5), default=2, show_default=True, help="Local dimension.")
@click.option("--seed", type=int, default=None, help="Add a seeded Monte Carlo sample of outcomes.")
@common_options
@click.pass_context
def unlock(ctx, merge, corrector, d, seed, fmt, output, ppt_tol, fidelity_tol):
    """Bell measurement by a merged pair, broadcast, and correction."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    if corrector is not None:
        corrector = corrector.upper()
        if corrector not in set("ABCD") - set(merge):
            raise click.BadParameter(f"must be one of the parties outside {merge}", param_hint="--corrector")
    try:
        checks = suites.unlock_suite(merge, corrector, d, seed, tol)
    except UnsupportedScenarioError as exc:
        raise click.UsageError(str(exc)) from None
    cmd = _echo_command("unlock", ppt_tol, fidelity_tol, fmt, merge=merge, corrector=corrector, d=d, seed=seed)
    _finish(ctx, cmd, checks, fmt, output)


@cli.command("teleport-demo")
@click.option("--seed", type=int, default=None, help="Add a seeded random-input demo run.")
@common_options
@click.pass_context
def teleport_demo(ctx, seed, fmt, output, ppt_tol, fidelity_tol):
    """Teleportation picture of B,D unlocking on a grid of input qubits."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("teleport-demo", ppt_tol, fidelity_tol, fmt, seed=seed),
            suites.teleport_demo(seed, tol), fmt, output)


@cli.command("superadditivity")
@common_options
@click.pass_context
def superadditivity(ctx, fmt, output, ppt_tol, fidelity_tol):
    """Two copies shared with a fifth party E: D and E end with a singlet."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("superadditivity", ppt_tol, fidelity_tol, fmt),
            suites.superadditivity_suite(tol), fmt, output)


@cli.command("qudit-suite")
@click.option("--d", "d", type=click.IntRange(2, 5), default=3, show_default=True, help="Local dimension.")
@common_options
@click.pass_context
def qudit_suite(ctx, d, fmt, output, ppt_tol, fidelity_tol):
    """PPT, B<->C invariance and C,D unlocking for the d-level state."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    _finish(ctx, _echo_command("qudit-suite", ppt_tol, fidelity_tol, fmt, d=d),
            suites.qudit_suite(d, tol), fmt, output)


@cli.command("full-report")
@click.option("--timings/--no-timings", default=False, show_default=True,
              help="Also check wall-clock budgets (makes output nondeterministic).")
@common_options
@click.pass_context
def full_report(ctx, timings, fmt, output, ppt_tol, fidelity_tol):
    """Run every acceptance check and aggregate the verdict."""
    tol = _tolerances(ppt_tol, fidelity_tol)
    cmd = _echo_command("full-report", ppt_tol, fidelity_tol, fmt, timings=timings or None)
    _finish(ctx, cmd, suites.full_report(tol, timings), fmt, output)


def main(argv=None):
    cli.main(args=argv, prog_name="unlockable")


if __name__ == "__main__":
    main()
