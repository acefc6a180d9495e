# -*- coding: utf-8 -*-
"""
File name: cli.py
Python Version: 3.8

This file is the entry point for the ews command line: state and witness
construction, spectral reports, mirroring, block-positivity, NPT detection and
verification suites. Matrices travel as matrix JSON; logs go to stderr.
"""

import functools
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
import pandas as pd

import config
from blockpos import is_block_positive, product_expectation_max, product_expectation_min
from errors import EwsError, InputError
from linalg import eigvals, hermitian_part
from matrix_io import dumps, load_operator, operator_to_dict, save_operator
from states import STATE_NAMES, CanonicalStateId, canonical_state
from verify import ALIASES, SUITES, emit_report, run_suite
from witness import (
    UNCLASSIFIED,
    FamilyParams,
    NdewParams,
    Witness,
    detect_npt,
    mirror,
    ndew_from_edge,
    spectral_report,
    w_family,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

input_option = click.option(
    "--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Matrix JSON file."
)
out_option = click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Output file (default: stdout).")
restarts_option = click.option("--restarts", default=config.SEESAW_RESTARTS, show_default=True, type=click.IntRange(min=1))
edge_restarts_option = click.option("--restarts", default=config.EDGE_RESTARTS, show_default=True, type=click.IntRange(min=1))
seed_option = click.option("--seed", default=config.DEFAULT_SEED, show_default=True, type=int)


def handles_errors(command):
    """Maps toolkit errors onto exit codes: 2 for bad input, 1 for failed computations."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(EXIT_USAGE)
        except EwsError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(EXIT_FAILED)

    return wrapper


def _emit(text: str, out_path: Optional[str]):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        click.echo(text, nl=False)


def _emit_operator(op, out_path: Optional[str]):
    if out_path:
        save_operator(op, out_path)
    else:
        click.echo(dumps(operator_to_dict(op)), nl=False)


def _parse_params(values: Tuple[str, ...]) -> Dict[str, float]:
    params = {}
    for item in values:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--param")
        try:
            params[key.strip()] = float(raw)
        except ValueError:
            raise click.BadParameter(f"value of {key!r} is not a number: {raw!r}", param_hint="--param")
    return params


def _vector(v: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in v]


def _load_hermitian(input_path: str, allow_non_hermitian: bool = False):
    """Loads matrix JSON; tolerated non-Hermitian input is replaced by its Hermitian part."""
    op = load_operator(input_path, allow_non_hermitian=allow_non_hermitian)
    return op.with_matrix(hermitian_part(op)) if allow_non_hermitian else op


@click.group()
@click.option("--log-level", default=None, help="Logging level (default: EWS_LOG_LEVEL or WARNING).")
@click.option("--threads", default=None, type=click.IntRange(min=1), help="Worker cap (overrides EWS_THREADS).")
def cli(log_level: Optional[str], threads: Optional[int]):
    """Entanglement witness spectral toolkit."""
    if threads:
        os.environ["EWS_THREADS"] = str(threads)
    logging.basicConfig(level=(log_level or config.log_level()).upper(), format=config.LOG_FORMAT, stream=sys.stderr)


@cli.command()
@click.option("--name", required=True, type=click.Choice(STATE_NAMES))
@click.option("--param", "params", multiple=True, help="Family parameter as key=value (repeatable).")
@click.option("--m", type=int)
@click.option("--n", type=int)
@out_option
@handles_errors
def state(name, params, m, n, out_path):
    """Emit a canonical state as matrix JSON."""
    values = _parse_params(params)
    if m is not None:
        values["m"] = m
    if n is not None:
        values["n"] = n
    _emit_operator(canonical_state(CanonicalStateId(name, values)), out_path)


@cli.command()
@click.option("--a", default=0.0, type=float)
@click.option("--b", default=0.0, type=float)
@click.option("--c", default=0.0, type=float)
@click.option("--d", default=0.0, type=float)
@click.option("--m", required=True, type=int)
@click.option("--n", required=True, type=int)
@out_option
@handles_errors
def family(a, b, c, d, m, n, out_path):
    """Emit W_{a,b,c,d} as matrix JSON."""
    _emit_operator(w_family(FamilyParams(a, b, c, d, m, n)).op, out_path)


@cli.command()
@input_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]), show_default=True)
@click.option("--allow-non-hermitian", is_flag=True)
@out_option
@handles_errors
def report(input_path, fmt, allow_non_hermitian, out_path):
    """Spectral report of a witness against the eigenvalue bounds."""
    op = _load_hermitian(input_path, allow_non_hermitian)
    result = spectral_report(Witness(op, UNCLASSIFIED, (input_path,), normalized=False))
    if fmt == "json":
        data = dict(result.scalars())
        data["lambdas"] = [float(v) for v in result.lambdas]
        data["verdicts"] = dict(result.verdicts)
        _emit(dumps(data), out_path)
        return
    rows = [("scalar", key, float(value)) for key, value in result.scalars().items()]
    rows += [("verdict", key, verdict) for key, verdict in result.verdicts.items()]
    _emit(pd.DataFrame(rows, columns=["kind", "name", "value"]).to_csv(index=False, lineterminator="\n"), out_path)


@cli.command()
@input_option
@click.option("--allow-non-hermitian", is_flag=True)
@handles_errors
def spectrum(input_path, allow_non_hermitian):
    """Eigenvalues of a Hermitian matrix in non-increasing order."""
    op = _load_hermitian(input_path, allow_non_hermitian)
    click.echo(dumps([float(v) for v in eigvals(op)]), nl=False)


@cli.command(name="mirror")
@input_option
@restarts_option
@seed_option
@out_option
@handles_errors
def mirror_command(input_path, restarts, seed, out_path):
    """mu = max product expectation and the mirrored operator mu I - W."""
    op = load_operator(input_path)
    result = mirror(Witness(op, UNCLASSIFIED, (input_path,), normalized=False), restarts, seed)
    if out_path:
        save_operator(result.w_m, out_path)
    click.echo(
        dumps(
            {
                "mu": result.mu,
                "verdict": result.verdict,
                "restarts_converged": result.opt_trail.restarts_converged,
            }
        ),
        nl=False,
    )


@cli.command()
@input_option
@click.option("--mode", default="verdict", type=click.Choice(["min", "max", "verdict"]), show_default=True)
@restarts_option
@seed_option
@out_option
@handles_errors
def blockpos(input_path, mode, restarts, seed, out_path):
    """Product-vector optimization and block-positivity verdict."""
    op = load_operator(input_path)
    if mode == "verdict":
        verdict = is_block_positive(op, restarts, seed)
        data = {"status": verdict.status, "method": verdict.method, "budget": verdict.budget}
        if verdict.counterexample is not None:
            a, b, value = verdict.counterexample
            data["counterexample"] = {"vec_a": _vector(a), "vec_b": _vector(b), "value": value}
    else:
        optimize = product_expectation_min if mode == "min" else product_expectation_max
        best = optimize(op, restarts, seed)
        data = {
            "value": best.value,
            "vec_a": _vector(best.vec_a),
            "vec_b": _vector(best.vec_b),
            "restarts_tried": best.restarts_tried,
            "restarts_converged": best.restarts_converged,
            "spread": best.spread,
        }
    _emit(dumps(data), out_path)


@cli.command()
@input_option
@click.option("--z", default=config.DEFAULT_Z, show_default=True, type=float)
@click.option("--delta", default=config.DEFAULT_DELTA, show_default=True, type=float)
@edge_restarts_option
@seed_option
@out_option
@handles_errors
def ndew(input_path, z, delta, restarts, seed, out_path):
    """Nondecomposable witness detecting a PPT edge state."""
    sigma = load_operator(input_path)
    witness = ndew_from_edge(sigma, NdewParams(z=z, delta=delta), restarts, seed)
    logger.info("ndew provenance: %s", "; ".join(witness.provenance))
    _emit_operator(witness.op, out_path)


@cli.command()
@input_option
@edge_restarts_option
@seed_option
@out_option
@handles_errors
def detect(input_path, restarts, seed, out_path):
    """Witness detecting an NPT state, pulled back through local filters."""
    rho = load_operator(input_path)
    certificate = detect_npt(rho, restarts, seed)
    if out_path:
        save_operator(certificate.witness.op, out_path)
    click.echo(
        dumps(
            {
                "expectation": certificate.expectation,
                "class_tag": certificate.witness.class_tag,
                "branch": certificate.branch,
                "schmidt_rank": certificate.schmidt_rank,
                "t": certificate.t,
                "pipeline": list(certificate.witness.provenance),
            }
        ),
        nl=False,
    )


@cli.command()
@click.option("--suite", "suite_name", required=True, help="Suite name; see `suites`.")
@click.option("--m", type=int)
@click.option("--n", type=int)
@click.option("--samples", type=click.IntRange(min=0))
@seed_option
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]), show_default=True)
@click.option("--timing", is_flag=True, help="Include wall time (reports are then not byte-stable).")
@out_option
@handles_errors
def verify(suite_name, m, n, samples, seed, fmt, timing, out_path):
    """Run a verification suite; exit 1 when a gating check fails."""
    result = run_suite(suite_name, {"m": m, "n": n, "samples": samples}, seed)
    payload = emit_report(result, fmt, timing)
    if out_path:
        with open(out_path, "wb") as handle:
            handle.write(payload)
    else:
        click.echo(payload.decode("utf-8"), nl=False)
    if not result.passed:
        click.get_current_context().exit(EXIT_FAILED)


@cli.command()
def suites():
    """List registered suites."""
    aliases = {target: alias for alias, target in ALIASES.items()}
    for name in sorted(SUITES):
        alias = f" (alias {aliases[name]})" if name in aliases else ""
        click.echo(f"{name}{alias}: {SUITES[name].summary}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        code = cli.main(args=argv, prog_name="ews", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE if isinstance(exc, click.UsageError) else EXIT_FAILED
    except click.Abort:
        return EXIT_FAILED
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
