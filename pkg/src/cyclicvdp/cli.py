"""Command-line entry point.

One subcommand per analysis; every command reads delimited or JSON inputs,
writes a schema-versioned JSON report (or CSV time series for the simulation
commands), and exits 0 whenever the analysis itself ran, even if the analyzed
property turned out false.  Exit code 2 means a bad input, 3 a numerical
abort; both come with a JSON error object on stderr.  Simulation commands
render PNG figures next to their CSV output unless --no-plot is given.

Every option can also be set through the environment with the CYCLICVDP_
prefix, e.g. CYCLICVDP_ZERO_TOL=1e-8.
"""

import functools
import json
import os
import sys
from dataclasses import dataclass

import click
import numpy as np

from . import classify as classify_mod
from . import compound as compound_mod
from . import fileio, lindyn, rfmr as rfmr_mod, signvar as signvar_mod, vdp as vdp_mod
from .errors import InputError, NumericalAbort, ParseError


@dataclass
class RunConfig:
    zero_tol: float = 1e-9
    det_tol: float = 1e-9
    step: float = 1e-3
    seed: int = 0
    sample_budget: int = 10000
    output_format: str = "json"


def common_options(fn):
    @click.option("--zero-tol", type=float, default=1e-9, show_default=True,
                  help="Entries with magnitude at or below this count as zero.")
    @click.option("--det-tol", type=float, default=1e-9, show_default=True,
                  help="Scaled determinant threshold for the nonsingularity gate.")
    @click.option("--step", type=float, default=1e-3, show_default=True,
                  help="Integrator step size.")
    @click.option("--seed", type=int, default=0, show_default=True,
                  help="Seed for counterexample sampling.")
    @click.option("--samples", "sample_budget", type=int, default=10000, show_default=True,
                  help="Sample budget for counterexample searches.")
    @click.option("--format", "output_format", type=click.Choice(["json", "csv"]),
                  default="json", show_default=True, help="Report format where applicable.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        cfg = RunConfig(
            zero_tol=kwargs.pop("zero_tol"),
            det_tol=kwargs.pop("det_tol"),
            step=kwargs.pop("step"),
            seed=kwargs.pop("seed"),
            sample_budget=kwargs.pop("sample_budget"),
            output_format=kwargs.pop("output_format"),
        )
        if cfg.zero_tol <= 0 or cfg.det_tol <= 0 or cfg.step <= 0:
            raise InputError("tolerances and step must be positive")
        return fn(*args, cfg=cfg, **kwargs)

    return wrapper


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:
            _emit_error(exc)
            sys.exit(2)
        except NumericalAbort as exc:
            _emit_error(exc)
            sys.exit(3)

    return wrapper


def _emit_error(exc):
    payload = {"schema": fileio.SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)


def _write_or_print(text, out):
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


@click.group()
def cli():
    """Sign-variation analysis of matrices and linear time-varying systems."""


@cli.command()
@click.argument("vector_file")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@guarded
@common_options
def signvar(vector_file, out, cfg):
    """Sign-variation counters of a vector (JSON array or one CSV line)."""
    v = fileio.load_vector(vector_file)
    report = signvar_mod.sign_report(v, cfg.zero_tol)
    _write_or_print(fileio.dumps_report(report.to_dict()), out)


@cli.command()
@click.argument("matrix_file")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@click.option("--allow-large", is_flag=True, help="Lift the combinatorial size cap.")
@guarded
@common_options
def classify(matrix_file, out, allow_large, cfg):
    """Structural classification of a matrix."""
    A = fileio.load_matrix(matrix_file)
    if cfg.output_format != "json":
        raise InputError("classify reports are JSON only")
    report = classify_mod.classify_matrix(A, cfg.zero_tol, allow_large=allow_large)
    _write_or_print(fileio.dumps_report(report.to_dict()), out)


@cli.command()
@click.argument("matrix_file")
@click.option("-p", "--order", type=int, required=True, help="Compound order.")
@click.option("--additive/--multiplicative", default=False,
              help="Additive instead of multiplicative compound.")
@click.option("--fd-step", type=float, default=None,
              help="Assemble the additive compound by finite differences with this step.")
@click.option("--allow-large", is_flag=True, help="Lift the combinatorial size cap.")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@guarded
@common_options
def compound(matrix_file, order, additive, fd_step, allow_large, out, cfg):
    """Order-p multiplicative or additive compound of a matrix."""
    A = fileio.load_matrix(matrix_file)
    if additive:
        if fd_step is not None:
            cm = compound_mod.add_compound_fd(A, order, fd_step, allow_large=allow_large)
        else:
            cm = compound_mod.add_compound(A, order, allow_large=allow_large)
    else:
        if fd_step is not None:
            raise InputError("--fd-step only applies to the additive compound")
        cm = compound_mod.mult_compound(A, order, allow_large=allow_large)
    if cfg.output_format == "csv":
        _write_or_print(fileio.matrix_csv_text(cm.entries), out)
    else:
        _write_or_print(fileio.dumps_report(cm.to_dict()), out)


@cli.command()
@click.argument("matrix_file")
@click.option("--property", "prop", required=True,
              type=click.Choice(["nonstandard", "scvdp", "weak-cvdp", "prop-sv1"]),
              help="Which variation-diminishing property to check.")
@click.option("-p", "--order", type=int, default=None,
              help="Order bound for the nonstandard property.")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@guarded
@common_options
def verify(matrix_file, prop, order, out, cfg):
    """Check a variation-diminishing property of a matrix."""
    A = fileio.load_matrix(matrix_file)
    kw = dict(num_samples=cfg.sample_budget, seed=cfg.seed, zero_tol=cfg.zero_tol)
    if prop == "nonstandard":
        if order is None:
            raise InputError("the nonstandard property needs -p/--order")
        verdict = vdp_mod.check_nonstandard_vdp(A, order, tol=cfg.zero_tol, det_tol=cfg.det_tol, **kw)
    elif prop == "scvdp":
        verdict = vdp_mod.check_scvdp(A, tol=cfg.zero_tol, det_tol=cfg.det_tol, **kw)
    elif prop == "weak-cvdp":
        verdict = vdp_mod.check_weak_cvdp(A, tol=cfg.zero_tol, det_tol=cfg.det_tol, **kw)
    else:
        verdict = vdp_mod.check_prop_sv1(A, tol=cfg.zero_tol, **kw)
    _write_or_print(fileio.dumps_report(verdict.to_dict()), out)


@cli.command("verify-cvds")
@click.argument("system_file")
@click.option("--t0", type=float, default=0.0, show_default=True, help="Start time.")
@click.option("--grid", required=True,
              help="Comma-separated increasing times at which to test the transition matrix.")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@guarded
@common_options
def verify_cvds_cmd(system_file, t0, grid, out, cfg):
    """Check positivity of all odd-order transition-matrix minors on a time grid."""
    sys_ = fileio.load_system(system_file)
    try:
        t_grid = [float(tok) for tok in grid.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParseError("bad grid: %s" % exc) from exc
    result = lindyn.verify_cvds(sys_, t0, t_grid, cfg.step, tol=cfg.zero_tol)
    _write_or_print(fileio.dumps_report(result), out)


@cli.command()
@click.argument("system_file")
@click.option("--x0", "x0_file", required=True, help="Initial state (JSON array or CSV line).")
@click.option("--t0", type=float, default=0.0, show_default=True, help="Start time.")
@click.option("--t1", type=float, required=True, help="End time.")
@click.option("--out", "outdir", required=True,
              help="Output directory for the CSV series, event list, and figures.")
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="Render PNG figures next to the CSV output.")
@guarded
@common_options
def simulate(system_file, x0_file, t0, t1, outdir, plot, cfg):
    """Simulate dx/dt = A(t)x and monitor all sign counters."""
    sys_ = fileio.load_system(system_file)
    x0 = fileio.load_vector(x0_file)
    traj = lindyn.simulate(sys_, x0, t0, t1, cfg.step, zero_tol=cfg.zero_tol)
    os.makedirs(outdir, exist_ok=True)
    header = (
        ["t"]
        + ["x%d" % (i + 1) for i in range(sys_.dim)]
        + ["s_minus", "s_plus", "sc_minus", "sc_plus"]
    )
    rows = [
        [t, *x, c.s_minus, c.s_plus, c.sc_minus, c.sc_plus]
        for t, x, c in zip(traj.times, traj.states, traj.counts)
    ]
    fileio.write_csv(os.path.join(outdir, "timeseries.csv"), header, rows)
    events = {"events": [e.to_dict() for e in traj.events]}
    with open(os.path.join(outdir, "events.json"), "w", encoding="utf-8") as fh:
        fh.write(fileio.dumps_report(events))
    if plot:
        from . import plots

        plots.save_state_figure(
            os.path.join(outdir, "states.png"), traj.times, traj.states, "state trajectory"
        )
        plots.save_count_figure(
            os.path.join(outdir, "counts.png"), traj.times, traj.counts, "sign-variation counters"
        )
    click.echo("wrote %s" % outdir)


@cli.command()
@click.argument("params_file")
@click.option("--out", "outdir", required=True,
              help="Output directory for the CSV series, event list, and figures.")
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="Render PNG figures next to the CSV output.")
@guarded
@common_options
def rfmr(params_file, outdir, plot, cfg):
    """Simulate the ring flow model with its variational system."""
    params, x0, z0, horizon, step = fileio.load_rfmr_spec(params_file)
    if step is None:
        step = cfg.step
    if z0 is None:
        z0 = rfmr_mod.rfmr_rhs(params, x0)
    traj_x, traj_z = rfmr_mod.simulate_with_variational(
        params, x0, z0, horizon, step, zero_tol=cfg.zero_tol
    )
    os.makedirs(outdir, exist_ok=True)
    n = params.n
    fileio.write_csv(
        os.path.join(outdir, "x.csv"),
        ["t"] + ["x%d" % (i + 1) for i in range(n)],
        [[t, *x] for t, x in zip(traj_x.times, traj_x.states)],
    )
    fileio.write_csv(
        os.path.join(outdir, "z.csv"),
        ["t"] + ["z%d" % (i + 1) for i in range(n)],
        [[t, *z] for t, z in zip(traj_z.times, traj_z.states)],
    )
    flows = np.array([rfmr_mod.link_flows(params, x) for x in traj_x.states])
    fileio.write_csv(
        os.path.join(outdir, "flows.csv"),
        ["t"] + ["flow%d" % (i + 1) for i in range(n)],
        [[t, *f] for t, f in zip(traj_x.times, flows)],
    )
    fileio.write_csv(
        os.path.join(outdir, "counts.csv"),
        ["t", "s_minus", "s_plus", "sc_minus", "sc_plus"],
        [
            [t, c.s_minus, c.s_plus, c.sc_minus, c.sc_plus]
            for t, c in zip(traj_z.times, traj_z.counts)
        ],
    )
    events = {"events": [e.to_dict() for e in traj_z.events]}
    with open(os.path.join(outdir, "events.json"), "w", encoding="utf-8") as fh:
        fh.write(fileio.dumps_report(events))
    if plot:
        from . import plots

        plots.save_state_figure(
            os.path.join(outdir, "x.png"), traj_x.times, traj_x.states, "site occupancies", "x_i(t)"
        )
        plots.save_state_figure(
            os.path.join(outdir, "z.png"), traj_z.times, traj_z.states, "variational state", "z_i(t)"
        )
        plots.save_flow_figure(os.path.join(outdir, "flows.png"), traj_x.times, flows, "link flows")
        plots.save_count_figure(
            os.path.join(outdir, "counts.png"),
            traj_z.times,
            traj_z.counts,
            "variational sign-variation counters",
        )
    click.echo("wrote %s" % outdir)


def main():
    cli(auto_envvar_prefix="CYCLICVDP")


if __name__ == "__main__":
    main()
