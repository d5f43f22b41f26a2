"""Command-line surface: generators, diagnostics, and report files.

Measures travel as CSV or JSON (format by extension); analysis commands
read a measure file and write delimited results to --output or stdout.
Report-emitting commands optionally render PNG figures next to the data
when --figures DIR is given. Exit codes: 0 success, 1 validation or input
error, 2 budget or convergence failure (the report is still written).
Identical inputs and flags produce byte-identical outputs.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import diagnostics as diag
from . import figures as figs
from .curvature import curvature_ratio_scan, menger_c2
from .density import density_profile
from .errors import BudgetExceeded, CauchyLabError, InvalidParameter, InvalidScales, ParseError
from .measure import (
    CantorSpec,
    Cube,
    generate_cantor,
    generate_circle,
    generate_disc,
    generate_segment,
    load_measure,
    measure_to_text,
    save_measure,
)
from .operator import CAUCHY, IM_CAUCHY, build_truncated, operator_norm, riesz, truncation_gap

_FMT = ".17g"


def _f(x: float) -> str:
    return format(float(x), _FMT)


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_floats(text: str, label: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise InvalidScales(f"{label} must be a comma-separated float list, got {text!r}")
    if not vals:
        raise InvalidScales(f"{label} is empty")
    return vals


def _parse_int(text: str, label: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidParameter(f"{label} must be an integer, got {text!r}")


def _parse_float(text: str, label: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidParameter(f"{label} must be a number, got {text!r}")


def _load(path: str):
    try:
        return load_measure(path)
    except FileNotFoundError:
        _fail(f"cannot read measure file: {path}", 1)


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _kernel_from_flags(name: str, riesz_n: str, riesz_d: str):
    if name == "cauchy":
        return CAUCHY
    if name == "im-cauchy":
        return IM_CAUCHY
    if name == "riesz":
        return riesz(_parse_int(riesz_n, "--riesz-n"), _parse_int(riesz_d, "--riesz-d"))
    raise InvalidParameter(f"unknown kernel {name!r}")


def _guarded(fn):
    """Map library errors onto the exit-code contract."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceeded as exc:
            _fail(str(exc), 2)
        except (CauchyLabError, ParseError) as exc:
            _fail(str(exc), 1)
        except OSError as exc:
            _fail(str(exc), 1)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Numerical diagnostics for finite planar measures."""


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

@main.group()
def gen():
    """Generate a measure file."""


def _write_measure(mu, output):
    if output:
        save_measure(mu, output)
    else:
        click.echo(measure_to_text(mu, "json"), nl=False)


@gen.command("cantor")
@click.option("--lambda", "lambda_", required=True,
              help="Scaling factor, or comma list with one factor per generation.")
@click.option("--depth", required=True, help="Construction depth n (4^n atoms).")
@click.option("--output", "-o", default=None, help="Measure file (.csv or .json).")
@_guarded
def gen_cantor(lambda_, depth, output):
    """Corner Cantor measure: 4^n atoms of weight 4^-n."""
    depth_i = _parse_int(depth, "--depth")
    lams = _parse_floats(lambda_, "--lambda")
    if len(lams) == 1:
        lams = lams * max(depth_i, 1)
    _write_measure(generate_cantor(CantorSpec(tuple(lams), depth_i)), output)


@gen.command("segment")
@click.option("--start", default="0", help="Left endpoint.")
@click.option("--end", default="1", help="Right endpoint.")
@click.option("--count", required=True, help="Number of atoms.")
@click.option("--output", "-o", default=None)
@_guarded
def gen_segment(start, end, count, output):
    """Midpoint discretization of arclength on a horizontal segment."""
    mu = generate_segment(
        _parse_float(start, "--start"), _parse_float(end, "--end"),
        _parse_int(count, "--count"),
    )
    _write_measure(mu, output)


@gen.command("circle")
@click.option("--radius", default="1", help="Circle radius.")
@click.option("--count", required=True, help="Number of atoms.")
@click.option("--output", "-o", default=None)
@_guarded
def gen_circle(radius, count, output):
    """Equally spaced arclength quadrature of a circle."""
    mu = generate_circle(_parse_float(radius, "--radius"), _parse_int(count, "--count"))
    _write_measure(mu, output)


@gen.command("disc")
@click.option("--radius", default="1", help="Disc radius.")
@click.option("--grid", required=True, help="Cells per axis of the sampling grid.")
@click.option("--output", "-o", default=None)
@_guarded
def gen_disc(radius, grid, output):
    """Cell-center area quadrature of an open disc."""
    mu = generate_disc(_parse_float(radius, "--radius"), _parse_int(grid, "--grid"))
    _write_measure(mu, output)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@main.command()
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--scales", default=None,
              help="Comma list of decreasing cube sides: emit the per-scale ratio scan.")
@click.option("--threads", default=None, help="Worker threads (default: all cores).")
@click.option("--budget", default="1e10", help="Ordered-triple budget for cubic sums.")
@click.option("--output", "-o", default=None)
@click.option("--figures", "figures_dir", default=None, help="Directory for PNG figures.")
@_guarded
def curvature(input_, scales, threads, budget, output, figures_dir):
    """Total Menger curvature, or its per-cube ratio scan over scales."""
    mu = _load(input_)
    threads_i = None if threads is None else _parse_int(threads, "--threads")
    budget_f = _parse_float(budget, "--budget")
    if scales is None:
        result = menger_c2(mu, threads=threads_i, budget=budget_f)
        text = "label,value\n" + f"total,{_f(result.total)}\n" \
               + f"triple_count,{result.triple_count}\n"
        _emit(text, output)
        return
    ratios = curvature_ratio_scan(mu, _parse_floats(scales, "--scales"),
                                  threads=threads_i, budget=budget_f)
    text = "scale,max_ratio\n" + "".join(f"{_f(s)},{_f(r)}\n" for s, r in ratios)
    _emit(text, output)
    if figures_dir:
        Path(figures_dir).mkdir(parents=True, exist_ok=True)
        figs.save_curvature_figure(ratios, Path(figures_dir) / "curvature_ratios.png")


@main.command()
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--scales", required=True, help="Comma list of decreasing cube sides.")
@click.option("--exponent", default="1", help="Density exponent n.")
@click.option("--output", "-o", default=None)
@click.option("--figures", "figures_dir", default=None, help="Directory for PNG figures.")
@_guarded
def density(input_, scales, exponent, output, figures_dir):
    """Per-scale supremum of the n-dimensional cube density."""
    mu = _load(input_)
    profile = density_profile(mu, _parse_floats(scales, "--scales"),
                              n=_parse_int(exponent, "--exponent"))
    text = "scale,sup_density\n" + "".join(f"{_f(s)},{_f(v)}\n" for s, v in profile.entries)
    _emit(text, output)
    if figures_dir:
        Path(figures_dir).mkdir(parents=True, exist_ok=True)
        figs.save_profile_figure(profile, Path(figures_dir) / "density_profile.png")


@main.command()
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--kernel", default="cauchy", help="cauchy, im-cauchy, or riesz.")
@click.option("--riesz-n", default="1", help="Riesz kernel order.")
@click.option("--riesz-d", default="2", help="Riesz kernel dimension.")
@click.option("--eps", default="0", help="Truncation radius.")
@click.option("--tol", default="1e-10", help="Relative tolerance of the norm iteration.")
@click.option("--max-iter", default="20000", help="Power iteration cap.")
@click.option("--output", "-o", default=None)
@_guarded
def norm(input_, kernel, riesz_n, riesz_d, eps, tol, max_iter, output):
    """Operator norm of the truncated kernel matrix on L2(mu)."""
    mu = _load(input_)
    k = _kernel_from_flags(kernel, riesz_n, riesz_d)
    T = build_truncated(mu, k, _parse_float(eps, "--eps"))
    est = operator_norm(T, tol=_parse_float(tol, "--tol"),
                        max_iter=_parse_int(max_iter, "--max-iter"))
    text = ("label,value\n"
            f"norm,{_f(est.value)}\n"
            f"converged,{int(est.converged)}\n"
            f"iterations,{est.iterations}\n")
    _emit(text, output)
    if not est.converged:
        _fail(f"norm estimate unconverged after {est.iterations} iterations", 2)


@main.command()
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--eps-ladder", required=True,
              help="Comma list of decreasing truncation radii, consumed pairwise.")
@click.option("--kernel", default="cauchy", help="cauchy, im-cauchy, or riesz.")
@click.option("--riesz-n", default="1")
@click.option("--riesz-d", default="2")
@click.option("--tol", default="1e-8")
@click.option("--max-iter", default="5000")
@click.option("--output", "-o", default=None)
@click.option("--figures", "figures_dir", default=None, help="Directory for PNG figures.")
@_guarded
def gaps(input_, eps_ladder, kernel, riesz_n, riesz_d, tol, max_iter, output, figures_dir):
    """Truncation-gap ladder: norm of consecutive truncation differences."""
    mu = _load(input_)
    k = _kernel_from_flags(kernel, riesz_n, riesz_d)
    ladder = _parse_floats(eps_ladder, "--eps-ladder")
    if any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise InvalidScales(f"--eps-ladder must be strictly decreasing, got {ladder}")
    tol_f = _parse_float(tol, "--tol")
    iters = _parse_int(max_iter, "--max-iter")
    rows = []
    unconverged = False
    for eps2, eps1 in zip(ladder, ladder[1:]):
        est = truncation_gap(mu, k, eps1, eps2, tol=tol_f, max_iter=iters)
        unconverged = unconverged or not est.converged
        rows.append((eps1, eps2, est.value))
    text = "eps1,eps2,gap\n" + "".join(
        f"{_f(e1)},{_f(e2)},{_f(g)}\n" for e1, e2, g in rows
    )
    _emit(text, output)
    if figures_dir:
        Path(figures_dir).mkdir(parents=True, exist_ok=True)
        figs.save_gap_figure(rows, Path(figures_dir) / "truncation_gaps.png")
    if unconverged:
        _fail("at least one gap estimate is unconverged", 2)


@main.command("tv-check")
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--center", default=None, help="Cube center as comma list (default: bounding cube).")
@click.option("--side", default=None, help="Cube side (default: bounding cube).")
@click.option("--theta-const", default=None,
              help="Constant pointwise density of the modeled continuum measure.")
@click.option("--threads", default=None)
@click.option("--budget", default="1e10")
@click.option("--output", "-o", default=None)
@_guarded
def tv_check(input_, center, side, theta_const, threads, budget, output):
    """Identity check: squared indicator-image norm vs density + curvature terms."""
    mu = _load(input_)
    if (center is None) != (side is None):
        raise InvalidParameter("--center and --side must be given together")
    if center is None:
        cube = mu.bounding_cube(half_open=False, pad=1e-9)
    else:
        cube = Cube(_parse_floats(center, "--center"),
                    _parse_float(side, "--side"), half_open=False)
    dens = None
    if theta_const is not None:
        const = _parse_float(theta_const, "--theta-const")
        dens = lambda p: const  # noqa: E731
    threads_i = None if threads is None else _parse_int(threads, "--threads")
    import warnings as _warnings
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", diag.MissingDensityWarning)
        res = diag.tv_identity_residual(mu, cube, dens, threads=threads_i,
                                        budget=_parse_float(budget, "--budget"))
    text = ("label,value\n"
            f"lhs,{_f(res.lhs)}\n"
            f"rhs,{_f(res.rhs)}\n"
            f"residual,{_f(res.residual)}\n")
    _emit(text, output)


@main.command()
@click.option("--input", "-i", "input_", required=True, help="Measure file.")
@click.option("--scales", required=True, help="Comma list of decreasing cube sides.")
@click.option("--eps-ladder", required=True, help="Comma list of decreasing radii.")
@click.option("--density-threshold", default="0.2")
@click.option("--curvature-threshold", default="0.2")
@click.option("--gap-threshold", default="0.2")
@click.option("--threads", default=None)
@click.option("--budget", default="1e10")
@click.option("--output", "-o", default=None, help="Report file (.json or .csv).")
@click.option("--figures", "figures_dir", default=None, help="Directory for PNG figures.")
@_guarded
def verdict(input_, scales, eps_ladder, density_threshold, curvature_threshold,
            gap_threshold, threads, budget, output, figures_dir):
    """Full diagnostics report with a compactness verdict."""
    mu = _load(input_)
    thresholds = diag.VerdictThresholds(
        density=_parse_float(density_threshold, "--density-threshold"),
        curvature=_parse_float(curvature_threshold, "--curvature-threshold"),
        gap=_parse_float(gap_threshold, "--gap-threshold"),
    )
    report = diag.compactness_verdict(
        mu,
        _parse_floats(scales, "--scales"),
        _parse_floats(eps_ladder, "--eps-ladder"),
        thresholds=thresholds,
        threads=None if threads is None else _parse_int(threads, "--threads"),
        budget=_parse_float(budget, "--budget"),
    )
    if output and output.endswith(".csv"):
        _emit(diag.report_to_csv(report), output)
    else:
        _emit(diag.report_to_json(report), output)
    if figures_dir:
        figs.save_report_figures(report, figures_dir)
    if report.unconverged:
        _fail("at least one truncation-gap estimate is unconverged", 2)


@main.command("cantor-scan")
@click.option("--lambda", "lambda_", required=True,
              help="Scaling factor, or comma list with one factor per generation.")
@click.option("--depth", required=True, help="Construction depth.")
@click.option("--convention", default="density", help="density or factor.")
@click.option("--curvature-depth", default=None,
              help="Also compare total curvature per mass at this depth.")
@click.option("--threads", default=None)
@click.option("--budget", default="1e10")
@click.option("--output", "-o", default=None)
@click.option("--figures", "figures_dir", default=None, help="Directory for PNG figures.")
@_guarded
def cantor_scan(lambda_, depth, convention, curvature_depth, threads, budget,
                output, figures_dir):
    """Generation density parameters of a Cantor measure, optionally with curvature."""
    depth_i = _parse_int(depth, "--depth")
    lams = _parse_floats(lambda_, "--lambda")
    if len(lams) == 1:
        lams = lams * max(depth_i, 1)
    spec = CantorSpec(tuple(lams), depth_i)
    series = diag.cantor_theta_series(spec, convention)
    text = "k,theta,partial_sum\n" + "".join(
        f"{k},{_f(t)},{_f(p)}\n" for k, t, p in series
    )
    if curvature_depth is not None:
        check = diag.cantor_curvature_check(
            spec,
            _parse_int(curvature_depth, "--curvature-depth"),
            convention,
            threads=None if threads is None else _parse_int(threads, "--threads"),
            budget=_parse_float(budget, "--budget"),
        )
        text += (f"c2_per_mass,,{_f(check.c2_per_mass)}\n"
                 f"theta_partial_sum,,{_f(check.theta_partial_sum)}\n"
                 f"ratio,,{_f(check.ratio)}\n")
    _emit(text, output)
    if figures_dir:
        Path(figures_dir).mkdir(parents=True, exist_ok=True)
        figs.save_theta_figure(series, Path(figures_dir) / "theta_series.png")


if __name__ == "__main__":
    main()
