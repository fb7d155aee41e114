"""Command-line front end: JSON in, canonical JSON out.

Exit codes: 0 success, 1 domain/precondition failure (structured JSON
error on stdout), 2 usage errors.  All randomized paths honor
--prng-seed; output bytes are stable across runs for fixed inputs.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from . import clark, fock, jsonio, nc_expr, realization, reproduce, singularity, sl_det
from .errors import NcclarkError
from .nc_linalg import (
    adjoint_tuple,
    beurling_estimate,
    is_pure,
    joint_spectral_radius,
    row_norm,
    transpose_tuple,
)


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return complex(str(value).replace(" ", ""))
        except ValueError:
            self.fail(f"{value!r} is not a complex literal (try '0.5+0.5j')", param, ctx)


COMPLEX = ComplexParam()


def _emit(ctx, obj) -> None:
    if ctx.obj["format"] == "pretty":
        click.echo(jsonio.pretty_dumps(obj))
    else:
        click.echo(jsonio.canonical_dumps(obj))


@contextmanager
def _guard(ctx):
    try:
        yield
    except NcclarkError as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        cond = getattr(exc, "cond", None)
        if cond is not None:
            err["cond"] = float(cond)
        _emit(ctx, {"error": err})
        sys.exit(1)


def _load(path: str, what: str) -> dict:
    return jsonio.loads_checked(Path(path).read_text(), what)


def _load_tuple(path: str):
    return jsonio.decode_tuple(_load(path, "MatrixTuple"))


def _load_fm(path: str):
    return jsonio.decode_fm(_load(path, "FMRealization"))


def _load_seed(path: str):
    return jsonio.decode_seed(_load(path, "ClarkSeed"))


def _save_figure(figdir: str, name: str, draw) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    Path(figdir).mkdir(parents=True, exist_ok=True)
    out = str(Path(figdir) / name)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    draw(ax)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


@click.group()
@click.option("--tol", type=float, default=1e-9, envvar="NCCLARK_TOL", show_default=True)
@click.option("--prng-seed", type=int, default=0, show_default=True)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "pretty"]),
    default="json",
    show_default=True,
)
@click.pass_context
def main(ctx, tol, prng_seed, fmt):
    """Evaluate, compile, and analyze NC rational functions and their Clark measures."""
    ctx.obj = {"tol": tol, "seed": prng_seed, "format": fmt}


@main.command("parse")
@click.option("--expr", required=True)
@click.option("--d", "arity", type=int, default=2, show_default=True)
@click.pass_context
def parse_cmd(ctx, expr, arity):
    """Parse an NC rational expression and echo its canonical form."""
    with _guard(ctx):
        ast = nc_expr.parse(expr, arity)
        _emit(
            ctx,
            {
                "d": arity,
                "expr": nc_expr.to_str(ast),
                "ast": nc_expr.ast_to_obj(ast),
                "regular_at_zero": nc_expr.regular_at_zero(ast),
            },
        )


@main.command("eval")
@click.option("--expr", default=None, help="expression source")
@click.option("--fm", "fm_path", type=click.Path(exists=True), default=None)
@click.option("--point", "point_path", type=click.Path(exists=True), required=True)
@click.option("--d", "arity", type=int, default=None)
@click.pass_context
def eval_cmd(ctx, expr, fm_path, point_path, arity):
    """Evaluate an expression or realization at a matrix tuple."""
    with _guard(ctx):
        if (expr is None) == (fm_path is None):
            raise click.UsageError("need exactly one of --expr / --fm")
        Z = _load_tuple(point_path)
        if expr is not None:
            ast = nc_expr.parse(expr, arity if arity is not None else Z.d)
            val = nc_expr.eval_expr(ast, Z)
        else:
            val = realization.transfer_eval(_load_fm(fm_path), Z)
        _emit(ctx, {"n": Z.n, "value": jsonio.encode_matrix(val)})


@main.command("realize")
@click.option("--expr", required=True)
@click.option("--d", "arity", type=int, default=2, show_default=True)
@click.pass_context
def realize_cmd(ctx, expr, arity):
    """Compile an expression to a minimal FM realization."""
    with _guard(ctx):
        ast = nc_expr.parse(expr, arity)
        fm = realization.minimize(realization.expr_to_fm(ast, arity))
        _emit(ctx, {"dim": fm.m, "fm": jsonio.encode_fm(fm)})


@main.command("minimize")
@click.option("--fm", "fm_path", type=click.Path(exists=True), required=True)
@click.pass_context
def minimize_cmd(ctx, fm_path):
    """Minimize an FM realization."""
    with _guard(ctx):
        fm0 = _load_fm(fm_path)
        fm = realization.minimize(fm0)
        _emit(ctx, {"dim_in": fm0.m, "dim_out": fm.m, "fm": jsonio.encode_fm(fm)})


@main.command("coeffs")
@click.option("--fm", "fm_path", type=click.Path(exists=True), required=True)
@click.option("--maxdeg", type=int, default=4, show_default=True)
@click.pass_context
def coeffs_cmd(ctx, fm_path, maxdeg):
    """Power-series coefficients through a degree cutoff."""
    with _guard(ctx):
        fm = _load_fm(fm_path)
        table = realization.coefficients(fm, maxdeg)
        _emit(ctx, jsonio.encode_series(table, fm.d, maxdeg))


@main.command("spr")
@click.option("--input", "tuple_path", type=click.Path(exists=True), required=True)
@click.option("--beurling-k", type=int, default=50, show_default=True)
@click.pass_context
def spr_cmd(ctx, tuple_path, beurling_k):
    """Joint spectral radius of a matrix tuple, two ways."""
    with _guard(ctx):
        A = _load_tuple(tuple_path)
        _emit(
            ctx,
            {
                "spr": joint_spectral_radius(A),
                "beurling": beurling_estimate(A, beurling_k),
                "beurling_k": beurling_k,
                "row_norm": row_norm(A),
                "is_pure": is_pure(A, tol=ctx.obj["tol"]),
            },
        )


@main.command("membership")
@click.option("--fm", "fm_path", type=click.Path(exists=True), required=True)
@click.pass_context
def membership_cmd(ctx, fm_path):
    """Fock-space membership of the transfer function (after minimization)."""
    with _guard(ctx):
        fm = realization.minimize(_load_fm(fm_path))
        rep = realization.fock_membership(fm)
        if rep["member"]:
            rep["hardy_norm_sq"] = realization.hardy_norm_sq(fm)
        _emit(ctx, rep)


@main.command("inner")
@click.option("--fm", "fm_path", type=click.Path(exists=True), required=True)
@click.pass_context
def inner_cmd(ctx, fm_path):
    """Inner-multiplier certificate."""
    with _guard(ctx):
        fm = _load_fm(fm_path)
        if not fm.minimal:
            fm = realization.minimize(fm)
        _emit(ctx, fock.inner_certificate(fm, tol=ctx.obj["tol"]))


@main.group("clark")
def clark_group():
    """Clark seed operations: moments, perturbation family, multiplier, classification."""


@clark_group.command("moments")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.option("--maxdeg", type=int, default=3, show_default=True)
@click.pass_context
def clark_moments_cmd(ctx, seed_path, maxdeg):
    with _guard(ctx):
        seed = _load_seed(seed_path)
        word_list = [w for k in range(maxdeg + 1) for w in realization.words_of_length(seed.d, k)]
        table = clark.moments(seed, word_list)
        _emit(ctx, jsonio.encode_series(table, seed.d, maxdeg))


@clark_group.command("family")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.option("--zeta", type=COMPLEX, required=True)
@click.pass_context
def clark_family_cmd(ctx, seed_path, zeta):
    with _guard(ctx):
        seed = _load_seed(seed_path)
        S = clark.clark_family(seed, zeta)
        _emit(ctx, {"zeta": zeta, "tuple_starred": jsonio.encode_tuple(S)})


@clark_group.command("build")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.pass_context
def clark_build_cmd(ctx, seed_path):
    with _guard(ctx):
        seed = _load_seed(seed_path)
        fm = clark.minratreal_fm(seed)
        _emit(ctx, {"b0": clark.b_zero(seed), "dim": fm.m, "fm": jsonio.encode_fm(fm)})


@clark_group.command("classify")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.pass_context
def clark_classify_cmd(ctx, seed_path):
    with _guard(ctx):
        seed = _load_seed(seed_path)
        _emit(ctx, clark.classify(seed, prng_seed=ctx.obj["seed"], tol=ctx.obj["tol"]))


@main.command("ad-report")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.option("--points", default=None, help="comma-separated complex literals")
@click.option("--figures", "figdir", type=click.Path(), default=None)
@click.pass_context
def ad_report_cmd(ctx, seed_path, points, figdir):
    """Pairwise mutual-singularity report over circle points."""
    with _guard(ctx):
        seed = _load_seed(seed_path)
        pts = None
        if points:
            pts = [COMPLEX.convert(p, None, None) for p in points.split(",")]
        rep = singularity.ncAD_report(seed, points=pts, prng_seed=ctx.obj["seed"])
        if figdir:
            M = np.array(rep["pairwise_singular"], dtype=float)

            def draw(ax):
                im = ax.imshow(M, cmap="Greys", vmin=0, vmax=1)
                ax.set_xlabel("point index")
                ax.set_ylabel("point index")
                ax.set_title("pairwise mutual singularity (1 = singular)")
                ax.figure.colorbar(im, ax=ax)

            rep["figures"] = [_save_figure(figdir, "ad_pairwise.png", draw)]
        _emit(ctx, rep)


@main.command("sl-check")
@click.option("--expr", default=None)
@click.option("--fm", "fm_path", type=click.Path(exists=True), default=None)
@click.option("--d", "arity", type=int, default=2, show_default=True)
@click.option("--maxlevel", type=int, default=6, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True, help="points per matrix level")
@click.option("--figures", "figdir", type=click.Path(), default=None)
@click.pass_context
def sl_check_cmd(ctx, expr, fm_path, arity, maxlevel, samples, figdir):
    """Constant-determinant trace conditions plus the direct determinant probe."""
    with _guard(ctx):
        if (expr is None) == (fm_path is None):
            raise click.UsageError("need exactly one of --expr / --fm")
        if expr is not None:
            fm = realization.minimize(realization.expr_to_fm(nc_expr.parse(expr, arity), arity))
        else:
            fm = realization.minimize(_load_fm(fm_path))
        pts = sl_det.sample_points(
            fm.d, per_level=samples, prng_seed=ctx.obj["seed"]
        )
        rep = {
            "trace_conditions": sl_det.sl_condition_check(fm, pts, maxlevel, tol=ctx.obj["tol"]),
            "direct": sl_det.det_constancy_direct(fm, pts),
        }
        if figdir:
            res = rep["trace_conditions"]["per_level"]

            def draw(ax):
                ax.bar(range(1, len(res) + 1), [max(r, 1e-18) for r in res])
                ax.set_yscale("log")
                ax.axhline(ctx.obj["tol"], color="red", linestyle="--", label="tol")
                ax.set_xlabel("level")
                ax.set_ylabel("max residual")
                ax.set_title("trace-condition residuals")
                ax.legend()

            rep["figures"] = [_save_figure(figdir, "sl_residuals.png", draw)]
        _emit(ctx, rep)


@main.command("boundary")
@click.option("--seed", "seed_path", type=click.Path(exists=True), required=True)
@click.option("--zeta", type=COMPLEX, required=True)
@click.option("--figures", "figdir", type=click.Path(), default=None)
@click.pass_context
def boundary_cmd(ctx, seed_path, zeta, figdir):
    """Boundary eigenvalue check for the Clark perturbation at zeta."""
    with _guard(ctx):
        seed = _load_seed(seed_path)
        rep = singularity.boundary_eigencheck(seed, zeta, tol=ctx.obj["tol"])
        if figdir:
            figures = []
            radial = None
            try:
                fm = clark.minratreal_fm(seed)
                Tz = adjoint_tuple(clark.clark_family(seed, np.conj(zeta)))
                M1 = realization.transfer_eval(fm, transpose_tuple(Tz)).T
                evals, vecs = np.linalg.eig(M1)
                v = vecs[:, int(np.argmin(np.abs(evals - zeta)))]
                radial = singularity.boundary_limit(fm, Tz, v, v, tol=1e-4)
            except NcclarkError:
                radial = None
            if radial is not None:

                def draw(ax):
                    r = radial["r_grid"]
                    ax.plot(r, [abs(v) for v in radial["values"]], label="|v* b(rA) v|")
                    ax.plot(
                        r,
                        [np.sqrt(max(k, 0.0)) for k in radial["kernel_norms_sq"]],
                        label="kernel bound",
                    )
                    ax.set_xlabel("r")
                    ax.set_title("radial boundary data")
                    ax.legend()

                figures.append(_save_figure(figdir, "boundary_radial.png", draw))
            else:
                dists = [p.get("eig_distance", np.nan) for p in rep["pieces"]]

                def draw(ax):
                    ax.bar(range(len(dists)), [max(d, 1e-18) for d in dists])
                    ax.set_yscale("log")
                    ax.set_xlabel("piece")
                    ax.set_ylabel("|zeta - nearest eigenvalue|")
                    ax.set_title("per-piece boundary eigenvalue distance")

                figures.append(_save_figure(figdir, "boundary_pieces.png", draw))
            rep["figures"] = figures
        _emit(ctx, rep)


@main.command("reproduce")
@click.option("--names", default=None, help="comma-separated check names (default: all)")
@click.option("--figures", "figdir", type=click.Path(), default=None)
@click.pass_context
def reproduce_cmd(ctx, names, figdir):
    """Replay the worked closed-form examples and report residuals."""
    with _guard(ctx):
        chosen = names.split(",") if names else None
        if chosen:
            unknown = [n for n in chosen if n not in reproduce.REGISTRY]
            if unknown:
                raise click.UsageError(f"unknown checks: {', '.join(unknown)}")
        rows = reproduce.run_all(prng_seed=ctx.obj["seed"], names=chosen)
        rep = {"checks": rows, "all_pass": all(r["pass"] for r in rows)}
        if figdir:

            def draw(ax):
                xs = range(len(rows))
                ax.bar(xs, [max(r["residual"], 1e-18) for r in rows])
                ax.plot(xs, [r["tol"] for r in rows], "r--", label="tol")
                ax.set_yscale("log")
                ax.set_xticks(list(xs))
                ax.set_xticklabels([r["name"] for r in rows], rotation=60, ha="right", fontsize=7)
                ax.set_ylabel("residual")
                ax.set_title("closed-form replay residuals")
                ax.legend()

            rep["figures"] = [_save_figure(figdir, "reproduce_residuals.png", draw)]
        _emit(ctx, rep)
        if not rep["all_pass"]:
            sys.exit(1)


if __name__ == "__main__":
    main()
