"""CLI for bseries-toolkit."""

import json
import logging
from pathlib import Path

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .aromatic import (
    aromatic_first_order_method_demo,
    aromatic_method_series,
    count_aromatic,
    enumerate_aromatic,
)
from .bseries import BSeries, compose, inverse
from .catalog import (
    field_registry,
    get_field,
    get_series,
    get_tableau,
    pendulum_hamiltonian,
    relatedness_knockout_demo,
    series_names,
)
from .config import DEFAULT_AROMATIC_CAP, DEFAULT_ORDER_CAP, ENV_AROMATIC_CAP, ENV_ORDER_CAP, set_overrides
from .errors import BSeriesError, UnknownNameError
from .harness import TrajectoryWriter, integrate
from .methods import euler_step
from .models import dump_document, format_fraction, load_records
from .prelie import (
    TreeCombination,
    graft,
    jacobi_defect,
    prelie_defect,
    random_combination,
    tree_triples,
)
from .rk import ButcherTableau, check_order, dump_tableau, gauss_tableau, load_tableau, order_conditions
from .trees import canonicalize, count_trees, enumerate_trees

console = Console()


class BSeriesGroup(click.Group):
    """Root group: domain errors become click errors with exit code 1."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except BSeriesError as e:
            raise click.ClickException(str(e)) from e


def emit_json(data) -> None:
    click.echo(json.dumps(data, indent=2))


def json_option(func):
    return click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a table")(func)


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}") from e


def resolve_field(name: str):
    try:
        return get_field(name)
    except UnknownNameError as e:
        raise click.BadParameter(str(e), param_hint="--field") from e


def resolve_tableau(ref: str) -> ButcherTableau:
    """A tableau file path, or a catalog name."""
    if Path(ref).is_file():
        return load_tableau(ref)
    try:
        return get_tableau(ref)
    except UnknownNameError as e:
        raise click.BadParameter(f"{ref!r} is neither a file nor a named tableau ({e})") from e


def resolve_series(ref: str, order: int) -> BSeries:
    """A coefficient-record file truncated at order, or a catalog name."""
    if Path(ref).is_file():
        series = BSeries.from_records(load_records(ref))
        return series.truncate(order) if order < series.order else series
    try:
        return get_series(ref, order)
    except UnknownNameError as e:
        raise click.BadParameter(f"{ref!r} is neither a file nor a named series ({e})") from e


def show_series(series: BSeries, title: str, as_json: bool, output: str | None) -> None:
    records = [r.model_dump() for r in series.records()]
    if output:
        dump_document(records, output)
    if as_json:
        emit_json(records)
        return
    table = Table(title=title)
    table.add_column("tree", style="cyan")
    table.add_column("order", justify="right")
    table.add_column("coefficient", style="green", justify="right")
    for tree, coeff in series.items():
        table.add_row(tree.encoding or "()", str(tree.order), format_fraction(coeff))
    console.print(table)


def show_combination(combo: TreeCombination, title: str, as_json: bool) -> None:
    if as_json:
        emit_json([r.model_dump() for r in combo.records()])
        return
    table = Table(title=title)
    table.add_column("tree", style="cyan")
    table.add_column("coefficient", style="green", justify="right")
    for tree, coeff in combo.items():
        table.add_row(tree.encoding, format_fraction(coeff))
    console.print(table)


def show_vector(rows: list[tuple[str, np.ndarray]], title: str) -> None:
    table = Table(title=title)
    table.add_column("quantity", style="cyan")
    table.add_column("value", style="green")
    for label, vec in rows:
        table.add_row(label, ", ".join(f"{v:.12g}" for v in np.atleast_1d(vec)))
    console.print(table)


@click.group(cls=BSeriesGroup)
@click.option("--verbose", "-v", is_flag=True, help="Log library progress to stderr")
@click.option(
    "--order-cap",
    envvar=ENV_ORDER_CAP,
    type=click.IntRange(1, 20),
    default=None,
    help=f"Largest tree order (default {DEFAULT_ORDER_CAP})",
)
@click.option(
    "--aromatic-cap",
    envvar=ENV_AROMATIC_CAP,
    type=click.IntRange(1, 10),
    default=None,
    help=f"Largest aromatic tree size (default {DEFAULT_AROMATIC_CAP})",
)
@click.pass_context
def main(ctx, verbose: bool, order_cap: int | None, aromatic_cap: int | None):
    """Butcher-series algebra: trees, series, Runge-Kutta order conditions."""
    ctx.ensure_object(dict)
    set_overrides(order_cap=order_cap, aromatic_cap=aromatic_cap)
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(message)s",
            handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
            force=True,
        )


# --- trees ---


@main.group()
def trees():
    """Rooted trees."""


@trees.command("enumerate")
@click.option("--order", "n", type=int, required=True, help="Number of nodes")
@json_option
def trees_enumerate(n: int, as_json: bool):
    """All rooted trees with N nodes in canonical order."""
    found = enumerate_trees(n)
    if as_json:
        emit_json([{"tree": t.encoding, "symmetry": t.symmetry, "density": t.density} for t in found])
        return
    table = Table(title=f"Rooted trees of order {n}")
    table.add_column("tree", style="cyan")
    table.add_column("sigma", justify="right")
    table.add_column("gamma", justify="right")
    for t in found:
        table.add_row(t.encoding, str(t.symmetry), str(t.density))
    console.print(table)


def count_table(title: str, label: str, counts: list[int]) -> None:
    table = Table(title=title)
    table.add_column("n", style="cyan")
    for k in range(1, len(counts) + 1):
        table.add_column(str(k), justify="right")
    table.add_row(label, *(str(c) for c in counts))
    console.print(table)


@trees.command("count")
@click.option("--max", "n_max", type=int, required=True, help="Largest order")
@json_option
def trees_count(n_max: int, as_json: bool):
    """Number of rooted trees of each order up to MAX."""
    count_trees(n_max)
    counts = [count_trees(k) for k in range(1, n_max + 1)]
    if as_json:
        emit_json({"n": list(range(1, n_max + 1)), "rooted_trees": counts})
        return
    count_table("Rooted trees", "# rooted trees", counts)


# --- aromatic ---


@main.group()
def aromatic():
    """Aromatic trees."""


@aromatic.command("enumerate")
@click.option("--order", "n", type=int, required=True, help="Number of nodes")
@json_option
def aromatic_enumerate(n: int, as_json: bool):
    """All aromatic trees with N nodes, as canonical parent sequences."""
    found = enumerate_aromatic(n)
    if as_json:
        emit_json([{"aromatic": a.encoding, "rooted": a.is_rooted} for a in found])
        return
    table = Table(title=f"Aromatic trees with {n} nodes")
    table.add_column("parents", style="cyan")
    table.add_column("rooted tree", justify="right")
    table.add_column("cycles", justify="right")
    for a in found:
        tree, cycles = a.components()
        table.add_row(a.encoding, tree.encoding, str(len(cycles)))
    console.print(table)


@aromatic.command("count")
@click.option("--max", "n_max", type=int, required=True, help="Largest size")
@json_option
def aromatic_count(n_max: int, as_json: bool):
    """Number of aromatic trees of each size up to MAX."""
    count_aromatic(n_max)
    counts = [count_aromatic(k) for k in range(1, n_max + 1)]
    if as_json:
        emit_json({"n": list(range(1, n_max + 1)), "aromatic_trees": counts})
        return
    count_table("Aromatic trees", "# aromatic trees", counts)


# --- bseries ---


@main.group()
def bseries():
    """B-series: named series, composition, inverse."""


def order_option(func):
    return click.option("--order", "order", type=int, required=True, help="Truncation order")(func)


def output_option(func):
    return click.option(
        "--output", "-o", type=click.Path(dir_okay=False), help="Also write coefficient records (JSON/YAML)"
    )(func)


def _named_series_command(name: str) -> None:
    @bseries.command(name, help=f"Coefficients of the {name} series.")
    @order_option
    @output_option
    @json_option
    def command(order: int, output: str | None, as_json: bool):
        show_series(get_series(name, order), f"{name} series to order {order}", as_json, output)


for _name in series_names():
    _named_series_command(_name)


@bseries.command("compose")
@click.argument("first")
@click.argument("second")
@order_option
@output_option
@json_option
def bseries_compose(first: str, second: str, order: int, output: str | None, as_json: bool):
    """Series of FIRST followed by SECOND (names or record files)."""
    result = compose(resolve_series(first, order), resolve_series(second, order))
    show_series(result, f"{first} then {second}", as_json, output)


@bseries.command("invert")
@click.argument("series")
@order_option
@output_option
@json_option
def bseries_invert(series: str, order: int, output: str | None, as_json: bool):
    """Inverse of SERIES in the Butcher group."""
    result = inverse(resolve_series(series, order))
    show_series(result, f"inverse of {series}", as_json, output)


# --- rk ---


@main.group()
def rk():
    """Runge-Kutta tableaux."""


@rk.command("conditions")
@click.option("--order", "p", type=int, required=True, help="Order to reach")
@json_option
def rk_conditions(p: int, as_json: bool):
    """Order conditions Phi(tree) = 1/gamma(tree) up to order P."""
    conditions = order_conditions(p)
    if as_json:
        emit_json([{"tree": t.encoding, "phi": format_fraction(v)} for t, v in conditions])
        return
    table = Table(title=f"{len(conditions)} order conditions up to order {p}")
    table.add_column("tree", style="cyan")
    table.add_column("order", justify="right")
    table.add_column("Phi =", style="green", justify="right")
    for t, v in conditions:
        table.add_row(t.encoding, str(t.order), format_fraction(v))
    console.print(table)


@rk.command("check")
@click.argument("tableau")
@click.option("--order-cap", "p_max", type=int, required=True, help="Highest order to test")
@click.option("--tol", type=click.FloatRange(min=0.0, min_open=True), default=None, help="Floating tolerance")
@json_option
def rk_check(tableau: str, p_max: int, tol: float | None, as_json: bool):
    """Attained order of TABLEAU (file or name)."""
    report = check_order(resolve_tableau(tableau), p_max, tol)
    if as_json:
        emit_json(report.to_dict())
        return
    click.echo(report.summary)
    if report.violations:
        click.echo("first violated: " + " ".join(report.violations))


@rk.command("gauss")
@click.option("--stages", "s", type=int, required=True, help="Number of stages")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the tableau (JSON/YAML)")
@json_option
def rk_gauss(s: int, output: str | None, as_json: bool):
    """The S-stage Gauss collocation tableau."""
    t = gauss_tableau(s)
    if output:
        dump_tableau(t, output)
    data = t.to_file().model_dump(exclude_none=True)
    if as_json:
        emit_json(data)
        return
    table = Table(title=f"{t.name} ({t.numeric_mode})")
    for j in range(t.stages):
        table.add_column(f"a[:, {j}]", justify="right")
    for row in data["a"]:
        table.add_row(*(str(x) for x in row))
    table.add_row(*(f"[green]{x}[/green]" for x in data["b"]))
    console.print(table)


@rk.command("integrate")
@click.argument("tableau")
@click.option("--field", "field_name", required=True, help=f"One of: {', '.join(field_registry.names())}")
@click.option("--x0", required=True, help="Initial point, comma-separated")
@click.option("--h", type=click.FloatRange(min=0.0, min_open=True), required=True, help="Step size")
@click.option("--steps", type=click.IntRange(min=0), required=True, help="Number of steps")
@click.option("--tol", type=click.FloatRange(min=0.0, min_open=True), default=None, help="Stage solver tolerance")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write step records (JSONL)")
@json_option
def rk_integrate(
    tableau: str, field_name: str, x0: str, h: float, steps: int, tol: float | None, output: str | None, as_json: bool
):
    """Fixed-step integration of a named field."""
    t = resolve_tableau(tableau)
    f = resolve_field(field_name)
    H = pendulum_hamiltonian() if field_name == "pendulum" else None
    writer = TrajectoryWriter(output) if output else None
    records = integrate(
        t, f, parse_point(x0), h, steps, tol=tol, hamiltonian=H, writer=writer,
        console=None if as_json else console,
    )
    if as_json:
        emit_json([r.to_dict() for r in records])
        return
    table = Table(title=f"{t.name} on {f.name}, h = {h:g}")
    table.add_column("step", justify="right")
    table.add_column("t", justify="right")
    table.add_column("x", style="green")
    if H is not None:
        table.add_column("H", justify="right")
    for r in (records[0], records[-1]):
        row = [str(r.step), f"{r.t:g}", ", ".join(f"{v:.12g}" for v in r.x)]
        if H is not None:
            row.append(f"{r.energy:.15g}")
        table.add_row(*row)
    console.print(table)


# --- prelie ---


@main.group()
def prelie():
    """Grafting product on trees."""


@prelie.command("graft")
@click.argument("t1")
@click.argument("t2")
@json_option
def prelie_graft(t1: str, t2: str, as_json: bool):
    """T1 grafted onto every node of T2."""
    a, b = canonicalize(t1), canonicalize(t2)
    show_combination(graft(a, b), f"{a.encoding} |> {b.encoding}", as_json)


@prelie.command("identity-check")
@click.option("--max-order", "max_order", type=int, required=True, help="Largest total order of tree triples")
@click.option("--samples", type=click.IntRange(min=0), default=100, show_default=True, help="Random combinations")
@click.option("--seed", type=int, default=0, show_default=True)
@json_option
@click.pass_context
def prelie_identity_check(ctx, max_order: int, samples: int, seed: int, as_json: bool):
    """Pre-Lie and Jacobi identities on tree triples and random combinations."""
    failures: list[str] = []
    triples = 0
    for a, b, c in tree_triples(max_order):
        triples += 1
        A, B, C = (TreeCombination.of(t) for t in (a, b, c))
        if prelie_defect(A, B, C):
            failures.append(f"pre-Lie {a.encoding} {b.encoding} {c.encoding}")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        A, B, C = (random_combination(rng, min(4, max_order)) for _ in range(3))
        if prelie_defect(A, B, C) or jacobi_defect(A, B, C):
            failures.append(f"random {A!r} {B!r} {C!r}")
    result = {"triples": triples, "samples": samples, "failures": failures, "passed": not failures}
    if as_json:
        emit_json(result)
    else:
        click.echo(f"{triples} tree triples, {samples} random samples: {'ok' if not failures else 'FAILED'}")
        for line in failures:
            click.echo(line)
    if failures:
        ctx.exit(1)


# --- demo ---


@main.group()
def demo():
    """Witnesses for the equivariance and relatedness facts."""


@demo.command("knockout")
@json_option
def demo_knockout(as_json: bool):
    """f div f is equivariant but breaks affine relatedness."""
    report = relatedness_knockout_demo()
    if as_json:
        emit_json(report.to_dict())
        return
    table = Table(title="Relatedness knockout")
    table.add_column("check", style="cyan")
    table.add_column("result")
    table.add_row("pair related", str(report.pair_related))
    table.add_row("f div f on the plane", ", ".join(f"{v:g}" for v in report.self_loop_source))
    table.add_row("f div f on the line", ", ".join(f"{v:g}" for v in report.self_loop_target))
    table.add_row("f div f transported", str(report.self_loop_transported))
    for enc, ok in report.tree_checks.items():
        table.add_row(f"F({enc}) transported", str(ok))
    table.add_row("verdict", "[green]passed[/green]" if report.passed else "[red]failed[/red]")
    console.print(table)


@demo.command("aromatic-method")
@click.option("--field", "field_name", required=True, help=f"One of: {', '.join(field_registry.names())}")
@click.option("--x0", required=True, help="Initial point, comma-separated")
@click.option("--h", type=float, required=True, help="Step size")
@json_option
def demo_aromatic_method(field_name: str, x0: str, h: float, as_json: bool):
    """One step of x0 + h f (1 + h div f), next to Euler and the aromatic series."""
    f = resolve_field(field_name)
    x = parse_point(x0)
    step = aromatic_first_order_method_demo(f, x, h)
    euler = euler_step(f, x, h)
    series = aromatic_method_series().evaluate(f, x, h)
    if as_json:
        emit_json({"x1": step.tolist(), "euler": euler.tolist(), "aromatic_series": series.tolist()})
        return
    show_vector([("x1", step), ("euler", euler), ("aromatic series", series)], f"aromatic method on {f.name}")


if __name__ == "__main__":
    main()
