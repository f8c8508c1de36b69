"""Fixed-step integration of a named field with a tableau."""

import logging

from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn

from ..eldiff import Hamiltonian, VectorField
from ..rk import ButcherTableau, rk_step
from .metrics import StepRecord, TrajectoryWriter

logger = logging.getLogger(__name__)


def integrate(
    tableau: ButcherTableau,
    f: VectorField,
    x0,
    h: float,
    steps: int,
    tol: float | None = None,
    hamiltonian: Hamiltonian | None = None,
    writer: TrajectoryWriter | None = None,
    console: Console | None = None,
) -> list[StepRecord]:
    """steps applications of rk_step; record 0 is the initial state.

    With a console, a spinner shows progress; with a writer, every record is
    appended to its file as it is produced.
    """
    if steps < 0:
        raise ValueError(f"step count must be non-negative, got {steps}")
    x = f.point(x0)

    def record(k: int) -> StepRecord:
        energy = float(hamiltonian(x)) if hamiltonian is not None else None
        rec = StepRecord(step=k, t=k * h, x=x.tolist(), energy=energy)
        if writer is not None:
            writer.write(rec)
        return rec

    records = [record(0)]
    progress = Progress(SpinnerColumn(), TextColumn("{task.description}"), console=console, disable=console is None)
    with progress:
        task = progress.add_task(f"{tableau.name} on {f.name}", total=steps)
        for k in range(1, steps + 1):
            x = rk_step(tableau, f, x, h, tol=tol)
            records.append(record(k))
            progress.advance(task)
    logger.info("integrated %s on %s: %d steps of %g", tableau.name, f.name, steps, h)
    return records
