import math

import numpy as np
import pytest

from bseries_toolkit.catalog import get_tableau, pendulum, pendulum_hamiltonian, quadratic_field
from bseries_toolkit.errors import FormatError
from bseries_toolkit.harness import (
    StepRecord,
    TrajectoryReader,
    TrajectoryWriter,
    convergence_order_estimate,
    integrate,
    integrate_to,
)
from bseries_toolkit.methods import euler_step
from bseries_toolkit.rk import rk_step

GROWTH = quadratic_field([0.0], [[1.0]], name="growth")


def tableau_stepper(name: str):
    t = get_tableau(name)
    return lambda f, x, h: rk_step(t, f, x, h)


class TestConvergence:
    def test_euler_is_first_order(self):
        result = convergence_order_estimate(euler_step, GROWTH, [1.0], [math.e], [1 / 8, 1 / 16, 1 / 32, 1 / 64])
        assert 0.9 <= result.slope <= 1.1
        assert not result.is_exact

    def test_rk4_is_fourth_order(self):
        result = convergence_order_estimate(tableau_stepper("rk4"), GROWTH, [1.0], [math.e], [1 / 4, 1 / 8, 1 / 16, 1 / 32])
        assert 3.8 <= result.slope <= 4.2
        assert result.errors == sorted(result.errors, reverse=True)

    def test_gauss3_on_the_pendulum(self):
        f = pendulum()
        x0 = [1.0, 0.0]
        reference = integrate_to(tableau_stepper("rk4"), f, x0, 1.0, 1 / 2000)
        result = convergence_order_estimate(tableau_stepper("gauss3"), f, x0, reference, [1 / 2, 1 / 4, 1 / 8])
        assert result.slope >= 5.5

    def test_zero_error_means_exact(self):
        still = quadratic_field([0.0], [[0.0]])
        result = convergence_order_estimate(euler_step, still, [2.0], [2.0], [0.5, 0.25, 0.125])
        assert result.is_exact
        assert result.notes
        assert result.to_dict()["slope"] == math.inf

    def test_needs_three_step_sizes(self):
        with pytest.raises(ValueError):
            convergence_order_estimate(euler_step, GROWTH, [1.0], [math.e], [0.5, 0.25])

    def test_step_must_divide_interval(self):
        with pytest.raises(ValueError):
            integrate_to(euler_step, GROWTH, [1.0], 1.0, 0.3)


class TestTrajectories:
    def test_integrate_records_every_step(self, tmp_path):
        path = tmp_path / "runs" / "pendulum.jsonl"
        records = integrate(
            get_tableau("rk4"),
            pendulum(),
            [1.0, 0.0],
            0.1,
            10,
            hamiltonian=pendulum_hamiltonian(),
            writer=TrajectoryWriter(path),
        )
        assert [r.step for r in records] == list(range(11))
        assert records[-1].t == pytest.approx(1.0)
        assert records[0].x == [1.0, 0.0]
        reader = TrajectoryReader(path)
        assert reader.read_all() == records
        assert reader.energy_drift() < 1e-5

    def test_final_state_matches_direct_stepping(self):
        f = pendulum()
        records = integrate(get_tableau("midpoint"), f, [0.5, 0.5], 0.05, 20)
        direct = integrate_to(tableau_stepper("midpoint"), f, [0.5, 0.5], 1.0, 0.05)
        assert np.allclose(records[-1].x, direct)
        assert records[-1].energy is None

    def test_negative_step_count(self):
        with pytest.raises(ValueError):
            integrate(get_tableau("euler"), GROWTH, [1.0], 0.1, -1)

    def test_record_round_trip(self, tmp_path):
        path = tmp_path / "out.jsonl"
        record = StepRecord(step=3, t=0.3, x=[1.0, 2.0], energy=-0.5)
        TrajectoryWriter(path).write_all([record, StepRecord(step=4, t=0.4, x=[1.5, 2.5])])
        read = TrajectoryReader(path).read_all()
        assert read[0] == record
        assert read[1].energy is None
        assert TrajectoryReader(path).energy_drift() == 0.0

    def test_new_writer_replaces_earlier_run(self, tmp_path):
        path = tmp_path / "out.jsonl"
        TrajectoryWriter(path).write_all([StepRecord(step=k, t=0.1 * k, x=[1.0], energy=float(k)) for k in range(5)])
        TrajectoryWriter(path).write(StepRecord(step=0, t=0.0, x=[2.0], energy=1.0))
        read = TrajectoryReader(path).read_all()
        assert [r.x for r in read] == [[2.0]]
        assert TrajectoryReader(path).energy_drift() == 0.0

    def test_bad_record_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"step": 0, "t": 0.0, "x": [1.0]}\n{"step": 1, "oops": true}\n')
        with pytest.raises(FormatError):
            TrajectoryReader(path).read_all()
