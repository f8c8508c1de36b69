"""Trajectory records and their JSONL storage."""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from ..errors import FormatError


@dataclass
class StepRecord:
    """State after one step of an integration."""

    step: int
    t: float
    x: list[float]
    energy: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "StepRecord":
        return cls(**data)


class TrajectoryWriter:
    """Writes one run's step records to a JSONL file, replacing any earlier run."""

    def __init__(self, output_path: Path | str):
        self.output_path = Path(output_path)
        self.output_path.parent.mkdir(parents=True, exist_ok=True)
        self.output_path.write_text("")

    def write(self, record: StepRecord) -> None:
        with open(self.output_path, "a") as f:
            f.write(json.dumps(record.to_dict()) + "\n")

    def write_all(self, records: list[StepRecord]) -> None:
        for r in records:
            self.write(r)


class TrajectoryReader:
    """Reads step records back from a JSONL file."""

    def __init__(self, input_path: Path | str):
        self.input_path = Path(input_path)

    def read_all(self) -> list[StepRecord]:
        records = []
        with open(self.input_path) as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    records.append(StepRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, TypeError) as e:
                    raise FormatError(f"{self.input_path}:{lineno}: bad step record: {e}") from e
        return records

    def energy_drift(self) -> float | None:
        """Largest |H - H(first record)| along the file, if energies were recorded."""
        energies = [r.energy for r in self.read_all() if r.energy is not None]
        if not energies:
            return None
        return max(abs(e - energies[0]) for e in energies)
