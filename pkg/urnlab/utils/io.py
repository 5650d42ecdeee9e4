"""File helpers: JSON, CSV and run manifests."""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from urnlab.errors import SpecParseError


def save_json(path: Path, data: Any) -> None:
    """Save data to JSON file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, default=str, sort_keys=True)
        f.write("\n")


def load_spec_json(path: Path) -> dict:
    """Read an urn spec file, turning any decoding trouble into SpecParseError."""
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise SpecParseError(f"spec file not found: {path}")
    except json.JSONDecodeError as e:
        raise SpecParseError(f"malformed spec JSON in {path}: {e}")
    if not isinstance(data, dict):
        raise SpecParseError(f"spec JSON must be an object, got {type(data).__name__}")
    return data


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """Write rows under a header; returns the number of data rows."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


@dataclass
class RunManifest:
    """Everything needed to rerun a CLI command. No timestamps, so reruns match byte for byte."""

    spec: Dict[str, int]
    command: str
    parameters: Dict[str, Any]
    tool_version: str
    outputs: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path: Path) -> None:
        save_json(path, self.to_dict())
