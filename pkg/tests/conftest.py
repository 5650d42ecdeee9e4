import csv
import random
from pathlib import Path
from typing import Dict, List

import pytest

from urnlab.engines.elliptic import canonical_spec
from urnlab.engines.urn import PENTAGONAL, T23, UrnSpec, is_tenable


@pytest.fixture
def t23() -> UrnSpec:
    return T23


@pytest.fixture
def pentagonal() -> UrnSpec:
    return PENTAGONAL


@pytest.fixture
def urn_d() -> UrnSpec:
    return canonical_spec("D")


def random_tenable_specs(count: int, seed: int = 0, top: int = 4) -> List[UrnSpec]:
    """Distinct tenable urns with a, b, s <= top and small starts."""
    rng = random.Random(seed)
    found: List[UrnSpec] = []
    while len(found) < count:
        a, b, s = rng.randint(1, top), rng.randint(1, top), rng.randint(1, top)
        spec = UrnSpec(a=a, b=b, s=s, a0=a * rng.randint(0, 2), b0=b * rng.randint(0, 2))
        if spec.t0 >= 1 and is_tenable(spec) and spec not in found:
            found.append(spec)
    return found


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
