"""Random instances following the experimental protocol.

Window opens are drawn uniformly from the integers in [0, T/2] and closes
from [T/2, T].  The default quantity range keeps every site worth at least
four times its largest possible distance inside the box, so the
cost-vs-quantity assumption holds at epsilon = 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .instance import Instance, Site


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    horizon: int = 15
    box: float = 20.0
    q_lo: float = 120.0
    q_hi: float = 360.0
    capacity: float = 1000.0
    speed: float = 10.0
    seed: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.horizon < 2:
            raise ParameterError("horizon must be >= 2")
        if not 0 < self.q_lo <= self.q_hi:
            raise ParameterError("need 0 < q_lo <= q_hi")
        if not self.box > 0 or not self.capacity > 0 or not self.speed > 0:
            raise ParameterError("box, capacity and speed must be positive")


def generate_instance(spec: GeneratorSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    T = spec.horizon
    xy = rng.uniform(0.0, spec.box, size=(spec.n, 2))
    q = np.round(rng.uniform(spec.q_lo, spec.q_hi, size=spec.n), 2)
    opens = rng.integers(0, T // 2, endpoint=True, size=spec.n)
    closes = rng.integers(math.ceil(T / 2), T, endpoint=True, size=spec.n)
    sites = tuple(
        Site(i, float(xy[i, 0]), float(xy[i, 1]), min(float(q[i]), spec.capacity), int(opens[i]), int(closes[i]))
        for i in range(spec.n)
    )
    name = spec.name or f"gen_n{spec.n}_T{T}_s{spec.seed}"
    return Instance(sites, (spec.box / 2, spec.box / 2), float(spec.capacity), float(spec.speed), T, name=name)
