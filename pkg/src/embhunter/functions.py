"""Scalable test objectives with a known optimum and low effective dimension.

Each objective lives on ``[-1, 1]^n`` but reads only ``d_eff`` of its
coordinates, picked by a seeded permutation. Those coordinates are mapped
affinely onto the classic function's domain, and every function is shifted
so its minimum value is exactly 0.

Domains and optimum placement:

==============  =================  ======================================
function        classic domain     optimum (unit-box coordinates)
==============  =================  ======================================
ellipsoid       [-2, 2]            origin
rosenbrock      [-2, 2]            0.5 (classic all-ones)
ackley          [-32, 32]          seeded, uniform in [-0.5, 0.5]
fletcherpowell  [-pi, pi]          seeded angles, uniform in [-0.5, 0.5]
==============  =================  ======================================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spaces import RngStream

ELLIPSOID_CONDITION = 1e6
FLETCHER_POWELL_COEF = 100
INNER_FRACTION = 0.5


@dataclass(frozen=True, eq=False)
class Objective:
    """A function on ``[-1, 1]^n`` that depends on ``effective`` coordinates only."""

    name: str
    n: int
    d_eff: int
    effective: np.ndarray                 # indices of the effective coordinates
    low_fn: Callable[[np.ndarray], float] # classic function on unit-box coordinates
    f_star: float = 0.0
    optimum: np.ndarray | None = None     # unit-box coordinates of the optimum, length d_eff
    lipschitz_hint: float | None = None
    seed: int = 0
    params: dict = field(default_factory=dict, repr=False)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(self.low_fn(x[self.effective]))

    def evaluate(self, x) -> float:
        return self(x)

    def embed(self, z) -> np.ndarray:
        """A point of ``[-1, 1]^n`` whose effective coordinates equal ``z`` (others 0)."""
        x = np.zeros(self.n)
        x[self.effective] = z
        return x

    def optimum_point(self) -> np.ndarray:
        if self.optimum is None:
            raise ValueError(f"{self.name} has no known optimizer")
        return self.embed(self.optimum)


def _ellipsoid(z: np.ndarray) -> float:
    r = 2.0 * z
    d = r.size
    if d == 1:
        return float(r[0] ** 2)
    w = ELLIPSOID_CONDITION ** (np.arange(d) / (d - 1))
    return float(np.dot(w, r * r))


def _rosenbrock(z: np.ndarray) -> float:
    r = 2.0 * z
    return float(np.sum(100.0 * (r[1:] - r[:-1] ** 2) ** 2) + np.sum((1.0 - r[:-1]) ** 2)
                 if r.size > 1 else (1.0 - r[0]) ** 2)


def _ackley(shift: np.ndarray) -> Callable[[np.ndarray], float]:
    def f(z: np.ndarray) -> float:
        r = 32.0 * (z - shift)
        a = -20.0 * math.exp(-0.2 * math.sqrt(float(np.mean(r * r))))
        b = -math.exp(float(np.mean(np.cos(2.0 * math.pi * r))))
        return max(a + b + 20.0 + math.e, 0.0)
    return f


def _fletcher_powell(a: np.ndarray, b: np.ndarray, alpha: np.ndarray) -> Callable[[np.ndarray], float]:
    target = a @ np.sin(alpha) + b @ np.cos(alpha)

    def f(z: np.ndarray) -> float:
        r = math.pi * z
        diff = target - (a @ np.sin(r) + b @ np.cos(r))
        return float(np.dot(diff, diff))
    return f


FUNCTIONS = ("ellipsoid", "fletcherpowell", "rosenbrock", "ackley")


def make_function(name: str, d_eff: int, n: int, seed: int = 0) -> Objective:
    """Build a named test objective on ``[-1, 1]^n`` with ``d_eff`` effective coordinates."""
    name = name.lower()
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    if not 1 <= d_eff <= n:
        raise ValueError(f"need 1 <= d_eff <= n, got d_eff={d_eff}, n={n}")
    gen = RngStream.for_purpose(seed, "function", name).generator(0)
    effective = np.sort(gen.permutation(n)[:d_eff])
    effective.setflags(write=False)
    params: dict = {}
    if name == "ellipsoid":
        low_fn, optimum = _ellipsoid, np.zeros(d_eff)
    elif name == "rosenbrock":
        low_fn, optimum = _rosenbrock, np.full(d_eff, 0.5)
    elif name == "ackley":
        optimum = gen.uniform(-INNER_FRACTION, INNER_FRACTION, d_eff)
        low_fn = _ackley(optimum)
        params["shift"] = optimum
    else:
        c = FLETCHER_POWELL_COEF
        a = gen.integers(-c, c, size=(d_eff, d_eff), endpoint=True).astype(np.float64)
        b = gen.integers(-c, c, size=(d_eff, d_eff), endpoint=True).astype(np.float64)
        optimum = gen.uniform(-INNER_FRACTION, INNER_FRACTION, d_eff)
        low_fn = _fletcher_powell(a, b, math.pi * optimum)
        params.update(a=a, b=b, alpha=math.pi * optimum)
    return Objective(name, n, d_eff, effective, low_fn, 0.0, optimum, None, seed, params)


def make_linear(c: float, n: int, coordinate: int = 0) -> Objective:
    """``x -> c * x[coordinate]``, Lipschitz with constant ``|c|``; minimum ``-|c|`` on a face."""
    return Objective("linear", n, 1, np.array([coordinate]), lambda z: float(c * z[0]),
                     f_star=-abs(c), optimum=np.array([-math.copysign(1.0, c)]),
                     lipschitz_hint=abs(c))


class CountingObjective:
    """Wraps an objective and counts calls."""

    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __getattr__(self, name):
        return getattr(self.f, name)

    def __call__(self, x) -> float:
        self.calls += 1
        return self.f(x)


LIPSCHITZ_CHUNK = 1024


def estimate_lipschitz(f, samples: int, seed: int = 0, n: int | None = None) -> float:
    """Largest observed slope ``|f(x1) - f(x2)| / ||x1 - x2||`` over sampled pairs.

    Each pair starts from a uniform point; even pairs step along a random
    direction, odd pairs along a random axis, which lines up with
    axis-aligned effective subspaces. Step lengths are uniform in (0, 0.1].
    Pairs come in fixed chunks of ``LIPSCHITZ_CHUNK`` per generator draw, so
    the first ``k`` pairs do not depend on ``samples`` and the estimate is
    nondecreasing in ``samples``.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    n = f.n if n is None else n
    stream = RngStream.for_purpose(seed, "lipschitz")
    best = 0.0
    for chunk in range(-(-samples // LIPSCHITZ_CHUNK)):
        gen = stream.generator(chunk)
        m = LIPSCHITZ_CHUNK
        x1 = gen.uniform(-1.0, 1.0, (m, n))
        u = gen.standard_normal((m, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        axes = gen.integers(n, size=m)
        signs = np.where(gen.random(m) < 0.5, -1.0, 1.0)
        odd = np.arange(m) % 2 == 1
        u[odd] = 0.0
        u[odd, axes[odd]] = signs[odd]
        x2 = np.clip(x1 + gen.uniform(0.0, 0.1, (m, 1)) * u, -1.0, 1.0)
        dist = np.linalg.norm(x2 - x1, axis=1)
        for k in range(min(m, samples - chunk * m)):
            if dist[k] > 0.0:
                best = max(best, abs(f(x1[k]) - f(x2[k])) / float(dist[k]))
    return best


REGRET_SLACK = 1e-12


def regret(f, value: float) -> float:
    """Simple regret ``value - f_star``; tiny negatives within slack round to 0."""
    gap = float(value) - float(f.f_star)
    if gap < -REGRET_SLACK:
        raise ValueError(f"value {value!r} lies below the known optimum {f.f_star!r}")
    return max(gap, 0.0)
