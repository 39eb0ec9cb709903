"""Box domains, points and reproducible random streams.

The high-dimensional decision space is always the unit box ``[-1, 1]^n``;
the low-dimensional search space is the symmetric box ``[-d/eta, d/eta]^d``.
Points are plain float64 numpy arrays, the box types carry the bounds.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class BoxSpace:
    """Axis-aligned box ``[lower_i, upper_i]`` in ``dim`` dimensions."""

    dim: int
    lower: np.ndarray
    upper: np.ndarray
    # Exact half-width of a symmetric box; None for asymmetric boxes.
    half_width: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        lower = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        upper = np.asarray(self.upper, dtype=np.float64).reshape(-1)
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ValueError("bounds must have length dim")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be below its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def symmetric(cls, dim: int, half_width) -> "BoxSpace":
        hw = Fraction(half_width) if not isinstance(half_width, float) else Fraction(repr(half_width))
        if hw <= 0:
            raise ValueError("half width must be positive")
        b = float(hw)
        return cls(dim, np.full(dim, -b), np.full(dim, b), half_width=hw)

    @property
    def is_symmetric(self) -> bool:
        return self.half_width is not None

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, point, atol: float = 0.0) -> bool:
        p = np.asarray(point, dtype=np.float64)
        return p.shape == (self.dim,) and bool(
            np.all(p >= self.lower - atol) and np.all(p <= self.upper + atol)
        )

    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))


def unit_box(n: int) -> BoxSpace:
    """The decision space ``X = [-1, 1]^n``."""
    return BoxSpace.symmetric(n, 1)


def make_low_space(d: int, eta: float) -> BoxSpace:
    """Search space ``Y = [-d/eta, d/eta]^d``.

    ``eta`` is parsed through its decimal repr so that ``0.3`` becomes the
    exact rational 3/10 and cell arithmetic downstream stays exact.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    eta_q = Fraction(repr(float(eta)))
    return BoxSpace.symmetric(d, Fraction(d) / eta_q)


def l2_norm(p) -> float:
    """Euclidean norm of a point; scaled, so tiny or huge coordinates do not under/overflow."""
    return math.hypot(*np.asarray(p, dtype=np.float64).reshape(-1).tolist())


def stable_id(*parts) -> int:
    """Platform-independent 64-bit id for a tuple of labels.

    Python's ``hash`` is salted per process, so it cannot key RNG streams.
    """
    text = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


@dataclass
class RngStream:
    """A replayable source of independent numpy generators.

    Draw ``k`` of stream ``(seed, stream_id)`` is a Philox generator seeded by
    ``SeedSequence(seed, spawn_key=(stream_id, k))``. Any draw can therefore
    be regenerated from its three integers alone, on any platform.
    """

    seed: int
    stream_id: int = 0
    position: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream id must be nonnegative")

    @classmethod
    def for_purpose(cls, seed: int, *purpose) -> "RngStream":
        return cls(seed, stable_id(*purpose))

    def generator(self, draw_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, draw_index))
        return np.random.Generator(np.random.Philox(ss))

    def next_generator(self) -> tuple[int, np.random.Generator]:
        """Return ``(draw_index, generator)`` and advance the stream."""
        k = self.position
        self.position += 1
        return k, self.generator(k)
