"""
Domain value types for streaming epsilon-hull computation
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.domain.errors import InvalidInputError

if TYPE_CHECKING:
    from app.models.sketch import SketchParams


UNIT_NORM_TOL = 1e-12


class Orientation(str, Enum):
    """Turn direction of an ordered point triple"""
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"
    COLLINEAR = "collinear"


@dataclass(frozen=True)
class Point:
    """A d-dimensional coordinate vector"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidInputError("a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise InvalidInputError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "Point":
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def x(self) -> float:
        return self.coords[0]

    @property
    def y(self) -> float:
        return self.coords[1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def dot(self, other: Sequence[float]) -> float:
        return math.fsum(a * b for a, b in zip(self.coords, other))

    def __iter__(self) -> Iterator[float]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> float:
        return self.coords[index]

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Direction:
    """A unit vector"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidInputError("a direction needs at least one coordinate")
        norm = math.sqrt(math.fsum(c * c for c in coords))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise InvalidInputError(f"direction {coords} is not a unit vector (norm {norm!r})")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "Direction":
        """Normalize an arbitrary nonzero vector"""
        v = np.asarray(vector, dtype=float)
        norm = float(np.linalg.norm(v))
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidInputError(f"cannot normalize vector {tuple(v)}")
        return cls(tuple(v / norm))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __iter__(self) -> Iterator[float]:
        return iter(self.coords)


@dataclass(frozen=True)
class Hull2D:
    """Strictly convex vertex cycle in counterclockwise order.

    Zero, one and two vertices stand for the empty hull, a point and a segment.
    """
    vertices: Tuple[Point, ...] = ()

    def __post_init__(self):
        vertices = tuple(self.vertices)
        for v in vertices:
            if v.dim != 2:
                raise InvalidInputError(f"hull vertex {v.coords} is not two-dimensional")
        object.__setattr__(self, "vertices", vertices)

    @cached_property
    def array(self) -> np.ndarray:
        if not self.vertices:
            return np.empty((0, 2), dtype=float)
        return np.array([v.coords for v in self.vertices], dtype=float)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.vertices)

    def edges(self) -> List[Tuple[Point, Point]]:
        """Boundary segments; a segment hull yields its single edge once"""
        k = len(self.vertices)
        if k < 2:
            return []
        if k == 2:
            return [(self.vertices[0], self.vertices[1])]
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]


@dataclass(frozen=True)
class DyadicAngle:
    """The angle 2*pi*numerator/2**level in canonical reduced form"""
    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise InvalidInputError(f"dyadic level must be nonnegative, got {self.level}")
        numerator, level = self.numerator % (1 << self.level), self.level
        while level > 0 and numerator % 2 == 0:
            numerator //= 2
            level -= 1
        if level == 0:
            numerator = 0
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "level", level)

    @classmethod
    def zero(cls) -> "DyadicAngle":
        return cls(0, 0)

    @classmethod
    def half_turn(cls) -> "DyadicAngle":
        return cls(1, 1)

    @property
    def turns(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    @property
    def radians(self) -> float:
        return 2.0 * math.pi * self.numerator / (1 << self.level)

    def to_direction(self) -> Direction:
        theta = self.radians
        return Direction.from_vector((math.cos(theta), math.sin(theta)))


@dataclass(frozen=True)
class EpsHullReport:
    """Outcome of checking whether S is an eps-hull of P"""
    is_valid: bool
    max_violation: float
    witness: Optional[Point]


@dataclass(frozen=True)
class OptResult:
    """A smallest eps-hull within the searched family"""
    size: int
    subset: Tuple[Point, ...]
    restricted_to_boundary: bool
    indices: Tuple[int, ...] = ()


@dataclass(frozen=True)
class RoaState:
    """Evolving set S of the random-order algorithm"""
    eps: float
    s_points: Tuple[Point, ...] = ()
    n_seen: int = 0
    peak_size: int = 0
    insertion_only: bool = False
    hull: Hull2D = field(default_factory=Hull2D)


@dataclass(frozen=True)
class RoaRunResult:
    """Final ROA state and the invariant checks taken at prefix checkpoints"""
    state: RoaState
    checkpoints: Tuple[Tuple[int, EpsHullReport], ...] = ()

    @property
    def all_valid(self) -> bool:
        return all(report.is_valid for _, report in self.checkpoints)


@dataclass
class DirectionEntry:
    """A direction of the multipass list with its GetMax witness"""
    angle: DyadicAngle
    t: Direction
    q: Point
    deleted_this_pass: bool = False


@dataclass
class MultipassState:
    """Clockwise direction list plus per-pass bookkeeping"""
    entries: List[DirectionEntry]
    pass_count: int = 0
    flag: bool = False
    peak_words: int = 0

    @property
    def angles(self) -> Tuple[DyadicAngle, ...]:
        return tuple(e.angle for e in self.entries)


@dataclass(frozen=True)
class MultipassResult:
    """Output of a multipass run together with its pass and space accounting"""
    hull: Tuple[Point, ...]
    passes: int
    peak_words: int
    prescan_passes: int = 0
    diam_bound: float = 0.0
    normalized_eps: float = 0.0
    pass_bound: int = 0
    history: Tuple[Tuple[DyadicAngle, ...], ...] = ()


@dataclass(frozen=True)
class SketchSlot:
    """One sampled direction with its streaming argmax"""
    t: Direction
    best: Optional[Point]
    best_dot: float


@dataclass
class DirectionSketch:
    """m sampled directions and the best point seen in each"""
    params: "SketchParams"
    directions: np.ndarray
    best_points: np.ndarray
    best_dots: np.ndarray
    practical: bool = False
    n_seen: int = 0

    @property
    def m(self) -> int:
        return int(self.directions.shape[0])

    @property
    def filled(self) -> np.ndarray:
        return np.isfinite(self.best_dots)

    @property
    def slots(self) -> List[SketchSlot]:
        filled = self.filled
        return [
            SketchSlot(
                t=Direction(tuple(self.directions[i])),
                best=Point(tuple(self.best_points[i])) if filled[i] else None,
                best_dot=float(self.best_dots[i]),
            )
            for i in range(self.m)
        ]


@dataclass(frozen=True)
class LowerBoundArtifact:
    """Layered adversarial stream P1 o P2 o ... o P(r+1) with its metadata"""
    stream: Tuple[Point, ...]
    eps_star: float
    layer_boundaries: Tuple[int, ...]
    group_map: Dict[int, int]
    groups: Tuple[Tuple[Tuple[int, ...], ...], ...]
    fan_parent: Dict[int, Tuple[int, int]]
    layer_margins: Tuple[float, ...] = ()

    @property
    def num_layers(self) -> int:
        return len(self.layer_boundaries) - 1

    def layer(self, i: int) -> Tuple[Point, ...]:
        """Points of layer i, counting from 1 as P1"""
        return self.stream[self.layer_boundaries[i - 1]:self.layer_boundaries[i]]
