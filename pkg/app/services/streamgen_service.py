"""
Seeded stream generators, random-order shuffling and the layered
lower-bound construction in three dimensions
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.core.config import Settings, get_settings
from app.domain.errors import CapacityError, InvalidInputError
from app.domain.geometry import dist_point_hull
from app.domain.models import LowerBoundArtifact, Point
from app.models.streams import StreamSpec
from app.services.oracle_service import OracleService

logger = structlog.get_logger(__name__)

GROUP_SIZE = 5
FAN_FACTOR = 10


# ==================== F-TABLES ====================

@dataclass(frozen=True)
class FTable:
    """Integer function f used to size the lower-bound layers"""
    kind: str
    value: int = 1
    table: Dict[int, int] = field(default_factory=dict)
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> "FTable":
        """
        Parse a preset

        Accepted forms: const:C, linear, scaled:K, table:a=b,c=d
        """
        name, _, arg = text.strip().partition(":")
        if name not in ("const", "linear", "scaled", "table") or (name == "linear" and arg):
            raise InvalidInputError(f"unknown f-table preset {text!r}")
        try:
            if name == "const":
                table = cls("const", value=int(arg), text=text)
            elif name == "linear":
                table = cls("scaled", value=1, text=text)
            elif name == "scaled":
                table = cls("scaled", value=int(arg), text=text)
            else:
                entries = {}
                for item in arg.split(","):
                    key, _, val = item.partition("=")
                    entries[int(key)] = int(val)
                table = cls("table", table=entries, text=text)
        except ValueError as e:
            raise InvalidInputError(f"malformed f-table preset {text!r}: {e}") from e
        if table.kind != "table" and table.value < 1:
            raise InvalidInputError(f"f-table preset {text!r} must be positive")
        return table

    def __call__(self, x: int) -> int:
        if self.kind == "const":
            result = self.value
        elif self.kind == "scaled":
            result = self.value * x
        elif x in self.table:
            result = self.table[x]
        else:
            raise InvalidInputError(f"f-table {self.text!r} has no entry for {x}")
        if result < 1:
            raise InvalidInputError(f"f({x}) = {result} is not a positive size")
        return result


# ==================== GENERATOR SERVICE ====================

class StreamGenService:
    """Reproducible point streams"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.oracle = OracleService(self.settings)

    def generate(self, spec: StreamSpec) -> List[Point]:
        """Points for a benign stream kind; lower_bound_3d returns the layered stream"""
        rng = np.random.default_rng(spec.seed)
        n = spec.n

        if spec.kind == "circle":
            if spec.equally_spaced:
                theta = 2.0 * np.pi * np.arange(n) / n
            else:
                theta = rng.uniform(0.0, 2.0 * np.pi, n)
            arr = spec.radius * np.column_stack([np.cos(theta), np.sin(theta)])
            # Exact axis points for equally spaced quarters
            arr[np.abs(arr) < 1e-15 * spec.radius] = 0.0
        elif spec.kind == "disk":
            radius = spec.radius * np.sqrt(rng.uniform(0.0, 1.0, n))
            theta = rng.uniform(0.0, 2.0 * np.pi, n)
            arr = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
        elif spec.kind == "square_grid":
            side = math.isqrt(n)
            ticks = np.linspace(0.0, 1.0, side) if side > 1 else np.zeros(1)
            arr = np.array([(x, y) for y in ticks for x in ticks], dtype=float)
        elif spec.kind == "gaussian":
            arr = rng.standard_normal((n, spec.dim))
        elif spec.kind == "ngon_boundary":
            arr = self._ngon_boundary(rng, n, spec.sides, spec.radius, spec.dim)
        else:
            artifact = self.gen_lower_bound_3d(FTable.parse(spec.f_table), spec.r)
            return list(artifact.stream)

        logger.debug("Stream generated", kind=spec.kind, n=len(arr), seed=spec.seed)
        return [Point(tuple(row)) for row in arr]

    @staticmethod
    def _ngon_boundary(rng: np.random.Generator, n: int, sides: int, radius: float, dim: int) -> np.ndarray:
        """Polygon vertices first, then uniform points along random edges"""
        theta = 2.0 * np.pi * np.arange(sides) / sides
        corners = radius * np.column_stack([np.cos(theta), np.sin(theta)])
        edge = rng.integers(0, sides, n - sides)
        t = rng.uniform(0.0, 1.0, n - sides)[:, None]
        extra = (1.0 - t) * corners[edge] + t * corners[(edge + 1) % sides]
        arr = np.vstack([corners, extra])
        if dim == 3:
            arr = np.column_stack([arr, np.zeros(len(arr))])
        return arr

    def shuffle_random_order(self, P: Sequence[Point], seed: int) -> List[Point]:
        """Uniform random permutation drawn from the seed"""
        if not P:
            return []
        order = np.random.default_rng(seed).permutation(len(P))
        return [P[i] for i in order]

    # ==================== LOWER BOUND CONSTRUCTION ====================

    def layer_sizes(self, f: FTable, r: int) -> List[int]:
        if r < 1:
            raise InvalidInputError(f"r must be at least 1, got {r}")
        sizes = [4, FAN_FACTOR * f(4)]
        for _ in range(2, r + 1):
            total = sum(sizes)
            sizes.append((sizes[-1] // GROUP_SIZE) * FAN_FACTOR * f(total))
        return sizes

    def _fan(self, a2: np.ndarray, a3: np.ndarray, a4: np.ndarray, count: int) -> np.ndarray:
        """count points on a circular arc from a2 to a4 bulging toward a3, equal angular steps"""
        chord = a4 - a2
        half = float(np.linalg.norm(chord)) / 2.0
        w = chord / (2.0 * half)
        mid = (a2 + a4) / 2.0
        normal = np.array([-w[1], w[0]])
        height = float(np.dot(a3 - mid, normal))
        if height < 0:
            normal, height = -normal, -height
        sagitta = self.settings.FAN_BULGE * height
        if count == 1:
            return (mid + sagitta * normal)[None, :]
        rho = (half ** 2 + sagitta ** 2) / (2.0 * sagitta)
        center = mid + (sagitta - rho) * normal
        phi = math.atan2(half, rho - sagitta)
        psi = np.linspace(-phi, phi, count)
        return center + rho * (np.cos(psi)[:, None] * normal + np.sin(psi)[:, None] * w)

    def _margin_xy(self, layer: np.ndarray) -> float:
        return self.oracle.meaningful_margin([Point((float(x), float(y))) for x, y in layer])

    def gen_lower_bound_3d(self, f: FTable, r: int) -> LowerBoundArtifact:
        """
        Build the layered stream P1 o P2 o ... o P(r+1)

        P1 is the unit square, P2 a regular polygon inside it, and every later
        layer places one fan of points inside the triangle (a2, a3, a4) of each
        five-point group of the previous layer. Layer i sits at height (i - 1) * eps_star.
        """
        sizes = self.layer_sizes(f, r)
        total = sum(sizes)
        cap = self.settings.LOWER_BOUND_SIZE_CAP
        if total > cap:
            logger.warning("Lower-bound construction refused", size=total, cap=cap)
            raise CapacityError("LOWER_BOUND_SIZE_CAP", cap, total)

        square = np.array([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
        theta = 2.0 * np.pi * np.arange(sizes[1]) / sizes[1]
        polygon = 0.5 + self.settings.POLYGON_RADIUS * np.column_stack([np.cos(theta), np.sin(theta)])
        layers: List[np.ndarray] = [square, polygon]

        offsets = [0, 4, 4 + sizes[1]]
        groups: List[Tuple[Tuple[int, ...], ...]] = []
        group_map: Dict[int, int] = {}
        fan_parent: Dict[int, Tuple[int, int]] = {}

        for layer_number in range(2, r + 1):
            parent = layers[-1]
            base = offsets[layer_number - 1]
            layer_groups = tuple(
                tuple(range(base + g * GROUP_SIZE, base + (g + 1) * GROUP_SIZE))
                for g in range(len(parent) // GROUP_SIZE)
            )
            groups.append(layer_groups)
            if layer_number == 2:
                for g, members in enumerate(layer_groups):
                    group_map.update({i: g for i in members})

            fan_size = FAN_FACTOR * f(offsets[layer_number])
            fans = []
            child_base = offsets[layer_number]
            for g in range(len(layer_groups)):
                a = parent[g * GROUP_SIZE:(g + 1) * GROUP_SIZE]
                fans.append(self._fan(a[1], a[2], a[3], fan_size))
                for j in range(fan_size):
                    fan_parent[child_base + g * fan_size + j] = (layer_number, g)
            layers.append(np.vstack(fans))
            offsets.append(child_base + len(layers[-1]))

        margins = tuple(self._margin_xy(layer) for layer in layers)
        eps_star = self.settings.LOWER_BOUND_SAFETY * min(margins)
        if eps_star <= 0:
            raise InvalidInputError(f"lower-bound layers are not meaningful (margins {margins})")

        stream = tuple(
            Point((float(x), float(y), i * eps_star))
            for i, layer in enumerate(layers)
            for x, y in layer
        )
        logger.info(
            "Lower-bound stream generated",
            f_table=f.text,
            r=r,
            layer_sizes=[len(layer) for layer in layers],
            eps_star=eps_star,
        )
        return LowerBoundArtifact(
            stream=stream,
            eps_star=eps_star,
            layer_boundaries=tuple(offsets),
            group_map=group_map,
            groups=tuple(groups),
            fan_parent=fan_parent,
            layer_margins=margins,
        )

    # ==================== GREEDY KEEPER ====================

    def greedy_keeper_run(self, P: Sequence[Point], eps: float) -> List[Point]:
        """Single pass: keep p iff it lies farther than eps from the hull of what was kept"""
        if eps < 0:
            raise InvalidInputError(f"eps must be nonnegative, got {eps}")
        threshold = eps + self.settings.CHECKER_SLACK
        kept: List[Point] = []
        for p in P:
            if dist_point_hull(p, kept, self.settings) > threshold:
                kept.append(p)
        logger.info("Greedy keeper completed", n=len(P), kept=len(kept), eps=eps)
        return kept


# Global stream generator instance
streamgen_service = StreamGenService()
