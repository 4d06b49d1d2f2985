"""
Point-stream files, lower-bound sidecars and result CSVs
"""
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Union

import pandas as pd
import structlog

from app.domain.errors import InvalidInputError, StreamFormatError
from app.domain.models import Point
from app.models.results import RESULT_COLUMNS, ResultRow
from app.models.streams import LowerBoundMetadata

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]

SIDECAR_SUFFIX = ".meta.json"


def format_point(p: Point) -> str:
    return " ".join(format(c, ".17g") for c in p.coords)


class PointStreamFile:
    """A point stream backed by a text file; every iteration re-reads the file from the start"""

    def __init__(self, path: PathLike):
        self.path = Path(path)
        self._dim: Optional[int] = None

    @property
    def dim(self) -> Optional[int]:
        """Arity of the data lines, known after the first data line was read"""
        if self._dim is None:
            for _ in self:
                break
        return self._dim

    def __iter__(self) -> Iterator[Point]:
        with self.path.open("r", encoding="utf-8") as handle:
            dim: Optional[int] = None
            for line_number, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                fields = text.split()
                try:
                    coords = tuple(float(x) for x in fields)
                    point = Point(coords)
                except ValueError as e:
                    raise StreamFormatError(str(e), str(self.path), line_number) from e
                if dim is None:
                    dim = len(coords)
                    self._dim = dim
                elif len(coords) != dim:
                    raise StreamFormatError(
                        f"expected {dim} values, found {len(coords)}", str(self.path), line_number
                    )
                yield point

    def read_all(self) -> List[Point]:
        return list(self)


class StreamIOService:
    """Readers and writers for the toolkit's flat-file formats"""

    def write_points(self, path: PathLike, points: Iterable[Point], comments: Sequence[str] = ()) -> int:
        """Write one point per line with 17 significant digits; returns the count written"""
        path = Path(path)
        dim = None
        count = 0
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            for comment in comments:
                handle.write(f"# {comment}\n")
            for p in points:
                if dim is None:
                    dim = p.dim
                elif p.dim != dim:
                    raise InvalidInputError(f"mixed dimensions in stream: {p.dim} != {dim}")
                handle.write(format_point(p) + "\n")
                count += 1
        logger.debug("Point stream written", path=str(path), count=count)
        return count

    def read_points(self, path: PathLike) -> List[Point]:
        return PointStreamFile(path).read_all()

    @staticmethod
    def sidecar_path(path: PathLike) -> Path:
        path = Path(path)
        return path.with_name(path.name + SIDECAR_SUFFIX)

    def write_sidecar(self, path: PathLike, metadata: LowerBoundMetadata) -> Path:
        target = self.sidecar_path(path)
        target.write_text(metadata.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return target

    def read_sidecar(self, path: PathLike) -> LowerBoundMetadata:
        return LowerBoundMetadata.model_validate_json(self.sidecar_path(path).read_text(encoding="utf-8"))

    def append_results(self, path: PathLike, rows: Sequence[ResultRow]) -> None:
        """Append rows to a CSV, writing the header only when the file is new"""
        if not rows:
            return
        path = Path(path)
        frame = pd.DataFrame([row.to_record() for row in rows], columns=RESULT_COLUMNS)
        write_header = not path.exists() or path.stat().st_size == 0
        frame.to_csv(path, mode="a", header=write_header, index=False)
        logger.debug("Result rows appended", path=str(path), rows=len(rows))

    def read_results(self, path: PathLike) -> pd.DataFrame:
        return pd.read_csv(path)


# Global stream IO service instance
stream_io_service = StreamIOService()
