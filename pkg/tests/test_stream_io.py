"""Tests for stream files, sidecars and result CSVs."""
import pytest
from pydantic import ValidationError

from app.domain.errors import StreamFormatError
from app.domain.models import Point
from app.models.results import RESULT_COLUMNS, ResultRow
from app.models.streams import LowerBoundMetadata
from app.services.stream_io_service import PointStreamFile, format_point


def test_points_survive_a_write_and_read(stream_io, tmp_path):
    points = [Point.of(0.1, 1 / 3), Point.of(-2.5e-300, 7.0), Point.of(123456789.123, -0.0)]
    path = tmp_path / "p.txt"
    assert stream_io.write_points(path, points, comments=["three points"]) == 3
    assert stream_io.read_points(path) == points
    assert path.read_text().startswith("# three points\n")


def test_format_uses_full_precision():
    assert format_point(Point.of(0.1, 2)) == "0.10000000000000001 2"


def test_comments_and_blank_lines_are_skipped(stream_io, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("# header\n\n1 2\n   \n# more\n3 4\n")
    assert stream_io.read_points(path) == [Point.of(1, 2), Point.of(3, 4)]


@pytest.mark.parametrize(
    "content,line",
    [("1 2\n3\n", 2), ("1 2\n3 x\n", 2), ("nan 1\n", 1), ("1 2 3\n\n4 5\n", 3)],
)
def test_malformed_lines_report_their_position(stream_io, tmp_path, content, line):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(StreamFormatError) as exc_info:
        stream_io.read_points(path)
    assert exc_info.value.line_number == line


def test_stream_file_can_be_replayed(stream_io, tmp_path, unit_square):
    path = tmp_path / "square.txt"
    stream_io.write_points(path, unit_square)
    source = PointStreamFile(path)
    assert source.dim == 2
    assert list(source) == list(source) == unit_square


def test_sidecar_round_trip(stream_io, tmp_path):
    metadata = LowerBoundMetadata(
        f_table="const:1",
        r=2,
        eps_star=0.01,
        layer_boundaries=[0, 4, 14, 34],
        layer_margins=[0.7, 0.05, 0.02],
        group_map={4: 0, 9: 1},
        fan_parent={14: (2, 0), 24: (2, 1)},
    )
    path = tmp_path / "lb.txt"
    written = stream_io.write_sidecar(path, metadata)
    assert written.name == "lb.txt.meta.json"
    assert stream_io.read_sidecar(path) == metadata


def test_results_are_appended_under_one_header(stream_io, tmp_path):
    path = tmp_path / "results.csv"
    row = ResultRow(algo="roa", n=10, d=2, eps=0.1, is_eps_hull=True, max_violation=0.05)
    stream_io.append_results(path, [row])
    stream_io.append_results(path, [row.model_copy(update={"seed": 7})])
    frame = stream_io.read_results(path)
    assert list(frame.columns) == RESULT_COLUMNS
    assert len(frame) == 2
    assert frame["seed"].iloc[1] == 7
    assert path.read_text().count("algo,") == 1


def test_result_row_rejects_contradictory_validity_flag():
    with pytest.raises(ValidationError):
        ResultRow(algo="roa", eps=0.1, is_eps_hull=True, max_violation=0.5)
    with pytest.raises(ValidationError):
        ResultRow(algo="roa", eps=0.1, is_eps_hull=False, max_violation=0.05)


def test_result_record_has_every_column():
    record = ResultRow(algo="multipass", eps=1.0).to_record()
    assert list(record) == RESULT_COLUMNS
    assert "checker_slack" not in record
