import pandas as pd
import pytest

from electrode_soh.errors import DataError
from electrode_soh.io.csv_io import CsvSink, iter_frames, iter_records, read_header


def _write(tmp_path, text, name="in.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_records_are_read_in_order(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v\n0,1.5,3.9\n1,1.5,3.89\n2,-0.5,3.95\n")
    records = list(iter_records(path))
    assert [r.t_s for r in records] == [0.0, 1.0, 2.0]
    assert records[2].current_a == -0.5
    assert records[0].temperature_c is None


def test_missing_column_points_at_the_header(tmp_path):
    path = _write(tmp_path, "t_s,current_a\n0,1\n")
    with pytest.raises(DataError) as excinfo:
        list(iter_records(path))
    assert excinfo.value.row == 1
    assert "voltage_v" in str(excinfo.value)


def test_bad_value_reports_its_line(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v\n0,1,3.9\n1,abc,3.9\n")
    with pytest.raises(DataError) as excinfo:
        list(iter_records(path))
    assert excinfo.value.row == 3


def test_bad_value_line_survives_chunking(tmp_path):
    rows = "".join(f"{k},1,3.9\n" for k in range(25)) + "25,1,oops\n"
    path = _write(tmp_path, "t_s,current_a,voltage_v\n" + rows)
    with pytest.raises(DataError) as excinfo:
        list(iter_records(path, chunk_size=4))
    assert excinfo.value.row == 27


def test_time_must_increase(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v\n0,1,3.9\n1,1,3.9\n1,1,3.9\n")
    with pytest.raises(DataError) as excinfo:
        list(iter_records(path))
    assert excinfo.value.row == 4


def test_nan_voltage_rows_are_skipped(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v\n0,1,3.9\n1,1,NaN\n2,1,\n3,1,3.8\n")
    assert [r.t_s for r in iter_records(path)] == [0.0, 3.0]


def test_optional_temperature(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v,temperature_c\n0,1,3.9,25.5\n1,1,3.9,\n")
    records = list(iter_records(path))
    assert records[0].temperature_c == 25.5
    assert records[1].temperature_c is None


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(DataError):
        read_header(tmp_path / "absent.csv")
    with pytest.raises(DataError):
        read_header(_write(tmp_path, ""))


def test_frames_carry_line_numbers(tmp_path):
    path = _write(tmp_path, "t_s,current_a,voltage_v\n0,1,3.9\n1,1,3.8\n2,1,3.7\n")
    frames = list(iter_frames(path, ("t_s", "voltage_v"), chunk_size=2))
    assert [list(f["line"]) for f in frames] == [[2, 3], [4]]
    assert list(frames[0].columns) == ["line", "t_s", "voltage_v"]


def test_empty_sink_writes_a_header(tmp_path):
    path = CsvSink(tmp_path / "out" / "empty.csv", ["t_s", "soc"]).close()
    assert path.read_text() == "t_s,soc\n"


def test_chunk_size_does_not_change_the_file(tmp_path):
    rows = [{"t_s": float(k), "soc": 1.0 - k / 7.0} for k in range(23)]
    outputs = []
    for chunk_size in (1, 5, 10000):
        with CsvSink(tmp_path / f"out{chunk_size}.csv", ["t_s", "soc"], chunk_size=chunk_size) as sink:
            sink.write_many(rows)
        outputs.append((tmp_path / f"out{chunk_size}.csv").read_text())
    assert outputs[0] == outputs[1] == outputs[2]
    assert len(pd.read_csv(tmp_path / "out1.csv")) == 23


def test_sink_replaces_an_existing_file(tmp_path):
    target = tmp_path / "again.csv"
    target.write_text("stale\n")
    with CsvSink(target, ["a"]) as sink:
        sink.write({"a": 1})
    assert target.read_text() == "a\n1\n"
