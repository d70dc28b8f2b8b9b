import math

import numpy as np
import pytest

from branchforge.export import MalformedCSVError, csv_text, format_value, read_csv, write_csv
from branchforge.svgplot import Series, nice_ticks, render


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(1 / 3)) == repr(1 / 3)
    assert format_value(np.int64(7)) == "7"
    assert format_value(True) == "1" and format_value(None) == ""


def test_csv_round_trip_is_lossless(tmp_path):
    rng = np.random.default_rng(3)
    data = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-8, 8, size=(20, 3))
    path = write_csv(tmp_path / "x.csv", ["a", "b", "c"], data.tolist())
    header, back = read_csv(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(back, data)
    assert path.read_text() == csv_text(["a", "b", "c"], data.tolist())


@pytest.mark.parametrize("body", ["", "a,b\n1,2,3\n", "a,b\n1,x\n", "a,b\n1,nan\n"])
def test_malformed_csv(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(MalformedCSVError):
        read_csv(p)


def test_nice_ticks():
    assert nice_ticks(0.0, 1.0) == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    ticks = nice_ticks(1.0, 3.2)
    assert ticks[0] >= 1.0 and ticks[-1] <= 3.2
    steps = np.diff(ticks)
    assert np.allclose(steps, steps[0])


def test_render_is_deterministic_and_escapes():
    s = Series(np.array([[1.0, 0.0], [2.0, 3.0], [3.0, 1.0]]), "primary", "a<b", [(2.0, 3.0)])
    a = render([s], title="x & y")
    assert a == render([s], title="x & y")
    assert a.startswith("<svg") and a.endswith("</svg>\n")
    assert "a&lt;b" in a and "x &amp; y" in a and a.count("<circle") == 1


def test_render_rejects_empty_window():
    with pytest.raises(ValueError):
        render([], window=(1.0, 1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        render([], window=(0.0, 1.0, 2.0, math.inf * -1))
