import math

import pytest

from figplots import (EXPECTED_HEADER, FigureSpec, SchemaError, box_stats,
                      read_series_csv, render)
from figplots.cli import main

HEADER_LINE = ",".join(EXPECTED_HEADER)


def quantile_oracle(sorted_values, p):
    n = len(sorted_values)
    h = (n - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    return sorted_values[lo] + (h - lo) * (sorted_values[hi] - sorted_values[lo])


def test_read_series_csv_validates(tmp_path):
    good = tmp_path / "ok.csv"
    good.write_text(HEADER_LINE + "\ntopk,ba,2,,1,100,0.5,0,3\n")
    table = read_series_csv(good)
    assert len(table) == 1 and table.rank_k[0] == 1

    missing = tmp_path / "missing.csv"
    missing.write_text("protocol,model,alpha_p,gamma,rank_k,t,mean_visibility,replicas\n")
    with pytest.raises(SchemaError, match="std_visibility"):
        read_series_csv(missing)

    extra = tmp_path / "extra.csv"
    extra.write_text(HEADER_LINE + ",bonus\n")
    with pytest.raises(SchemaError, match="bonus"):
        read_series_csv(extra)

    bad_value = tmp_path / "bad.csv"
    bad_value.write_text(HEADER_LINE + "\ntopk,ba,2,,one,100,0.5,0,3\n")
    with pytest.raises(SchemaError, match="rank_k"):
        read_series_csv(bad_value)


def test_header_only_csv_renders_no_data_panel(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER_LINE + "\n")
    out = tmp_path / "empty.png"
    assert main(["topk-box", "--csv", str(empty), "--out", str(out)]) == 0
    assert out.stat().st_size > 0
    assert "wrote" in capsys.readouterr().out


def test_schema_error_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    out = tmp_path / "x.png"
    assert main(["topk-box", "--csv", str(bad), "--out", str(out)]) == 2
    assert "missing column" in capsys.readouterr().err


def test_topk_box_shape_and_stats(topk_csvs, tmp_path):
    out = tmp_path / "topk.png"
    spec = FigureSpec(kind="topk-box", csv_paths=tuple(map(str, topk_csvs)),
                      out_path=str(out), log_y=True)
    result = render(spec)
    assert out.exists()
    # one panel per (model, alpha) pair present in the inputs
    assert set(result.panel_stats) == {("mf", 1.0), ("mf", 2.0), ("mf", 3.0),
                                       ("ba", 2.0)}
    table = read_series_csv(topk_csvs[0])
    times = sorted(set(map(int, table.t)))
    panel = result.panel_stats[("mf", 1.0)]
    assert sorted(panel) == times                # one box per recorded time
    ranks = {int(r) for r in table.rank_k}
    assert len(ranks) == 50                      # each box summarizes 50 ranks


def test_renderer_stats_match_independent_recomputation(topk_csvs, tmp_path):
    out = tmp_path / "topk.png"
    result = render(FigureSpec(kind="topk-box", csv_paths=(str(topk_csvs[1]),),
                               out_path=str(out)))
    table = read_series_csv(topk_csvs[1])
    ((model, alpha), panel), = result.panel_stats.items()
    for t, stats in panel.items():
        values = sorted(float(table.mean_visibility[j]) for j in range(len(table))
                        if int(table.t[j]) == t)
        assert abs(stats.q1 - quantile_oracle(values, 0.25)) <= 1e-12
        assert abs(stats.median - quantile_oracle(values, 0.5)) <= 1e-12
        assert abs(stats.q3 - quantile_oracle(values, 0.75)) <= 1e-12
        iqr = stats.q3 - stats.q1
        inside = [v for v in values
                  if stats.q1 - 1.5 * iqr <= v <= stats.q3 + 1.5 * iqr]
        assert stats.whisker_low == inside[0]
        assert stats.whisker_high == inside[-1]


def test_spatial_grid_is_3x3_and_deterministic(spatial_csvs, tmp_path):
    paths = tuple(map(str, spatial_csvs))
    out_a = tmp_path / "grid_a.png"
    out_b = tmp_path / "grid_b.png"
    result = render(FigureSpec(kind="spatial-grid", csv_paths=paths,
                               out_path=str(out_a)))
    render(FigureSpec(kind="spatial-grid", csv_paths=paths, out_path=str(out_b)))
    assert out_a.read_bytes() == out_b.read_bytes()
    assert {k[0] for k in result.panel_stats} == {5.0, 10.0, 50.0}
    assert {k[1] for k in result.panel_stats} == {1.0, 2.0, 3.0}
    assert len(result.panel_stats) == 9


def test_topk_box_deterministic_bytes(topk_csvs, tmp_path):
    paths = tuple(map(str, topk_csvs))
    out_a = tmp_path / "a.png"
    out_b = tmp_path / "b.png"
    render(FigureSpec(kind="topk-box", csv_paths=paths, out_path=str(out_a)))
    render(FigureSpec(kind="topk-box", csv_paths=paths, out_path=str(out_b)))
    assert out_a.read_bytes() == out_b.read_bytes()


def test_inject_lines_grid(inject_csvs, tmp_path):
    out = tmp_path / "inject.png"
    code = main(["inject-lines", "--csv", *map(str, inject_csvs),
                 "--out", str(out), "--log-y"])
    assert code == 0
    assert out.stat().st_size > 0


def test_unknown_kind_rejected(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["pie-chart", "--csv", "x.csv", "--out", "y.png"])


def test_figure_spec_validation():
    with pytest.raises(ValueError, match="kind"):
        FigureSpec(kind="bogus", csv_paths=("a.csv",), out_path="x.png").validate()
    with pytest.raises(ValueError, match="CSV"):
        FigureSpec(kind="topk-box", csv_paths=(), out_path="x.png").validate()
