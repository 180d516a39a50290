import json

import pytest

from epfigures import FigureSpecError, load_spec, render
from epfigures.standard import main as make_figures_main

from conftest import write_1d_snapshot


def simple_spec(tmp_path, **panel_overrides):
    snap = write_1d_snapshot(tmp_path / "snap.csv")
    panel = {"kind": "line", "csv": str(snap), "x": "x", "y": ["rho"]}
    panel.update(panel_overrides)
    return {
        "output": str(tmp_path / "fig.png"),
        "layout": [1, 1],
        "panels": [panel],
    }


def test_render_line_figure(tmp_path):
    out = render(simple_spec(tmp_path))
    assert out.exists()
    assert out.stat().st_size > 0


def test_render_from_json_path(tmp_path):
    spec = simple_spec(tmp_path)
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out = render(spec_path)
    assert out.exists()


def test_missing_column_names_the_column(tmp_path):
    spec = simple_spec(tmp_path, y=["temperature"])
    with pytest.raises(FigureSpecError, match="'temperature'"):
        load_spec(spec)
    assert not (tmp_path / "fig.png").exists()  # no file written


def test_empty_csv_rejected_without_output(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    spec = {
        "output": str(tmp_path / "fig.png"),
        "layout": [1, 1],
        "panels": [{"kind": "line", "csv": str(empty), "x": "x", "y": ["rho"]}],
    }
    with pytest.raises(FigureSpecError, match="empty CSV"):
        render(spec)
    assert not (tmp_path / "fig.png").exists()


def test_header_only_csv_rejected(tmp_path):
    header_only = tmp_path / "h.csv"
    header_only.write_text("x,rho,u,phi\n")
    spec = {
        "output": str(tmp_path / "fig.png"),
        "layout": [1, 1],
        "panels": [{"kind": "line", "csv": str(header_only), "x": "x", "y": ["rho"]}],
    }
    with pytest.raises(FigureSpecError, match="no data rows"):
        render(spec)


def test_unknown_kind_rejected(tmp_path):
    spec = simple_spec(tmp_path, kind="sparkline")
    with pytest.raises(FigureSpecError, match="sparkline"):
        load_spec(spec)


def test_too_many_panels_rejected(tmp_path):
    spec = simple_spec(tmp_path)
    spec["panels"] = spec["panels"] * 2
    with pytest.raises(FigureSpecError, match="more panels"):
        load_spec(spec)


def test_rendering_is_byte_deterministic(tmp_path):
    spec = simple_spec(tmp_path)
    first = render(spec).read_bytes()
    second = render(spec).read_bytes()
    assert first == second


def test_rendering_does_not_mutate_inputs(tmp_path):
    spec = simple_spec(tmp_path)
    before = (tmp_path / "snap.csv").read_bytes()
    render(spec)
    assert (tmp_path / "snap.csv").read_bytes() == before


def test_all_standard_sets_render_and_are_deterministic(artifact_tree, capsys):
    out_dir = artifact_tree["root"] / "figs"
    argv = [
        "--qn1d", str(artifact_tree["qn1d_ap"]),
        "--qn1d-classical", str(artifact_tree["qn1d_classical"]),
        "--maxwell-eps", str(artifact_tree["maxwell_eps"]),
        "--maxwell-eps2", str(artifact_tree["maxwell_eps2"]),
        "--column", str(artifact_tree["column"]),
        "--qn2d", str(artifact_tree["qn2d"]),
        "--energy", str(artifact_tree["qn1d_ap"]), str(artifact_tree["column"]),
        "--sweep-summary", str(artifact_tree["summary"]),
        "--out", str(out_dir),
    ]
    assert make_figures_main(argv) == 0
    expected = [
        "qn1d_t1.png", "qn1d_t2.png", "maxwell_eps.png", "maxwell_eps2.png",
        "column.png", "qn2d.png", "energy.png", "dt_vs_eps.png",
    ]
    first = {}
    for name in expected:
        path = out_dir / name
        assert path.exists() and path.stat().st_size > 0, name
        first[name] = path.read_bytes()
    # second invocation on the same inputs is byte-identical
    assert make_figures_main(argv) == 0
    for name in expected:
        assert (out_dir / name).read_bytes() == first[name], name


def test_make_figures_requires_inputs(tmp_path):
    assert make_figures_main(["--out", str(tmp_path)]) == 2


def test_make_figures_reports_missing_snapshot(tmp_path):
    empty_run = tmp_path / "run"
    empty_run.mkdir()
    rc = make_figures_main(["--qn1d", str(empty_run), "--out", str(tmp_path / "f")])
    assert rc == 1
