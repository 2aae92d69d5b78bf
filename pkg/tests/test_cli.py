"""Tests for the slimkit command line, driven through typer's CliRunner."""

import csv
import json
import pathlib

import pytest
from typer.testing import CliRunner

from slimkit.__main__ import app

_RUNNER = CliRunner()

_RUN_FILE = """\
seed = 0
algorithm = "lnmp"
layers = 4
lmc = 2
vls = 8
sls = 16
scheme = "coloring"
"""


def _invoke(out: pathlib.Path, *args: str) -> tuple[int, str]:
    run_file = out / "run.toml"
    if not run_file.exists():
        out.mkdir(parents=True, exist_ok=True)
        run_file.write_text(_RUN_FILE)
    result = _RUNNER.invoke(
        app, ["--config", str(run_file), "--output-dir", str(out), *args]
    )
    return result.exit_code, result.output


def _csv_rows(path: pathlib.Path) -> list[dict[str, str]]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# topo
# ---------------------------------------------------------------------------


class TestTopo:
    def test_slim_fly_summary(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "topo", "--slimfly-q", "5")
        assert code == 0
        assert "50 switches, 200 endpoints" in output
        assert "k'=7, p=4" in output
        assert "diameter 2" in output
        document = json.loads((tmp_path / "topology.json").read_text())
        assert document["kind"] == "topology"
        assert document["schema_version"] == 1
        assert len(document["links"]) == 175

    def test_near_nodes_picks_q5(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "topo", "--near-nodes", "200")
        assert code == 0
        assert "50 switches, 200 endpoints" in output

    def test_fat_tree(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "topo", "--fattree2", "36")
        assert code == 0
        assert "54 switches, 648 endpoints" in output

    def test_invalid_q_exits_2(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "topo", "--slimfly-q", "6")
        assert code == 2
        assert "error:" in output

    def test_two_families_rejected(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(
            tmp_path, "topo", "--slimfly-q", "5", "--hyperx2", "12"
        )
        assert code == 2
        assert "exactly one" in output


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


class TestPipeline:
    def test_slim_fly_pipeline(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--slimfly-q", "5")[0] == 0
        assert _invoke(tmp_path, "route")[0] == 0

        code, output = _invoke(tmp_path, "tables", "--check")
        assert code == 0
        assert "route walks match layers" in output
        assert (tmp_path / "lfts.txt").read_text().startswith("switch 0: ")
        assert len(_csv_rows(tmp_path / "lid_map.csv")) == 250

        code, output = _invoke(tmp_path, "deadlock")
        assert code == 0
        assert "acyclic" in output
        assigned = json.loads((tmp_path / "vl_assignment.json").read_text())
        assert assigned["verdict"]["deadlock_free"] is True

        assert _invoke(tmp_path, "analyze")[0] == 0
        report = json.loads((tmp_path / "analysis.json").read_text())
        assert report["n_layers"] == 4
        assert report["max_length_at_most_3"] >= 0.99
        for name in ("path_length_avg.csv", "path_length_max.csv", "link_load.csv"):
            rows = _csv_rows(tmp_path / name)
            assert rows
            assert list(rows[0]) == ["bin_lo", "bin_hi", "count"]

        code, output = _invoke(tmp_path, "mat", "--loads", "0.1")
        assert code == 0
        results = json.loads((tmp_path / "mat.json").read_text())["results"]
        assert len(results) == 1
        assert 0 < results[0]["theta"]

    def test_cabling_then_verify(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "cabling", "--slimfly-q", "5")
        assert code == 0
        assert "5 racks, 175 cables" in output
        assert len(_csv_rows(tmp_path / "cabling_plan.csv")) == 175

        code, output = _invoke(tmp_path, "verify")
        assert code == 0
        assert "matches the plan" in output

        dump = tmp_path / "discovery.txt"
        lines = dump.read_text().splitlines()
        entry = next(idx for idx, line in enumerate(lines) if "->" in line)
        lines[entry] += " DOWN"
        dump.write_text("\n".join(lines) + "\n")
        code, output = _invoke(tmp_path, "verify")
        assert code == 1
        assert "reseat or replace" in output

    def test_deterministic_artifacts(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        outputs = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert _invoke(out, "topo", "--slimfly-q", "5")[0] == 0
            assert (
                _invoke(out, "route", "--algorithm", "rues", "--layers", "3")[0] == 0
            )
            outputs.append(
                [(out / file).read_bytes() for file in ("topology.json", "layers.json")]
            )
        assert outputs[0] == outputs[1]

    def test_schema_mismatch_exits_2(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--slimfly-q", "5")[0] == 0
        assert _invoke(tmp_path, "route")[0] == 0
        code, output = _invoke(
            tmp_path, "route", "--topology", str(tmp_path / "layers.json")
        )
        assert code == 2
        assert "expected 'topology'" in output

    def test_missing_upstream_artifact(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "route")
        assert code == 2
        assert "cannot read" in output

    def test_route_reads_topology_from_topo(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--fattree2", "8")[0] == 0
        document = json.loads((tmp_path / "topology.json").read_text())
        assert (document["kind"], document["family"]) == ("topology", "fattree2")
        code, output = _invoke(tmp_path, "route", "--algorithm", "minimal")
        assert code == 0, output

    def test_truncated_layers_exit_2(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--slimfly-q", "5")[0] == 0
        assert _invoke(tmp_path, "route", "--layers", "2")[0] == 0
        layers_file = tmp_path / "layers.json"
        document = json.loads(layers_file.read_text())
        document["layers"][1]["paths"].pop()
        layers_file.write_text(json.dumps(document))
        for command in ("analyze", "deadlock", "mat"):
            code, output = _invoke(tmp_path, command)
            assert code == 2
            assert "does not route the topology" in output

    def test_too_many_layers_for_lmc(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--slimfly-q", "5")[0] == 0
        assert _invoke(tmp_path, "route", "--layers", "5")[0] == 0
        code, output = _invoke(tmp_path, "tables", "--lmc", "2")
        assert code == 2
        assert "lmc >= 3" in output


# ---------------------------------------------------------------------------
# sweep, scale and costs
# ---------------------------------------------------------------------------


class TestTables:
    def test_sweep_one_row_per_combination(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        assert _invoke(tmp_path, "topo", "--slimfly-q", "5")[0] == 0
        code, _ = _invoke(
            tmp_path,
            "sweep",
            "--algorithms",
            "lnmp",
            "--layers",
            "1,2,4,8",
            "--loads",
            "0.1",
        )
        assert code == 0
        rows = _csv_rows(tmp_path / "sweep.csv")
        assert [int(row["layers"]) for row in rows] == [1, 2, 4, 8]
        assert all(float(row["theta"]) > 0 for row in rows)
        assert all(0 <= float(row["disjoint_3_fraction"]) <= 1 for row in rows)

    def test_bad_list_option(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "sweep", "--layers", "one,two")
        assert code == 2
        assert "comma-separated" in output

    def test_scale(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, _ = _invoke(tmp_path, "scale", "--ports", "36")
        assert code == 0
        rows = _csv_rows(tmp_path / "scalability.csv")
        assert [int(row["lmc"]) for row in rows] == list(range(8))
        assert all(int(row["lids_used"]) <= 0xBFFF for row in rows)

    def test_costs(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, output = _invoke(tmp_path, "costs", "--radix", "36")
        assert code == 0
        names = [row["topology"] for row in _csv_rows(tmp_path / "costs.csv")]
        assert names == ["FT2", "FT2-B", "FT3", "HX2", "SF"]
        assert "FT2: 648 endpoints" in output

    def test_costs_needs_one_size(
        self, tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        code, _ = _invoke(tmp_path, "costs")
        assert code == 2
