import json

import pytest

from rareclaim.cli import main
from rareclaim.output import parse_l_values, parse_n_grid


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGridParsing:
    def test_plain_list(self):
        assert parse_n_grid("0,5,10") == (0, 5, 10)

    def test_single_value(self):
        assert parse_n_grid("0") == (0,)

    def test_geometric(self):
        assert parse_n_grid("geo:1:100:5") == (1, 3, 10, 32, 100)

    def test_geometric_collapses_duplicates(self):
        assert parse_n_grid("geo:1:4:6") == (1, 2, 3, 4)

    def test_geometric_scientific_notation(self):
        grid = parse_n_grid("geo:1:1e6:25")
        assert grid[0] == 1 and grid[-1] == 1_000_000
        assert len(grid) == 25  # no collapses at this density
        assert all(b > a for a, b in zip(grid, grid[1:]))

    @pytest.mark.parametrize("text", ["geo:1:100", "geo:0:10:3", "geo:5:1:3", "1,x", ""])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_n_grid(text)

    def test_l_values_dedupe_sort(self):
        assert parse_l_values("3,0,3,1") == (0, 1, 3)


class TestEval:
    def test_baseline_point(self, capsys):
        code, out, _ = run(["eval", "--n", "0", "--l", "0"], capsys)
        assert code == 0
        assert "p = 0.900000000000" in out
        assert "converged = true" in out
        assert "# tool = rareclaim" in out

    def test_json_format(self, capsys):
        code, out, _ = run(["eval", "--n", "0", "--format", "json", "--means"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["p"] == pytest.approx(0.9, abs=1e-9)
        assert payload["mean_v"] == pytest.approx(19.0 / 30.0, abs=1e-9)
        assert payload["metadata"]["d_hi"] == 0.2
        assert payload["converged"] is True

    def test_custom_prior_flag(self, capsys):
        code, out, _ = run(
            ["eval", "--n", "0", "--d-max", "0.1", "--format", "json"], capsys
        )
        assert json.loads(out)["p"] == pytest.approx(0.95, abs=1e-9)

    def test_induction_column(self, capsys):
        code, out, _ = run(["eval", "--n", "8", "--induction"], capsys)
        assert code == 0
        assert "induction_p = 0.100000000000" in out

    def test_nonconvergence_exit_code_and_flag(self, capsys):
        code, out, _ = run(
            ["eval", "--n", "1000000", "--max-depth", "3", "--format", "json"], capsys
        )
        assert code == 3
        payload = json.loads(out)  # record still printed, flagged
        assert payload["converged"] is False
        assert 0.0 <= payload["p"] <= 1.0

    @pytest.mark.parametrize(
        "argv",
        [
            ["eval"],  # missing --n
            ["eval", "--n", "1", "--no-such-flag"],
            ["eval", "--n", "-2"],
            ["eval", "--n", "1", "--v-min", "0.9", "--v-max", "0.1"],
            ["eval", "--n", "1", "--rel-tol", "2.0"],
            ["nonsense"],
        ],
    )
    def test_usage_errors_exit_2(self, argv, capsys):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2


class TestSweep:
    def test_single_curve_files_and_content(self, tmp_path, capsys):
        code, out, _ = run(
            [
                "sweep",
                "--n-grid",
                "0",
                "--l",
                "0",
                "--means",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 0
        text = (tmp_path / "fig1.csv").read_text()
        lines = text.splitlines()
        header_idx = next(i for i, line in enumerate(lines) if not line.startswith("#"))
        assert lines[header_idx] == "n,l,p,p_err,mean_v,mean_d,induction_p"
        row = lines[header_idx + 1].split(",")
        assert row[0] == "0" and row[1] == "0"
        assert float(row[2]) == pytest.approx(0.9, abs=1e-9)
        assert float(row[4]) == pytest.approx(19.0 / 30.0, abs=1e-6)
        assert float(row[5]) == pytest.approx(0.1, abs=1e-6)
        assert row[6] == "-"  # induction not requested
        assert "# tool = rareclaim" in text
        assert "\r" not in text

    def test_multi_curve_uses_fig3(self, tmp_path, capsys):
        code, _, _ = run(
            ["sweep", "--n-grid", "0,10", "--l", "0,3", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        lines = (tmp_path / "fig3.csv").read_text().splitlines()
        rows = [line.split(",") for line in lines if not line.startswith("#")][1:]
        assert [(r[0], r[1]) for r in rows] == [("0", "0"), ("10", "0"), ("0", "3"), ("10", "3")]
        assert all(r[4] == "-" and r[5] == "-" for r in rows)  # no means requested

    def test_byte_identical_reruns(self, tmp_path, capsys):
        argv = ["sweep", "--n-grid", "geo:1:1000:5", "--l", "0", "--induction"]
        run(argv + ["--out", str(tmp_path / "a")], capsys)
        run(argv + ["--out", str(tmp_path / "b")], capsys)
        assert (tmp_path / "a/fig1.csv").read_bytes() == (tmp_path / "b/fig1.csv").read_bytes()

    def test_svg_does_not_change_csv(self, tmp_path, capsys):
        argv = ["sweep", "--n-grid", "0,10,100", "--l", "0,1", "--means", "--induction"]
        run(argv + ["--out", str(tmp_path / "plain")], capsys)
        run(argv + ["--svg", "--out", str(tmp_path / "svg")], capsys)
        assert (tmp_path / "plain/fig3.csv").read_bytes() == (
            tmp_path / "svg/fig3.csv"
        ).read_bytes()
        chart = (tmp_path / "svg/fig3.svg").read_text()
        assert chart.startswith("<?xml")
        assert "<polyline" in chart and "rel_tol" in chart
        means_chart = (tmp_path / "svg/fig4.svg").read_text()
        assert "stroke-dasharray" in means_chart

    def test_json_output(self, tmp_path, capsys):
        code, _, _ = run(
            [
                "sweep",
                "--n-grid",
                "0,5",
                "--l",
                "0",
                "--format",
                "json",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads((tmp_path / "fig1.json").read_text())
        assert payload["metadata"]["tool"] == "rareclaim"
        assert len(payload["records"]) == 2
        assert payload["records"][0]["p"] == pytest.approx(0.9, abs=1e-9)
        assert payload["records"][0]["mean_v"] is None

    def test_nonconvergence_flushes_results_exit_3(self, tmp_path, capsys):
        code, out, err = run(
            [
                "sweep",
                "--n-grid",
                "0,1000000",
                "--l",
                "0",
                "--max-depth",
                "3",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 3
        assert "did not reach" in err
        rows = [
            line
            for line in (tmp_path / "fig1.csv").read_text().splitlines()
            if not line.startswith("#")
        ]
        assert len(rows) == 3  # header plus both points, best-effort included

    @pytest.mark.parametrize("grid", ["5,3", "-1,3", "geo:1:100", ""])
    def test_bad_grid_exit_2(self, grid, capsys):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--n-grid", grid, "--l", "0"])
        assert info.value.code == 2

    def test_missing_grid_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--l", "0"])
        assert info.value.code == 2


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"n": 8, "d_max": 0.1, "induction": True}))
        code, out, _ = run(
            ["eval", "--config", str(config), "--format", "json"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 8
        assert payload["metadata"]["d_hi"] == 0.1
        assert payload["induction_p"] == pytest.approx(0.1)

    def test_flags_override_config(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"n": 8, "d_max": 0.1}))
        code, out, _ = run(
            ["eval", "--config", str(config), "--n", "0", "--format", "json"], capsys
        )
        payload = json.loads(out)
        assert payload["n"] == 0
        assert payload["metadata"]["d_hi"] == 0.1

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"frobnicate": 1}))
        with pytest.raises(SystemExit) as info:
            main(["eval", "--n", "0", "--config", str(config)])
        assert info.value.code == 2

    def test_missing_config_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["eval", "--n", "0", "--config", "/no/such/file.json"])
        assert info.value.code == 2


class TestVerify:
    def test_quick_suite_passes(self, capsys):
        code, out, _ = run(["verify", "--quick"], capsys)
        assert code == 0
        assert "FAIL" not in out
        assert "PASS s_n-enumeration" in out
        assert "PASS asymptote" in out
        assert "checks passed" in out

    def test_failed_check_exits_1(self, capsys, monkeypatch):
        import rareclaim.cli as cli_mod
        from rareclaim.verify import CheckResult

        monkeypatch.setattr(
            cli_mod,
            "run_checks",
            lambda **kwargs: [CheckResult("stub", False, "forced failure")],
        )
        code, out, _ = run(["verify", "--quick"], capsys)
        assert code == 1
        assert "FAIL stub" in out
