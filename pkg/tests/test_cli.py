import json

import pytest

from tailkit.cli import main
from tailkit.export import skeleton_from_json


@pytest.fixture()
def skel4(tmp_path):
    path = tmp_path / "skel4.json"
    assert main(["skeleton", "--preset", "type4", "--out", str(path)]) == 0
    return path


def run_ok(argv):
    assert main(argv) == 0


class TestSkeletonCommand:
    def test_preset_writes_valid_graph(self, skel4):
        graph = skeleton_from_json(skel4.read_text())
        assert len(graph.ribs) == 6

    def test_explicit_parameters(self, tmp_path):
        out = tmp_path / "custom.json"
        run_ok([
            "skeleton", "--h1h2", "1:2", "--thickness-ratio", "2.0",
            "--ribs", "5", "--out", str(out),
        ])
        graph = skeleton_from_json(out.read_text())
        assert len(graph.ribs) == 5

    def test_unknown_preset_exits_1(self, tmp_path, capsys):
        code = main(["skeleton", "--preset", "type7", "--out", str(tmp_path / "x.json")])
        assert code == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_byte_identical_runs(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_ok(["skeleton", "--preset", "type2", "--out", str(a)])
        run_ok(["skeleton", "--preset", "type2", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestFitCommand:
    def test_fit_bundled_profile(self, tmp_path):
        out = tmp_path / "fit.json"
        from tailkit.profile import reference_profile_path

        run_ok(["fit", "--profile", str(reference_profile_path()), "--out", str(out)])
        doc = json.loads(out.read_text())
        assert doc["upper"]["degree"] == 17
        assert len(doc["upper"]["coefficients"]) == 18
        assert doc["report"]["mse_upper_m2"] <= 5e-6

    def test_degree_zero_exits_1(self, tmp_path, capsys):
        from tailkit.profile import reference_profile_path

        code = main([
            "fit", "--profile", str(reference_profile_path()),
            "--degree", "0", "--out", str(tmp_path / "x.json"),
        ])
        assert code == 1
        assert "degree" in capsys.readouterr().err

    def test_failed_run_leaves_no_partial_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x_m,y_upper_m,y_lower_m\n0.0,oops,0.0\n")
        out = tmp_path / "fit.json"
        assert main(["fit", "--profile", str(bad), "--out", str(out)]) == 1
        assert not out.exists()

    def test_missing_profile_exits_1(self, tmp_path, capsys):
        code = main(["fit", "--profile", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "x.json")])
        assert code == 1

    def test_byte_identical_runs(self, tmp_path):
        from tailkit.profile import reference_profile_path

        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_ok(["fit", "--profile", str(reference_profile_path()), "--out", str(a)])
        run_ok(["fit", "--profile", str(reference_profile_path()), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestBendCommand:
    def test_pose_json_shape(self, skel4, tmp_path):
        out = tmp_path / "pose.json"
        run_ok([
            "bend", "--skeleton", str(skel4), "--delta-top", "0.006",
            "--delta-bottom", "-0.006", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert set(doc) == {"segment_angles_rad", "midline"}
        assert len(doc["segment_angles_rad"]) == 5
        assert len(doc["midline"]) == 6
        assert all(angle > 0 for angle in doc["segment_angles_rad"])

    def test_excessive_delta_exits_1(self, skel4, tmp_path, capsys):
        # 0.045 m exceeds 20% of the ~0.213 m slack
        code = main([
            "bend", "--skeleton", str(skel4), "--delta-top", "0.045",
            "--delta-bottom", "0.0", "--out", str(tmp_path / "pose.json"),
        ])
        assert code == 1
        assert "travel limit" in capsys.readouterr().err


class TestSwimCommand:
    def test_calibrated_speed_matches_reference(self, skel4, capsys):
        run_ok(["swim", "--skeleton", str(skel4), "--calibrate-speed", "0.163181"])
        doc = json.loads(capsys.readouterr().out)
        assert abs(doc["speed_mm_s"] - 163.18) / 163.18 <= 0.01
        assert doc["power_w"] == pytest.approx(9.33)
        assert doc["mass_kg"] == pytest.approx(0.6022)

    def test_plain_swim_has_all_fields(self, skel4, capsys):
        run_ok(["swim", "--skeleton", str(skel4)])
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {
            "speed_mm_s", "speed_bl_s", "power_w", "mass_kg", "cot", "body_length_m",
        }
        assert doc["body_length_m"] == pytest.approx(0.3251, rel=1e-9)


class TestSweepAndPareto:
    def test_reference_sweep_then_pareto(self, tmp_path, capsys):
        report = tmp_path / "report.csv"
        front = tmp_path / "front.csv"
        run_ok(["sweep", "--reference", "--out", str(report)])
        run_ok(["pareto", "--records", str(report), "--out", str(front)])
        lines = front.read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[1].startswith("type4,")
        assert ",true," in lines[1]

    def test_grid_sweep(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({
            "h1_h2_values": [[1, 2]],
            "thickness_ratios": [1, 3],
            "n_ribs_values": [4],
        }))
        report = tmp_path / "report.csv"
        plot = tmp_path / "plot.csv"
        run_ok(["sweep", "--grid", str(grid), "--out", str(report),
                "--jobs", "1", "--plot-out", str(plot)])
        lines = report.read_text().strip().split("\n")
        assert len(lines) == 3
        assert plot.read_text().startswith("speed_mm_s,cot")

    def test_grid_and_reference_mutually_exclusive(self, tmp_path, capsys):
        assert main(["sweep", "--reference", "--grid", "g.json",
                     "--out", str(tmp_path / "r.csv")]) == 1

    def test_pareto_rejects_foreign_csv(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert main(["pareto", "--records", str(bad), "--out", str(tmp_path / "f.csv")]) == 1

    def test_pareto_skips_error_rows(self, tmp_path):
        report = tmp_path / "report.csv"
        header = "label,h1,h2,thickness_ratio,n_ribs,speed_mm_s,speed_bl_s,power_w,mass_kg,cot,pareto,source"
        report.write_text(
            header + "\n"
            "broken,1.0,1.0,1.0,6,,,,,,false,simulated\n"
            "good,1.0,2.0,1.0,6,163.18,0.502,9.33,0.6022,95.0,false,simulated\n"
        )
        front = tmp_path / "front.csv"
        run_ok(["pareto", "--records", str(report), "--out", str(front)])
        lines = front.read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[1].startswith("good,")


class TestExportCommand:
    def test_svg_written(self, skel4, tmp_path):
        svg = tmp_path / "out.svg"
        run_ok(["export", "--skeleton", str(skel4), "--svg", str(svg)])
        text = svg.read_text()
        assert text.startswith("<?xml")
        assert 'class="rib"' in text

    def test_byte_identical_runs(self, skel4, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        run_ok(["export", "--skeleton", str(skel4), "--svg", str(a)])
        run_ok(["export", "--skeleton", str(skel4), "--svg", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestAnalyzeCommand:
    def test_measured_logs(self, tmp_path, capsys):
        power = tmp_path / "power.csv"
        power.write_text("t_s,voltage_v,current_a\n0.0,3.7,2.5217\n10.0,3.7,2.5217\n")
        track = tmp_path / "track.csv"
        track.write_text("t_s,x_m\n0.0,0.0\n10.0,1.631813\n")
        run_ok(["analyze", "--power-log", str(power), "--track", str(track),
                "--mass", "0.6022"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["speed_m_s"] == pytest.approx(0.1631813)
        assert doc["power_w"] == pytest.approx(3.7 * 2.5217)
        assert doc["cot"] == pytest.approx(
            doc["power_w"] / (0.6022 * 0.1631813), rel=1e-9
        )


class TestCliBehavior:
    def test_unknown_flag_exits_1(self, capsys):
        assert main(["skeleton", "--bogus", "x", "--out", "y.json"]) == 1

    @pytest.mark.parametrize(
        "command",
        ["fit", "skeleton", "bend", "swim", "sweep", "pareto", "export", "analyze"],
    )
    def test_help_available(self, command, capsys):
        with pytest.raises(SystemExit) as exc:
            main([command, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "--help" in out or "usage" in out

    def test_config_overrides_default(self, skel4, tmp_path, capsys):
        config = tmp_path / "tailkit.cfg"
        config.write_text("# defaults for bench runs\namplitude_m = 0.002\n")
        run_ok(["swim", "--skeleton", str(skel4), "--config", str(config)])
        low_amp = json.loads(capsys.readouterr().out)
        run_ok(["swim", "--skeleton", str(skel4)])
        default = json.loads(capsys.readouterr().out)
        assert low_amp["speed_mm_s"] < default["speed_mm_s"]
        assert low_amp["power_w"] < default["power_w"]

    def test_explicit_flag_beats_config(self, skel4, tmp_path, capsys):
        config = tmp_path / "tailkit.cfg"
        config.write_text("amplitude_m = 0.002\n")
        run_ok(["swim", "--skeleton", str(skel4), "--config", str(config),
                "--amplitude", "0.008"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["power_w"] == pytest.approx(9.33)

    def test_bad_config_line_exits_1(self, skel4, tmp_path, capsys):
        config = tmp_path / "tailkit.cfg"
        config.write_text("amplitude_m: 0.002\n")
        assert main(["swim", "--skeleton", str(skel4), "--config", str(config)]) == 1
