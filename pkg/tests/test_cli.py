import json

import pytest

from interleaved_lls.cli import (
    EXIT_ABORT,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    main,
)

TINY_CONFIG = {"n": 20, "q": 3, "m": 4, "iterations": 10, "master_seed": 7}


@pytest.fixture
def tiny_config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return str(path)


class TestGenerate:
    def test_writes_all_files(self, tmp_path, tiny_config_path):
        out = tmp_path / "ds"
        code = main(["generate", "--config", tiny_config_path, "--out", str(out)])
        assert code == EXIT_OK
        names = sorted(p.name for p in out.iterdir())
        expected = sorted(
            ["manifest.json"]
            + [
                f"{family}_{i}.csv"
                for family in ("bird", "fish", "penguin_train", "penguin_test")
                for i in range(1, 5)
            ]
        )
        assert names == expected

    def test_default_block_count(self, tmp_path):
        out = tmp_path / "ds"
        code = main(["generate", "--out", str(out), "--config",
                     _write(tmp_path, {"n": 10})])
        assert code == EXIT_OK
        assert len(list(out.glob("bird_*.csv"))) == 6
        assert len(list(out.glob("penguin_test_*.csv"))) == 6

    def test_repeat_is_byte_identical(self, tmp_path, tiny_config_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(["generate", "--config", tiny_config_path, "--out", str(a)]) == 0
        assert main(["generate", "--config", tiny_config_path, "--out", str(b)]) == 0
        for path in sorted(a.iterdir()):
            assert path.read_bytes() == (b / path.name).read_bytes()

    def test_unwritable_out_dir(self, tmp_path, tiny_config_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        code = main(["generate", "--config", tiny_config_path, "--out", str(blocker)])
        assert code == EXIT_IO


def _write(tmp_path, payload, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestConfigErrors:
    def test_unknown_key(self, tmp_path):
        path = _write(tmp_path, {"alpa": 0.3})
        assert main(["run", "--config", path]) == EXIT_CONFIG

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", "--config", str(path)]) == EXIT_CONFIG

    def test_odd_m(self, tmp_path):
        path = _write(tmp_path, {"m": 5})
        assert main(["run", "--config", path]) == EXIT_CONFIG

    def test_bad_scenario_name(self, tmp_path):
        path = _write(tmp_path, {"scenarios": ["birds_only", "penguins_fly"]})
        assert main(["run", "--config", path]) == EXIT_CONFIG

    def test_bad_type(self, tmp_path):
        path = _write(tmp_path, {"n": 10.5})
        assert main(["run", "--config", path]) == EXIT_CONFIG

    def test_negative_threads(self, tmp_path, tiny_config_path):
        code = main(["run", "--config", tiny_config_path, "--threads", "-1",
                     "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG


class TestRun:
    def test_writes_csv(self, tmp_path, tiny_config_path):
        out = tmp_path / "results.csv"
        code = main(["run", "--config", tiny_config_path, "--out", str(out),
                     "--threads", "1"])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("scenario,step,")
        assert len(lines) == 1 + 5 * TINY_CONFIG["m"]

    def test_iteration_override_keeps_row_count(self, tmp_path, tiny_config_path):
        out = tmp_path / "results.csv"
        code = main(["run", "--config", tiny_config_path, "--out", str(out),
                     "--iterations", "4", "--threads", "1"])
        assert code == EXIT_OK
        assert len(out.read_text().splitlines()) == 1 + 5 * TINY_CONFIG["m"]

    def test_svg_format_emits_charts(self, tmp_path, tiny_config_path):
        out = tmp_path / "results.csv"
        code = main(["run", "--config", tiny_config_path, "--out", str(out),
                     "--format", "svg", "--threads", "1"])
        assert code == EXIT_OK
        bias_svg = tmp_path / "results_bias.svg"
        mse_svg = tmp_path / "results_mse.svg"
        assert bias_svg.exists() and mse_svg.exists()
        content = bias_svg.read_text()
        assert content.startswith("<svg")
        assert content.count("<polyline") == 5

    def test_determinism_across_thread_counts(self, tmp_path, tiny_config_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["run", "--config", tiny_config_path, "--out", str(a),
                     "--threads", "1"]) == EXIT_OK
        assert main(["run", "--config", tiny_config_path, "--out", str(b),
                     "--threads", "3"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_abort_exit_code(self, tmp_path):
        path = _write(tmp_path, {"n": 1, "q": 2, "m": 2, "iterations": 3})
        code = main(["run", "--config", path, "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_ABORT


class TestCheckLemmas:
    def test_passes(self, capsys):
        code = main(["check-lemmas", "--trials", "20", "--iterations", "400",
                     "--seed", "5"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.count("PASS") == 2
        assert "two-step-identity" in out
        assert "two-step-unbiasedness" in out

    def test_anisotropic_features_skip(self, capsys):
        code = main(["check-lemmas", "--trials", "5", "--iterations", "400",
                     "--seed", "5", "--feature-sd", "1,1,1,2,1,1"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "SKIPPED two-step-unbiasedness" in out


class TestEstimateAlpha:
    def test_estimates_from_exported_dataset(self, tmp_path, capsys):
        config = _write(
            tmp_path,
            {"n": 50, "q": 4, "m": 6, "alpha": 0.25, "noise_sd": 0.05,
             "master_seed": 4},
        )
        dataset = tmp_path / "ds"
        assert main(["generate", "--config", config, "--out", str(dataset)]) == 0
        code = main(["estimate-alpha", str(dataset), "--grid-size", "101"])
        out = capsys.readouterr().out.strip()
        assert code == EXIT_OK
        assert abs(float(out) - 0.25) <= 0.05

    def test_missing_dataset_dir(self, tmp_path):
        code = main(["estimate-alpha", str(tmp_path / "absent")])
        assert code == EXIT_IO
