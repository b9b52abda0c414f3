import json

import numpy as np
import pytest

from ringwalk.cli import main
from oracles import dense_nonlocal_step

from ringwalk import HADAMARD, PLUS_I_COIN


def run(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestSimulate:
    def test_quench_csv_schema_and_manifest(self, tmp_path):
        out = tmp_path / "run.csv"
        code = run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 2,
            "--steps", 120, "--samples", 3, "--seed", 1, "--output", out,
        )
        assert code == 0
        header, rows = read_rows(out)
        assert header == ["t", "d_omega", "entropy", "d_omega_std"]
        assert len(rows) == 121
        assert rows[0][0] == "0"
        assert float(rows[0][1]) == pytest.approx(4.0 / 5.0, abs=1e-12)
        manifest = json.loads((tmp_path / "run.manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["base_seed"] == 1
        assert manifest["sample_seed_paths"] == [[1, 0], [1, 1], [1, 2]]
        assert manifest["outputs"]["csv"] == str(out)

    def test_single_sample_has_no_std_column(self, tmp_path):
        out = tmp_path / "single.csv"
        assert run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 2,
            "--steps", 40, "--output", out,
        ) == 0
        header, _ = read_rows(out)
        assert header == ["t", "d_omega", "entropy"]

    def test_values_have_full_precision(self, tmp_path):
        from ringwalk import NonlocalTemplate, walk_series

        out = tmp_path / "prec.csv"
        run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 3,
            "--steps", 30, "--seed", 4, "--output", out,
        )
        _, rows = read_rows(out)
        series = walk_series(NonlocalTemplate(d_s=5, d_e=3).realize(4, 0), 30)
        for row, expected in zip(rows, series.d_omega):
            assert float(row[1]) == expected  # 17 significant digits round-trip

    def test_trivial_environment_matches_dense_bare_walk(self, tmp_path):
        # With a one-dimensional environment the branch phases cannot act
        # before the first winding interference at t = sites + 1, so the
        # early series must coincide with the bare coined walk.
        d_s = 5
        out = tmp_path / "bare.csv"
        run(
            "simulate", "--model", "nonlocal", "--sites", d_s, "--env-dim", 1,
            "--steps", d_s, "--seed", 2, "--output", out,
        )
        _, rows = read_rows(out)
        u = dense_nonlocal_step(d_s, np.asarray(HADAMARD), np.eye(1), np.eye(1))
        psi = np.zeros(d_s * 2, dtype=complex)
        psi[:2] = np.asarray(PLUS_I_COIN)
        for t in range(d_s + 1):
            rho = psi.reshape(d_s, 2) @ psi.reshape(d_s, 2).conj().T
            d_expected = 0.5 * np.abs(np.linalg.eigvalsh(rho) - 1.0 / d_s).sum()
            assert float(rows[t][1]) == pytest.approx(d_expected, abs=1e-12)
            psi = u @ psi

    def test_local_model(self, tmp_path):
        out = tmp_path / "local.csv"
        code = run(
            "simulate", "--model", "local", "--sites", 5,
            "--theta0", 0.26, "--phi0", 0.0, "--theta1", 0.26, "--phi1", 1.5707,
            "--steps", 60, "--output", out,
        )
        assert code == 0
        header, rows = read_rows(out)
        assert header == ["t", "d_omega", "entropy"]
        assert len(rows) == 61

    def test_local_rejects_quench_samples(self, tmp_path):
        code = run(
            "simulate", "--model", "local", "--sites", 5,
            "--theta0", 0.1, "--phi0", 0.0, "--theta1", 0.1, "--phi1", 1.0,
            "--steps", 10, "--samples", 2, "--output", tmp_path / "x.csv",
        )
        assert code == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        args = (
            "simulate", "--model", "nonlocal", "--sites", 7, "--env-dim", 4,
            "--steps", 80, "--samples", 2, "--seed", 9,
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(*args, "--output", a) == 0
        assert run(*args, "--output", b) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_reexecution_round_trip(self, tmp_path):
        first = tmp_path / "first.csv"
        run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 2,
            "--steps", 50, "--samples", 2, "--seed", 6, "--output", first,
        )
        second = tmp_path / "second.csv"
        code = run(
            "simulate", "--config", tmp_path / "first.manifest.json", "--output", second
        )
        assert code == 0
        assert second.read_bytes() == first.read_bytes()


class TestClassicalCommand:
    def test_small_ring_values(self, tmp_path):
        out = tmp_path / "cl.csv"
        assert run("classical", "--sites", 3, "--steps", 1, "--output", out) == 0
        header, rows = read_rows(out)
        assert header == ["t", "d_omega", "entropy"]
        assert float(rows[0][1]) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert float(rows[1][1]) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_series_monotone(self, tmp_path):
        out = tmp_path / "cl51.csv"
        run("classical", "--sites", 51, "--steps", 500, "--output", out)
        _, rows = read_rows(out)
        d = np.array([float(r[1]) for r in rows])
        assert (np.diff(d) <= 1e-15).all()

    def test_even_sites_rejected(self, tmp_path):
        assert run("classical", "--sites", 4, "--steps", 5, "--output", tmp_path / "x.csv") == 2


class TestMixingSweep:
    def test_rows_and_classical_reference(self, tmp_path):
        out = tmp_path / "mix.csv"
        code = run(
            "mixing-sweep", "--sites", 19, "--env-dims", "1,32", "--samples", 3,
            "--steps", 600, "--seed", 3, "--output", out,
        )
        assert code == 0
        header, rows = read_rows(out)
        assert header == ["d_b", "tau_mix", "tau_err"]
        assert [r[0] for r in rows] == ["2", "64", "inf"]
        # The d_b=2 point has no usable fit window and degrades to nan.
        assert np.isnan(float(rows[0][1]))
        assert float(rows[1][1]) > 0
        assert float(rows[2][1]) > 0
        manifest = json.loads((tmp_path / "mix.manifest.json").read_text())
        assert manifest["classical"]["tau_spectral"] == pytest.approx(72.82, abs=0.01)
        assert "error" in manifest["points"][0]


class TestSaturationSweep:
    def test_grid_csv_and_fit(self, tmp_path):
        out = tmp_path / "sat.csv"
        code = run(
            "saturation-sweep", "--sites-list", "5,7", "--env-dims", "4,16",
            "--samples", 2, "--steps", 300, "--seed", 5, "--output", out,
        )
        assert code == 0
        header, rows = read_rows(out)
        assert header == ["d_s", "d_b", "ratio", "mean_d", "std_d"]
        assert len(rows) == 4
        fit = json.loads((tmp_path / "sat.fit.json").read_text())
        assert fit["params"]["C"] > 0
        assert np.isfinite(fit["params"]["x"])
        assert fit["provenance"]["parameters"]["sites_list"] == [5, 7]

    def test_fit_skipped_with_too_few_points(self, tmp_path, capsys):
        out = tmp_path / "sat2.csv"
        code = run(
            "saturation-sweep", "--sites-list", "5", "--ratios", "0.5",
            "--samples", 2, "--steps", 200, "--seed", 5, "--output", out,
        )
        assert code == 0
        assert out.exists()
        assert not (tmp_path / "sat2.fit.json").exists()
        assert "fit skipped" in capsys.readouterr().err


class TestConfigAndErrors:
    def test_config_file_supplies_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "nonlocal", "sites": 5, "env_dim": 2, "steps": 50, "seed": 3,
        }))
        out = tmp_path / "from_config.csv"
        assert run("simulate", "--config", cfg, "--output", out) == 0
        _, rows = read_rows(out)
        assert len(rows) == 51

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "nonlocal", "sites": 5, "env_dim": 2, "steps": 50,
        }))
        out = tmp_path / "override.csv"
        assert run("simulate", "--config", cfg, "--steps", 60, "--output", out) == 0
        _, rows = read_rows(out)
        assert len(rows) == 61

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "nonlocal", "sights": 5}))
        assert run("simulate", "--config", cfg, "--output", tmp_path / "x.csv") == 2

    def test_missing_required_flags(self, tmp_path):
        assert run("simulate", "--model", "nonlocal", "--sites", 5,
                   "--output", tmp_path / "x.csv") == 2

    def test_even_sites_usage_error(self, tmp_path):
        assert run(
            "simulate", "--model", "nonlocal", "--sites", 4, "--env-dim", 2,
            "--steps", 10, "--output", tmp_path / "x.csv",
        ) == 2

    def test_numerical_failure_exit_code(self, tmp_path):
        code = run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 2,
            "--steps", 10, "--spread", -1.0, "--output", tmp_path / "x.csv",
        )
        assert code == 3

    def test_io_failure_exit_code(self, tmp_path):
        target = tmp_path / "iamadir.csv"
        target.mkdir()
        code = run(
            "simulate", "--model", "nonlocal", "--sites", 5, "--env-dim", 2,
            "--steps", 10, "--output", target,
        )
        assert code == 4

    def test_argparse_usage_exits_two(self):
        with pytest.raises(SystemExit) as err:
            run("no-such-command")
        assert err.value.code == 2

    def test_outdir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RINGWALK_OUTDIR", str(tmp_path))
        assert run("classical", "--sites", 3, "--steps", 5) == 0
        assert (tmp_path / "classical_s3_t5.csv").exists()
