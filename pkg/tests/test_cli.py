import json

import numpy as np
import pytest

from tritrace import __version__
from tritrace.circuits import enumerate_types
from tritrace.cli import (
    DEFAULT_SEED,
    build_config,
    cached_types,
    main,
    matrix_from_csv,
    matrix_to_csv_rows,
)
from tritrace.ensembles import EnsembleSpec, sample_matrix


def run_cli(*args):
    return main(list(args))


class TestTypesCommand:
    def test_k4_row_counts(self, capsys):
        assert run_cli("types", "--k", "4") == 0
        out = capsys.readouterr().out
        rows = [line.split() for line in out.splitlines()[2:] if line.strip()]
        assert len(rows) == 6
        assert [int(r[-1]) for r in rows] == [1, 4, 4, 4, 2, 4]

    def test_jsonl_output(self, tmp_path, capsys):
        path = tmp_path / "types.jsonl"
        assert run_cli("types", "--k", "3", "--output", str(path)) == 0
        records = [json.loads(line) for line in path.read_text().splitlines()]
        assert [r["count"] for r in records] == [1, 3, 3]
        assert all(r["k"] == 3 for r in records)

    def test_disk_cache_roundtrip(self, tmp_path, monkeypatch, capsys):
        cache = tmp_path / "cache"
        monkeypatch.setenv("TRITRACE_CACHE_DIR", str(cache))
        first = cached_types(5)
        assert (cache / "types_k5.jsonl").exists()
        again = cached_types(5)
        assert again == first
        # corrupt entries are recomputed rather than trusted
        (cache / "types_k5.jsonl").write_text("not json\n")
        assert cached_types(5) == enumerate_types(5)


class TestTraceCommand:
    def test_two_routes_agree(self, capsys):
        assert run_cli("trace", "--ensemble", "anderson", "--n", "64",
                       "--k", "6", "--seed", "7") == 0
        out = capsys.readouterr().out
        assert "expansion:" in out and "direct:" in out

    def test_input_file_roundtrip(self, tmp_path, capsys):
        spec = EnsembleSpec.birth_death_q()
        matrix = sample_matrix(spec, 12, 5)
        path = tmp_path / "matrix.csv"
        rows = ["sub,diag,sup"] + [",".join(r) for r in matrix_to_csv_rows(matrix)]
        path.write_text("\n".join(rows) + "\n")
        parsed = matrix_from_csv(str(path))
        assert np.allclose(parsed.diag, matrix.diag)
        assert np.allclose(parsed.sub, matrix.sub)
        assert run_cli("trace", "--input", str(path), "--k", "4") == 0


class TestConfigHandling:
    def test_empty_config_file_fails(self, tmp_path, capsys):
        cfg = tmp_path / "empty.ini"
        cfg.write_text("")
        assert run_cli("clt", "--config", str(cfg)) == 1
        assert "empty" in capsys.readouterr().err

    def test_malformed_config_reports_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[run]\nthis line has no equals sign\n")
        assert run_cli("clt", "--config", str(cfg)) == 1
        assert "line" in capsys.readouterr().err.lower()

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text(
            "[run]\nmaster_seed = 1\n\n[ensemble]\nmodel = anderson\n"
            "d_law = rademacher\n\n[trace]\nk = 2\nn = 16\n")
        args = main.__globals__["_build_parser"]().parse_args(
            ["trace", "--config", str(cfg), "--seed", "42"])
        config = build_config(args)
        assert config.master_seed == 42
        assert config.extras["k"] == 2
        assert config.ensemble.model == "anderson"

    def test_seed_defaults_to_fixed_constant(self):
        args = main.__globals__["_build_parser"]().parse_args(["types", "--k", "3"])
        assert build_config(args).master_seed == DEFAULT_SEED == 0x5EED

    def test_missing_required_keys(self, capsys):
        assert run_cli("clt", "--ensemble", "anderson") == 1
        assert "missing" in capsys.readouterr().err

    def test_workers_env_fallback(self, monkeypatch):
        parser = main.__globals__["_build_parser"]()
        monkeypatch.setenv("TRITRACE_WORKERS", "3")
        assert build_config(parser.parse_args(["types", "--k", "3"])).workers == 3
        monkeypatch.setenv("TRITRACE_WORKERS", "auto")
        import os
        assert build_config(parser.parse_args(["types", "--k", "3"])).workers == os.cpu_count()
        # explicit flag wins over the environment
        args = parser.parse_args(["types", "--k", "3", "--workers", "2"])
        assert build_config(args).workers == 2
        monkeypatch.setenv("TRITRACE_WORKERS", "0")
        with pytest.raises(Exception):
            build_config(parser.parse_args(["types", "--k", "3"]))


class TestOutputs:
    def test_dump_sample_layout(self, tmp_path):
        path = tmp_path / "m.csv"
        assert run_cli("dump-sample", "--ensemble", "beta_hermite", "--beta", "2",
                       "--n", "6", "--seed", "9", "--output", str(path)) == 0
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "sub,diag,sup"
        body = [line.split(",") for line in lines[1:]]
        assert len(body) == 6
        assert body[0][0] == ""      # no sub-diagonal entry in the first row
        assert body[-1][2] == ""     # no super-diagonal entry in the last row

    def test_csv_floats_roundtrip_17_digits(self, tmp_path):
        path = tmp_path / "m.csv"
        run_cli("dump-sample", "--ensemble", "beta_hermite", "--beta", "2",
                "--n", "6", "--seed", "9", "--output", str(path))
        matrix = sample_matrix(EnsembleSpec.beta_hermite(2.0), 6, 9)
        parsed = matrix_from_csv(str(path))
        assert np.array_equal(parsed.diag, matrix.diag)
        assert np.array_equal(parsed.sub, matrix.sub)

    def test_output_embeds_config_and_version(self, tmp_path):
        path = tmp_path / "clt.json"
        assert run_cli("clt", "--ensemble", "anderson", "--d-law", "gaussian(0,1)",
                       "--k-list", "1", "--n", "128", "--trials", "512",
                       "--seed", "5", "--replicas", "5000",
                       "--output", str(path)) == 0
        payload = json.loads(path.read_text())
        assert payload["artifact"]["version"] == __version__
        assert payload["config"]["ensemble.model"] == "anderson"
        assert payload["config"]["trials"] == 512
        assert "workers" not in payload["config"]
        assert "report" in payload["results"]

    def test_simulate_csv_rows(self, tmp_path):
        path = tmp_path / "sim.csv"
        assert run_cli("simulate", "--ensemble", "anderson", "--k-list", "1,2",
                       "--n", "64", "--trials", "8", "--seed", "3", "--alpha", "0",
                       "--epsilon", "0", "--output", str(path)) == 0
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "trial,k1,k2"
        assert len(lines) == 9

    def test_cramer_csv(self, tmp_path):
        path = tmp_path / "rate.csv"
        assert run_cli("cramer", "--law", "rademacher", "--x-min", "-0.5",
                       "--x-max", "0.5", "--points", "11", "--output", str(path)) == 0
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "x,rate"
        mid = lines[1 + 5].split(",")
        assert float(mid[0]) == 0.0
        assert abs(float(mid[1])) < 1e-9


class TestStatisticalExitCodes:
    def test_clt_degenerate_target_is_an_error(self, capsys):
        # Rademacher disorder makes the squared-power trace surely constant
        assert run_cli("clt", "--ensemble", "anderson", "--d-law", "rademacher",
                       "--k-list", "2", "--n", "64", "--trials", "256",
                       "--replicas", "2000", "--seed", "1") == 1
        assert "variance" in capsys.readouterr().err

    def test_clt_ks_threshold_exceeded_exits_2(self, tmp_path, capsys):
        # a deliberately wrong scaling shrinks the samples far below the
        # window-estimated target variance, so the KS check must trip
        path = tmp_path / "bad.json"
        code = run_cli("clt", "--ensemble", "anderson", "--d-law", "gaussian(0,1)",
                       "--k-list", "1", "--n", "256", "--trials", "512",
                       "--alpha", "0.5", "--epsilon", "0", "--replicas", "5000",
                       "--seed", "2", "--output", str(path))
        assert code == 2
        assert "KS distance" in capsys.readouterr().err

    def test_mdp_csv_and_exit(self, tmp_path):
        path = tmp_path / "mdp.csv"
        code = run_cli("mdp", "--ensemble", "anderson", "--k", "1", "--nu", "0.5",
                       "--n-list", "100", "--delta-list", "0.0", "--trials", "512",
                       "--seed", "3", "--output", str(path))
        assert code == 0
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0].startswith("n,nu,delta,tail_prob")

    def test_cov_small_run(self, tmp_path, capsys):
        path = tmp_path / "cov.json"
        code = run_cli("cov", "--ensemble", "beta_hermite", "--beta", "2",
                       "--k-list", "1,2", "--n", "512", "--trials", "2048",
                       "--seed", "11", "--output", str(path))
        assert code in (0, 2)
        payload = json.loads(path.read_text())
        assert payload["results"]["target"]["source"] == "beta_hermite_formula"


class TestDeterminism:
    def test_worker_count_never_changes_bytes(self, tmp_path):
        path = tmp_path / "out.json"
        base = ["clt", "--ensemble", "anderson", "--d-law", "gaussian(0,1)",
                "--k-list", "1,3", "--n", "128", "--trials", "1100",
                "--seed", "11", "--replicas", "5000", "--output", str(path)]
        assert run_cli(*base, "--workers", "1") == 0
        first = path.read_bytes()
        assert run_cli(*base, "--workers", "2") == 0
        assert path.read_bytes() == first
