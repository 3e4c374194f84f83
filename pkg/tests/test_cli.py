import filecmp
import json

import pytest

from snowrank.cli import main

GEN_FLAGS = [
    "--rng-seed", "4", "--websites", "10", "--fake-fraction", "0.5",
    "--urls-per-website", "5", "--zipf", "1.1", "--users", "60",
    "--homophily", "0.85", "--fake-user-fraction", "0.5", "--posts-per-user", "8",
]


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert run(["gen-synth", *GEN_FLAGS, "--out-dir", out]) == 0
    return out


class TestGenSynth:
    def test_fixed_seed_twice_identical(self, tmp_path, synth_dir):
        again = tmp_path / "again"
        assert run(["gen-synth", *GEN_FLAGS, "--out-dir", again]) == 0
        assert (again / "posts.jsonl").read_bytes() == (synth_dir / "posts.jsonl").read_bytes()
        assert (again / "labels.csv").read_bytes() == (synth_dir / "labels.csv").read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "eco.cfg"
        config.write_text("n_websites = 10\nfake_fraction = 0.5 # half\nn_users = 60\n")
        out = tmp_path / "out"
        assert run([
            "gen-synth", "--rng-seed", "4", "--config", config,
            "--urls-per-website", "5", "--zipf", "1.1", "--homophily", "0.85",
            "--fake-user-fraction", "0.5", "--posts-per-user", "8", "--out-dir", out,
        ]) == 0
        assert (out / "posts.jsonl").exists()

    def test_invalid_config_field(self, tmp_path, capsys):
        assert run(["gen-synth", "--rng-seed", "1", "--homophily", "0.2",
                    "--out-dir", tmp_path / "x"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path, capsys):
        config = tmp_path / "eco.cfg"
        config.write_text("wormholes=3\n")
        assert run(["gen-synth", "--rng-seed", "1", "--config", config,
                    "--out-dir", tmp_path / "x"]) == 2


class TestRunAuto:
    def test_golden_record_via_cli(self, golden_dir, tmp_path, golden_auto_record_text):
        out = tmp_path / "record.json"
        code = run([
            "run-auto",
            "--posts", golden_dir / "toy_posts.jsonl",
            "--labels", golden_dir / "toy_labels.csv",
            "--initial-seed", "https://s0.example/seed",
            "--criterion", "hindex", "--cycles", "5", "--out", out,
        ])
        assert code == 0
        assert out.read_text(encoding="utf-8") == golden_auto_record_text

    def test_bad_seed_one_line_diagnostic(self, golden_dir, tmp_path, capsys):
        code = run([
            "run-auto",
            "--posts", golden_dir / "toy_posts.jsonl",
            "--labels", golden_dir / "toy_labels.csv",
            "--initial-seed", "https://nosuch.example/x",
            "--out", tmp_path / "r.json",
        ])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert len(err.strip().splitlines()) == 1

    def test_random_without_seed_rejected(self, golden_dir, tmp_path, capsys):
        code = run([
            "run-auto",
            "--posts", golden_dir / "toy_posts.jsonl",
            "--labels", golden_dir / "toy_labels.csv",
            "--initial-seed", "https://s0.example/seed",
            "--criterion", "random", "--out", tmp_path / "r.json",
        ])
        assert code == 2
        assert "rng-seed" in capsys.readouterr().err


class TestRunBatchAndEval:
    def batch(self, synth_dir, out, extra=()):
        return run([
            "run-batch",
            "--posts", synth_dir / "posts.jsonl",
            "--labels", synth_dir / "labels.csv",
            "--seed-set", "fake100", "--criteria", "hindex,random",
            "--executions", "5", "--cycles", "6", "--rng-seed", "77",
            "--out-dir", out, *extra,
        ])

    def test_missing_rng_seed_is_an_error(self, synth_dir, tmp_path, capsys):
        code = run([
            "run-batch",
            "--posts", synth_dir / "posts.jsonl",
            "--labels", synth_dir / "labels.csv",
            "--seed-set", "fake100", "--out-dir", tmp_path / "b",
        ])
        assert code == 2
        assert "rng-seed" in capsys.readouterr().err

    def test_eval_recompute_identical(self, synth_dir, tmp_path):
        out = tmp_path / "batch"
        assert self.batch(synth_dir, out) == 0
        original = (out / "metrics.csv").read_bytes()
        recomputed = tmp_path / "metrics2.csv"
        assert run(["eval", "--records-dir", out, "--out", recomputed]) == 0
        assert recomputed.read_bytes() == original

    def test_parallel_levels_byte_identical(self, synth_dir, tmp_path):
        seq = tmp_path / "seq"
        par = tmp_path / "par"
        assert self.batch(synth_dir, seq) == 0
        assert self.batch(synth_dir, par, extra=["--parallel", "4"]) == 0
        assert (seq / "metrics.csv").read_bytes() == (par / "metrics.csv").read_bytes()
        seq_records = sorted(p.relative_to(seq) for p in seq.rglob("exec_*.json"))
        par_records = sorted(p.relative_to(par) for p in par.rglob("exec_*.json"))
        assert seq_records == par_records
        for rel in seq_records:
            assert (seq / rel).read_bytes() == (par / rel).read_bytes(), rel

    def test_rerun_byte_identical(self, synth_dir, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        assert self.batch(synth_dir, first) == 0
        assert self.batch(synth_dir, second) == 0
        comparison = filecmp.dircmp(first, second)
        assert not comparison.diff_files


class TestPlotData:
    def test_emits_figure_csvs(self, synth_dir, tmp_path):
        batch = tmp_path / "batch"
        assert run([
            "run-batch",
            "--posts", synth_dir / "posts.jsonl",
            "--labels", synth_dir / "labels.csv",
            "--seed-set", "fake100", "--criteria", "hindex",
            "--executions", "3", "--cycles", "4", "--rng-seed", "5",
            "--out-dir", batch,
        ]) == 0

        ranks = tmp_path / "ranks.csv"
        manifest = json.loads((batch / "batch.json").read_text())
        sites = sorted({
            seed["website"]
            for record_path in (batch / "records" / "hindex").glob("*.json")
            for seed in json.loads(record_path.read_text())["discovered_websites"]
        })
        ranks.write_text("".join(f"{site},{i + 1}\n" for i, site in enumerate(sites)))

        out = tmp_path / "figs"
        assert run([
            "plot-data", "--records-dir", batch, "--out-dir", out,
            "--ranks", ranks, "--total-indexed", "100",
            "--labels", synth_dir / "labels.csv",
        ]) == 0
        for name in ("fig_incidence.csv", "fig_density.csv", "fig_recall.csv", "fig_popularity_cdf.csv"):
            assert (out / name).exists(), name
        lines = (out / "fig_incidence.csv").read_text().splitlines()
        assert lines[0] == "cycle,criterion,value"
        assert len(lines) == 1 + manifest["max_cycles"]
