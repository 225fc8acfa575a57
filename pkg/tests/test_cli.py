"""CLI surface: generators, benchmark, selftest, commands and exit codes."""

import csv
import json

import numpy as np
import pytest

import wsprox.cli as cli_mod
from wsprox import (
    gen_adversarial_staircase,
    io,
    isotonic_fit,
    oracle_isotonic_partition,
    run_benchmark,
    run_selftest,
    verify_prox_optimality,
)
from wsprox.cli import main


class TestGenAdversarialStaircase:
    def test_five_point_instance(self):
        np.testing.assert_allclose(gen_adversarial_staircase(5, 0.01),
                                   [1.0, 0.5, 0.0, 0.01, 0.02], atol=1e-15)

    def test_three_point_instance(self):
        np.testing.assert_allclose(gen_adversarial_staircase(3, 0.1),
                                   [1.0, 0.0, 0.1], atol=1e-15)

    def test_fit_is_single_block_at_mean(self):
        for d in (5, 8, 13):
            y = gen_adversarial_staircase(d, 0.5 / d)
            ref = oracle_isotonic_partition(y)
            assert np.unique(ref).shape[0] == 1
            np.testing.assert_allclose(isotonic_fit(y), ref, atol=1e-12)

    def test_rejects_small_d(self):
        with pytest.raises(ValueError):
            gen_adversarial_staircase(2, 0.1)

    @pytest.mark.parametrize("eps", [0.0, -0.1, 0.21, 1.0])
    def test_rejects_eps_outside_open_interval(self, eps):
        with pytest.raises(ValueError):
            gen_adversarial_staircase(5, eps)


class TestRunBenchmark:
    def test_staircase_forces_linear_round_count(self):
        rows = run_benchmark(sizes=[4096], distributions=["adversarial"],
                             algos=["imminent"], thread_counts=[1],
                             repeats=1, seed=0)
        assert rows[0]["rounds"] >= 2047

    def test_search_depth_is_log2_on_power_of_two(self):
        rows = run_benchmark(sizes=[1024], distributions=["uniform"],
                             algos=["search"], thread_counts=[1],
                             repeats=1, seed=0)
        assert rows[0]["recursion_depth"] == 10

    def test_presorted_keeps_every_cluster(self):
        rows = run_benchmark(sizes=[256], distributions=["presorted"],
                             algos=["end"], thread_counts=[1],
                             repeats=1, seed=0)
        assert rows[0]["clusters"] == 256

    def test_repeat_determinism_excluding_timings(self):
        kwargs = dict(sizes=[128], distributions=["gaussian", "clustered"],
                      algos=["pava", "search"], thread_counts=[1],
                      repeats=2, seed=7)
        a = run_benchmark(**kwargs)
        b = run_benchmark(**kwargs)
        for ra, rb in zip(a, b):
            ra = {k: v for k, v in ra.items() if k != "wall_time"}
            rb = {k: v for k, v in rb.items() if k != "wall_time"}
            assert ra == rb

    def test_rejects_unknown_algo(self):
        with pytest.raises(ValueError):
            run_benchmark(sizes=[8], distributions=["uniform"], algos=["qsort"],
                          thread_counts=[1], repeats=1, seed=0)


class TestRunSelftest:
    def test_fresh_build_passes(self):
        report = run_selftest(n_random=50)
        assert report.ok, "\n".join(report.lines)

    def test_counterexample_listed(self):
        report = run_selftest(n_random=1)
        assert any("0.95" in line and "counterexample" in line for line in report.lines)

    def test_corrupted_solver_names_certificate_condition(self, monkeypatch):
        real_fit = cli_mod.isotonic_fit

        def corrupted(y, *args, **kwargs):
            fit = real_fit(y, *args, **kwargs)
            if fit.shape[0] >= 2:  # average the last two blocks together
                fit = fit.copy()
                tail = fit[-2:].mean()
                fit[-2:] = tail
            return fit

        monkeypatch.setattr(cli_mod, "isotonic_fit", corrupted)
        report = run_selftest(n_random=5)
        assert not report.ok
        joined = "\n".join(report.lines)
        assert "within-block-collision" in joined or "block-mean" in joined


class TestCliCommands:
    def run(self, *argv):
        return main(list(argv))

    def test_prox_round_trip_and_optimality(self, tmp_path):
        rng = np.random.default_rng(0)
        w = rng.standard_normal(20)
        inp = tmp_path / "w.txt"
        outp = tmp_path / "out.json"
        io.write_text_vector(inp, w)
        code = self.run("prox", "--alpha", "0.5", "--input", str(inp),
                        "--output", str(outp))
        assert code == 0
        payload = json.loads(outp.read_text())
        values = np.array(payload["values"])
        assert verify_prox_optimality(w, values, alpha=0.5).ok
        assert payload["clusters"][0]["start"] == 0
        assert "stats" in payload

    def test_prox_output_byte_identical_across_runs(self, tmp_path):
        rng = np.random.default_rng(1)
        inp = tmp_path / "w.bin"
        io.write_binary_vectors(inp, [rng.standard_normal(64)])
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert self.run("prox", "--alpha", "0.2", "--beta", "0.1",
                            "--algo", "search", "--input", str(inp),
                            "--output", str(out)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_isotonic_command(self, tmp_path):
        inp = tmp_path / "y.txt"
        outp = tmp_path / "fit.json"
        io.write_text_vector(inp, [0.7, 1.0, 0.9, 0.99])
        assert self.run("isotonic", "--input", str(inp), "--output", str(outp)) == 0
        values = json.loads(outp.read_text())["values"]
        np.testing.assert_allclose(values, [0.7, 0.95, 0.95, 0.99], atol=1e-12)

    def test_isotonic_with_weights(self, tmp_path):
        inp = tmp_path / "y.txt"
        wts = tmp_path / "m.txt"
        outp = tmp_path / "fit.json"
        io.write_text_vector(inp, [2.0, 0.0])
        io.write_text_vector(wts, [1.0, 3.0])
        assert self.run("isotonic", "--input", str(inp), "--weights", str(wts),
                        "--output", str(outp)) == 0
        np.testing.assert_allclose(json.loads(outp.read_text())["values"],
                                   [0.5, 0.5], atol=1e-15)

    def test_eval_and_metrics_commands(self, tmp_path):
        inp = tmp_path / "w.txt"
        io.write_text_vector(inp, [0.0, 1.0, 2.0])
        out = tmp_path / "r.json"
        assert self.run("eval", "--input", str(inp), "--output", str(out)) == 0
        assert json.loads(out.read_text())["R"] == pytest.approx(2.0)
        io.write_text_vector(inp, [1.0, 1.0, 2.0, 0.0])
        assert self.run("metrics", "--input", str(inp), "--output", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["weight_sharing"] == pytest.approx(1.0 / 3.0)

    def test_batch_binary_records(self, tmp_path):
        inp = tmp_path / "w.bin"
        outp = tmp_path / "out.json"
        io.write_binary_vectors(inp, [np.array([0.0, 1.0]), np.array([5.0, 5.0, 5.0])])
        assert self.run("eval", "--batch", "--input", str(inp),
                        "--output", str(outp)) == 0
        payload = json.loads(outp.read_text())
        assert [rec["R"] for rec in payload] == [1.0, 0.0]

    def test_multi_record_without_batch_is_invalid_input(self, tmp_path):
        inp = tmp_path / "w.bin"
        io.write_binary_vectors(inp, [np.arange(2.0), np.arange(2.0)])
        assert self.run("eval", "--input", str(inp)) == 2

    def test_gen_then_solve_pipeline(self, tmp_path):
        vec_txt = tmp_path / "adv.txt"
        vec_bin = tmp_path / "adv.bin"
        assert self.run("gen", "adversarial", "--d", "9", "--eps", "0.05",
                        "--output", str(vec_txt)) == 0
        assert self.run("gen", "adversarial", "--d", "9", "--eps", "0.05",
                        "--output", str(vec_bin), "--format", "bin") == 0
        np.testing.assert_array_equal(io.read_vector(vec_txt), io.read_vector(vec_bin))
        outp = tmp_path / "fit.json"
        assert self.run("isotonic", "--input", str(vec_bin),
                        "--output", str(outp)) == 0
        values = json.loads(outp.read_text())["values"]
        assert len(set(values)) == 1  # staircase pools into a single block

    def test_bench_csv_columns(self, tmp_path):
        outp = tmp_path / "bench.csv"
        assert self.run("bench", "--sizes", "64", "--algos", "pava,search",
                        "--output", str(outp)) == 0
        with outp.open() as fh:
            rows = list(csv.DictReader(fh))
        assert tuple(rows[0].keys()) == cli_mod.BENCH_COLUMNS
        assert {row["algo"] for row in rows} == {"pava", "search"}

    def test_demo_clustered_lasso_json(self, tmp_path):
        outp = tmp_path / "demo.json"
        assert self.run("demo", "clustered-lasso", "--d", "12", "--k", "2",
                        "--n", "40", "--steps", "200", "--alpha-sweep", "0.3",
                        "--output", str(outp)) == 0
        payload = json.loads(outp.read_text())
        assert payload["proximal_sweep"][0]["alpha"] == 0.3
        assert "weight_sharing" in payload["subgradient_baseline"]

    def test_env_var_sets_default_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WSPROX_THREADS", "2")
        inp = tmp_path / "w.txt"
        io.write_text_vector(inp, [3.0, 1.0, 2.0])
        outp = tmp_path / "o.json"
        assert self.run("prox", "--algo", "search", "--alpha", "0.1",
                        "--input", str(inp), "--output", str(outp)) == 0

    def test_usage_error_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            self.run("prox", "--no-such-flag")
        assert exc.value.code == 1

    def test_unknown_command_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            self.run("frobnicate")
        assert exc.value.code == 1

    def test_missing_file_exits_2(self, tmp_path):
        assert self.run("prox", "--input", str(tmp_path / "nope.txt")) == 2

    def test_invalid_values_exit_2(self, tmp_path):
        inp = tmp_path / "w.txt"
        inp.write_text("not-a-number\n")
        assert self.run("prox", "--input", str(inp)) == 2

    def test_selftest_exits_0(self, capsys):
        assert self.run("selftest") == 0
        out = capsys.readouterr().out
        assert "OK: 0 failure(s)" in out
