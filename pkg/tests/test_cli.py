"""Command-line surface: exit codes, JSON schema, trace format, determinism."""

import io
import json

import numpy as np
import pytest

from conftest import (
    asym_tensor,
    bench_tensor,
    bridged_tensor,
    diag_tensor,
    ones_tensor,
    signed_matrix,
    signed_matrix_pair,
)
from tensornorm import write_tensor
from tensornorm.cli import main


def save(tmp_path, name, tensor):
    path = tmp_path / name
    buf = io.StringIO()
    write_tensor(tensor, buf)
    path.write_text(buf.getvalue())
    return str(path)


@pytest.fixture
def bench_path(tmp_path):
    return save(tmp_path, "bench.tns", bench_tensor())


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_solvable_instance(self, capsys, bench_path):
        code, out, _ = run(capsys, ["check", bench_path, "--p", "3,3,3"])
        assert code == 0
        payload = json.loads(out)
        assert payload["weakly_irreducible"] is True
        assert payload["irreducible"] is False
        assert payload["admissible_indices"] == [1, 2, 3]
        assert payload["chosen_index"] == 1

    def test_disconnected_support_exits_three(self, capsys, tmp_path):
        path = save(tmp_path, "diag.tns", diag_tensor())
        code, out, _ = run(capsys, ["check", path, "--p", "3,3,3"])
        assert code == 3
        assert json.loads(out)["weakly_irreducible"] is False

    def test_condition_violation_exits_two(self, capsys, tmp_path):
        path = save(tmp_path, "diag.tns", diag_tensor())
        code, out, _ = run(capsys, ["check", path, "--p", "2,2,2"])
        assert code == 2
        assert json.loads(out)["admissible_indices"] == []

    def test_missing_file_exits_one(self, capsys, tmp_path):
        code, _, err = run(capsys, ["check", str(tmp_path / "nope.tns"), "--p", "3,3"])
        assert code == 1 and "cannot read" in err

    def test_malformed_file_exits_one(self, capsys, tmp_path):
        path = tmp_path / "bad.tns"
        path.write_text("not a tensor\n")
        code, _, err = run(capsys, ["check", str(path), "--p", "3,3"])
        assert code == 1 and "header" in err

    def test_bad_exponent_list_exits_one(self, capsys, bench_path):
        code, _, err = run(capsys, ["check", bench_path, "--p", "3,zebra,3"])
        assert code == 1


class TestNorm:
    def test_json_contract(self, capsys, bench_path):
        code, out, _ = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--method", "hgpm", "--eps", "1e-10", "--json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["status"] == "converged"
        lo, hi = payload["bracket"]
        assert hi - lo < 1e-10
        assert abs(payload["lambda"] - 0.5 * (lo + hi)) < 1e-12
        assert len(payload["parts"]) == 3
        assert [len(part) for part in payload["parts"]] == [2, 3, 4]
        assert max(payload["residuals"]) < 1e-8

    def test_single_exponent_broadcasts(self, capsys, bench_path):
        code, out, _ = run(capsys, ["norm", bench_path, "--p", "3", "--json"])
        assert code == 0

    def test_methods_agree(self, capsys, bench_path):
        values = {}
        for method in ("hgpm", "pm", "oracle"):
            code, out, _ = run(
                capsys,
                ["norm", bench_path, "--p", "3,3,3", "--method", method, "--json", "--seed", "0"],
            )
            assert code == 0
            values[method] = json.loads(out)["lambda"]
        assert values["hgpm"] == pytest.approx(values["pm"], rel=1e-6)
        assert values["hgpm"] == pytest.approx(values["oracle"], rel=1e-6)

    def test_pm_requires_equal_exponents(self, capsys, bench_path):
        code, _, err = run(capsys, ["norm", bench_path, "--p", "3,4,3", "--method", "pm"])
        assert code == 2 and "shared exponent" in err

    def test_condition_violation_exits_two(self, capsys, bench_path):
        code, _, err = run(capsys, ["norm", bench_path, "--p", "2,2,2"])
        assert code == 2

    def test_trace_csv(self, capsys, bench_path, tmp_path):
        trace = tmp_path / "trace.csv"
        code, _, _ = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--trace", str(trace), "--json"],
        )
        assert code == 0
        lines = trace.read_text().strip().splitlines()
        assert lines[0] == "k,lambda_minus,lambda_plus,err_vs_final"
        rows = [line.split(",") for line in lines[1:]]
        ks = [int(r[0]) for r in rows]
        assert ks == list(range(1, len(rows) + 1))
        lows = [float(r[1]) for r in rows]
        highs = [float(r[2]) for r in rows]
        errs = [float(r[3]) for r in rows]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(lows, lows[1:]))
        assert all(b <= a * (1 + 1e-12) for a, b in zip(highs, highs[1:]))
        assert errs[-1] == 0.0

    def test_trace_rejected_for_oracle(self, capsys, bench_path, tmp_path):
        code, _, err = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--method", "oracle", "--trace", str(tmp_path / "t.csv")],
        )
        assert code == 1

    def test_index_override(self, capsys, bench_path):
        code, out, _ = run(
            capsys, ["norm", bench_path, "--p", "3,3,3", "--index", "2", "--json"]
        )
        assert code == 0

    def test_byte_identical_output(self, capsys, bench_path):
        _, first, _ = run(capsys, ["norm", bench_path, "--p", "3,3,3", "--json", "--seed", "5"])
        _, second, _ = run(capsys, ["norm", bench_path, "--p", "3,3,3", "--json", "--seed", "5"])
        assert first == second
        _, third, _ = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--method", "oracle", "--json", "--seed", "5"],
        )
        _, fourth, _ = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--method", "oracle", "--json", "--seed", "5"],
        )
        assert third == fourth

    def test_seed_env_fallback(self, capsys, bench_path, monkeypatch):
        monkeypatch.setenv("TENSORNORM_SEED", "9")
        _, with_env, _ = run(
            capsys, ["norm", bench_path, "--p", "3,3,3", "--method", "oracle", "--json"]
        )
        monkeypatch.delenv("TENSORNORM_SEED")
        _, with_flag, _ = run(
            capsys,
            ["norm", bench_path, "--p", "3,3,3", "--method", "oracle", "--json", "--seed", "9"],
        )
        assert with_env == with_flag

    def test_negative_tensor_rejected(self, capsys, tmp_path):
        path = save(tmp_path, "signed.tns", signed_matrix())
        code, _, err = run(capsys, ["norm", path, "--p", "2,2"])
        assert code == 1 and "nonnegative" in err

    def test_breakdown_exits_four(self, capsys, tmp_path):
        from tensornorm import SparseTensor

        f = SparseTensor(
            (2, 2),
            [((1, 1), 1.0), ((1, 2), 1e-300), ((2, 1), 1e-300), ((2, 2), 1e-300)],
        )
        path = save(tmp_path, "spread.tns", f)
        code, out, _ = run(capsys, ["norm", path, "--p", "2,2", "--json"])
        assert code == 4
        assert json.loads(out)["status"] == "numerical_breakdown"


class TestEigen:
    def test_symmetric_cube(self, capsys, tmp_path):
        path = save(tmp_path, "ones.tns", ones_tensor((2, 2, 2)))
        code, out, _ = run(
            capsys, ["eigen", path, "--blocks", "3", "--p", "3", "--json"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lambda"] == pytest.approx(4.0, rel=1e-9)
        assert payload["blocks"] == [3]
        assert len(payload["parts"]) == 1
        assert max(payload["residuals"]) < 1e-7

    def test_counterexample_exits_five(self, capsys, tmp_path):
        path = save(tmp_path, "asym.tns", asym_tensor())
        code, _, err = run(capsys, ["eigen", path, "--blocks", "1,2", "--p", "3,3"])
        assert code == 5

    def test_singleton_blocks_match_norm(self, capsys, tmp_path):
        path = save(tmp_path, "bench.tns", bench_tensor())
        _, eig_out, _ = run(
            capsys,
            ["eigen", path, "--blocks", "1,1,1", "--p", "3,3,3", "--json"],
        )
        _, norm_out, _ = run(capsys, ["norm", path, "--p", "3,3,3", "--json"])
        assert json.loads(eig_out)["lambda"] == pytest.approx(
            json.loads(norm_out)["lambda"], rel=1e-9
        )

    def test_blocks_must_sum_to_order(self, capsys, tmp_path):
        path = save(tmp_path, "ones.tns", ones_tensor((2, 2, 2)))
        code, _, err = run(capsys, ["eigen", path, "--blocks", "2", "--p", "3"])
        assert code == 1

    def test_block_dims_must_be_constant(self, capsys, bench_path):
        code, _, err = run(capsys, ["eigen", bench_path, "--blocks", "3", "--p", "3"])
        assert code == 1 and "not constant" in err

    def test_note_for_singleton_block(self, capsys, tmp_path):
        path = save(tmp_path, "ones.tns", ones_tensor((2, 2, 2)))
        code, out, _ = run(
            capsys, ["eigen", path, "--blocks", "1,2", "--p", "5,3", "--json"]
        )
        assert code == 0
        assert "singleton first block" in json.loads(out)["note"]


class TestVerify:
    def _vector_file(self, tmp_path, lam, parts, omitted=None):
        payload = {"lambda": lam, "parts": [np.asarray(p).tolist() for p in parts]}
        if omitted is not None:
            payload["omitted_mode"] = omitted
        path = tmp_path / "vec.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_signed_matrix_pair_passes(self, capsys, tmp_path):
        tensor_path = save(tmp_path, "signed.tns", signed_matrix())
        lam, x = signed_matrix_pair(3.0, 1.5)
        vec = self._vector_file(tmp_path, lam, x.parts)
        code, out, _ = run(capsys, ["verify", tensor_path, vec, "--p", "3,1.5"])
        assert code == 0
        assert "PASS" in out
        assert out.count("residual =") == 2

    def test_boundary_pair_passes(self, capsys, tmp_path):
        tensor_path = save(tmp_path, "bridged.tns", bridged_tensor())
        vec = self._vector_file(tmp_path, 1.0, [[0.0, 1.0]] * 3)
        code, out, _ = run(capsys, ["verify", tensor_path, vec, "--p", "3,2.5,4"])
        assert code == 0 and "PASS" in out

    def test_perturbed_pair_fails(self, capsys, tmp_path):
        tensor_path = save(tmp_path, "signed.tns", signed_matrix())
        lam, x = signed_matrix_pair(2.0, 2.0)
        noisy = [np.asarray(part) + 0.01 for part in x.parts]
        vec = self._vector_file(tmp_path, lam, noisy)
        code, out, _ = run(capsys, ["verify", tensor_path, vec, "--p", "2,2"])
        assert code == 4 and "FAIL" in out

    def test_reduced_vector_is_lifted_first(self, capsys, tmp_path):
        from tensornorm import PVector, SolverConfig, solve_hgpm

        f = bench_tensor()
        tensor_path = save(tmp_path, "bench.tns", f)
        result = solve_hgpm(f, PVector((3.0,) * 3), SolverConfig(epsilon=1e-12))
        reduced = result.vector.vector.drop_mode(result.index)
        vec = self._vector_file(
            tmp_path, result.lam, reduced.parts, omitted=result.index
        )
        code, out, _ = run(capsys, ["verify", tensor_path, vec, "--p", "3,3,3"])
        assert code == 0 and "PASS" in out

    def test_bad_json_exits_one(self, capsys, tmp_path):
        tensor_path = save(tmp_path, "signed.tns", signed_matrix())
        bad = tmp_path / "vec.json"
        bad.write_text("{broken")
        code, _, err = run(capsys, ["verify", tensor_path, str(bad), "--p", "2,2"])
        assert code == 1

    def test_missing_lambda_exits_one(self, capsys, tmp_path):
        tensor_path = save(tmp_path, "signed.tns", signed_matrix())
        bad = tmp_path / "vec.json"
        bad.write_text(json.dumps({"parts": [[1.0, 0.0], [1.0, 0.0]]}))
        code, _, err = run(capsys, ["verify", tensor_path, str(bad), "--p", "2,2"])
        assert code == 1


class TestUsage:
    def test_unknown_method_is_usage_error(self, capsys, bench_path):
        code, _, _ = run(capsys, ["norm", bench_path, "--p", "3", "--method", "magic"])
        assert code == 1

    def test_invalid_solver_knobs_are_usage_errors(self, capsys, bench_path):
        code, _, err = run(capsys, ["norm", bench_path, "--p", "3", "--eps", "-1"])
        assert code == 1 and "epsilon" in err
        code, _, err = run(capsys, ["norm", bench_path, "--p", "3", "--max-iter", "0"])
        assert code == 1

    def test_missing_subcommand_is_usage_error(self, capsys):
        code, _, _ = run(capsys, [])
        assert code == 1
