"""End-to-end tests for the `threepoint` command line."""

import json

import pytest

from src.threepoint import cli
from src.threepoint.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from src.threepoint.errors import TheoremViolation
from src.threepoint.io import read_config


@pytest.fixture
def write_shape(tmp_path):
    """Run `gen` and return the written path."""

    def run(shape: str, dim: int, *extra: str) -> str:
        out = str(tmp_path / f"{shape}{dim}.json")
        assert main(["gen", "--shape", shape, "--dim", str(dim), "--out", out, *extra]) == EXIT_OK
        return out

    return run


class TestGen:
    def test_writes_config_and_manifest(self, write_shape, tmp_path):
        out = write_shape("onb", 4)
        assert read_config(out).n_points == 4
        manifest = json.loads((tmp_path / "onb4.json.manifest.json").read_text())
        assert manifest["output_paths"] == [out]
        assert manifest["tool_version"] == "0.1.0"
        assert manifest["subcommand"] == "gen"
        assert manifest["command"].startswith("threepoint gen --shape onb")

    def test_two_bases(self, tmp_path):
        out = str(tmp_path / "tb.json")
        argv = ["gen", "--shape", "two-bases", "--theta", "0.3", "--lambda", "0.2"]
        assert main([*argv, "--out", out]) == 0
        assert read_config(out).weights.tolist() == [0.1, 0.1, 0.4, 0.4]

    def test_random_needs_point_count(self, tmp_path, capsys):
        code = main(["gen", "--shape", "random", "--dim", "3", "--out", str(tmp_path / "r.json")])
        assert code == EXIT_USAGE
        assert "--n-points" in capsys.readouterr().err

    def test_random_records_seed(self, write_shape, tmp_path):
        write_shape("random", 3, "--n-points", "5", "--seed", "42")
        manifest = json.loads((tmp_path / "random3.json.manifest.json").read_text())
        assert manifest["seeds"] == [42]

    def test_threads_from_environment(self, write_shape, tmp_path, monkeypatch):
        monkeypatch.setenv("THREEPOINT_THREADS", "3")
        write_shape("cross", 2)
        manifest = json.loads((tmp_path / "cross2.json.manifest.json").read_text())
        assert manifest["threads"] == 3


class TestEnergy:
    def test_triple_product_of_basis(self, write_shape, capsys):
        """Tr((I/4)^3) = 4/64."""
        cfg = write_shape("onb", 4)
        capsys.readouterr()
        assert main(["energy", "--config", cfg, "--kernel", '{"kind": "uvt"}']) == EXIT_OK
        assert float(capsys.readouterr().out.splitlines()[0]) == 0.0625

    def test_breakdown_and_export(self, write_shape, tmp_path, capsys):
        cfg = write_shape("simplex", 3)
        out = str(tmp_path / "energy.json")
        kernel = '{"kind": "pframe", "p": 1}'
        code = main(["energy", "--config", cfg, "--kernel", kernel, "--breakdown", "--out", out])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        labels = [line.split(":")[0].strip() for line in lines[-3:]]
        assert labels == ["all_equal", "two_equal", "distinct"]
        assert json.loads(open(out).read())["n_points"] == 4

    def test_missing_config(self, tmp_path, capsys):
        missing = str(tmp_path / "none.json")
        code = main(["energy", "--config", missing, "--kernel", '{"kind": "uvt"}'])
        assert code == EXIT_USAGE
        assert capsys.readouterr().err.startswith("error:")


class TestCertify:
    def test_crosspolytope_passes(self, write_shape, capsys):
        cfg = write_shape("cross", 3)
        checks = "packing,nearly-orthogonal,tight-frame"
        code = main(["certify", "--config", cfg, "--checks", checks])
        assert code == EXIT_OK
        assert "| packing | pass |" in capsys.readouterr().out

    def test_failing_check(self, write_shape):
        cfg = write_shape("onb", 3)
        assert main(["certify", "--config", cfg, "--checks", "isotropic,balanced"]) == EXIT_FAILED

    def test_unknown_check(self, write_shape):
        cfg = write_shape("onb", 3)
        assert main(["certify", "--config", cfg, "--checks", "bogus"]) == EXIT_USAGE

    def test_exports(self, write_shape, tmp_path):
        cfg = write_shape("simplex", 3)
        js, csv = str(tmp_path / "c.json"), str(tmp_path / "c.csv")
        code = main(
            ["certify", "--config", cfg, "--checks", "simplex-rigidity", "--json", js, "--csv", csv]
        )
        assert code == EXIT_OK
        assert json.loads(open(js).read())[0]["name"] == "simplex-rigidity"
        assert open(csv).readline().strip() == "name,passed,max_residual,tolerance,note"

    def test_all_checks(self, write_shape, tmp_path, capsys):
        cfg = write_shape("simplex", 3)
        js = str(tmp_path / "all.json")
        capsys.readouterr()
        code = main(["certify", "--config", cfg, "--checks", "all", "--json", js])
        assert code == EXIT_FAILED  # the simplex is not an orthonormal basis
        names = [r["name"] for r in json.loads(open(js).read())]
        assert names == list(cli.CHECKS)
        out = capsys.readouterr().out
        assert "| psd | pass |" in out
        assert "| packing-strict | pass |" in out

    @pytest.mark.parametrize("eps, expected", [("1e-3", EXIT_OK), ("0.1", EXIT_FAILED)])
    def test_strict_packing_margin(self, write_shape, eps, expected):
        """Simplex triple products are -1/27."""
        cfg = write_shape("simplex", 3)
        argv = ["certify", "--config", cfg, "--checks", "packing-strict", "--eps", eps]
        assert main(argv) == expected

    def test_strict_packing_needs_positive_margin(self, write_shape):
        cfg = write_shape("simplex", 3)
        argv = ["certify", "--config", cfg, "--checks", "packing-strict", "--eps", "0"]
        assert main(argv) == EXIT_USAGE

    def test_lifted_simplex_is_isotropic(self, write_shape, tmp_path):
        cfg = write_shape("simplex", 3)
        lifted = str(tmp_path / "lifted.json")
        assert main(["lift", "--config", cfg, "--out", lifted]) == EXIT_OK
        assert read_config(lifted).dim == 4
        checks = "isotropic,orthonormal-basis"
        assert main(["certify", "--config", lifted, "--checks", checks]) == EXIT_OK

    def test_theorem_violation_exit(self, write_shape, monkeypatch, capsys):
        def explode(*args, **kwargs):
            raise TheoremViolation("7 points pass a bound of 6")

        monkeypatch.setattr(cli, "run_checks", explode)
        cfg = write_shape("onb", 3)
        assert main(["certify", "--config", cfg]) == EXIT_FAILED
        assert "THEOREM VIOLATION" in capsys.readouterr().err


class TestOtherCommands:
    def test_identity_check(self):
        assert main(["identity-check", "--dim", "5", "--samples", "1000", "--seed", "7"]) == EXIT_OK

    def test_psd_check(self, write_shape):
        assert main(["psd-check", "--config", write_shape("cross", 3)]) == EXIT_OK

    def test_classify(self, write_shape, capsys):
        cfg = write_shape("onb", 3)
        capsys.readouterr()
        assert main(["classify", "--config", cfg]) == EXIT_OK
        last = capsys.readouterr().out.splitlines()[-1]
        assert last.startswith("structure:")
        assert "orthonormal-basis" in last
        assert "two-bases" not in last

    @pytest.mark.parametrize("eps, strict", [("1e-3", True), ("0.1", False)])
    def test_classify_strict_margin_is_separate(self, write_shape, capsys, eps, strict):
        cfg = write_shape("simplex", 3)
        capsys.readouterr()
        argv = ["classify", "--config", cfg, "--tol", "1e-4", "--eps", eps]
        assert main(argv) == EXIT_OK
        last = capsys.readouterr().out.splitlines()[-1]
        assert ("packing-strict" in last) is strict
        assert "packing" in last

    def test_pack_search_strict(self, tmp_path, capsys):
        out = str(tmp_path / "pack.json")
        argv = ["pack-search", "--dim", "3", "--n-points", "4", "--restarts", "2"]
        code = main([*argv, "--max-iters", "50", "--strict", "--eps", "0.5", "--out", out])
        assert code == EXIT_OK
        result = json.loads(open(out).read())
        assert result["strict"] is True
        assert result["epsilon"] == 0.5
        assert result["bound"] == 3  # min(d + 1, floor(1 + 1/eps))
        assert result["passed"] is False
        assert "misses the hypothesis" in capsys.readouterr().out

    def test_optimize_outputs(self, tmp_path):
        out, trace = str(tmp_path / "opt.json"), str(tmp_path / "trace.csv")
        code = main(
            [
                "optimize", "--dim", "2", "--n-points", "2", "--kernel", '{"kind": "uvt"}',
                "--restarts", "2", "--max-iters", "200", "--out", out, "--trace-csv", trace,
            ]
        )
        assert code == EXIT_OK
        assert json.loads(open(out).read())["best_energy"] >= 0.25 - 1e-12
        assert open(trace).readline().strip() == "iter,epsilon,energy"
        assert (tmp_path / "opt.json.manifest.json").exists()

    def test_pack_search(self, capsys):
        code = main(
            ["pack-search", "--dim", "2", "--n-points", "4", "--restarts", "2", "--max-iters", "50"]
        )
        assert code == EXIT_OK
        assert "bound N <= 4" in capsys.readouterr().out

    def test_mc(self, capsys):
        kernel = '{"kind": "uvt"}'
        code = main(["mc", "--dim", "3", "--kernel", kernel, "--samples", "20000", "--seed", "1"])
        assert code == EXIT_OK
        mean = float(capsys.readouterr().out.split()[0])
        assert abs(mean - 1 / 9) < 0.05

    @pytest.mark.parametrize(
        "argv",
        [[], ["bogus"], ["gen"], ["gen", "--shape", "hexagon", "--out", "x"], ["mc", "--dim", "3"]],
        ids=["empty", "unknown-command", "missing-flags", "bad-choice", "missing-kernel"],
    )
    def test_usage_errors(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_invalid_thread_count(self):
        assert main(["identity-check", "--dim", "3", "--threads", "0"]) == EXIT_USAGE
