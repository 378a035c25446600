"""Tests for the command-line interface"""

import json

import pytest

from orlicz import cli
from orlicz.config import RunConfig
from orlicz.utils import read_csv_rows
from orlicz.validator import NumericalError

cycle_config = {
    "instances": [{"kind": "cycle", "size": 4}, {"kind": "torus", "d": 2, "size": 3, "name": "t"}],
    "profile": {"y_grid": [0.0625, 0.25], "t_grid": [1.0]},
    "suite": {"states": 3, "generators": ["random", "differences"]},
    "seed": 5,
}


@pytest.fixture
def run(tmp_path):
    """Writes a configuration and returns a function running a subcommand on it."""

    def _run(command, data, *extra):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(data))
        out = tmp_path / "out"
        return cli.main([command, "--config", str(path), "--out", str(out), *extra]), out

    return _run


class TestBuildInstance:
    """Tests for building instances from their specifications."""

    def test_default_names(self):
        """Tests that unnamed instances are named by kind and position."""
        config = RunConfig.from_dict(cycle_config)
        instances = [cli.build_instance(s, config, i) for i, s in enumerate(config.instances)]
        assert [i.name for i in instances] == ["cycle-0", "t"]

    def test_matrix_file(self, tmp_path):
        """Tests that matrix files are read in both formats."""
        (tmp_path / "dense.csv").write_text("1,-1\n-1,1\n")
        (tmp_path / "sparse.csv").write_text("0,0,1\n0,1,-1\n1,1,1\n")
        config = RunConfig.from_dict(
            {
                "instances": [
                    {"kind": "matrix-file", "path": "dense.csv"},
                    {"kind": "matrix-file", "path": "sparse.csv", "format": "triplets"},
                ]
            },
            base_dir=tmp_path,
        )
        dense, sparse = (cli.build_instance(s, config, i) for i, s in enumerate(config.instances))
        assert (dense.matrix == sparse.matrix).all()

    def test_random_seed_from_master(self):
        """Tests that random instances derive their seed from the master seed."""
        spec = {"kind": "random", "dimension": 4}
        first = cli.build_instance(spec, RunConfig.from_dict({"seed": 1}), 0)
        again = cli.build_instance(spec, RunConfig.from_dict({"seed": 1}), 0)
        other = cli.build_instance(spec, RunConfig.from_dict({"seed": 2}), 0)
        assert (first.matrix == again.matrix).all()
        assert not (first.matrix == other.matrix).all()


class TestCommands:
    """Tests for the subcommands and their artifacts."""

    def test_spectrum(self, run):
        """Tests the eigenvalue and density artifacts."""
        code, out = run("spectrum", cycle_config)
        assert code == cli.EXIT_OK

        text = (out / "cycle-0.density.csv").read_text()
        assert text == (
            "# seed=5 command=spectrum instance=cycle-0\nlambda,weight\n2.0,0.5\n4.0,0.25\n"
        )
        header, rows = read_csv_rows((out / "t.eigenvalues.csv").read_text())
        assert header == ["index", "eigenvalue"]
        assert len(rows) == 9

    def test_spectrum_identity(self, run, tmp_path):
        """Tests that the identity matrix has a single atom of full mass."""
        (tmp_path / "eye.csv").write_text("1,0,0\n0,1,0\n0,0,1\n")
        data = {"instance": {"kind": "matrix-file", "path": "eye.csv", "name": "eye"}}
        code, out = run("spectrum", data)
        assert code == cli.EXIT_OK

        _, rows = read_csv_rows((out / "eye.density.csv").read_text())
        assert rows == [["1.0", "1.0"]]

    def test_profiles(self, run):
        """Tests the profile artifacts of the four-cycle."""
        code, out = run("profiles", cycle_config)
        assert code == cli.EXIT_OK

        _, rows = read_csv_rows((out / "cycle-0.transform.csv").read_text())
        assert rows == [["2.0", "0.5", "0.25"], ["4.0", "0.75", "0.3125"]]

        _, rows = read_csv_rows((out / "cycle-0.orlicz.csv").read_text())
        assert [r[1] for r in rows] == ["0.125", "1.0"]

        _, rows = read_csv_rows((out / "cycle-0.minorant.csv").read_text())
        assert rows[0] == ["0.0", "0.0"]
        assert (out / "t.orlicz.csv").exists()
        assert (out / "t.heat.csv").exists()
        _, rows = read_csv_rows((out / "cycle-0.sandwich.csv").read_text())
        assert [r[0] for r in rows] == [
            "sandwich_lower",
            "growth_condition",
            "sandwich_upper",
            "sandwich_lower",
        ]
        assert [r[-1] for r in rows] == ["pass", "fail", "pass", "pass"]
        assert not (out / "cycle-0.fit.csv").exists()

    def test_profiles_empty_spectrum(self, run, tmp_path):
        """Tests that an operator without positive eigenvalues has all-zero profiles."""
        (tmp_path / "zero.csv").write_text("0,0\n0,0\n")
        data = {**cycle_config, "instance": {"kind": "matrix-file", "path": "zero.csv"}}
        del data["instances"]
        code, out = run("profiles", data)
        assert code == cli.EXIT_OK

        _, rows = read_csv_rows((out / "matrix-file-0.orlicz.csv").read_text())
        assert rows == [["0.0625", "0.0", "0.0"], ["0.25", "0.0", "0.0"]]
        _, rows = read_csv_rows((out / "matrix-file-0.heat.csv").read_text())
        assert rows == [["1.0", "0.0", "0.0"]]
        _, rows = read_csv_rows((out / "matrix-file-0.transform.csv").read_text())
        assert rows == []

    def test_profiles_fit(self, run):
        """Tests that a configured window adds the asymptotic fit of F."""
        data = {
            "instance": {"kind": "cycle", "size": 16, "name": "c16"},
            "profile": {"window": [0.1, 4.5], "k_candidates": [0]},
        }
        code, out = run("profiles", data)
        assert code == cli.EXIT_OK

        header, rows = read_csv_rows((out / "c16.fit.csv").read_text())
        assert header == ["alpha", "k", "c", "residual", "points"]
        assert float(rows[0][0]) > 0
        assert rows[0][1:2] == ["0"]
        assert rows[0][-1] == "8"

    def test_certify(self, run):
        """Tests that a correct run passes and writes its report."""
        code, out = run("certify", cycle_config)
        assert code == cli.EXIT_OK

        lines = (out / "report.csv").read_text().splitlines()
        assert lines[0] == "# seed=5"
        assert lines[1] == "instance,state,check,param,lhs,rhs,margin,pass,seed"

    def test_certify_negative_control(self, run, caplog):
        """Tests that a halved spectral decay exits with a failure."""
        data = {**cycle_config, "suite": {"states": 2, "density_scale": 0.5}}
        code, _ = run("certify", data)
        assert code == cli.EXIT_FAILED
        assert "FAILED decay" in caplog.text

    def test_certify_reproducible(self, run):
        """Tests that the report is byte-identical for the same seed and any worker count."""
        _, out = run("certify", cycle_config)
        first = (out / "report.csv").read_bytes()

        _, out = run("certify", cycle_config, "--jobs", "3")
        assert (out / "report.csv").read_bytes() == first

    def test_scaling(self, run):
        """Tests the quotient-tower summary."""
        data = {"scaling": {"d": 1, "sizes": [8, 16], "p": 4.0, "samples": 8}, "seed": 2}
        code, out = run("scaling", data)
        assert code == cli.EXIT_OK

        header, rows = read_csv_rows((out / "scaling.csv").read_text())
        assert header[:3] == ["N", "atoms", "mass"]
        assert [r[0] for r in rows] == ["8", "16"]
        assert rows[0][-1] == "nan"
        assert float(rows[1][-1]) > 0
        assert (out / "scaling.N16.density.csv").exists()
        assert [r[3] for r in rows] == ["nan", "nan"]

    def test_scaling_window(self, run, caplog):
        """Tests that the tower is fitted only inside a configured window."""
        data = {"scaling": {"d": 1, "sizes": [8, 16], "window": [0.1, 4.5], "k_candidates": [0]}}
        code, out = run("scaling", data)
        assert code == cli.EXIT_OK

        _, rows = read_csv_rows((out / "scaling.csv").read_text())
        assert rows[0][3] == "nan"
        assert float(rows[1][3]) > 0
        assert "No asymptotic fit at N=8" in caplog.text

    def test_continuum(self, run):
        """Tests the continuum artifacts of the Laplacian of ℝ³."""
        data = {"continuum": {"n": 3, "budget": 10_000, "lambdas": [0.25, 0.5, 1.0]}, "seed": 4}
        code, out = run("continuum", data)
        assert code == cli.EXIT_OK

        header, rows = read_csv_rows((out / "continuum.reference.csv").read_text())
        assert header == ["lambda", "estimate", "stderr", "closed_form", "z"]
        assert all(abs(float(r[-1])) < 6 for r in rows)
        assert (out / "continuum.profile.csv").read_text().startswith("# seed=4 command=continuum")


class TestExitCodes:
    """Tests for the exit codes of the command."""

    def test_invalid_configuration(self, run, capsys):
        """Tests that an invalid configuration exits with code 2."""
        code, _ = run("spectrum", {"instance": {"kind": "torus", "size": 4}})
        assert code == cli.EXIT_INVALID
        assert "requires ['d']" in capsys.readouterr().err

    def test_invalid_override(self, run):
        """Tests that invalid command-line overrides are validated."""
        code, _ = run("spectrum", cycle_config, "--jobs", "0")
        assert code == cli.EXIT_INVALID

    def test_numerical_error(self, run, monkeypatch, capsys):
        """Tests that numerical errors exit with code 3."""

        def fail(config, out):
            raise NumericalError("F is not monotone.")

        monkeypatch.setitem(cli.COMMANDS, "spectrum", fail)
        code, _ = run("spectrum", cycle_config)
        assert code == cli.EXIT_NUMERICAL
        assert "[numerical error] F is not monotone." in capsys.readouterr().err

    def test_version(self, capsys):
        """Tests the version flag."""
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0
        assert "orlicz" in capsys.readouterr().out
