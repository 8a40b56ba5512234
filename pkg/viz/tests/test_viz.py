import json

import numpy as np
import pytest
from click.testing import CliRunner

from nsprviz import cli, plots
from nsprviz.data import ColumnError, load_records_jsonl, load_table_csv
from nsprviz.plots import freedman_diaconis_bins, render


@pytest.fixture()
def samples_csv(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "posterior_equal_weights.csv"
    lines = ["beta,theta_1,theta_2"]
    for _ in range(800):
        beta = rng.uniform(0.0, 0.05)
        t1, t2 = rng.normal([40.0, 40.0], 0.7)
        lines.append(f"{beta},{t1},{t2}")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture()
def curve_csv(tmp_path):
    path = tmp_path / "curves.csv"
    grid = np.linspace(-50.0, 50.0, 101)
    lines = ["beta,theta,density"]
    for beta in (1.0, 0.5, 0.25, 0.01, 0.0):
        sigma = 4.0 / np.sqrt(beta) if beta > 0 else None
        for t in grid:
            if sigma is None:
                dens = 0.01
            else:
                dens = np.exp(-0.5 * (t / sigma) ** 2) / (
                    sigma * np.sqrt(2.0 * np.pi))
            lines.append(f"{beta},{t},{dens}")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture()
def fig4_csv(tmp_path):
    path = tmp_path / "fig4_rmse.csv"
    path.write_text(
        "theta_star,standard_rmse,autopr_rmse\n"
        "5,0.05,0.05\n10,0.06,0.05\n15,0.5,0.06\n20,3.0,0.05\n")
    return str(path)


@pytest.fixture()
def records_jsonl(tmp_path):
    rng = np.random.default_rng(2)
    path = tmp_path / "records.jsonl"
    with open(path, "w") as handle:
        for case in ("dim3", "dim4"):
            for rep in range(10):
                rec = {"case": case, "rep": rep, "mode": "auto",
                       "failed": False,
                       "log_z": -100.0 + rng.normal(0.0, 0.4),
                       "oracle_log_z": -100.0}
                handle.write(json.dumps(rec) + "\n")
    return str(path)


class TestBinning:
    def test_floor(self):
        assert freedman_diaconis_bins([1.0, 1.0, 1.0]) == 10
        assert freedman_diaconis_bins(np.random.default_rng(0).random(5)) >= 10

    def test_formula(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=1000)
        q25, q75 = np.percentile(values, [25, 75])
        width = 2.0 * (q75 - q25) / 1000 ** (1.0 / 3.0)
        expected = int(np.ceil((values.max() - values.min()) / width))
        assert freedman_diaconis_bins(values) == expected

    def test_grows_with_sample_size(self):
        rng = np.random.default_rng(4)
        small = freedman_diaconis_bins(rng.normal(size=100))
        large = freedman_diaconis_bins(rng.normal(size=10_000))
        assert large > small

    def test_uniform_histogram_is_flat(self):
        # Equal-weight draws from a flat posterior must histogram flat to
        # within sampling noise under the chosen binning.
        rng = np.random.default_rng(5)
        values = rng.random(5000)
        counts, _ = np.histogram(values,
                                 bins=freedman_diaconis_bins(values))
        expected = 5000 / counts.size
        assert np.all(np.abs(counts - expected) < 5.0 * np.sqrt(expected))


class TestLoaders:
    def test_missing_column_named(self, fig4_csv):
        with pytest.raises(ColumnError, match="beta"):
            load_table_csv(fig4_csv, required=("beta",))

    def test_non_numeric_cell_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,oops\n")
        with pytest.raises(ColumnError, match="'b'"):
            load_table_csv(str(path))

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0\n")
        with pytest.raises(ColumnError):
            load_table_csv(str(path))

    def test_jsonl_missing_key_named(self, tmp_path):
        path = tmp_path / "r.jsonl"
        path.write_text('{"case": "x"}\n')
        with pytest.raises(ColumnError, match="log_z"):
            load_records_jsonl(str(path), required=("case", "log_z"))

    def test_round_trip(self, fig4_csv):
        table = load_table_csv(fig4_csv, required=("theta_star",))
        assert table["theta_star"] == [5.0, 10.0, 15.0, 20.0]


class TestRender:
    @pytest.mark.parametrize("kind,fixture", [
        ("corner", "samples_csv"),
        ("beta-marginal", "samples_csv"),
        ("prior-evolution", "curve_csv"),
        ("rmse-vs-theta", "fig4_csv"),
        ("nlike-vs-theta", "fig4_csv"),
        ("boxplots", "records_jsonl"),
    ])
    def test_every_kind_renders(self, kind, fixture, request, tmp_path):
        source = request.getfixturevalue(fixture)
        out = tmp_path / "fig.png"
        render(kind, [source], str(out))
        assert out.stat().st_size > 1000

    @pytest.mark.parametrize("suffix", ["png", "svg"])
    def test_deterministic_bytes(self, samples_csv, tmp_path, suffix):
        a = tmp_path / f"a.{suffix}"
        b = tmp_path / f"b.{suffix}"
        render("corner", [samples_csv], str(a))
        render("corner", [samples_csv], str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_beta_marginal_overlays_runs(self, samples_csv, tmp_path):
        out = tmp_path / "overlay.png"
        render("beta-marginal", [samples_csv, samples_csv], str(out))
        assert out.exists()

    def test_unknown_kind(self, samples_csv, tmp_path):
        with pytest.raises(ValueError, match="sparkline"):
            render("sparkline", [samples_csv], str(tmp_path / "x.png"))

    def test_boxplots_need_converged_auto(self, tmp_path):
        path = tmp_path / "r.jsonl"
        rec = {"case": "c", "mode": "standard", "log_z": -1.0,
               "oracle_log_z": -1.0}
        path.write_text(json.dumps(rec) + "\n")
        with pytest.raises(ColumnError):
            render("boxplots", [str(path)], str(tmp_path / "x.png"))


class TestCli:
    def test_success(self, samples_csv, tmp_path):
        out = tmp_path / "corner.png"
        result = CliRunner().invoke(cli.main, [
            "corner", "--in", samples_csv, "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_column_error_exit_one(self, fig4_csv, tmp_path):
        result = CliRunner().invoke(cli.main, [
            "beta-marginal", "--in", fig4_csv,
            "--out", str(tmp_path / "x.png")])
        assert result.exit_code == 1
        assert "beta" in result.output

    def test_missing_file_rejected(self, tmp_path):
        result = CliRunner().invoke(cli.main, [
            "corner", "--in", str(tmp_path / "nope.csv"),
            "--out", str(tmp_path / "x.png")])
        assert result.exit_code != 0
