import json

import pytest
from click.testing import CliRunner

from basket_taylor.cli import main

BENCHMARK_CONFIG = {
    "spots": [100.0, 96.0],
    "vols": [0.3, 0.1],
    "corr": [[1.0, -0.3], [-0.3, 1.0]],
    "rate": 0.03,
    "maturity": 1.0,
    "weights": [1.0, -1.0],
    "strike": 1.0,
    "method": "taylor",
    "order": 2,
    "ystar": 0.0,
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(BENCHMARK_CONFIG))
    return str(path)


def run(runner, *args, env=None):
    return runner.invoke(main, list(args), env=env, catch_exceptions=False)


class TestPriceCommand:
    def test_text_output(self, runner, config_file):
        result = run(runner, "price", "--config", config_file)
        assert result.exit_code == 0
        assert "price 15.006524" in result.output
        assert "terms" in result.output

    def test_flags_override_config(self, runner, config_file):
        result = run(runner, "price", "--config", config_file, "--order", "1")
        assert result.exit_code == 0
        assert "price 13.606258" in result.output

    def test_flags_alone_suffice(self, runner):
        result = run(
            runner, "price", "--spots", "100,96", "--vols", "0.3,0.1", "--rho", "-0.3",
            "--rate", "0.03", "--maturity", "1", "--weights", "1,-1", "--strike", "1",
            "--method", "taylor", "--order", "2", "--ystar", "0",
        )
        assert result.exit_code == 0
        assert "price 15.006524" in result.output

    def test_mc_reports_stderr(self, runner, config_file):
        result = run(runner, "price", "--config", config_file, "--method", "mc-partial",
                     "--n-samples", "20000", "--seed", "5")
        assert result.exit_code == 0
        assert "stderr" in result.output

    def test_json_round_trip_is_bit_exact(self, runner, config_file, tmp_path):
        first = run(runner, "price", "--config", config_file, "--output", "json")
        assert first.exit_code == 0
        reingested = tmp_path / "echo.json"
        reingested.write_text(first.output)
        second = run(runner, "price", "--config", str(reingested), "--output", "json")
        assert second.exit_code == 0
        assert json.loads(first.output)["price"] == json.loads(second.output)["price"]

    def test_csv_output(self, runner, config_file):
        result = run(runner, "price", "--config", config_file, "--output", "csv")
        header, row = result.output.strip().splitlines()
        assert header.split(",")[:2] == ["price", "stderr"]
        assert float(row.split(",")[0]) == pytest.approx(15.0065, abs=5e-4)

    def test_margrabe_strike_guard_exits_2(self, runner, config_file):
        result = runner.invoke(
            main, ["price", "--config", config_file, "--method", "margrabe"]
        )
        assert result.exit_code == 2
        assert "margrabe requires strike 0" in result.output

    def test_invalid_correlation_exits_3(self, runner, config_file):
        result = runner.invoke(
            main, ["price", "--config", config_file, "--corr", "[[1,1.5],[1.5,1]]"]
        )
        assert result.exit_code == 3
        assert "corr" in result.output

    def test_missing_required_fields_exit_2(self, runner):
        result = runner.invoke(main, ["price", "--strike", "1"])
        assert result.exit_code == 2

    def test_seed_env_var_used_when_flag_absent(self, runner, config_file):
        args = ["price", "--config", config_file, "--method", "mc-full",
                "--n-samples", "5000", "--output", "json"]
        with_env = run(runner, *args, env={"BASKET_TAYLOR_SEED": "77"})
        explicit = run(runner, *args, "--seed", "77")
        other = run(runner, *args, "--seed", "78")
        assert json.loads(with_env.output)["price"] == json.loads(explicit.output)["price"]
        assert json.loads(with_env.output)["price"] != json.loads(other.output)["price"]

    def test_seed_flag_beats_env_var(self, runner, config_file):
        args = ["price", "--config", config_file, "--method", "mc-full",
                "--n-samples", "5000", "--output", "json"]
        flagged = run(runner, *args, "--seed", "12", env={"BASKET_TAYLOR_SEED": "77"})
        baseline = run(runner, *args, "--seed", "12")
        assert json.loads(flagged.output)["price"] == json.loads(baseline.output)["price"]


class TestTableCommand:
    def test_table_one_csv(self, runner):
        result = run(runner, "table", "1", "--n-samples", "4000", "--seed", "1")
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "correlation,monte_carlo,partial_monte_carlo,first_order,second_order"
        rows = [line.split(",") for line in lines[1:]]
        assert [row[0] for row in rows] == ["0.3", "-0.3", "0.5", "-0.5"]
        assert float(rows[1][3]) == pytest.approx(13.6063, abs=5e-4)
        assert float(rows[1][4]) == pytest.approx(15.0065, abs=5e-4)

    def test_table_three_csv(self, runner):
        result = run(runner, "table", "3", "--n-samples", "4000", "--seed", "1")
        lines = result.output.strip().splitlines()
        assert lines[0] == "parameters,monte_carlo,first_order,second_order"
        first_row = lines[1].split(",")
        assert float(first_row[2]) == pytest.approx(5.30281, abs=5e-4)
        assert float(first_row[3]) == pytest.approx(7.0468998, abs=2e-3)

    def test_decimal_separator_is_dot(self, runner):
        result = run(runner, "table", "1", "--n-samples", "2000", "--seed", "1")
        for line in result.output.strip().splitlines()[1:]:
            values = line.split(",")[1:]
            for value in values:
                float(value)  # parses with '.' separator, no thousands marks


class TestCurveCommand:
    def test_columns_and_tangency(self, runner, config_file):
        result = run(runner, "curve", "--config", config_file,
                     "--y-lo", "-0.5", "--y-hi", "0.5", "--points", "21")
        lines = result.output.strip().splitlines()
        assert lines[0] == "y,conditional_price,first_order,second_order"
        middle = lines[11].split(",")
        assert float(middle[0]) == pytest.approx(0.0, abs=1e-12)
        assert middle[1] == middle[2] == middle[3]

    def test_first_order_stays_below_curve_on_benchmark(self, runner, config_file):
        # The tangent at the mean underestimates the exact conditional price
        # throughout +-6 standard deviations of the conditioning return (it
        # only crosses above far left of that, past the curve's inflection).
        result = run(runner, "curve", "--config", config_file, "--ystar", "mean",
                     "--y-lo", "-0.6", "--y-hi", "1", "--points", "41")
        rows = [line.split(",") for line in result.output.strip().splitlines()[1:]]
        for row in rows:
            exact, first = float(row[1]), float(row[2])
            assert first <= exact + 1e-9


class TestHistCommand:
    def test_counts_sum_to_samples(self, runner, config_file):
        result = run(runner, "hist", "--config", config_file,
                     "--n-samples", "2000", "--bins", "8", "--seed", "3")
        rows = [line.split(",") for line in result.output.strip().splitlines()[1:]]
        for asset in ("0", "1"):
            assert sum(int(r[3]) for r in rows if r[0] == asset) == 2000

    def test_empty_range_gives_zero_counts(self, runner, config_file):
        result = run(runner, "hist", "--config", config_file, "--n-samples", "500",
                     "--bins", "4", "--seed", "3", "--range", "50,60")
        rows = [line.split(",") for line in result.output.strip().splitlines()[1:]]
        assert sum(int(r[3]) for r in rows) == 0


@pytest.fixture
def service_via_http(monkeypatch):
    # Route httpx.post through the test client so no live server is needed.
    import httpx
    from fastapi.testclient import TestClient

    from basket_taylor.service import app

    test_client = TestClient(app)

    def fake_post(url, json=None, timeout=None):
        return test_client.post(url.replace("http://svc", ""), json=json)

    monkeypatch.setattr(httpx, "post", fake_post)


class TestServerMode:
    def test_price_via_http(self, runner, config_file, service_via_http):
        result = run(runner, "price", "--config", config_file, "--server", "http://svc")
        assert result.exit_code == 0
        assert "price 15.006524" in result.output

    def test_config_error_via_http_exits_2(self, runner, config_file, service_via_http):
        result = runner.invoke(main, ["price", "--config", config_file,
                                      "--method", "margrabe", "--server", "http://svc"])
        assert result.exit_code == 2

    def test_numerical_error_via_http_exits_3(self, runner, config_file, service_via_http):
        result = runner.invoke(main, ["price", "--config", config_file,
                                      "--corr", "[[1,1.5],[1.5,1]]",
                                      "--server", "http://svc"])
        assert result.exit_code == 3
