"""Command-line client for the pricing engine.

Commands build the same request models the HTTP service accepts, evaluate them
in process by default, or post them to a running service when ``--server`` is
given. Configuration comes from an optional JSON file plus flag overrides
(flags win); the ``BASKET_TAYLOR_SEED`` environment variable overrides the
seed when the ``--seed`` flag is absent.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Callable

import click
from pydantic import BaseModel, ValidationError

from .errors import PricingError
from .service import handlers
from .service.schemas import (
    CurveRequest,
    CurveResponse,
    HistRequest,
    HistResponse,
    OutputFormat,
    PriceRequest,
    PriceResponse,
    TableRequest,
    TableResponse,
)

SEED_ENV_VAR = "BASKET_TAYLOR_SEED"

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        _fail(EXIT_CONFIG, f"expected comma-separated numbers, got {text!r}")


def _parse_ystar(text: str):
    if text.strip() == "mean":
        return "mean"
    values = _parse_floats(text)
    return values[0] if len(values) == 1 else values


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            _fail(EXIT_CONFIG, f"config file is not valid JSON: {exc}")
    if not isinstance(config, dict):
        _fail(EXIT_CONFIG, "config file must contain a JSON object")
    return config


def _merge(config: dict, seed: int | None, **overrides) -> dict:
    merged = dict(config)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    if seed is not None:
        merged["seed"] = seed
    elif os.environ.get(SEED_ENV_VAR):
        merged["seed"] = int(os.environ[SEED_ENV_VAR])
    return merged


def _build_request(request_cls: type[BaseModel], merged: dict) -> BaseModel:
    try:
        return request_cls.model_validate(merged)
    except ValidationError as exc:
        details = "; ".join(
            f"{'.'.join(str(loc) for loc in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        _fail(EXIT_CONFIG, details)


def _dispatch(server: str | None, endpoint: str, request: BaseModel,
              response_cls: type[BaseModel], handler: Callable):
    if server is None:
        try:
            return handler(request)
        except PricingError as exc:
            _fail(EXIT_NUMERICAL, str(exc))
        except ValueError as exc:
            _fail(EXIT_CONFIG, str(exc))
    import httpx

    try:
        resp = httpx.post(f"{server.rstrip('/')}/{endpoint}",
                          json=request.model_dump(mode="json"), timeout=600.0)
    except httpx.HTTPError as exc:
        _fail(EXIT_NUMERICAL, f"request to {server} failed: {exc}")
    if resp.status_code == 200:
        return response_cls.model_validate(resp.json())
    detail = resp.json().get("detail", resp.text)
    _fail(EXIT_CONFIG if resp.status_code == 422 else EXIT_NUMERICAL, str(detail))


def _csv_line(values) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _emit_table_csv(resp: TableResponse) -> None:
    click.echo(_csv_line(resp.columns))
    for label, row in zip(resp.labels, resp.rows):
        click.echo(_csv_line([label, *row]))


def _common_model_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="JSON config file; flags override its fields."),
        click.option("--spots", default=None, help="Comma-separated spot prices."),
        click.option("--vols", default=None, help="Comma-separated annualized volatilities."),
        click.option("--corr", default=None,
                     help="Correlation matrix as JSON, e.g. '[[1,-0.3],[-0.3,1]]'."),
        click.option("--rho", type=float, default=None,
                     help="Two-asset shortcut: off-diagonal correlation."),
        click.option("--rate", type=float, default=None, help="Continuously-compounded rate."),
        click.option("--maturity", type=float, default=None, help="Maturity in years."),
        click.option("--seed", type=int, default=None,
                     help=f"RNG seed (falls back to ${SEED_ENV_VAR}, then config)."),
        click.option("--server", default=None, metavar="URL",
                     help="Send the request to a running service instead of pricing in-process."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _market_overrides(spots, vols, corr, rho) -> dict:
    overrides: dict = {}
    if spots is not None:
        overrides["spots"] = _parse_floats(spots)
    if vols is not None:
        overrides["vols"] = _parse_floats(vols)
    if corr is not None:
        try:
            overrides["corr"] = json.loads(corr)
        except json.JSONDecodeError:
            _fail(EXIT_CONFIG, f"--corr must be a JSON matrix, got {corr!r}")
    elif rho is not None:
        overrides["corr"] = [[1.0, rho], [rho, 1.0]]
    return overrides


@click.group()
@click.version_option(package_name="basket-taylor")
def main() -> None:
    """Price basket and spread options; reproduce the built-in benchmark tables.

    All CSV output uses '.' as the decimal separator and no thousands
    separators; column orders are fixed and documented per command.
    """


@main.command(name="price")
@_common_model_options
@click.option("--weights", default=None, help="Comma-separated basket weights (w1 > 0).")
@click.option("--strike", type=float, default=None, help="Strike price (may be <= 0).")
@click.option("--method", default=None,
              type=click.Choice(["taylor", "taylor-closed", "mc-full", "mc-partial", "margrabe"]),
              help="Pricing method.")
@click.option("--order", type=int, default=None, help="Expansion order (taylor methods only).")
@click.option("--ystar", default=None,
              help="Expansion point: 'mean' or comma-separated values.")
@click.option("--n-samples", type=int, default=None, help="Monte Carlo sample count.")
@click.option("--output", default=None, type=click.Choice(["text", "json", "csv"]),
              help="Output format. CSV columns: price, stderr, then one term per order.")
def price_cmd(config_path, spots, vols, corr, rho, rate, maturity, seed, server,
              weights, strike, method, order, ystar, n_samples, output) -> None:
    """Price a single contract with the configured method."""
    overrides = _market_overrides(spots, vols, corr, rho)
    if weights is not None:
        overrides["weights"] = _parse_floats(weights)
    if ystar is not None:
        overrides["ystar"] = _parse_ystar(ystar)
    config = _load_config(config_path)
    if method is not None and method not in ("taylor", "taylor-closed") and order is None:
        # A method override supersedes an expansion order carried by the config.
        config.pop("order", None)
    merged = _merge(config, seed, rate=rate, maturity=maturity, strike=strike,
                    method=method, order=order, n_samples=n_samples, output=output,
                    **overrides)
    request = _build_request(PriceRequest, merged)
    response = _dispatch(server, "price", request, PriceResponse, handlers.handle_price)

    if response.output is OutputFormat.JSON:
        click.echo(response.model_dump_json(indent=2))
    elif response.output is OutputFormat.CSV:
        header = ["price", "stderr"]
        row: list = [repr(response.price), "" if response.stderr is None else repr(response.stderr)]
        for k, term in enumerate(response.terms or []):
            header.append(f"term_{k}")
            row.append(repr(term))
        click.echo(",".join(header))
        click.echo(",".join(row))
    else:
        click.echo(f"price {response.price:.6f}")
        if response.stderr is not None:
            click.echo(f"stderr {response.stderr:.6f}")
        if response.terms is not None:
            click.echo("terms " + " ".join(f"{t:.6f}" for t in response.terms))


@main.command(name="table")
@click.argument("which", type=click.IntRange(1, 3))
@click.option("--n-samples", type=int, default=None, help="Monte Carlo samples per cell.")
@click.option("--seed", type=int, default=None,
              help=f"RNG seed (falls back to ${SEED_ENV_VAR}).")
@click.option("--output", default="csv", type=click.Choice(["csv", "json"]))
@click.option("--server", default=None, metavar="URL")
def table_cmd(which, n_samples, seed, output, server) -> None:
    """Emit a benchmark sweep as CSV.

    Table 1: correlation sweep; columns correlation, monte_carlo,
    partial_monte_carlo, first_order, second_order. Table 2: expansion-point
    sweep at correlation -0.7, same columns with ystar labels. Table 3:
    out-of-the-money configurations; columns parameters, monte_carlo,
    first_order, second_order.
    """
    merged = _merge({}, seed, which=which, n_samples=n_samples)
    request = _build_request(TableRequest, merged)
    response = _dispatch(server, "table", request, TableResponse, handlers.handle_table)
    if output == "json":
        click.echo(response.model_dump_json(indent=2))
    else:
        _emit_table_csv(response)


@main.command(name="curve")
@_common_model_options
@click.option("--weights", default=None, help="Comma-separated weights (two assets).")
@click.option("--strike", type=float, default=None)
@click.option("--ystar", default=None, help="Expansion point: 'mean' or a number.")
@click.option("--y-lo", type=float, default=None, help="Lower edge of the y grid.")
@click.option("--y-hi", type=float, default=None, help="Upper edge of the y grid.")
@click.option("--points", type=int, default=None, help="Number of grid points.")
@click.option("--output", default="csv", type=click.Choice(["csv", "json"]))
def curve_cmd(config_path, spots, vols, corr, rho, rate, maturity, seed, server,
              weights, strike, ystar, y_lo, y_hi, points, output) -> None:
    """Tabulate the conditional price and its tangent line and parabola at y*.

    CSV columns: y, conditional_price, first_order, second_order.
    """
    overrides = _market_overrides(spots, vols, corr, rho)
    if weights is not None:
        overrides["weights"] = _parse_floats(weights)
    if ystar is not None:
        overrides["ystar"] = _parse_ystar(ystar)
    merged = _merge(_load_config(config_path), seed, rate=rate, maturity=maturity,
                    strike=strike, y_lo=y_lo, y_hi=y_hi, points=points, **overrides)
    merged.pop("seed", None)
    for key in ("method", "order", "n_samples", "output"):
        merged.pop(key, None)
    request = _build_request(CurveRequest, merged)
    response = _dispatch(server, "curve", request, CurveResponse, handlers.handle_curve)
    if output == "json":
        click.echo(response.model_dump_json(indent=2))
    else:
        click.echo(_csv_line(response.columns))
        for row in response.rows:
            click.echo(_csv_line(row))


@main.command(name="hist")
@_common_model_options
@click.option("--n-samples", type=int, default=None, help="Number of simulated paths.")
@click.option("--bins", type=int, default=None, help="Histogram bins per asset.")
@click.option("--range", "value_range", default=None,
              help="Common bin range as 'lo,hi' (defaults to each asset's sample range).")
@click.option("--output", default="csv", type=click.Choice(["csv", "json"]))
def hist_cmd(config_path, spots, vols, corr, rho, rate, maturity, seed, server,
             n_samples, bins, value_range, output) -> None:
    """Histogram the simulated terminal log-returns, one block of rows per asset.

    CSV columns: asset, bin_left, bin_right, count.
    """
    overrides = _market_overrides(spots, vols, corr, rho)
    if value_range is not None:
        lo, hi = _parse_floats(value_range)
        overrides["lo"], overrides["hi"] = lo, hi
    merged = _merge(_load_config(config_path), seed, rate=rate, maturity=maturity,
                    n_samples=n_samples, bins=bins, **overrides)
    for key in ("method", "order", "ystar", "weights", "strike", "output"):
        merged.pop(key, None)
    request = _build_request(HistRequest, merged)
    response = _dispatch(server, "histogram", request, HistResponse, handlers.handle_hist)
    if output == "json":
        click.echo(response.model_dump_json(indent=2))
    else:
        click.echo(_csv_line(response.columns))
        for asset, left, right, count in response.rows:
            click.echo(f"{int(asset)},{repr(left)},{repr(right)},{int(count)}")


@main.command(name="serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port) -> None:
    """Run the pricing HTTP service."""
    import uvicorn

    uvicorn.run("basket_taylor.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
