"""Command-line client for the game service.

Human-readable results go to stdout; machine-readable JSON and CSV go to
files under ``--out``.  By default commands run against the service layer
in-process; ``--server URL`` switches to a remote instance over HTTP.

Exit codes: 0 success/pass, 1 verification failure, 2 environment or I/O
failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import ContractViolation
from .service import schemas
from .service.app import (
    handle_calibrate,
    handle_classical,
    handle_nash,
    handle_optimize,
    handle_reproduce,
    handle_sweep,
)
from .sweeps import SweepRow, emit_csv, render_entanglement_svg

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_ENVIRONMENT = 2


class LocalClient:
    """Runs request handlers in-process (no network)."""

    _routes = {
        "/reproduce": (handle_reproduce, schemas.ReproduceRequest),
        "/classical": (handle_classical, None),
        "/optimize": (handle_optimize, schemas.OptimizeRequest),
        "/nash": (handle_nash, schemas.NashRequest),
        "/sweep": (handle_sweep, schemas.SweepRequest),
        "/calibrate": (handle_calibrate, None),
    }

    def post(self, path: str, payload: dict | None = None) -> dict:
        handler, model = self._routes[path]
        result = handler(model(**(payload or {}))) if model else handler()
        return result.model_dump()


class HttpClient:
    """Posts requests to a remote service instance."""

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def post(self, path: str, payload: dict | None = None) -> dict:
        import httpx

        resp = httpx.post(f"{self.base_url}{path}", json=payload or {}, timeout=600.0)
        resp.raise_for_status()
        return resp.json()


def _client(server: str | None):
    return HttpClient(server) if server else LocalClient()


def _fail_env(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_ENVIRONMENT)


def _write_json(payload: dict, path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        _fail_env(f"cannot write {path}: {exc}")


def _resolve_convention(convention: str, client, out: Path) -> str:
    """Map the --convention flag to a concrete convention.

    ``auto`` reruns the calibration and persists its outcome next to the
    other artifacts so the choice stays auditable.
    """
    if convention != "auto":
        return convention
    cal = client.post("/calibrate")
    _write_json(cal, out / "calibration.json")
    click.echo(
        f"calibration: convention={cal['convention']} "
        f"checked_payoff={cal['checked_payoff']:.12f}"
    )
    return cal["convention"]


_common = [
    click.option("--out", type=click.Path(path_type=Path), default=Path("."), show_default=True,
                 help="Directory for JSON/CSV artifacts."),
    click.option("--server", default=None, help="Remote service URL (default: in-process)."),
    click.option("--convention", type=click.Choice(["paper", "standard", "auto"]),
                 default="standard", show_default=True,
                 help="Conjugation orientation; 'auto' recalibrates and records the result."),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Three-player quantum Kolkata restaurant game engine."""


@main.command()
@click.argument("preset", type=click.IntRange(1, 3))
@common_options
def reproduce(preset, out, server, convention):
    """Evaluate reference optimum PRESET (1 full, 2 reduced, 3 orthogonal)."""
    client = _client(server)
    try:
        conv = _resolve_convention(convention, client, out)
        res = client.post("/reproduce", {"preset": preset, "convention": conv})
    except Exception as exc:  # noqa: BLE001 - surface anything as environment failure
        _fail_env(str(exc))
    click.echo(f"preset {preset} ({res['params']['family']}), convention={conv}")
    for key, val in res["params"].items():
        if key != "family":
            click.echo(f"  {key:>7s} = {val:.15f}")
    status = "PASS" if res["passed"] else "FAIL"
    click.echo(
        f"payoff = {res['payoff']:.12f}  expected = {res['expected']:.12f}  "
        f"tolerance = {res['tolerance']:g}  {status}"
    )
    sys.exit(EXIT_OK if res["passed"] else EXIT_VERIFICATION)


@main.command()
@common_options
def classical(out, server, convention):
    """Enumerate the 27 classical profiles and verify the quantum embedding."""
    client = _client(server)
    try:
        res = client.post("/classical")
    except Exception as exc:  # noqa: BLE001
        _fail_env(str(exc))
    click.echo("profile (C,B,A) -> payoffs")
    for row in res["profiles"]:
        i, j, k = row["profile"]
        click.echo(f"  ({i},{j},{k}) -> {tuple(row['payoffs'])}")
    click.echo(f"profiles paying A: {res['paying_profiles_per_player']}")
    click.echo(f"profiles paying B: {res['paying_profiles_per_player']}")
    click.echo(f"profiles paying C: {res['paying_profiles_per_player']}")
    click.echo(f"E_classical = {res['expectation_exact']} = {res['expectation']:.12f}")
    verdict = "PASS" if res["embedding_ok"] else "FAIL"
    click.echo(f"classical embedding on the shared state: {verdict}")
    sys.exit(EXIT_OK if res["embedding_ok"] else EXIT_VERIFICATION)


@main.command()
@click.option("--family", type=click.Choice(["FULL_SU3", "REDUCED6", "SO3"]),
              default="FULL_SU3", show_default=True)
@click.option("--state", default="ghz", show_default=True,
              help="Initial state: ghz, aharonov, product000, or tunable:vt,vp.")
@click.option("--fidelity", type=click.FloatRange(0.0, 1.0), default=1.0, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--starts", type=click.IntRange(min=1), default=200, show_default=True)
@common_options
def optimize(family, state, fidelity, seed, starts, out, server, convention):
    """Search the strategy family for the best symmetric payoff."""
    client = _client(server)
    try:
        conv = _resolve_convention(convention, client, out)
        res = client.post(
            "/optimize",
            {
                "family": family,
                "state": state,
                "fidelity": fidelity,
                "seed": seed,
                "n_starts": starts,
                "convention": conv,
            },
        )
    except Exception as exc:  # noqa: BLE001
        _fail_env(str(exc))
    _write_json(res, out / f"optimize-{family.lower()}.json")
    click.echo(f"family={family} state={state} fidelity={fidelity} seed={seed} starts={starts}")
    click.echo(f"best payoff = {res['best_payoff']:.12f}")
    for key, val in res["best_params"].items():
        if key != "family":
            click.echo(f"  {key:>7s} = {val:.15f}")
    click.echo(f"converged fraction = {res['converged_fraction']:.3f}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--fd-step", type=click.FloatRange(1e-6, 1e-3), default=1e-5, show_default=True)
@click.option("--grid-points", type=click.IntRange(min=2), default=5, show_default=True,
              help="Coarse deviation-grid points per axis.")
@common_options
def nash(fd_step, grid_points, out, server, convention):
    """Verify the reduced-family optimum is a Nash equilibrium."""
    client = _client(server)
    try:
        conv = _resolve_convention(convention, client, out)
        res = client.post(
            "/nash",
            {"fd_step": fd_step, "convention": conv, "grid_points_per_axis": grid_points},
        )
    except Exception as exc:  # noqa: BLE001
        _fail_env(str(exc))
    _write_json(res, out / "nash-report.json")
    click.echo(f"unilateral gradient at optimum (fd step {fd_step:g}):")
    click.echo("  " + "  ".join(f"{g:+.3e}" for g in res["gradient"]))
    if res["gradient_closed_form"] is not None:
        click.echo("closed-form derivatives at optimum:")
        click.echo("  " + "  ".join(f"{g:+.3e}" for g in res["gradient_closed_form"]))
    click.echo("hessian eigenvalues:")
    click.echo("  " + "  ".join(f"{e:+.6f}" for e in res["eigenvalues"]))
    click.echo(f"max unilateral gain on grid: {res['max_unilateral_gain']:.3e}")
    click.echo(f"nash verdict: {'PASS' if res['verdict'] else 'FAIL'}")
    sys.exit(EXIT_OK if res["verdict"] else EXIT_VERIFICATION)


@main.command()
@click.argument("kind", type=click.Choice(["fidelity", "entanglement"]))
@click.option("--svg", is_flag=True, help="Also render an SVG heat map (entanglement only).")
@common_options
def sweep(kind, svg, out, server, convention):
    """Sweep fidelity or entanglement angles and cross-check the closed form."""
    client = _client(server)
    try:
        conv = _resolve_convention(convention, client, out)
        res = client.post("/sweep", {"kind": kind, "convention": conv})
    except Exception as exc:  # noqa: BLE001
        _fail_env(str(exc))
    names = tuple(res["columns"][:-3])
    rows = [
        SweepRow(names, tuple(r[: len(names)]), r[len(names)], r[len(names) + 1])
        for r in res["rows"]
    ]
    csv_path = out / f"sweep-{kind}.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        emit_csv(rows, csv_path)
        if svg and kind == "entanglement":
            render_entanglement_svg(rows, out / "sweep-entanglement.svg")
    except (OSError, ContractViolation) as exc:
        _fail_env(str(exc))
    click.echo(f"wrote {csv_path} ({len(rows)} rows)")
    if svg and kind == "entanglement":
        click.echo(f"wrote {out / 'sweep-entanglement.svg'}")
    click.echo(f"max residual = {res['max_residual']:.3e}")
    click.echo(f"observed payoff range = [{res['observed_min']:.12f}, {res['observed_max']:.12f}]")
    sys.exit(EXIT_OK)


@main.command()
@common_options
def calibrate(out, server, convention):  # noqa: ARG001 - convention flag unused here
    """Run the conjugation-orientation calibration and record the outcome."""
    client = _client(server)
    try:
        res = client.post("/calibrate")
    except Exception as exc:  # noqa: BLE001
        _fail_env(str(exc))
    _write_json(res, out / "calibration.json")
    click.echo(f"calibrated convention: {res['convention']}")
    click.echo(f"checked payoff: {res['checked_payoff']:.12f}")
    for conv, pay in res["payoff_by_convention"].items():
        match = res["final_state_match"][conv]
        click.echo(f"  {conv:>8s}: payoff={pay:.12f} final-state match={match}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("qkolkata.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
