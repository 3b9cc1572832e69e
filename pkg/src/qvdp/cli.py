"""Command-line client for the qvdp service.

The CLI is a thin HTTP client: every subcommand builds a JSON request from a
config file plus ``--set`` overrides and posts it to the service. By default
the service runs in-process (the FastAPI app is mounted over an ASGI
transport, no socket involved); ``--server URL`` targets a remote instance
started with ``qvdp serve`` or ``uvicorn qvdp.service.app:app``.

Exit codes: 0 success, 1 usage/configuration error, 2 solver or numeric
failure (including unreachable servers).
"""

from __future__ import annotations

import argparse
import asyncio
import functools
import json
import os
import sys
from pathlib import Path

import httpx

from .errors import ConfigError
from .sweep import PARAM_NAMES, SweepTable, emit_csv, write_plot_script

__all__ = ["main", "entrypoint"]

OUT_DIR_ENV = "QVDP_OUT_DIR"
SUBCOMMANDS = ("steady", "evolve", "sweep", "boost", "ansatz", "regimes", "serve")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as exceptions (exit code 1)."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qvdp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{%s}" % ",".join(SUBCOMMANDS))

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config value (dotted paths allowed, value parsed as JSON)",
    )
    common.add_argument("--out", help="write result data to this path")
    common.add_argument("--server", help="base URL of a running service (default: in-process)")

    p = sub.add_parser("steady", parents=[common], help="steady state and its metrics")
    p.add_argument("--include-rho", action="store_true", help="include the full density matrix")
    sub.add_parser("evolve", parents=[common], help="fixed-step RK4 time evolution")
    p = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    p.add_argument(
        "--emit-plot-script",
        action="store_true",
        help="also write a matplotlib script next to the CSV",
    )
    p = sub.add_parser("boost", parents=[common], help="noise-boost verdict and slopes")
    p.add_argument("--no-numeric", action="store_true", help="skip the full-numerics slope")
    sub.add_parser("ansatz", parents=[common], help="three-level reduced model vs full numerics")
    sub.add_parser("regimes", parents=[common], help="regime classification of the steady state")
    p = sub.add_parser("serve", help="run the HTTP service with uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(args) -> dict:
    config: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            config = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    for item in args.overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = config
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path {key!r} collides with a non-object value")
        node[parts[-1]] = value
    return config


_CONFIG_BLOCKS = ("trunc", "evolve", "sweep")


def _check_top_level(config: dict) -> None:
    unknown = [k for k in config if k not in PARAM_NAMES and k not in _CONFIG_BLOCKS]
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {unknown}; expected parameters {list(PARAM_NAMES)} "
            f"or blocks {list(_CONFIG_BLOCKS)}"
        )


def _params_payload(config: dict) -> dict:
    _check_top_level(config)
    return {k: config[k] for k in PARAM_NAMES if k in config}


def _out_path(raw: str) -> Path:
    path = Path(raw)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


@functools.lru_cache(maxsize=1)
def _inprocess_app():
    from .service.app import create_app

    return create_app()


def _post(args, path: str, payload: dict) -> httpx.Response:
    if args.server:
        with httpx.Client(base_url=args.server, timeout=600.0) as client:
            return client.post(path, json=payload)

    async def go():
        transport = httpx.ASGITransport(app=_inprocess_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://qvdp.local", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _fail(resp: httpx.Response) -> int:
    try:
        body = resp.json()
    except ValueError:
        body = {"message": resp.text}
    if resp.status_code == 409:
        print(
            f"error [{body.get('error_code', 'numeric')}]: {body.get('message', '')}",
            file=sys.stderr,
        )
        return 2
    print(f"request rejected ({resp.status_code}): {json.dumps(body)}", file=sys.stderr)
    return 1 if resp.status_code < 500 else 2


def _write_json(args, data: dict) -> None:
    if args.out:
        path = _out_path(args.out)
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


def _cmd_steady(args, config) -> int:
    payload = {
        "params": _params_payload(config),
        "trunc": config.get("trunc", {}),
        "include_rho": bool(getattr(args, "include_rho", False)),
    }
    resp = _post(args, "/steady", payload)
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    pops = " ".join(f"p{i}={p:.4f}" for i, p in enumerate(data["populations"][:6]))
    print(
        f"dim={data['dim']} residual={data['residual']:.3e} "
        f"regime={data['regime']['label']}"
    )
    print(pops)
    print(
        f"mrl={data['mrl']:.6f} occupation={data['occupation']:.6f} "
        f"purity={data['purity']:.6f}"
    )
    _write_json(args, data)
    return 0


def _cmd_evolve(args, config) -> int:
    block = config.get("evolve", {})
    if "t_final" not in block or "dt" not in block:
        raise ConfigError("evolve needs t_final and dt (config block 'evolve' or --set evolve.t_final=...)")
    payload = {"params": _params_payload(config), "trunc": config.get("trunc", {}), **block}
    resp = _post(args, "/evolve", payload)
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    print(
        f"dim={data['dim']} steps={len(data['times'])} t_end={data['times'][-1]:.6g} "
        f"max_trace_drift={data['max_trace_drift']:.3e} "
        f"renormalizations={data['renormalizations']}"
    )
    print(
        f"final: mrl={data['mrl'][-1]:.6f} occupation={data['occupation'][-1]:.6f}"
    )
    if args.out:
        table = SweepTable(
            columns=["t", "mrl", "occupation", "trace_defect"],
            rows=[
                {"t": t, "mrl": m, "occupation": o, "trace_defect": d}
                for t, m, o, d in zip(
                    data["times"], data["mrl"], data["occupation"], data["trace_defect"]
                )
            ],
        )
        path = _out_path(args.out)
        emit_csv(table, path)
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args, config) -> int:
    _check_top_level(config)
    if "sweep" not in config:
        raise ConfigError("sweep needs a 'sweep' block in the config (axes, outputs, ...)")
    resp = _post(args, "/sweep", {"spec": config["sweep"]})
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    table = SweepTable(columns=data["columns"], rows=data["rows"])
    print(f"{len(table.rows)} grid points, {data['n_failed']} failed")
    if args.out:
        path = _out_path(args.out)
        emit_csv(table, path)
        print(f"wrote {path}")
        if getattr(args, "emit_plot_script", False):
            script = path.with_suffix(".plot.py")
            write_plot_script(table, path, script)
            print(f"wrote {script}")
    return 0


def _cmd_boost(args, config) -> int:
    payload = {
        "params": _params_payload(config),
        "trunc": config.get("trunc", {}),
        "numeric": not getattr(args, "no_numeric", False),
    }
    resp = _post(args, "/boost", payload)
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    print(f"verdict: {'boost' if data['verdict'] else 'no boost'} "
          f"(numerator_slope/numerator {'>' if data['verdict'] else '<='} denominator_slope/denominator)")
    print(
        f"numerator={data['numerator']:.6g} denominator={data['denominator']:.6g} "
        f"numerator_slope={data['numerator_slope']:.6g} "
        f"denominator_slope={data['denominator_slope']:.6g}"
    )
    print(f"s_analytic={data['s_analytic']:.6g} analytic_slope={data['analytic_slope']:.6g}")
    if data.get("numeric_slope") is not None:
        print(
            f"numeric_slope={data['numeric_slope']:.6g} "
            f"sign_agrees={str(data['slope_sign_agrees']).lower()}"
        )
    _write_json(args, data)
    return 0


def _cmd_ansatz(args, config) -> int:
    payload = {"params": _params_payload(config), "trunc": config.get("trunc", {})}
    resp = _post(args, "/ansatz", payload)
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    pops = " ".join(f"p{i}={p:.6f}" for i, p in enumerate(data["populations"]))
    print(f"reduced model: {pops} mrl={data['mrl_ansatz']:.6f}")
    if data.get("mrl_full") is not None:
        print(
            f"full numerics (dim={data['full_dim']}): mrl={data['mrl_full']:.6f} "
            f"rel_err={data['rel_err']:.4f} rho12_over_rho01={data['rho12_over_rho01']:.4f}"
        )
    _write_json(args, data)
    return 0


def _cmd_regimes(args, config) -> int:
    payload = {"params": _params_payload(config), "trunc": config.get("trunc", {})}
    resp = _post(args, "/regimes", payload)
    if resp.status_code != 200:
        return _fail(resp)
    data = resp.json()
    print(
        f"regime={data['label']} p2={data['p2']:.6g} ratio={data['ratio']:.6g} "
        f"occupation={data['occupation']:.6g}"
    )
    _write_json(args, data)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qvdp.service.app:app", host=args.host, port=args.port)
    return 0


_HANDLERS = {
    "steady": _cmd_steady,
    "evolve": _cmd_evolve,
    "sweep": _cmd_sweep,
    "boost": _cmd_boost,
    "ansatz": _cmd_ansatz,
    "regimes": _cmd_regimes,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError(parser.format_help())
        if args.command == "serve":
            return _cmd_serve(args)
        config = _load_config(args)
        return _HANDLERS[args.command](args, config)
    except (_UsageError, ConfigError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"service unreachable: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
