"""Thin command-line client for the spdctilt service.

Every subcommand is one POST to the service: by default the FastAPI app is
driven in-process over an ASGI transport, with --server the same request
goes to a running instance instead.  The CLI only reads the config file,
inlines any referenced crystal file, writes returned file payloads under
--out and renders the record; all computation happens service-side.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from . import __version__
from .errors import ConfigError
from .textconfig import parse_sections

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
TIMEOUT = 600.0


def _load_config_payload(config_path: str | None) -> tuple[dict, str | None]:
    """Read the config file and inline a referenced crystal file, if any.

    Returns the request payload and the config's own output_dir (used when
    --out is not given).
    """
    if config_path is None:
        return {}, None
    path = Path(config_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    payload: dict = {"config_text": text}
    source = parse_sections(text, str(path)).get(("source", None), {})
    crystal_file = source.get("crystal_file")
    if crystal_file is not None:
        crystal_path = Path(crystal_file)
        if not crystal_path.is_absolute():
            crystal_path = path.parent / crystal_path
        try:
            payload["crystal_text"] = crystal_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read crystal file {crystal_path}: {exc}") from exc
    return payload, source.get("output_dir")


def _post(server: str | None, route: str, payload: dict) -> httpx.Response:
    if server is not None:
        with httpx.Client(base_url=server, timeout=TIMEOUT) as client:
            return client.post(route, json=payload)

    from .service import app  # imported lazily so --server mode stays light

    async def _run() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://spdctilt.internal", timeout=TIMEOUT
        ) as client:
            return await client.post(route, json=payload)

    return asyncio.run(_run())


def _write_files(out_dir: str, files: dict[str, str]) -> None:
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        target = base / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(files[name].encode("utf-8"))


def _render_record(record: dict, stream) -> None:
    for key in sorted(record):
        value = record[key]
        if isinstance(value, list):
            print(f"{key}:", file=stream)
            for item in value:
                print(f"  {item}", file=stream)
        else:
            print(f"{key} = {value}", file=stream)


def _handle_response(resp: httpx.Response, out_dir: str | None) -> int:
    if resp.status_code != 200:
        try:
            body = resp.json()
        except ValueError:
            body = {}
        error = body.get("error")
        if error is not None:
            print(f"error ({error['kind']}): {error['message']}", file=sys.stderr)
            return EXIT_NUMERICAL if error["kind"] == "numerical" else EXIT_VALIDATION
        print(f"error: HTTP {resp.status_code}: {body or resp.text}", file=sys.stderr)
        return EXIT_VALIDATION
    body = resp.json()
    files = body.get("files", {})
    if out_dir is not None and files:
        _write_files(out_dir, files)
        print(f"wrote {len(files)} file(s) to {out_dir}", file=sys.stdout)
    elif files:
        for name in sorted(files):
            sys.stdout.write(files[name])
    _render_record(body.get("record", {}), sys.stdout)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdctilt",
        description="Joint-spectrum engineering for tilted-pump noncollinear SPDC",
    )
    parser.add_argument("--version", action="version", version=f"spdctilt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="path to a [source] config file")
        p.add_argument("--server", help="base URL of a running service "
                                        "(default: run the service in-process)")
        p.add_argument("--out", help="directory for output files")
        p.add_argument("--tolerance", type=float, default=0.05,
                       help="relative bandwidth tolerance for 'uncorrelated'")

    def gridded(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, help="grid nodes per axis")
        p.add_argument("--strip-phase", action="store_true",
                       help="report Schmidt number/purity of the phase-stripped amplitude")

    p = sub.add_parser("summary", help="derived quantities for one configuration")
    common(p)
    gridded(p)

    p = sub.add_parser("scan-tilt", help="diagonal bandwidth versus tilt angle")
    common(p)
    p.add_argument("--min", type=float, default=-80.0, dest="xi_min", help="deg")
    p.add_argument("--max", type=float, default=80.0, dest="xi_max", help="deg")
    p.add_argument("--step", type=float, default=0.5, help="deg")

    p = sub.add_parser("scan-waist", help="anti-diagonal bandwidth versus pump waist")
    common(p)
    p.add_argument("--min", type=float, default=10.0, dest="w_min", help="um")
    p.add_argument("--max", type=float, default=300.0, dest="w_max", help="um")
    p.add_argument("--points", type=int, default=59)

    p = sub.add_parser("grid", help="full-model and Gaussian-model grids as CSV")
    common(p)
    gridded(p)

    p = sub.add_parser("design", help="tilt/waist pair for a target bandwidth")
    common(p)
    p.add_argument("--target-nm", type=float, required=True,
                   help="target rms bandwidth in nm (both directions)")

    p = sub.add_parser("figures", help="batch dataset behind both figures")
    common(p)
    gridded(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        payload, config_out = _load_config_payload(args.config)
    except ConfigError as exc:
        print(f"error (validation): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = args.out if args.out is not None else config_out

    payload["tolerance"] = args.tolerance
    if args.command == "summary":
        route = "/v1/summary"
        payload.update({"n": args.n, "strip_phase": args.strip_phase})
    elif args.command == "scan-tilt":
        route = "/v1/scan-tilt"
        payload.update({"xi_min_deg": args.xi_min, "xi_max_deg": args.xi_max,
                        "step_deg": args.step})
        payload.pop("tolerance")
    elif args.command == "scan-waist":
        route = "/v1/scan-waist"
        payload.update({"w_min_um": args.w_min, "w_max_um": args.w_max,
                        "n_points": args.points})
    elif args.command == "grid":
        route = "/v1/grid"
        payload.update({"n": args.n, "strip_phase": args.strip_phase})
    elif args.command == "design":
        route = "/v1/design"
        payload.update({"target_bandwidth_nm": args.target_nm})
    elif args.command == "figures":
        route = "/v1/figures"
        payload.update({"n": args.n, "strip_phase": args.strip_phase})
    else:  # pragma: no cover - argparse enforces choices
        raise AssertionError(args.command)

    try:
        resp = _post(args.server, route, payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return _handle_response(resp, out_dir)


if __name__ == "__main__":
    sys.exit(main())
