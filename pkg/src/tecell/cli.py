"""Command line client.

Commands run in-process by default; with ``--server URL`` they are sent to a
running ``tecell serve`` instance and only the artifacts are written locally.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from . import api
from .config import load_config
from .errors import ConfigError, TecellError
from .io import write_json

OUTPUT_ENV = "TECELL_OUTPUT_DIR"
log = logging.getLogger("tecell")


class LocalBackend:
    def run(self, cfg_dict, output_dir):
        from .config import parse_config
        return api.run(parse_config(cfg_dict), output_dir)

    def certify(self, cfg_dict, symbolic):
        from .config import parse_config
        return api.certify(parse_config(cfg_dict), symbolic)

    def sweep(self, req: api.SweepRequest):
        return api.sweep(req.config, req.param, req.start, req.stop, req.steps, req.mode, req.workers)


class RemoteBackend:
    def __init__(self, url: str, timeout: float = 600.0):
        import httpx
        self.client = httpx.Client(base_url=url.rstrip("/"), timeout=timeout)

    def _post(self, path, payload, model):
        resp = self.client.post(path, json=payload)
        if resp.status_code == 422:
            raise ConfigError(resp.json().get("detail", resp.text))
        if resp.status_code != 200:
            raise TecellError(f"server error {resp.status_code}: {resp.text}")
        return model.model_validate(resp.json())

    def run(self, cfg_dict, output_dir):
        return self._post("/run", {"config": cfg_dict, "output_dir": output_dir}, api.RunResponse)

    def certify(self, cfg_dict, symbolic):
        return self._post("/certify", {"config": cfg_dict, "symbolic": symbolic}, api.CertifyResponse)

    def sweep(self, req: api.SweepRequest):
        return self._post("/sweep", req.model_dump(), api.SweepResponse)


def _output_dir(args, cfg) -> Path:
    chosen = args.output or os.environ.get(OUTPUT_ENV) or cfg.output.directory
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_dict(cfg) -> dict:
    return cfg.model_dump(mode="json")


def cmd_run(args, backend) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    res = backend.run(_config_dict(cfg), str(out / "snapshots"))
    (out / "trajectory.csv").write_text(res.trajectory_csv)
    summary = res.model_dump(exclude={"trajectory_csv", "runtime_s", "snapshots"})
    write_json(out / "run_summary.json", summary)
    write_json(out / "run_meta.json", api.run_metadata(res.runtime_s) | {"snapshots": res.snapshots})
    for v in res.validation:
        print(f"warning: hypothesis violated: {v}", file=sys.stderr)
    if not res.completed:
        print(f"error: {res.failure} (partial trajectory written to {out})", file=sys.stderr)
        return 1
    its = max((s.iterations for s in res.steps), default=0)
    print(f"completed {len(res.steps)} steps, at most {its} Picard iterations per step; "
          f"trajectory written to {out / 'trajectory.csv'}")
    return 0


def format_report(res: api.CertifyResponse) -> str:
    rep = res.report
    lines = [f"certified: {'yes' if rep.certified else 'no'}"
             + ("" if rep.certified else f"  (fails: {rep.reason})"),
             f"A# = {rep.A_sharp:.6g}   B# = {rep.B_sharp:.6g}",
             f"B0 = {rep.B0:.6g}   B = {rep.B:.6g}   margin 1 - B0 = {rep.margin:.6g}", "",
             f"{'condition':<18}{'value':>14}{'margin':>14}  holds"]
    for c in rep.conditions:
        val = "undefined" if c.value is None else f"{c.value:.6g}"
        mar = "-" if c.margin is None else f"{c.margin:.6g}"
        lines.append(f"{c.name:<18}{val:>14}{mar:>14}  {'yes' if c.holds else 'no'}")
    lines += ["", f"{'species':<10}{'A0':>14}{'A':>14}{'B_i':>14}{'radius':>14}"]
    for s in rep.species:
        bi = "undefined" if s.B_i is None else f"{s.B_i:.6g}"
        r = "-" if s.radius is None else f"{s.radius:.6g}"
        lines.append(f"{s.name:<10}{s.A0:>14.6g}{s.A:>14.6g}{bi:>14}{r:>14}")
    if rep.R is not None:
        lines.append(f"R = {rep.R:.6g}")
    if res.regression is not None:
        lines += ["", f"{'quantity':<20}{'monomial':<24}{'published':>12}{'computed':>14}{'dev':>9}  ok"]
        for r in res.regression.rows:
            lines.append(f"{r.quantity:<20}{r.monomial:<24}{r.published:>12.6g}{r.computed:>14.6g}"
                         f"{r.deviation:>9.2%}  {'yes' if r.within else 'no'}")
    return "\n".join(lines)


def cmd_certify(args, backend) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    res = backend.certify(_config_dict(cfg), True if args.symbolic else None)
    write_json(out / "certificate.json", res.model_dump(mode="json"))
    print(format_report(res))
    return 0 if res.report.certified else 2


def cmd_sweep(args, backend) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    req = api.SweepRequest(config=_config_dict(cfg), param=args.param, start=args.start,
                           stop=args.stop, steps=args.steps, mode=args.mode, workers=args.workers)
    res = backend.sweep(req)
    (out / "sweep.csv").write_text(res.csv)
    print(f"{len(res.rows)} rows written to {out / 'sweep.csv'}")
    return 0


def cmd_serve(args, backend) -> int:
    import uvicorn
    uvicorn.run("tecell.service:app", host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tecell", description=__doc__.splitlines()[0])
    p.add_argument("--server", help="send the command to a running service at this URL")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the coupled transient")
    r.add_argument("config")
    r.add_argument("--output", help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("certify", help="evaluate the existence certificate")
    c.add_argument("config")
    c.add_argument("--symbolic", action="store_true",
                   help="keep C, M1, M2 and time factors symbolic and compare prefactors")
    c.add_argument("--output")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("sweep", help="repeat certify or run over a parameter range")
    s.add_argument("config")
    s.add_argument("--param", required=True,
                   help=f"dotted config key or one of {', '.join(api.PARAM_ALIASES)}")
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--mode", choices=("certify", "run"), default="certify")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--output")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("serve", help="start the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    v.set_defaults(func=cmd_serve)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    backend = RemoteBackend(args.server) if args.server else LocalBackend()
    try:
        return args.func(args, backend)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (TecellError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
