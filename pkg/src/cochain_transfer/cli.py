"""Command-line front door: build, verify, transfer, cme, report, all.

Exit status: 0 when every suite entry passed, 1 when any entry failed,
2 for configuration or build errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .backends import BuildError, build_from_config
from .grassmann import FROZEN_CONVENTION, resolve_sign_convention
from .liealg import basis_from_config
from .scalars import to_exact
from .verify import SUITES, Context, SuiteEntry, verify_suite

log = logging.getLogger("cochain_transfer")

GEOMETRIES = ("interval", "circle", "square")
BASES = {"interval": ("lagrange", "pwlinear"), "circle": ("trig-dual", "midpoint-hat"),
         "square": ("whitney-bilinear",)}
COMMANDS = ("build", "verify", "transfer", "cme", "report", "all")


class ConfigError(ValueError):
    """The run configuration is malformed or inconsistent."""


@dataclass
class RunConfig:
    geometry: str
    nodes: Optional[list] = None
    n: Optional[int] = None
    basis: Optional[str] = None
    convention: Optional[str] = None
    window: dict = field(default_factory=lambda: {"K": 1})
    suites: tuple = SUITES
    out: Optional[str] = None
    tol: float = 1e-10

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        geometry = raw.get("geometry")
        if geometry not in GEOMETRIES:
            raise ConfigError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")
        if "nodes" in raw and geometry != "interval":
            raise ConfigError("'nodes' only applies to the interval")
        if "n" in raw and geometry != "circle":
            raise ConfigError("'n' only applies to the circle")
        if "convention" in raw and geometry != "interval":
            raise ConfigError("'convention' only applies to the interval")
        basis = raw.get("basis")
        if basis is not None and basis not in BASES[geometry]:
            raise ConfigError(f"basis {basis!r} is not available for {geometry}")

        window = dict(raw.get("window") or {})
        if "K_or_D" in raw:
            window.setdefault("K_or_D", raw["K_or_D"])
        for key in ("K", "D"):
            if key in raw:
                window.setdefault(key, raw[key])
        if not window:
            window = {"K": 1}

        suites = raw.get("suites", "all")
        if suites == "all":
            suites = SUITES
        elif isinstance(suites, str):
            suites = (suites,)
        unknown = [s for s in suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}; choose from {SUITES}")

        tol = raw.get("tol", 1e-10)
        if isinstance(tol, dict):
            tol = tol.get("float", 1e-10)
        try:
            tol = float(tol)
        except (TypeError, ValueError):
            raise ConfigError(f"tolerance must be a number, got {tol!r}") from None
        if not tol > 0:
            raise ConfigError("tolerances must be positive")

        nodes = raw.get("nodes")
        if nodes is not None:
            try:
                nodes = [to_exact(t) for t in nodes]
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad node list: {exc}") from None
        n = raw.get("n")
        if n is not None and (not isinstance(n, int) or n < 2):
            raise ConfigError("circle needs an integer n >= 2")
        return cls(geometry, nodes, n, basis, raw.get("convention"), window,
                   tuple(suites), raw.get("out"), tol)

    def backend_dict(self) -> dict:
        d = {"geometry": self.geometry}
        if self.nodes is not None:
            d["nodes"] = list(self.nodes)
        if self.n is not None:
            d["n"] = self.n
        if self.basis is not None:
            d["basis"] = self.basis
        if self.convention is not None:
            d["convention"] = self.convention
        return d


@dataclass
class Report:
    config: RunConfig
    entries: List[SuiteEntry] = field(default_factory=list)
    sign_convention: Optional[str] = None
    files: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def failed(self) -> List[SuiteEntry]:
        return [e for e in self.entries if e.failed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_json(self) -> dict:
        # timings are kept out so exact runs export byte-identical files
        return {
            "config": self.config_json(),
            "ok": self.ok,
            "sign_convention": self.sign_convention,
            "entries": [e.to_json() for e in self.entries],
            "files": {k: Path(v).name for k, v in sorted(self.files.items())},
            **self.extras,
        }

    def config_json(self) -> dict:
        d = self.config.backend_dict()
        if self.config.nodes is not None:
            d["nodes"] = [str(t) for t in self.config.nodes]
        d["window"] = self.config.window
        d["suites"] = list(self.config.suites)
        return d

    def summary(self, relative: bool = False) -> str:
        lines = [f"geometry: {self.config.geometry}  window: {self.config.window}"]
        if self.sign_convention:
            lines.append(f"sign convention: {self.sign_convention}")
        for e in self.entries:
            tag = e.status.upper()
            line = f"  [{tag:4}] {e.suite}.{e.name}: {e.value:.3g}"
            if e.detail:
                line += f"  ({e.detail})"
            if e.witness:
                line += f"  witness: {e.witness}"
            lines.append(line)
        for name, path in sorted(self.files.items()):
            lines.append(f"  wrote {name}: {Path(path).name if relative else path}")
        lines.append("result: " + ("ok" if self.ok else f"{len(self.failed)} failing entries"))
        return "\n".join(lines)


def _dump(obj, path: Path):
    path.write_text(json.dumps(obj, indent=1, sort_keys=False) + "\n")


def run(config: RunConfig, command: str = "all", out: Optional[Path] = None) -> Report:
    """Execute ``command`` for ``config``; raises ConfigError/BuildError on bad input."""
    report = Report(config)
    t0 = time.perf_counter()
    try:
        cx = build_from_config(config.backend_dict())
        basis = basis_from_config(config.geometry, config.window)
    except (BuildError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    report.timings["build"] = time.perf_counter() - t0
    ctx = Context(cx, basis, tol=config.tol)
    out = Path(out or config.out) if (out or config.out) else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    def write(name: str, payload):
        if out is not None:
            path = out / f"{name}.json"
            _dump(payload, path)
            report.files[name] = str(path)

    write("complex", cx.to_json())
    if command == "build":
        return report

    suites: tuple = ()
    if command in ("verify", "report", "all"):
        suites = config.suites
    elif command == "cme":
        suites = ("cme",)
    if "cme" in suites or command in ("cme", "report", "all"):
        t = time.perf_counter()
        conv, attempts = resolve_sign_convention()
        ctx._cache["convention"] = conv or FROZEN_CONVENTION
        report.sign_convention = (conv or FROZEN_CONVENTION).name
        report.extras["sign_resolution"] = attempts
        report.timings["sign_resolution"] = time.perf_counter() - t

    for name, res in verify_suite(ctx, suites).items():
        report.entries.extend(res["entries"])
        report.timings[name] = res["seconds"]

    if command in ("transfer", "report", "all"):
        t = time.perf_counter()
        write("structure_constants", ctx.sc.to_json())
        write("tensors", ctx.tensors.to_json())
        if cx.geometry == "square" and ctx.tensors.intermediates.get("xi"):
            write("xi", {str(list(w)): f.to_json() for w, f in
                         sorted(ctx.tensors.intermediates["xi"].items(), key=str)})
        report.timings["transfer"] = time.perf_counter() - t

    if "residual" in ctx._cache:
        write("cme_residual", ctx._cache["residual"].to_json())
        write("action", {"terms": [f"({t})" for t in str(ctx._cache["action"]).split(" + ")]})

    write("report", report.to_json())
    if out is not None:
        (out / "summary.txt").write_text(report.summary(relative=True) + "\n")
        report.files["summary"] = str(out / "summary.txt")
    return report


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cochain-transfer", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="directory for JSON exports")
    p.add_argument("--tol", type=float, help="float tolerance override (circle)")
    p.add_argument("--suite", action="append", choices=SUITES,
                   help="restrict verify to this suite (repeatable)")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        raw = json.loads(Path(args.config).read_text())
        if args.tol is not None:
            raw["tol"] = args.tol
        if args.suite:
            raw["suites"] = args.suite
        config = RunConfig.from_dict(raw)
        report = run(config, args.command, args.out)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({**report.to_json(), "timings": report.timings}, indent=1))
    else:
        print(report.summary())
        log.info("timings: %s", report.timings)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
