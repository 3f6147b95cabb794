"""Command-line entry point: ``besq {classify,simulate,mc,verify}``.

Settings come from flags and optionally a flat ``key = value`` file
(``--config``); flags win. Exit codes: 0 success, 1 verification failure,
2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import MODELS, e_at, hit_indicator, below_indicator, mc_estimate, simulate_model, x_at
from .domain import SystemParams, classify, particle_config
from .rng import RngSpec
from .sde import Event, PathAborted, PathRecord, SimulationGrid
from .verification import SUITES, run_suite, table

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

COMMANDS = ("classify", "simulate", "mc", "verify")
_DEFAULT_GRID = SimulationGrid(1.0, 1.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    model: str = "particles"
    p: int | None = None
    alpha: float | None = None
    x0: list[float] | None = None
    Y0: list[float] | None = None
    dt: float | None = None
    horizon: float | None = None
    tol_zero: float = _DEFAULT_GRID.tol_zero
    tol_coll: float = _DEFAULT_GRID.tol_coll
    substep_cap: int = _DEFAULT_GRID.substep_cap
    record_every: int = 1
    seed: int = 0
    reps: int | None = None
    output: str | None = None
    format: str | None = None
    zero_noise: bool = False
    threads: int = 1
    suite: str | None = None
    p_max: int = 8
    cases: int = 500
    statistic: str | None = None

    def params(self) -> SystemParams:
        return SystemParams(self.p, self.alpha)

    def grid(self) -> SimulationGrid:
        return SimulationGrid(self.horizon, self.dt, self.substep_cap, self.tol_coll,
                              self.tol_zero, self.record_every)

    def rng(self) -> RngSpec:
        return RngSpec(self.seed, zero_noise=self.zero_noise)


def _vector(text: str) -> list[float]:
    return [_float(v) for v in text.split(",") if v.strip() != ""]


def _float(text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"malformed number {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"number must be finite, got {text!r}")
    return v


def _int(text) -> int:
    v = _float(text)
    if not v.is_integer():
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(v)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_CONVERT = {
    "model": str, "p": _int, "alpha": _float, "x0": _vector, "Y0": _vector, "dt": _float,
    "horizon": _float, "tol_zero": _float, "tol_coll": _float, "substep_cap": _int,
    "record_every": _int, "seed": _int, "reps": _int, "output": str, "format": str,
    "zero_noise": _bool, "threads": _int, "suite": str, "p_max": _int, "cases": _int,
    "statistic": str,
}


def _key(raw: str) -> str:
    k = raw.strip().replace("-", "_")
    if k.lower() == "y0":
        return "Y0"
    return k


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        k = _key(k)
        if k not in _CONVERT:
            raise ConfigError(f"unknown key {k!r} in {path}:{lineno}")
        out[k] = v.strip()
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="besq", description="Squared Bessel particle systems.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key = value file; flags override it")
    for name in _CONVERT:
        flag = "--" + name.replace("_", "-")
        if name == "zero_noise":
            ap.add_argument(flag, dest=name, action="store_const", const="true", default=None,
                            help="replace the noise by zeros (deterministic check)")
        elif name == "Y0":
            ap.add_argument("--Y0", "--y0", dest="Y0", default=None,
                            help="initial matrix, p*p comma-separated row-major values")
        else:
            ap.add_argument(flag, dest=name, default=None)
    return ap


def parse_config(argv: list[str]) -> RunConfig:
    """Merge the config file (if any) with flags and validate."""
    ns = build_parser().parse_args(argv)
    raw = read_config_file(ns.config) if ns.config else {}
    for k in _CONVERT:
        v = getattr(ns, k)
        if v is not None:
            raw[k] = v
    values = {k: _CONVERT[k](v) for k, v in raw.items()}
    cfg = RunConfig(command=ns.command, **values)
    _validate(cfg)
    return cfg


def _require(cfg: RunConfig, *keys: str):
    for k in keys:
        if getattr(cfg, k) is None:
            raise ConfigError(f"missing required key {k!r} for command {cfg.command}")


def _validate(cfg: RunConfig):
    if cfg.command == "verify":
        _require(cfg, "suite")
        if cfg.suite not in SUITES:
            raise ConfigError(f"unknown suite {cfg.suite!r}; expected one of {', '.join(SUITES)}")
        if cfg.p_max < 2 or cfg.cases < 1:
            raise ConfigError("p_max must be >= 2 and cases >= 1")
        return
    _require(cfg, "p", "alpha")
    if cfg.p < 1:
        raise ConfigError(f"p must be >= 1, got {cfg.p}")
    if cfg.model not in MODELS:
        raise ConfigError(f"unknown model {cfg.model!r}; expected one of {', '.join(MODELS)}")
    if cfg.model == "wishart" and cfg.Y0 is not None:
        if len(cfg.Y0) != cfg.p * cfg.p:
            raise ConfigError(f"Y0 length {len(cfg.Y0)} != p*p {cfg.p * cfg.p}")
    else:
        _require(cfg, "x0")
        if len(cfg.x0) != cfg.p:
            raise ConfigError(f"x0 length {len(cfg.x0)} != p {cfg.p}")
        try:
            particle_config(cfg.x0, cfg.p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if cfg.command in ("simulate", "mc"):
        _require(cfg, "dt", "horizon")
        try:
            cfg.grid()
            cfg.rng()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if cfg.command == "mc":
        _require(cfg, "reps", "statistic")
        if cfg.reps < 2:
            raise ConfigError("reps must be >= 2")
        parse_statistic(cfg.statistic, cfg.p, cfg.horizon, cfg.tol_zero)
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    fmt_default = "csv" if cfg.command == "simulate" else "json"
    cfg.format = cfg.format or fmt_default
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")


def parse_statistic(text: str, p: int, t: float, tol_zero: float):
    """``e<n>``/``x<i>`` at the horizon, ``hit<i>`` or ``neg<i>`` indicators."""
    m = re.fullmatch(r"(e|x|hit|neg)(\d+)", text.strip())
    if not m:
        raise ConfigError(f"unknown statistic {text!r}; use e<n>, x<i>, hit<i> or neg<i>")
    kind, i = m.group(1), int(m.group(2))
    if not 1 <= i <= p:
        raise ConfigError(f"statistic index {i} outside 1..{p}")
    if kind == "e":
        return e_at(i, t)
    if kind == "x":
        return x_at(i, t)
    if kind == "hit":
        return hit_indicator(i)
    return below_indicator(i, 10 * tol_zero)


# -- path output -----------------------------------------------------------


def path_to_csv(path: PathRecord) -> str:
    """Header ``t,X1..Xp`` or ``t,e1..ep``; floats in shortest round-trip form."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(path.columns)
    for t, row in zip(path.times, path.states):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def read_path_csv(text: str, kind: str | None = None) -> PathRecord:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if kind is None:
        kind = "polys" if header[1:2] == ["e1"] else "particles"
    data = np.array([[float(v) for v in r] for r in body]).reshape(len(body), len(header))
    return PathRecord(kind, data[:, 0].copy(), data[:, 1:].copy())


def events_json(path: PathRecord) -> str:
    return json.dumps({"events": [ev.to_dict() for ev in path.events], "meta": path.meta},
                      default=_json_default, indent=2)


def read_events_json(text: str) -> list[Event]:
    return [Event(d["kind"], d["time"], d["value"], tuple(d["index"])) for d in json.loads(text)["events"]]


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _start(cfg: RunConfig):
    if cfg.model == "wishart" and cfg.Y0 is not None:
        return np.array(cfg.Y0, dtype=float).reshape(cfg.p, cfg.p)
    return cfg.x0


def _write_path(cfg: RunConfig, path: PathRecord):
    if cfg.format == "csv":
        _emit(path_to_csv(path), cfg.output)
        if cfg.output:
            _emit(events_json(path), cfg.output + ".events.json")
    else:
        doc = {"columns": path.columns, "rows": np.column_stack([path.times, path.states]).tolist(),
               "events": [ev.to_dict() for ev in path.events], "meta": path.meta}
        _emit(json.dumps(doc, default=_json_default), cfg.output)


def run(cfg: RunConfig) -> int:
    if cfg.command == "classify":
        report = classify(cfg.params(), cfg.x0)
        _emit(json.dumps(report.to_dict(), indent=2), cfg.output)
        return EXIT_OK
    if cfg.command == "verify":
        results = run_suite(cfg.suite, p_max=cfg.p_max, cases=cfg.cases, seed=cfg.seed)
        print(table(results))
        ok = all(r.passed for r in results)
        print(f"suite {cfg.suite}: {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_VERIFY
    if cfg.command == "simulate":
        try:
            path = simulate_model(cfg.model, cfg.params(), _start(cfg), cfg.grid(), cfg.rng())
        except PathAborted as exc:
            if exc.path is not None:
                _write_path(cfg, exc.path)
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ABORT
        _write_path(cfg, path)
        return EXIT_OK
    stat = parse_statistic(cfg.statistic, cfg.p, cfg.horizon, cfg.tol_zero)
    summary = mc_estimate(stat, cfg.params(), _start(cfg), cfg.grid(), cfg.reps, cfg.rng(),
                          model=cfg.model, threads=cfg.threads)
    doc = dict(summary.to_dict(), statistic=cfg.statistic, model=cfg.model)
    _emit(json.dumps(doc, indent=2, default=_json_default), cfg.output)
    if summary.n_completed == 0:
        print("error: every replicate aborted", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # inputs that pass parsing but violate a model precondition
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
