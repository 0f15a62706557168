"""Run configuration: parsing, validation, and canonical re-emission.

JSON is the single source of truth; exact rationals travel as strings like
"2/3" so no precision is lost.  Emission is canonical (sorted keys), so
parse -> emit -> parse is the identity and artifacts are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .model import ModelParams
from .ring import MPoly


class ConfigError(Exception):
    pass


KNOWN_TASKS = (
    "oracle-vs-schur",
    "disk",
    "cylinder",
    "h-color-independence",
    "artificial-poles",
    "set-to-zero",
    "insertion-identity",
    "tr-vs-oracle",
    "critical-values",
    "exp-extension",
)


@dataclass
class RunConfig:
    model: ModelParams
    d_max: int = 3
    connected: bool = True
    run_max: int = 6
    exp_run_max: int | None = None
    toprec_t: complex = 1e-3
    g_max: int = 1
    n_max: int = 3
    tol: float = 1e-6
    depth_margin: int = 4
    tasks: tuple = KNOWN_TASKS
    out_dir: str = "out"
    formats: tuple = ("json",)
    raw: dict = field(default_factory=dict)


def _scalar_in(v, mode):
    if isinstance(v, str):
        return Fraction(v) if mode == "exact" else complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    if mode == "exact":
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, float) and v == int(v):
            return Fraction(int(v))
        raise ConfigError(f"exact mode needs rational values, got {v!r}")
    return complex(v)


def _scalar_out(v):
    if isinstance(v, (int, Fraction)):
        return str(v)
    z = complex(v)
    return [z.real, z.imag]


def parse_config(data: dict) -> RunConfig:
    try:
        m = data["model"]
        mode = m.get("scalar_mode", "exact")
        params = ModelParams(
            m=int(m["m"]), r=int(m["r"]),
            u=tuple(_scalar_in(x, mode) for x in m["u"]),
            p=tuple(_scalar_in(x, mode) for x in m["p"]),
            q=tuple(_scalar_in(x, mode) for x in m["q"]),
            T=int(m.get("T", data.get("spectral", {}).get("T", 4))),
            u_exp=(_scalar_in(m["u_exp"], mode)
                   if m.get("u_exp") is not None else None),
            scalar_mode=mode,
            allow_zero_u=bool(m.get("allow_zero_u", False)),
        )
        if "spectral" in data and "T" in data["spectral"]:
            sT = int(data["spectral"]["T"])
            if sT != params.T:
                params = ModelParams(
                    m=params.m, r=params.r, u=params.u, p=params.p, q=params.q,
                    T=sT, u_exp=params.u_exp, scalar_mode=params.scalar_mode,
                    allow_zero_u=params.allow_zero_u)
        oracle = data.get("oracle", {})
        toprec = data.get("toprec", {})
        tv = toprec.get("t_value", [1e-3, 0.0])
        tasks = tuple(data.get("tasks", KNOWN_TASKS))
        for t in tasks:
            if t not in KNOWN_TASKS:
                raise ConfigError(f"unknown task {t!r}")
        output = data.get("output", {})
        formats = tuple(output.get("formats", ["json"]))
        for f in formats:
            if f not in ("json", "csv"):
                raise ConfigError(f"unknown format {f!r}")
        cfg = RunConfig(
            model=params,
            d_max=int(oracle.get("d_max", 3)),
            connected=bool(oracle.get("connected", True)),
            run_max=int(oracle.get("run_max", 6)),
            exp_run_max=(int(oracle["exp_run_max"])
                         if oracle.get("exp_run_max") is not None else None),
            toprec_t=complex(tv[0], tv[1]),
            g_max=int(toprec.get("g_max", 1)),
            n_max=int(toprec.get("n_max", 3)),
            tol=float(toprec.get("tol", 1e-6)),
            depth_margin=int(toprec.get("depth_margin", 4)),
            tasks=tasks,
            out_dir=str(output.get("dir", "out")),
            formats=formats,
            raw=data,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    _validate_ranges(cfg)
    return cfg


def _validate_ranges(cfg: RunConfig):
    if not (1 <= cfg.d_max <= 8):
        raise ConfigError("oracle.d_max must be in 1..8")
    if cfg.run_max < 0 or (cfg.exp_run_max is not None and cfg.exp_run_max < 0):
        raise ConfigError("run bounds must be nonnegative")
    if not (0 <= cfg.g_max <= 3 and 1 <= cfg.n_max <= 5):
        raise ConfigError("toprec.g_max in 0..3 and n_max in 1..5")
    if cfg.tol <= 0:
        raise ConfigError("toprec.tol must be positive")
    if cfg.model.has_exp and cfg.exp_run_max is None:
        raise ConfigError("exponential models need oracle.exp_run_max")


def emit_config(cfg: RunConfig) -> dict:
    m = cfg.model
    out = {
        "model": {
            "m": m.m, "r": m.r,
            "u": [_scalar_out(x) for x in m.u],
            "p": [_scalar_out(x) for x in m.p],
            "q": [_scalar_out(x) for x in m.q],
            "T": m.T,
            "u_exp": (_scalar_out(m.u_exp) if m.u_exp is not None
                      and not isinstance(m.u_exp, MPoly) else None),
            "scalar_mode": m.scalar_mode,
            "allow_zero_u": m.allow_zero_u,
        },
        "oracle": {
            "d_max": cfg.d_max, "connected": cfg.connected,
            "run_max": cfg.run_max, "exp_run_max": cfg.exp_run_max,
        },
        "spectral": {"T": m.T},
        "toprec": {
            "t_value": [cfg.toprec_t.real, cfg.toprec_t.imag],
            "g_max": cfg.g_max, "n_max": cfg.n_max, "tol": cfg.tol,
            "depth_margin": cfg.depth_margin,
        },
        "tasks": list(cfg.tasks),
        "output": {"dir": cfg.out_dir, "formats": list(cfg.formats)},
    }
    return out


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"{path}: {e}") from e
    return parse_config(data)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(emit_config(cfg), indent=1, sort_keys=True)
