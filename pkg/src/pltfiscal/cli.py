"""Command-line front end.

    pltfiscal classify --model nk --rule plt --set mix=pmaf
    pltfiscal irf --config run.ini --out irf.csv
    pltfiscal welfare --set branch=plt --out curves.csv
    pltfiscal map --model leeper --out map.json

Configuration is an INI file with ``[model]``, ``[rule]``, ``[experiment]``
and ``[output]`` sections.  ``--model``, ``--rule`` and ``--set`` override it,
in that order.  ``--set`` takes ``key=value`` or ``section.key=value``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .determinacy import (leeper_it_predicate, leeper_predicate, nk_predicate,
                          regime_tag, sweep)
from .model import FISCALLY_LED, MONETARY_LED, ModelParams, build_leeper, build_nk
from .simulate import (HorizonTooShortError, ShockSpec, ZLBConvergenceError, fmt, irf,
                       welfare_loss, welfare_sweep, zlb_irf, WELFARE_HORIZON,
                       ZLB_DEMAND_SIZE)
from .solver import NotDeterminateError, classify, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NOT_DETERMINATE = 3
EXIT_ZLB = 4

FLAT_TOL = 1e-10

MIXES = {"ampf": MONETARY_LED, "pmaf": FISCALLY_LED}

# accepted keys per section, with their parsers
_STRUCTURAL = ("beta", "pi_ss", "R_ss", "c_ss", "b_ss", "m_ss", "tau_ss", "kappa",
               "rho_theta", "rho_psi", "rho_eps")
SCHEMA = {
    "model": {"kind": str, **{k: float for k in _STRUCTURAL}},
    "rule": {"kind": str, "mix": str, "phi_p": float, "phi_pi": float,
             "delta": float, "gamma": float},
    "experiment": {"shock": str, "size": float, "sign": int, "persistence": float,
                   "horizon": int, "zlb": bool, "lower_bound": float,
                   "branch": str, "coef_min": float, "coef_max": float, "coef_n": int,
                   "gamma_min": float, "gamma_max": float, "gamma_n": int,
                   "weights": str},
    "output": {"path": str, "format": str},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model_kind: str = "nk"
    rule: str = "plt"
    params: ModelParams = field(default_factory=ModelParams)
    experiment: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str | None = None

    def exp(self, key: str, default=None):
        return self.experiment.get(key, default)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    low = text.strip().lower()
    if low in ("-inf", "-infinity"):
        return -math.inf
    return float(low)


def _convert(section: str, key: str, raw: str, where: str):
    kind = SCHEMA[section][key]
    try:
        if kind is bool:
            return _parse_bool(raw)
        if kind is float:
            return _parse_float(raw)
        if kind is int:
            return int(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {section}.{key}: {exc}") from None


def _line_numbers(text: str) -> dict:
    """(section, key) -> line number, for diagnostics."""
    out = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            out[(section, None)] = n
        elif "=" in s and not s.startswith(("#", ";")) and section is not None:
            out[(section, s.split("=", 1)[0].strip().lower())] = n
    return out


def read_config(path: str | Path) -> dict:
    """Parse an INI file into ``{section: {key: value}}`` with typed values."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    lines = _line_numbers(text)
    values: dict = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}:{lines.get((section, None), '?')}: "
                              f"unknown section [{section}]")
        values[section] = {}
        for key, raw in parser.items(section):
            where = f"{path}:{lines.get((section, key), '?')}"
            if key not in SCHEMA[section]:
                raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
            values[section][key] = _convert(section, key, raw, where)
    return values


def _apply_override(values: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"--set expects key=value, got {item!r}")
    name, raw = item.split("=", 1)
    name = name.strip()
    if "." in name:
        section, key = name.split(".", 1)
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"--set: unknown key {name!r}")
    else:
        owners = [s for s, keys in SCHEMA.items() if name in keys]
        if not owners:
            raise ConfigError(f"--set: unknown key {name!r}")
        if len(owners) > 1:
            raise ConfigError(f"--set: key {name!r} is ambiguous; use one of "
                              + ", ".join(f"{s}.{name}" for s in owners))
        section, key = owners[0], name
    values.setdefault(section, {})[key] = _convert(section, key, raw, "--set")


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    if args.model:
        values.setdefault("model", {})["kind"] = args.model
    if args.rule:
        values.setdefault("rule", {})["kind"] = args.rule
    for item in args.set or ():
        _apply_override(values, item)

    model = dict(values.get("model", {}))
    rule = dict(values.get("rule", {}))
    kind = model.pop("kind", "nk")
    if kind not in ("leeper", "nk"):
        raise ConfigError(f"model.kind must be 'leeper' or 'nk', got {kind!r}")
    rule_kind = rule.pop("kind", "plt")
    if rule_kind not in ("it", "plt", "general"):
        raise ConfigError(f"rule.kind must be 'it', 'plt' or 'general', got {rule_kind!r}")
    fields = dict(model)
    mix = rule.pop("mix", None)
    if mix is not None:
        if mix.lower() not in MIXES:
            raise ConfigError(f"rule.mix must be one of {sorted(MIXES)}, got {mix!r}")
        fields.update(MIXES[mix.lower()])
    fields.update(rule)
    try:
        params = ModelParams(**fields).with_rule(rule_kind)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None

    output = values.get("output", {})
    out = args.out or output.get("path")
    fmt_ = args.format or output.get("format")
    if fmt_ is not None and fmt_ not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt_!r}")
    return RunConfig(kind, rule_kind, params, dict(values.get("experiment", {})), out, fmt_)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _build(cfg: RunConfig):
    return build_leeper(cfg.params) if cfg.model_kind == "leeper" else build_nk(cfg.params)


def _analytic(cfg: RunConfig):
    p = cfg.params
    if cfg.model_kind == "leeper" and cfg.rule == "plt":
        return leeper_predicate(p.phi_p, p.gamma, p.beta, p.pi_ss)
    if cfg.model_kind == "leeper" and cfg.rule == "it":
        return leeper_it_predicate(p.phi_pi, p.gamma, p.beta, p.pi_ss)
    if cfg.model_kind == "nk" and cfg.rule == "plt":
        return nk_predicate(p.phi_p, p.gamma, p.beta, p.tau_over_b, p.kappa)
    return None


def cmd_classify(cfg: RunConfig) -> int:
    try:
        model = _build(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cls = classify(model)
    tag = regime_tag(cfg.params, cfg.model_kind, cls.verdict)
    label = f"{cls.verdict} ({tag})" if cls.is_determinate else str(cls.verdict)
    rv = _analytic(cfg)
    result = {
        "model": cfg.model_kind,
        "rule": cfg.rule,
        "numerical": label,
        "analytic": rv.label if rv is not None else None,
        "analytic_notes": list(rv.notes) if rv is not None else [],
        "n_unstable": cls.n_unstable,
        "n_jumps": cls.n_jumps,
        "eigenvalues": [{k: float(fmt(v)) for k, v in row.items()} for row in cls.table()],
    }
    if cfg.fmt == "json":
        _emit(json.dumps(result, indent=1) + "\n", cfg.out)
        return EXIT_OK
    lines = [label,
             f"analytic: {result['analytic'] or 'n/a'}",
             f"unstable roots: {cls.n_unstable} for {cls.n_jumps} jump variables"]
    lines += [f"  note: {n}" for n in result["analytic_notes"]]
    lines.append(f"{'real':>16} {'imag':>16} {'modulus':>16}")
    for row in cls.table():
        lines.append(f"{fmt(row['real']):>16} {fmt(row['imag']):>16} {fmt(row['modulus']):>16}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _sign(x: float) -> str:
    if abs(x) <= FLAT_TOL:
        return "0"
    return "+" if x > 0 else "-"


def irf_summary(series) -> str:
    parts = [f"shock={series.shock.name}", f"regime={series.regime}", f"rule={series.rule}"]
    keys = [k for k in ("y", "pi", "R") if k in series.paths]
    if keys and all(np.max(np.abs(series[k])) <= FLAT_TOL for k in keys) \
            and series.shock.innovation != 0 and series.shock.name == "fiscal":
        parts.append(",".join("π" if k == "pi" else k for k in keys) + " flat (Ricardian)")
    else:
        for k in keys:
            name = "π" if k == "pi" else k
            parts.append(f"{name} impact: {_sign(series[k][0])}")
    if series.binding is not None:
        window = series.binding_window
        if window:
            parts.append(f"binding window: t={window[0]}..{window[-1]}"
                         + ("" if len(window) == window[-1] - window[0] + 1 else " (gaps)"))
        else:
            parts.append("binding window: none")
    return " | ".join(parts)


def _shock(cfg: RunConfig, zlb: bool) -> ShockSpec:
    name = cfg.exp("shock", "demand")
    default_size = ZLB_DEMAND_SIZE if zlb and name == "demand" else 0.01
    try:
        return ShockSpec(name, cfg.exp("size", default_size), cfg.exp("sign", -1),
                         cfg.exp("persistence"))
    except ValueError as exc:
        raise ConfigError(f"experiment: {exc}") from None


def cmd_irf(cfg: RunConfig) -> int:
    zlb = bool(cfg.exp("zlb", False)) or "lower_bound" in cfg.experiment
    if zlb and cfg.model_kind != "nk":
        raise ConfigError("the lower-bound experiment needs model.kind = nk")
    shock = _shock(cfg, zlb)
    horizon = cfg.exp("horizon", 40)
    if horizon < 1:
        raise ConfigError("experiment.horizon must be at least 1")
    params = shock.apply_to(cfg.params)
    model = build_leeper(params) if cfg.model_kind == "leeper" else build_nk(params)
    if zlb:
        series = zlb_irf(model, shock, horizon, cfg.exp("lower_bound"))
    else:
        series = irf(solve(model), shock, horizon)
    if cfg.fmt == "json":
        body = {"t": list(range(horizon))}
        body.update({k: [float(fmt(v)) for v in series[k]] for k in series.paths})
        if series.binding is not None:
            body["binding"] = [int(b) for b in series.binding]
        text = json.dumps({"summary": irf_summary(series), "paths": body}, indent=1) + "\n"
    else:
        text = series.to_csv()
    _emit(text, cfg.out)
    print(irf_summary(series), file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def _grid(cfg: RunConfig, lo: float, hi: float, n: int, prefix: str) -> np.ndarray:
    lo = cfg.exp(f"{prefix}_min", lo)
    hi = cfg.exp(f"{prefix}_max", hi)
    n = cfg.exp(f"{prefix}_n", n)
    if n < 1 or not lo <= hi:
        raise ConfigError(f"experiment: bad {prefix} grid ({lo}, {hi}, {n})")
    return np.linspace(lo, hi, n)


def _weights(cfg: RunConfig) -> tuple[float, float, float]:
    raw = cfg.exp("weights")
    if raw is None:
        return cfg.params.weights
    try:
        w = tuple(float(x) for x in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"experiment.weights: cannot parse {raw!r}") from None
    if len(w) != 3 or any(x < 0 for x in w):
        raise ConfigError("experiment.weights needs three nonnegative numbers")
    return w


def reference_losses(params: ModelParams, shock: ShockSpec, weights) -> dict:
    """Losses at the two reference parameterizations under both rules."""
    out = {}
    for label, mix in (("AM/PF", MONETARY_LED), ("PM/AF", FISCALLY_LED)):
        out[label] = {}
        for rule in ("it", "plt"):
            p = shock.apply_to(params).replace(**mix).with_rule(rule)
            series = irf(solve(build_nk(p)), shock, WELFARE_HORIZON)
            out[label][rule] = welfare_loss(series, weights, p.beta).to_dict()
    return out


def cmd_welfare(cfg: RunConfig) -> int:
    if cfg.model_kind != "nk":
        raise ConfigError("welfare sweeps use model.kind = nk")
    branch = cfg.exp("branch", cfg.rule if cfg.rule in ("it", "plt") else "plt")
    if branch not in ("it", "plt"):
        raise ConfigError(f"experiment.branch must be 'it' or 'plt', got {branch!r}")
    lo, hi = (0.0, 3.0) if branch == "it" else (-1.5, 3.0)
    grid = _grid(cfg, lo, hi, 61, "coef")
    shock = _shock(cfg, False)
    weights = _weights(cfg)
    curves = welfare_sweep(branch, grid, cfg.params, shock, weights,
                           horizon=cfg.exp("horizon", WELFARE_HORIZON))
    if cfg.fmt == "json":
        text = json.dumps(curves.to_dict(), indent=1) + "\n"
    else:
        text = curves.to_csv()
    _emit(text, cfg.out)
    totals = reference_losses(cfg.params, shock, weights)
    report = {"branch": branch,
              "determinate_points": len(curves.determinate_rows()),
              "gaps": len(curves.rows) - len(curves.determinate_rows()),
              "reference": totals}
    print(json.dumps(report, indent=1), file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_map(cfg: RunConfig) -> int:
    if cfg.rule != "plt":
        raise ConfigError("regime maps are defined for the PLT rule")
    coef = _grid(cfg, -3.0, 3.0, 101, "coef")
    gamma_hi = 2.5 if cfg.model_kind == "leeper" else 10.0
    gamma = _grid(cfg, 0.0, gamma_hi, 101, "gamma")
    result = sweep(cfg.model_kind, coef, gamma, cfg.params)
    _emit(result.to_json() + "\n", cfg.out)
    print(f"{cfg.model_kind} map {coef.size}x{gamma.size}: "
          f"{int(result.disagreement.sum())} disagreement(s)",
          file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "irf": cmd_irf, "welfare": cmd_welfare,
            "map": cmd_map}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--model", choices=("leeper", "nk"))
    common.add_argument("--rule", choices=("it", "plt", "general"))
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a configuration value (repeatable)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    parser = argparse.ArgumentParser(
        prog="pltfiscal",
        description="Determinacy, impulse responses and welfare under IT and PLT rules.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="regime of one parameterization")
    sub.add_parser("irf", parents=[common], help="impulse responses, optionally with the lower bound")
    sub.add_parser("welfare", parents=[common], help="loss along a policy-coefficient grid")
    sub.add_parser("map", parents=[common], help="analytic and numerical regime map")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotDeterminateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_DETERMINATE
    except (ZLBConvergenceError, HorizonTooShortError) as exc:
        print(f"lower-bound error: {exc}", file=sys.stderr)
        return EXIT_ZLB
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
