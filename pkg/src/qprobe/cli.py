"""Command-line front end: reproduction recipes as five subcommands.

    beta-table    dephasing exponent and its g-derivative on a (g, tau) grid
    qsnr-surface  QSNR over a (g, tau) grid, long-format
    optimal       optimal interaction time and maximized QSNR per g
    campaign      simulated MLE campaign: records CSV plus summary JSON
    validate      Monte Carlo check of the dephasing law at one point

Settings come from flags and/or an INI-style config file (section per
command); flags override the file.  Every output starts with comment lines
recording the tool version, the resolved configuration, and the base seed;
floats are printed with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dynamics import (
    coherence_monte_carlo,
    default_step,
    sample_trajectories,
)
from .experiment import CAMPAIGN_CSV_COLUMNS, CampaignConfig, run_campaign
from .kernels import AdimensionalPoint, NoiseKernel, beta, dbeta_dg
from .metrology import optimal_time, qsnr

OUT_DIR_ENV = "QPROBE_OUT_DIR"

# dense-covariance kernels cap their trajectory grid; OU streams exactly
COVARIANCE_MAX_STEPS = 2048


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _parse_floats(text: str) -> tuple[float, ...]:
    values = tuple(float(tok) for tok in text.replace(" ", "").split(",") if tok)
    if not values:
        raise ValueError(f"empty list: {text!r}")
    return values


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)


def _parse_range(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def make_kernel(name: str, alpha: float | None) -> NoiseKernel:
    if name == "ou":
        return NoiseKernel.ou()
    if name == "gauss":
        return NoiseKernel.gaussian()
    if name == "pl":
        return NoiseKernel.power_law(3.0 if alpha is None else alpha)
    raise ValueError(f"unknown kernel {name!r} (expected ou, gauss, or pl)")


# command -> ordered option schema: name -> (parser, default)
_COMMON_SCHEMA = {
    "kernel": (str, "ou"),
    "alpha": (float, None),
    "format": (str, "csv"),
    "seed": (int, 0),
}

_SCHEMAS = {
    "beta-table": {
        **_COMMON_SCHEMA,
        "g_list": (_parse_floats, None),
        "tau_list": (_parse_floats, None),
    },
    "qsnr-surface": {
        **_COMMON_SCHEMA,
        "g_range": (_parse_range, (0.01, 100.0)),
        "tau_range": (_parse_range, (0.0, 10.0)),
        "grid_density": (int, 50),
    },
    "optimal": {
        **_COMMON_SCHEMA,
        "g_list": (_parse_floats, None),
    },
    "campaign": {
        **_COMMON_SCHEMA,
        "g_true": (float, None),
        "m_schedule": (_parse_ints, (100, 1000, 10000, 100000)),
        "replicas": (int, 100),
        "tau_policy": (str, "optimal"),
        "tau": (float, None),
    },
    "validate": {
        **_COMMON_SCHEMA,
        "g": (float, None),
        "tau": (float, None),
        "n_traj": (int, 10000),
        "trajectories_out": (str, None),
    },
}

_REQUIRED = {
    "beta-table": ("g_list", "tau_list"),
    "qsnr-surface": (),
    "optimal": ("g_list",),
    "campaign": ("g_true",),
    "validate": ("g", "tau"),
}


def _resolve(args: argparse.Namespace, command: str) -> dict:
    """Merge defaults, config-file section, and explicit flags (in that
    order of increasing precedence) into one settings dict."""
    schema = _SCHEMAS[command]
    settings = {key: default for key, (_, default) in schema.items()}
    if args.config is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = parser.read(args.config)
        if not read:
            raise ValueError(f"config file not found: {args.config}")
        for section in ("common", command):
            if parser.has_section(section):
                for key, raw in parser.items(section):
                    key = key.replace("-", "_")
                    if key not in schema:
                        raise ValueError(
                            f"unknown config key {key!r} in section [{section}]"
                        )
                    settings[key] = schema[key][0](raw)
    for key in schema:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    missing = [k for k in _REQUIRED[command] if settings.get(k) is None]
    if missing:
        raise ValueError(f"missing required setting(s): {', '.join(missing)}")
    return settings


def _out_path(args: argparse.Namespace, command: str, fmt: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    return base / f"{command}.{fmt}"


def _meta_lines(command: str, settings: dict) -> list[str]:
    lines = [f"# qprobe {__version__}", f"# command = {command}"]
    for key in sorted(k for k in settings if k != "seed"):
        value = settings[key]
        if isinstance(value, tuple):
            value = ",".join(_fmt(v) for v in value)
        lines.append(f"# {key} = {_fmt(value)}")
    lines.append(f"# base_seed = {settings['seed']}")
    return lines


def _meta_dict(command: str, settings: dict) -> dict:
    config = {
        k: (list(v) if isinstance(v, tuple) else v)
        for k, v in settings.items()
        if k != "seed"
    }
    return {
        "tool": "qprobe",
        "version": __version__,
        "command": command,
        "config": config,
        "base_seed": settings["seed"],
    }


def _write_table(path: Path, fmt: str, command: str, settings: dict, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            for line in _meta_lines(command, settings):
                fh.write(line + "\n")
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    else:
        payload = {
            "_meta": _meta_dict(command, settings),
            "columns": list(columns),
            "rows": [list(row) for row in rows],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")


def cmd_beta_table(args) -> int:
    settings = _resolve(args, "beta-table")
    kernel = make_kernel(settings["kernel"], settings["alpha"])
    settings["alpha"] = kernel.alpha
    rows = []
    for g in settings["g_list"]:
        for tau in settings["tau_list"]:
            point = AdimensionalPoint(g, tau)
            rows.append((g, tau, beta(kernel, point), dbeta_dg(kernel, point)))
    _write_table(
        _out_path(args, "beta-table", settings["format"]),
        settings["format"],
        "beta-table",
        settings,
        ("g", "tau", "beta", "dbeta_dg"),
        rows,
    )
    return 0


def cmd_qsnr_surface(args) -> int:
    settings = _resolve(args, "qsnr-surface")
    kernel = make_kernel(settings["kernel"], settings["alpha"])
    settings["alpha"] = kernel.alpha
    n = settings["grid_density"]
    if n < 2:
        raise ValueError("grid density must be at least 2")
    g_lo, g_hi = settings["g_range"]
    tau_lo, tau_hi = settings["tau_range"]
    if g_lo <= 0.0 or g_hi <= g_lo:
        raise ValueError("g range must satisfy 0 < lo < hi")
    if tau_lo < 0.0 or tau_hi <= tau_lo:
        raise ValueError("tau range must satisfy 0 <= lo < hi")
    log_lo, log_hi = math.log(g_lo), math.log(g_hi)
    gs = [math.exp(log_lo + (log_hi - log_lo) * i / (n - 1)) for i in range(n)]
    taus = [tau_lo + (tau_hi - tau_lo) * j / (n - 1) for j in range(n)]
    rows = [
        (g, tau, qsnr(kernel, AdimensionalPoint(g, tau))) for g in gs for tau in taus
    ]
    _write_table(
        _out_path(args, "qsnr-surface", settings["format"]),
        settings["format"],
        "qsnr-surface",
        settings,
        ("g", "tau", "qsnr"),
        rows,
    )
    return 0


def cmd_optimal(args) -> int:
    settings = _resolve(args, "optimal")
    kernel = make_kernel(settings["kernel"], settings["alpha"])
    settings["alpha"] = kernel.alpha
    rows = []
    for g in settings["g_list"]:
        opt = optimal_time(kernel, g)
        rows.append((g, opt.tau_m, opt.r_m))
    _write_table(
        _out_path(args, "optimal", settings["format"]),
        settings["format"],
        "optimal",
        settings,
        ("g", "tau_m", "r_m"),
        rows,
    )
    return 0


def cmd_campaign(args) -> int:
    settings = _resolve(args, "campaign")
    kernel = make_kernel(settings["kernel"], settings["alpha"])
    settings["alpha"] = kernel.alpha
    config = CampaignConfig(
        kernel=kernel,
        g_true=settings["g_true"],
        m_schedule=settings["m_schedule"],
        replicas=settings["replicas"],
        tau_policy=settings["tau_policy"],
        tau=settings["tau"],
        base_seed=settings["seed"],
    )
    result = run_campaign(config)
    records_path = _out_path(args, "campaign", "csv")
    rows = [
        (
            r.kernel,
            r.alpha,
            r.g_true,
            r.tau,
            r.m_total,
            r.replica,
            r.seed,
            r.n_plus,
            r.g_hat,
            r.in_range,
            r.sigma2,
            r.qcr_bound,
        )
        for r in result.records
    ]
    _write_table(
        records_path, "csv", "campaign", settings, CAMPAIGN_CSV_COLUMNS, rows
    )
    summary_path = records_path.with_suffix("").with_suffix(".summary.json")
    payload = {
        "_meta": _meta_dict("campaign", settings),
        "tau": result.tau,
        "per_m": [
            {
                "M": s.m_total,
                "replicas": s.replicas,
                "n_in_range": s.n_in_range,
                "exclusion_rate": s.exclusion_rate,
                "mean_ratio": s.mean_ratio,
                "sd_ratio": s.sd_ratio,
                "sem_ratio": s.sem_ratio,
                "var_ghat": s.var_ghat,
                "mean_sigma2": s.mean_sigma2,
                "qcr_bound": s.qcr_bound,
            }
            for s in result.summaries
        ],
    }
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    with open(summary_path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return 0


def cmd_validate(args) -> int:
    settings = _resolve(args, "validate")
    kernel = make_kernel(settings["kernel"], settings["alpha"])
    settings["alpha"] = kernel.alpha
    g, tau = settings["g"], settings["tau"]
    if tau == 0.0:
        n_steps, dt = 0, 0.0
        modulus, se, closed, z = 1.0, 0.0, 1.0, 0.0
    else:
        max_steps = None if kernel.label == "ou" else COVARIANCE_MAX_STEPS
        n_steps, dt = default_step(g, tau, max_steps=max_steps)
        ensemble = sample_trajectories(
            kernel, g, n_steps, dt, settings["n_traj"], settings["seed"]
        )
        estimate = coherence_monte_carlo(ensemble, tau)
        modulus, se = estimate.modulus, estimate.std_error
        closed = math.exp(-2.0 * beta(kernel, AdimensionalPoint(g, tau)))
        z = (modulus - closed) / se if se > 0.0 else 0.0
        if settings["trajectories_out"] is not None:
            # debugging dump, one row per trajectory, sample per column
            _write_table(
                Path(settings["trajectories_out"]),
                "csv",
                "validate",
                settings,
                tuple(f"b{k}" for k in range(ensemble.samples.shape[1])),
                ensemble.samples.tolist(),
            )
    _write_table(
        _out_path(args, "validate", settings["format"]),
        settings["format"],
        "validate",
        settings,
        (
            "g",
            "tau",
            "n_traj",
            "n_steps",
            "dt",
            "mc_coherence",
            "mc_std_error",
            "closed_form",
            "z_score",
        ),
        [(g, tau, settings["n_traj"], n_steps, dt, modulus, se, closed, z)],
    )
    return 0


_HANDLERS = {
    "beta-table": cmd_beta_table,
    "qsnr-surface": cmd_qsnr_surface,
    "optimal": cmd_optimal,
    "campaign": cmd_campaign,
    "validate": cmd_validate,
}

_FLAG_HELP = {
    "kernel": "noise kernel: ou, gauss, or pl",
    "alpha": "power-law exponent (> 2; default 3 for the pl kernel)",
    "format": "output format: csv or json",
    "seed": "64-bit base seed recorded in the output",
    "g_list": "comma-separated g values",
    "tau_list": "comma-separated tau values",
    "g_range": "log-spaced g axis as LO:HI",
    "tau_range": "linear tau axis as LO:HI",
    "grid_density": "points per axis",
    "g_true": "true noise parameter of the simulated experiments",
    "m_schedule": "comma-separated, strictly increasing measurement counts",
    "replicas": "replicas per measurement count",
    "tau_policy": "interaction-time policy: optimal or fixed",
    "tau": "interaction time",
    "g": "noise parameter",
    "n_traj": "trajectory count for the Monte Carlo check",
    "trajectories_out": "optional CSV dump of the sampled trajectories",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprobe",
        description="Qubit probes for classical Gaussian noise.",
    )
    parser.add_argument("--version", action="version", version=f"qprobe {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, schema in _SCHEMAS.items():
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", type=Path, help="INI config file")
        sub.add_argument("--out", type=Path, help="output path")
        for key, (value_parser, _) in schema.items():
            flag = "--" + key.replace("_", "-")
            kwargs = {"help": _FLAG_HELP.get(key)}
            if key == "format":
                kwargs["choices"] = ("csv", "json")
            elif key == "kernel":
                kwargs["choices"] = ("ou", "gauss", "pl")
            elif key == "tau_policy":
                kwargs["choices"] = ("optimal", "fixed")
            else:
                kwargs["type"] = value_parser
            sub.add_argument(flag, dest=key, default=None, **kwargs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, RuntimeError) as exc:
        print(f"qprobe: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
