"""Experiment configuration, validation and batch execution behind the CLI.

Config files are flat JSON objects; every key is optional and falls back to
the per-mode defaults in ``MODE_DEFAULTS``:

    mode            "wz" | "gp" | "exponent" | "enumerator" | "rates" | "construct"
    n, m, k1, k2    code dimensions (k1 = k2 = 0 means an LDGM-only code)
    gamma_t, gamma_v, gamma_c
    p, delta, D, w  channel parameters (delta = null aliases p)
    trials, base_seed, code_seed (null: use base_seed)
    output_path, grid_step, decoder ("ml" | "threshold"), cap (log2 candidates)
    jobs            worker processes for trial batches
    resample_limit  redraws of a rank-deficient LDPC matrix
    code_path       load the code from a file instead of sampling it
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from . import analysis, protocols
from .codec import DEFAULT_CAP
from .ensembles import CompoundCode, DegreeParams, build_compound, dumps_code, loads_code, rates, sample_ldgm
from .protocols import DECODERS, ChannelSpec, TrialRecord

MODES = ("wz", "gp", "exponent", "enumerator", "rates", "construct")

MODE_DEFAULTS: dict[str, dict[str, Any]] = {
    "wz": dict(n=16, m=16, k1=8, k2=4, gamma_t=4, gamma_v=3, gamma_c=4, p=0.05, D=0.11, w=0.25),
    "gp": dict(n=24, m=12, k1=3, k2=3, gamma_t=4, gamma_v=3, gamma_c=6, p=0.05, D=0.11, w=0.3),
    # (3,6) lower code with R(G) = 1, R(H) = 1/2
    "exponent": dict(n=1000, m=1000, k1=250, k2=250, gamma_t=4, gamma_v=3, gamma_c=6, p=0.1),
    "enumerator": dict(n=600, m=600, k1=150, k2=150, gamma_t=4, gamma_v=3, gamma_c=6, p=0.1),
    "rates": dict(p=0.1),
    "construct": dict(n=16, m=16, k1=8, k2=4, gamma_t=4, gamma_v=3, gamma_c=4, p=0.05),
}

EXPONENT_PANELS = {
    # LDGM only: R(H) = 1, R(G) = R_com = 1/2
    "a": dict(n=2000, m=1000, k1=0, k2=0, gamma_t=4, p=0.1),
    # (3,6) LDPC below: R(H) = 1/2, R(G) = 1
    "b": dict(n=1000, m=1000, k1=250, k2=250, gamma_t=4, gamma_v=3, gamma_c=6, p=0.1),
}


@dataclass
class ExperimentConfig:
    mode: str = "wz"
    n: int = 16
    m: int = 16
    k1: int = 8
    k2: int = 4
    gamma_t: int = 4
    gamma_v: int = 3
    gamma_c: int = 4
    p: float = 0.05
    delta: Optional[float] = None
    D: float = 0.11
    w: float = 0.25
    trials: int = 200
    base_seed: int = 1
    code_seed: Optional[int] = None
    output_path: Optional[str] = None
    grid_step: float = analysis.DEFAULT_GRID_STEP
    decoder: str = "ml"
    cap: int = DEFAULT_CAP
    jobs: int = 1
    resample_limit: int = 10
    code_path: Optional[str] = None
    key_lines: dict[str, int] = field(default_factory=dict, compare=False, repr=False)
    source_file: Optional[str] = field(default=None, compare=False, repr=False)

    @classmethod
    def for_mode(cls, mode: str, **overrides) -> ExperimentConfig:
        values = dict(MODE_DEFAULTS.get(mode, {}))
        values.update(overrides)
        return cls(mode=mode, **values)

    @property
    def lower_code(self) -> bool:
        return self.k1 + self.k2 > 0

    def degrees(self) -> DegreeParams:
        return DegreeParams(self.gamma_t, self.gamma_v, self.gamma_c)

    def channel(self) -> ChannelSpec:
        return ChannelSpec(p=self.p, D=self.D, w=self.w, delta=self.delta)


CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)} - {"key_lines", "source_file"}


class ConfigError(ValueError):
    pass


def _key_lines(text: str) -> dict[str, int]:
    lines = {}
    for i, line in enumerate(text.splitlines(), start=1):
        for key in re.findall(r'"([A-Za-z_0-9]+)"\s*:', line):
            lines.setdefault(key, i)
    return lines


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a JSON config; ``overrides`` (e.g. from CLI flags) win over file values."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: top level must be a JSON object")
    lines = _key_lines(text)
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        key = unknown[0]
        raise ConfigError(f"{path}:{lines.get(key, 1)}: unknown key {key!r}")
    mode = overrides.get("mode") or raw.get("mode", "wz")
    values = {k: v for k, v in raw.items() if k != "mode"}
    values.update({k: v for k, v in overrides.items() if k != "mode"})
    try:
        config = ExperimentConfig.for_mode(mode, **values)
    except TypeError as exc:
        raise ConfigError(f"{path}:1: {exc}") from None
    config.key_lines = lines
    config.source_file = str(path)
    return config


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _violations(c: ExperimentConfig) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []

    def bad(key, msg):
        out.append((key, msg))

    if c.mode not in MODES:
        bad("mode", f"unknown mode {c.mode!r}; expected one of {', '.join(MODES)}")
    for key in ("n", "m", "k1", "k2", "gamma_t", "gamma_v", "gamma_c", "trials", "base_seed", "cap", "jobs", "resample_limit"):
        if not _is_int(getattr(c, key)):
            bad(key, f"must be an integer, got {getattr(c, key)!r}")
    for key in ("p", "D", "w", "grid_step"):
        if not _is_real(getattr(c, key)):
            bad(key, f"must be a real number, got {getattr(c, key)!r}")
    if c.delta is not None and not _is_real(c.delta):
        bad("delta", f"must be a real number or null, got {c.delta!r}")
    if c.code_seed is not None and not _is_int(c.code_seed):
        bad("code_seed", f"must be an integer or null, got {c.code_seed!r}")
    if out:
        return out

    if c.n < 1:
        bad("n", "must be >= 1")
    if c.m < 1:
        bad("m", "must be >= 1")
    if c.k1 < 0 or c.k2 < 0:
        bad("k1" if c.k1 < 0 else "k2", "must be >= 0")
    if c.k1 + c.k2 > c.m:
        bad("k2", f"k1 + k2 = {c.k1 + c.k2} exceeds m = {c.m}")
    if c.gamma_t < 1:
        bad("gamma_t", "must be >= 1")
    if c.lower_code or c.mode == "enumerator":
        if c.gamma_c < 2 or c.gamma_c % 2:
            bad("gamma_c", f"must be a positive even integer, got {c.gamma_c}")
        if not 1 <= c.gamma_v < c.gamma_c:
            bad("gamma_v", f"need 1 <= gamma_v < gamma_c, got ({c.gamma_v}, {c.gamma_c})")
    if c.lower_code and c.m * c.gamma_v != (c.k1 + c.k2) * c.gamma_c:
        bad("gamma_v", f"socket mismatch: m*gamma_v = {c.m * c.gamma_v} != (k1+k2)*gamma_c = {(c.k1 + c.k2) * c.gamma_c}")
    if c.mode == "enumerator" and (c.m * c.gamma_v) % c.gamma_c:
        bad("m", f"m*gamma_v = {c.m * c.gamma_v} is not a multiple of gamma_c = {c.gamma_c}")

    for key in ("p", "delta", "D", "w"):
        value = getattr(c, key)
        if value is not None and not 0 <= value <= 0.5:
            bad(key, f"{value} outside [0, 1/2]")
    if c.mode in ("exponent", "rates") and not 0 < c.p < 0.5:
        bad("p", f"{c.mode} mode needs 0 < p < 1/2, got {c.p}")
    if c.mode in ("wz", "gp") and c.decoder == "threshold":
        flip = analysis.bernoulli_convolve(c.D, c.p if c.delta is None else c.delta) if c.mode == "wz" else c.p
        if not 0 < flip < 0.5:
            bad("decoder", f"threshold decoder needs an effective flip probability in (0, 1/2), got {flip}")

    if c.trials < 1:
        bad("trials", "must be >= 1")
    if not 0 <= c.base_seed < 1 << 64:
        bad("base_seed", "must be an unsigned 64-bit integer")
    if c.base_seed + c.trials > 1 << 64:
        bad("trials", "base_seed + trials overflows the 64-bit seed space")
    if c.code_seed is not None and not 0 <= c.code_seed < 1 << 64:
        bad("code_seed", "must be an unsigned 64-bit integer")
    if c.decoder not in DECODERS:
        bad("decoder", f"must be one of {', '.join(DECODERS)}, got {c.decoder!r}")
    if c.cap < 1:
        bad("cap", "must be >= 1")
    if c.jobs < 1:
        bad("jobs", "must be >= 1")
    if c.resample_limit < 0:
        bad("resample_limit", "must be >= 0")
    try:
        analysis.exponent_grid(c.grid_step)
    except ValueError as exc:
        bad("grid_step", str(exc))
    if c.mode in ("wz", "gp") and c.m - c.k1 > c.cap:
        bad("cap", f"SearchSpaceTooLarge: the H1-only coset has up to 2^{c.m - c.k1} candidates, cap is 2^{c.cap}")
    return out


def validate(config: ExperimentConfig) -> list[str]:
    """Every precondition violation, one message each; empty iff the config is runnable."""
    msgs = []
    for key, msg in _violations(config):
        if config.source_file:
            msgs.append(f"{config.source_file}:{config.key_lines.get(key, 1)}: {key}: {msg}")
        else:
            msgs.append(f"{key}: {msg}")
    return msgs


# ---------------------------------------------------------------------------
# Execution


def make_code(config: ExperimentConfig) -> CompoundCode:
    if config.code_path:
        return loads_code(Path(config.code_path).read_text(encoding="utf-8"))
    seed = config.base_seed if config.code_seed is None else config.code_seed
    if not config.lower_code:
        return CompoundCode.ldgm_only(sample_ldgm(config.n, config.m, config.gamma_t, seed), None, seed)
    return build_compound(config.n, config.m, config.k1, config.k2, config.degrees(), seed, config.resample_limit)


_TRIAL_FUNCS = {"wz": protocols.wz_trial, "gp": protocols.gp_trial}


def _run_one(args) -> TrialRecord:
    kind, code, spec, seed, decoder, cap = args
    return _TRIAL_FUNCS[kind](code, spec, seed, decoder=decoder, cap=cap)


def run_batch(
    kind: str,
    code: CompoundCode,
    spec: ChannelSpec,
    base_seed: int,
    trials: int,
    *,
    decoder: str = "ml",
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
) -> list[TrialRecord]:
    """Trial i uses seed base_seed + i; results come back in trial order for any ``jobs``."""
    tasks = [(kind, code, spec, base_seed + i, decoder, cap) for i in range(trials)]
    if jobs <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks, chunksize=max(1, trials // (4 * jobs))))


def wilson_interval(successes: int, total: int, z: float = 1.96) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


SUMMARY_HEADER = (
    "trials", "mean_distortion", "distortion_ci_low", "distortion_ci_high", "mean_rate",
    "decoded_fraction", "decoded_ci_low", "decoded_ci_high",
    "msg_recovered_fraction", "msg_recovered_ci_low", "msg_recovered_ci_high",
    "constraint_met_fraction",
)


def summarize(records: list[TrialRecord], n: int) -> dict[str, Any]:
    """Means and 95% intervals; distortion uses the binomial standard error over all n * trials bits."""
    t = len(records)
    dist = math.fsum(r.distortion_fraction for r in records) / t
    se = math.sqrt(dist * (1 - dist) / (n * t))
    decoded = sum(r.decode_status is protocols.DecodeStatus.DECODED for r in records)
    out: dict[str, Any] = {
        "trials": t,
        "mean_distortion": dist,
        "distortion_ci_low": max(0.0, dist - 1.96 * se),
        "distortion_ci_high": min(1.0, dist + 1.96 * se),
        "mean_rate": math.fsum(r.rate_used for r in records) / t,
        "decoded_fraction": decoded / t,
    }
    out["decoded_ci_low"], out["decoded_ci_high"] = wilson_interval(decoded, t)
    if records[0].message_recovered is not None:
        rec = sum(bool(r.message_recovered) for r in records)
        out["msg_recovered_fraction"] = rec / t
        out["msg_recovered_ci_low"], out["msg_recovered_ci_high"] = wilson_interval(rec, t)
        out["constraint_met_fraction"] = sum(bool(r.constraint_met) for r in records) / t
    return out


def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.csv")


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def _curves_text(curves) -> str:
    buf = io.StringIO()
    analysis.write_curves_csv(buf, curves)
    return buf.getvalue()


def _run_trials(config: ExperimentConfig) -> None:
    code = make_code(config)
    spec = config.channel()
    records = run_batch(
        config.mode, code, spec, config.base_seed, config.trials,
        decoder=config.decoder, cap=config.cap, jobs=config.jobs,
    )
    buf = io.StringIO()
    protocols.write_trials_csv(buf, records, code, spec)
    summary = summarize(records, code.n)
    sbuf = io.StringIO()
    writer = csv.writer(sbuf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    writer.writerow([protocols._fmt(summary.get(k)) for k in SUMMARY_HEADER])
    if config.output_path is None:
        print(buf.getvalue(), end="")
        print(sbuf.getvalue(), end="")
    else:
        out = Path(config.output_path)
        _write(str(out), buf.getvalue())
        _write(str(summary_path(out)), sbuf.getvalue())


def exponent_parameters(config: ExperimentConfig) -> tuple[float, Optional[int], Optional[int]]:
    """(R(G), gamma_v, gamma_c) for the exponent; the LDPC degrees are None for an LDGM-only code."""
    r_g = config.m / config.n
    if config.lower_code:
        return r_g, config.gamma_v, config.gamma_c
    return r_g, None, None


def exponent_report(config: ExperimentConfig) -> tuple[list[analysis.ExponentCurve], analysis.ChannelCondition]:
    r_g, gv, gc = exponent_parameters(config)
    curves = analysis.exponent_curves(r_g, config.gamma_t, gv, gc, config.p, config.grid_step)
    return curves, analysis.condition_of(curves[-1])


def enumerator_curves(config: ExperimentConfig) -> list[analysis.ExponentCurve]:
    m = config.m
    finite_grid, finite_vals = [], []
    for ell in range(m // 2 + 1):
        finite_grid.append(ell / m)
        finite_vals.append(analysis.finite_weight_enumerator(m, config.gamma_v, config.gamma_c, ell))
    grid = [0.0] + analysis.exponent_grid(config.grid_step)
    asym = [analysis.asymptotic_weight_enumerator(config.gamma_v, config.gamma_c, v) for v in grid]
    return [
        analysis.ExponentCurve(tuple(finite_grid), tuple(finite_vals), f"finite_m{m}"),
        analysis.ExponentCurve(tuple(grid), tuple(asym), "asymptotic"),
    ]


def rate_curves(config: ExperimentConfig) -> list[analysis.ExponentCurve]:
    grid = analysis.exponent_grid(config.grid_step)
    wz = analysis.wz_rate_curve(config.p, grid)
    ie = analysis.ie_capacity_curve(config.p, grid)
    return [
        analysis.ExponentCurve(tuple(grid), tuple(analysis.wz_raw_rate(d, config.p) for d in grid), "wz_raw"),
        analysis.ExponentCurve(tuple(pt.x for pt in wz), tuple(pt.rate for pt in wz), "wz_lce"),
        analysis.ExponentCurve(tuple(grid), tuple(analysis.ie_raw_rate(w, config.p) for w in grid), "ie_raw"),
        analysis.ExponentCurve(tuple(pt.x for pt in ie), tuple(pt.rate for pt in ie), "ie_uce"),
    ]


def rates_text(code: CompoundCode) -> str:
    r = rates(code)
    names = list(r.as_floats())
    values = [str(getattr(r, k)) for k in names]
    return ",".join(names) + "\n" + ",".join(values) + "\n"


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit status."""
    problems = validate(config)
    if problems:
        raise ConfigError("\n".join(problems))
    if config.mode in _TRIAL_FUNCS:
        _run_trials(config)
    elif config.mode == "exponent":
        curves, _ = exponent_report(config)
        _write(config.output_path, _curves_text(curves))
    elif config.mode == "enumerator":
        _write(config.output_path, _curves_text(enumerator_curves(config)))
    elif config.mode == "rates":
        _write(config.output_path, _curves_text(rate_curves(config)))
    elif config.mode == "construct":
        _write(config.output_path, dumps_code(make_code(config)))
    return 0


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
