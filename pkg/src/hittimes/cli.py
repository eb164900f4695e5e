"""Command-line front end.

Subcommands:

* ``simulate``  — Monte Carlo first-passage sampling; emits samples.csv and cdf.csv
* ``transform`` — forward/inverse return<->hitting transform of a law; transform.csv
* ``laws``      — tabulate a limit law; laws.csv
* ``verify``    — run a verification procedure; per-CDF CSVs and pass/fail report
* ``scaling``   — empirical return tails and wandering rate; scaling.csv

Configs are INI files parsed strictly: unknown sections or keys and a
missing seed are hard errors (exit 1), tolerance failures exit 2, success
exits 0.  Every artifact embeds the config hash and seed; all floating
point output uses 17 significant digits so equal seeds give byte-identical
CSVs.  The report's timestamp is isolated on its own line and is the only
non-reproducible byte in any artifact.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import sys as _sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import systems as sysmod
from .laws import LimitLaw, exponential, gzero, halpha
from .scaling import DistortedNormalizer, GammaNormalizer, ScalingFunction, \
    estimate_return_sequence
from .simulate import SubDistribution, estimate_batch, \
    estimate_tails_and_wandering, ks_distance
from .transform import TransformSpec, forward, invert
from .verify import check_convergence_to_H, check_decomposition, \
    check_return_vs_hitting, check_robustness

__all__ = ["main"]


class ConfigError(ValueError):
    """Malformed or incomplete configuration (exit code 1)."""


# ---------------------------------------------------------------------------
# strict config parsing

_KNOWN_KEYS = {
    "experiment": {"seed", "mode", "n_samples", "cap", "t_max", "points",
                   "start_law"},
    "system": {"kind", "alpha", "transition", "y_states"},
    "target": {"kind", "p", "p_schedule", "offset", "center", "half_width",
               "depth", "width", "level"},
    "scaling": {"source", "c", "alpha", "beta", "n_max", "n_samples"},
    "law": {"kind", "alpha"},
    "transform": {"kind", "alpha", "direction", "input_law", "input_alpha",
                  "input_csv"},
    "verify": {"check", "epsilons", "n_max", "a_states", "b_states"},
    "tolerances": {"transform", "law", "distance", "censored_ceiling"},
}


def load_config(path: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found or unreadable: {path}")
    cfg = {}
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        keys = dict(parser.items(section))
        unknown = set(keys) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
        cfg[section] = keys
    return cfg


def config_hash(cfg: dict) -> str:
    canon = "\n".join(f"[{s}] {k}={cfg[s][k]}"
                      for s in sorted(cfg) for k in sorted(cfg[s]))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _get(cfg, section, key, conv, default=None, required=False):
    raw = cfg.get(section, {}).get(key)
    if raw is None:
        if required:
            raise ConfigError(f"missing required key '{key}' in [{section}]")
        return default
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _positive_int(raw):
    v = int(raw)
    if v <= 0:
        raise ValueError(f"must be a positive integer, got {v}")
    return v


def _positive_float(raw):
    v = float(raw)
    if v <= 0:
        raise ValueError(f"must be positive, got {v}")
    return v


def _float_list(raw):
    return [float(x) for x in raw.replace(";", ",").split(",") if x.strip()]


def _int_list(raw):
    return [int(x) for x in raw.replace(";", ",").split(",") if x.strip()]


def require_seed(cfg, override) -> int:
    if override is not None:
        return int(override)
    seed = _get(cfg, "experiment", "seed", int)
    if seed is None:
        raise ConfigError("missing seed: set [experiment] seed or pass --seed "
                          "(runs must be reproducible)")
    return seed


# ---------------------------------------------------------------------------
# section builders

def build_system(cfg):
    kind = _get(cfg, "system", "kind", str, required=True)
    alpha = _get(cfg, "system", "alpha", float)
    if kind == "renewal_tower":
        if alpha is None:
            raise ConfigError("[system] renewal_tower requires alpha")
        return sysmod.RenewalTower(alpha=alpha)
    if kind == "boole":
        return sysmod.BooleMap()
    if kind == "doubling":
        return sysmod.DoublingMap()
    if kind == "markov":
        rows = _get(cfg, "system", "transition", str, required=True)
        mat = np.array([_float_list(r) for r in rows.split("|")])
        y = tuple(_get(cfg, "system", "y_states", _int_list, required=True))
        try:
            return sysmod.FiniteMarkovShift(transition=mat, y_states=y)
        except ValueError as exc:
            raise ConfigError(f"[system] {exc}") from None
    raise ConfigError(f"unknown system kind {kind!r}")


def build_targets(cfg):
    """Build the (possibly singleton) shrinking-target schedule."""
    kind = _get(cfg, "target", "kind", str, required=True)
    if kind == "label_interval":
        ps = _get(cfg, "target", "p_schedule", _float_list)
        if ps is None:
            ps = [_get(cfg, "target", "p", _positive_float, required=True)]
        offset = _get(cfg, "target", "offset", float, default=0.0)
        return [sysmod.LabelInterval(p=p, offset=offset) for p in ps]
    if kind == "interval_in_y":
        center = _get(cfg, "target", "center", float, required=True)
        hw = _get(cfg, "target", "half_width", _positive_float, required=True)
        return [sysmod.IntervalInY(center=center, half_width=hw)]
    if kind == "short_return_column":
        depth = _get(cfg, "target", "depth", _positive_int, required=True)
        width = _get(cfg, "target", "width", _positive_float, required=True)
        return [sysmod.ShortReturnColumn(depth=depth, width=width)]
    if kind == "dyadic":
        level = _get(cfg, "target", "level", _positive_int, required=True)
        return [sysmod.DyadicInterval(level=level)]
    raise ConfigError(f"unknown target kind {kind!r}")


def build_normalizer(cfg, sys, seed):
    source = _get(cfg, "scaling", "source", str, default="known")
    mode = _get(cfg, "experiment", "mode", str, default="return")
    if source == "known":
        fn = sysmod.known_scaling(sys)
        if fn is None:
            raise ConfigError(f"no known scaling for {type(sys).__name__}; "
                              "use source=estimated or explicit")
    elif source == "explicit":
        fn = ScalingFunction(
            c=_get(cfg, "scaling", "c", _positive_float, required=True),
            alpha=_get(cfg, "scaling", "alpha", float, required=True),
            beta=_get(cfg, "scaling", "beta", float, default=0.0))
    elif source == "estimated":
        n_max = _get(cfg, "scaling", "n_max", _positive_int, default=10_000)
        n_s = _get(cfg, "scaling", "n_samples", _positive_int, default=100_000)
        _, w = estimate_tails_and_wandering(sys, n_max, n_s,
                                            np.random.SeedSequence([seed, 1]))
        fn = estimate_return_sequence(w, sys.alpha).function
    else:
        raise ConfigError(f"unknown scaling source {source!r}")
    if mode == "distorted":
        return DistortedNormalizer(fn)
    return GammaNormalizer(fn)


def build_law(cfg) -> LimitLaw | None:
    kind = _get(cfg, "law", "kind", str, default="none")
    if kind == "none":
        return None
    if kind == "halpha":
        return halpha(_get(cfg, "law", "alpha", float, required=True))
    if kind == "gzero":
        return gzero()
    if kind == "exponential":
        return exponential()
    raise ConfigError(f"unknown law kind {kind!r}")


def build_grid(cfg) -> np.ndarray:
    t_max = _get(cfg, "experiment", "t_max", _positive_float, default=10.0)
    points = _get(cfg, "experiment", "points", _positive_int, default=5120)
    return np.linspace(0.0, t_max, points + 1)


# ---------------------------------------------------------------------------
# artifact emission

def read_csv(path) -> dict:
    """Read a package-emitted CSV back into {column: float array}."""
    with open(path) as fh:
        rows = [ln.strip() for ln in fh
                if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    names = rows[0].split(",")
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def write_csv(path: Path, columns: dict, cfg_hash: str, seed) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    with open(path, "w") as fh:
        fh.write(f"# config_hash = {cfg_hash}\n# seed = {seed}\n")
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(
                f"{x:d}" if isinstance(x, (int, np.integer)) else f"{x:.17g}"
                for x in row) + "\n")


def write_report(path: Path, lines, cfg_hash: str, seed) -> None:
    stamp = datetime.now(timezone.utc).isoformat()
    with open(path, "w") as fh:
        fh.write(f"config_hash: {cfg_hash}\nseed: {seed}\n")
        fh.write(f"timestamp: {stamp}\n")
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(cfg, out: Path, seed) -> int:
    sys_ = build_system(cfg)
    targets = build_targets(cfg)
    grid = build_grid(cfg)
    n = _get(cfg, "experiment", "n_samples", _positive_int, required=True)
    cap = _get(cfg, "experiment", "cap", _positive_int, default=10_000_000)
    start = _get(cfg, "experiment", "start_law", str, default="muE")
    normalizer = build_normalizer(cfg, sys_, seed)
    h = config_hash(cfg)
    lines = []
    for i, target in enumerate(targets):
        batch = estimate_batch(sys_, target, start, normalizer, n, cap,
                               np.random.SeedSequence([seed, i]))
        normalized = batch.normalized()
        tag = f"_{i}" if len(targets) > 1 else ""
        write_csv(out / f"samples{tag}.csv", {
            "sample_index": np.arange(n),
            "phi": batch.phi,
            "censored": batch.censored.astype(int),
            "normalized_value": np.where(np.isfinite(normalized),
                                         normalized, np.inf),
        }, h, seed)
        cdf = batch.to_subdistribution(grid)
        write_csv(out / f"cdf{tag}.csv", {"t": grid, "F": cdf.values}, h, seed)
        lines.append(f"target {target!r}: n={n} censored={batch.censored.sum()} "
                     f"normalization: {batch.norm_description}")
    write_report(out / "report.txt", lines, h, seed)
    return 0


def cmd_transform(cfg, out: Path, seed) -> int:
    kind = _get(cfg, "transform", "kind", str, required=True)
    alpha = _get(cfg, "transform", "alpha", float, default=1.0)
    direction = _get(cfg, "transform", "direction", str, default="forward")
    grid = build_grid(cfg)
    csv_in = _get(cfg, "transform", "input_csv", str)
    if csv_in is not None:
        data = read_csv(csv_in)
        if "t" not in data or len(data) < 2:
            raise ConfigError(f"{csv_in}: expected columns 't' and a CDF column")
        grid = data.pop("t")
        values = next(iter(data.values()))
    else:
        law_kind = _get(cfg, "transform", "input_law", str, required=True)
        input_alpha = _get(cfg, "transform", "input_alpha", float, default=alpha)
        law = {"halpha": lambda: halpha(input_alpha), "gzero": gzero,
               "exponential": exponential}.get(law_kind)
        if law is None:
            raise ConfigError(f"unknown input_law {law_kind!r}")
        values = np.asarray(law().cdf(grid), dtype=float)
    try:
        spec = TransformSpec(kind, alpha)
        fn = {"forward": forward, "invert": invert}.get(direction)
        if fn is None:
            raise ConfigError(f"direction must be forward or invert, got {direction!r}")
        result = fn(spec, SubDistribution(grid=grid, values=values))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    h = config_hash(cfg)
    write_csv(out / "transform.csv",
              {"t": grid, "F_in": values, "F_out": result.values}, h, seed)
    write_report(out / "report.txt",
                 [f"transform: {kind} alpha={alpha} direction={direction}",
                  f"repair (clipping/monotonization magnitude): {result.repair:.17g}"],
                 h, seed)
    return 0


def cmd_laws(cfg, out: Path, seed) -> int:
    law = build_law(cfg)
    if law is None:
        raise ConfigError("[law] kind is required for the laws subcommand")
    grid = build_grid(cfg)
    h = config_hash(cfg)
    write_csv(out / "laws.csv", {"t": grid, "H": np.asarray(law.cdf(grid))},
              h, seed)
    write_report(out / "report.txt", [f"law: {law.tag}"], h, seed)
    return 0


def cmd_scaling(cfg, out: Path, seed) -> int:
    sys_ = build_system(cfg)
    n_max = _get(cfg, "scaling", "n_max", _positive_int, default=10_000)
    n_s = _get(cfg, "scaling", "n_samples", _positive_int, default=100_000)
    q, w = estimate_tails_and_wandering(sys_, n_max, n_s,
                                        np.random.SeedSequence([seed, 1]))
    h = config_hash(cfg)
    write_csv(out / "scaling.csv",
              {"n": np.arange(1, n_max + 1), "q": q, "w": w}, h, seed)
    lines = [f"system: {type(sys_).__name__}, n_max={n_max}, n_samples={n_s}"]
    try:
        fit = estimate_return_sequence(w, sys_.alpha)
        lines.append(f"fitted regular-variation index: {fit.fitted_index:.6f} "
                     f"(residual {fit.residual:.3g})")
    except ValueError as exc:
        lines.append(f"fit failed: {exc}")
    write_report(out / "report.txt", lines, h, seed)
    return 0


def cmd_verify(cfg, out: Path, seed) -> int:
    check = _get(cfg, "verify", "check", str, required=True)
    h = config_hash(cfg)
    tol = {k: _get(cfg, "tolerances", k, _positive_float, default=d)
           for k, d in (("transform", 0.03), ("law", 0.03),
                        ("distance", 0.03), ("censored_ceiling", 0.05))}
    if check == "decomposition":
        sys_ = build_system(cfg)
        if not isinstance(sys_, sysmod.FiniteMarkovShift):
            raise ConfigError("decomposition check requires a markov system")
        n_max = _get(cfg, "verify", "n_max", _positive_int, default=8)
        a = _get(cfg, "verify", "a_states", _int_list, required=True)
        b = _get(cfg, "verify", "b_states", _int_list, required=True)
        defect = check_decomposition(sys_, a, b, n_max)
        passed = defect <= 1e-12
        write_report(out / "report.txt",
                     [f"decomposition identity defect (n<={n_max}): {defect:.3e}",
                      "PASS" if passed else "FAIL (defect > 1e-12)"], h, seed)
        return 0 if passed else 2

    sys_ = build_system(cfg)
    targets = build_targets(cfg)
    n = _get(cfg, "experiment", "n_samples", _positive_int, required=True)
    cap = _get(cfg, "experiment", "cap", _positive_int, default=10_000_000)
    grid = build_grid(cfg)
    if check == "return_vs_hitting":
        outcome = check_return_vs_hitting(
            sys_, targets, sys_.alpha, n_samples=n, cap=cap, seed=seed,
            kind="hlv" if sys_.alpha == 1.0 and isinstance(sys_, sysmod.DoublingMap)
            else "fractional",
            law=build_law(cfg), grid=grid,
            tol_transform=tol["transform"], tol_law=tol["law"],
            censored_ceiling=tol["censored_ceiling"])
    elif check == "convergence":
        outcome = check_convergence_to_H(
            sys_, targets, sys_.alpha, n_samples=n, cap=cap, seed=seed,
            grid=grid, tol=tol["distance"],
            censored_ceiling=tol["censored_ceiling"])
    elif check == "robustness":
        eps = _get(cfg, "verify", "epsilons", _float_list, required=True)
        try:
            outcome = check_robustness(sys_, targets, eps, n_samples=n,
                                       cap=cap, seed=seed, grid=grid,
                                       tol=tol["distance"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        raise ConfigError(f"unknown verify check {check!r}")
    write_report(out / "report.txt", outcome.summary_lines(), h, seed)
    return 0 if outcome.passed else 2


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hittimes",
        description="Numerical laboratory for return- and hitting-time "
                    "distributions of shrinking targets")
    parser.add_argument("subcommand",
                        choices=["simulate", "transform", "laws", "verify",
                                 "scaling"])
    parser.add_argument("--config", required=True, help="INI config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="overrides [experiment] seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for numba kernels")
    args = parser.parse_args(argv)
    try:
        if args.threads > 1:
            try:
                import numba
                numba.set_num_threads(args.threads)
            except ImportError:
                pass
        cfg = load_config(args.config)
        seed = require_seed(cfg, args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        handler = {"simulate": cmd_simulate, "transform": cmd_transform,
                   "laws": cmd_laws, "verify": cmd_verify,
                   "scaling": cmd_scaling}[args.subcommand]
        return handler(cfg, out, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 1
    except Exception as exc:  # runtime failure, still exit 1 per contract
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
