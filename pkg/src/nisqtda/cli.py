"""Command-line driver.

    nisqtda <estimate|oracle|persistence|noise-sweep|resources|schedule> [--config file.json | flags]

Flags mirror the fields of :class:`RunConfig` one to one (``--eps-scale`` sets
``eps_scale``); flags given on the command line override the config file.
Reports are JSON tagged ``"schema": "nisqtda-report/1"``; curves are CSV.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .chebyshev import choose_params, estimate_betti, make_series
from .complexes import (
    METRICS, ORACLE_MAX_VERTICES, PRESETS, AdjacencyGraph, FiltrationPlan, build_adjacency,
    filtration_scales, load_edges, load_points, preset_complex,
)
from .errors import ConfigError, EmptyComplexError, ScaleCapError
from .moments import (
    MAX_STATEVECTOR_QUBITS, MomentMode, build_moment_table, ideal_outcome_distribution,
    noisy_outcome_histogram, subspace_dimension,
)
from .projectors import round_robin_schedule
from .qstate import NoiseModel, RngStream, hadamard_state, hellinger
from .resources import affine_r2, moment_circuit_depth, resource_report

SCHEMA = "nisqtda-report/1"
COMMANDS = ("estimate", "oracle", "persistence", "noise-sweep", "resources", "schedule")
# an oracle gap of 1 (all nonzero eigenvalues equal n) is capped so the
# minimizing polynomial stays well defined; any smaller value is still a valid gap bound
DELTA_CAP = 0.9

EXIT_OK, EXIT_CONFIG, EXIT_SCALE, EXIT_EMPTY = 0, 2, 3, 4


@dataclass
class RunConfig:
    preset: str | None = None
    points: str | None = None
    edges: str | None = None
    n_vertices: int | None = None
    metric: str = "euclidean"
    eps_scale: float | None = None
    k: int | str = "all"
    epsilon: float = 0.1
    eta: float = 0.1
    delta: float | str = "oracle"
    mode: str = "exact"
    shots: int = 1000
    p1: float = 0.0
    p2: float = 0.0
    pmeas: float = 0.0
    series: str = "step"
    n_v: int | None = None
    m: int | None = None
    seed: int = 0
    out: str | None = None
    include_null: bool = False
    # persistence
    scales: list[float] | None = None
    scale_strategy: str = "all-pairwise"
    scale_count: int | None = None
    source: str = "oracle"
    # noise sweep
    grid_p1: list[float] = field(default_factory=lambda: [0.001])
    grid_p2: list[float] = field(default_factory=lambda: [0.01])
    grid_pmeas: list[float] | None = None
    grid_n_v: list[int] = field(default_factory=lambda: [10, 50, 100, 500])
    trials: int = 20
    fidelity_presets: list[str] | None = None
    fidelity_out: str | None = None
    # resources / schedule
    ns: list[int] | None = None
    ms: list[int] = field(default_factory=lambda: [1, 3])
    depth_out: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_LIST_FIELDS = {"scales": float, "grid_p1": float, "grid_p2": float, "grid_pmeas": float,
                "grid_n_v": int, "fidelity_presets": str, "ns": int, "ms": int}


def _unit_interval(cfg: RunConfig, name: str, closed: bool = False) -> None:
    val = getattr(cfg, name)
    numeric = isinstance(val, (int, float)) and not isinstance(val, bool)
    ok = numeric and (0 <= val <= 1 if closed else 0 < val < 1)
    if not ok:
        bounds = "[0, 1]" if closed else "(0, 1)"
        raise ConfigError(name, f"must lie in {bounds}, got {val!r}")


def _positive_int(path: str, val) -> None:
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        raise ConfigError(path, f"must be a positive integer, got {val!r}")


def validate(cfg: RunConfig, command: str) -> None:
    """Reject out-of-range fields with a field-path error."""
    if command not in ("resources", "schedule"):
        given = [name for name in ("preset", "points", "edges") if getattr(cfg, name) is not None]
        if len(given) != 1:
            raise ConfigError("input", f"exactly one of preset, points, edges is required, got {given or 'none'}")
    if cfg.preset is not None and cfg.preset not in PRESETS:
        raise ConfigError("preset", f"unknown preset {cfg.preset!r}; choose from {sorted(PRESETS)}")
    if cfg.metric not in METRICS:
        raise ConfigError("metric", f"unknown metric {cfg.metric!r}; choose from {sorted(METRICS)}")
    if cfg.points is not None and command != "persistence" and cfg.eps_scale is None:
        raise ConfigError("eps_scale", "required with a points input")
    if cfg.eps_scale is not None and (not isinstance(cfg.eps_scale, (int, float)) or cfg.eps_scale < 0):
        raise ConfigError("eps_scale", f"must be nonnegative, got {cfg.eps_scale!r}")
    if cfg.n_vertices is not None:
        _positive_int("n_vertices", cfg.n_vertices)
    if cfg.k != "all" and (not isinstance(cfg.k, int) or isinstance(cfg.k, bool) or cfg.k < 0):
        raise ConfigError("k", f"must be a nonnegative integer or 'all', got {cfg.k!r}")
    _unit_interval(cfg, "epsilon")
    _unit_interval(cfg, "eta")
    if cfg.delta != "oracle":
        _unit_interval(cfg, "delta")
    if cfg.mode not in ("exact", "shots", "noisy"):
        raise ConfigError("mode", f"must be exact, shots or noisy, got {cfg.mode!r}")
    _positive_int("shots", cfg.shots)
    for name in ("p1", "p2", "pmeas"):
        _unit_interval(cfg, name, closed=True)
    if cfg.series not in ("step", "minimizing"):
        raise ConfigError("series", f"must be step or minimizing, got {cfg.series!r}")
    for name in ("n_v", "m", "scale_count"):
        if getattr(cfg, name) is not None:
            _positive_int(name, getattr(cfg, name))
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool) or cfg.seed < 0:
        raise ConfigError("seed", f"must be a nonnegative integer, got {cfg.seed!r}")
    if cfg.scales is not None:
        if not cfg.scales:
            raise ConfigError("scales", "must not be empty")
        for i, s in enumerate(cfg.scales):
            if not isinstance(s, (int, float)) or s < 0:
                raise ConfigError(f"scales[{i}]", f"must be nonnegative, got {s!r}")
        if any(b <= a for a, b in zip(cfg.scales, cfg.scales[1:])):
            raise ConfigError("scales", "must be strictly increasing")
    if cfg.scale_strategy not in ("all-pairwise", "uniform"):
        raise ConfigError("scale_strategy", f"must be all-pairwise or uniform, got {cfg.scale_strategy!r}")
    if cfg.source not in ("oracle", "estimate", "both"):
        raise ConfigError("source", f"must be oracle, estimate or both, got {cfg.source!r}")
    if command == "persistence" and cfg.points is None:
        raise ConfigError("points", "persistence needs a point-cloud input")
    for name in ("grid_p1", "grid_p2", "grid_pmeas"):
        for i, p in enumerate(getattr(cfg, name) or []):
            if not isinstance(p, (int, float)) or not 0 <= p <= 1:
                raise ConfigError(f"{name}[{i}]", f"must lie in [0, 1], got {p!r}")
    if cfg.grid_pmeas is not None and len(cfg.grid_pmeas) != len(cfg.grid_p2):
        raise ConfigError("grid_pmeas", "must have the same length as grid_p2")
    for name in ("grid_n_v", "ns", "ms"):
        for i, v in enumerate(getattr(cfg, name) or []):
            if name == "ms":
                if not isinstance(v, int) or v < 0:
                    raise ConfigError(f"ms[{i}]", f"must be a nonnegative integer, got {v!r}")
            else:
                _positive_int(f"{name}[{i}]", v)
    _positive_int("trials", cfg.trials)
    for i, name in enumerate(cfg.fidelity_presets or []):
        if name not in PRESETS:
            raise ConfigError(f"fidelity_presets[{i}]", f"unknown preset {name!r}")
    if command == "noise-sweep" and cfg.k == "all":
        raise ConfigError("k", "noise-sweep needs a single order")


def config_from_mapping(data: dict) -> RunConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(unknown[0], "unknown config field")
    return RunConfig(**data)


# --- input ---------------------------------------------------------------------

def load_graph(cfg: RunConfig, eps_scale: float | None = None) -> AdjacencyGraph:
    if cfg.preset is not None:
        return preset_complex(cfg.preset)
    if cfg.edges is not None:
        n = cfg.n_vertices
        if n is None:
            n = _infer_vertex_count(cfg.edges)
        return load_edges(cfg.edges, n)
    pc = load_points(cfg.points)
    return build_adjacency(pc, cfg.metric, cfg.eps_scale if eps_scale is None else eps_scale)


def _infer_vertex_count(path: str) -> int:
    top = -1
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].split()
            for tok in line:
                try:
                    top = max(top, int(tok))
                except ValueError:
                    raise ConfigError("edges", f"cannot parse vertex {tok!r}") from None
    if top < 0:
        raise ConfigError("edges", "edge list is empty; set n_vertices")
    return top + 1


def _orders(cfg: RunConfig, n: int) -> list[int]:
    if cfg.k == "all":
        return list(range(n))
    if cfg.k > n - 1:
        raise ConfigError("k", f"order {cfg.k} outside [0, {n - 1}]")
    return [cfg.k]


def _moment_mode(cfg: RunConfig, noise: NoiseModel | None = None) -> MomentMode:
    if cfg.mode == "exact":
        return MomentMode.exact()
    if cfg.mode == "shots":
        return MomentMode.sampled(cfg.shots)
    return MomentMode.noisy(cfg.shots, noise or NoiseModel(cfg.p1, cfg.p2, cfg.pmeas))


# --- estimate --------------------------------------------------------------------

def _resolve_delta(cfg: RunConfig, g: AdjacencyGraph, k: int, summary) -> tuple[float, str]:
    if cfg.delta != "oracle":
        return float(cfg.delta), "user"
    if summary is None:
        raise ConfigError("delta", f"n={g.n} is above the oracle cap; supply delta explicitly")
    if summary.delta is None:
        # Delta_k vanishes on S_k: any gap bound gives the same estimate
        return DELTA_CAP, "oracle (no nonzero eigenvalue)"
    if summary.delta > DELTA_CAP:
        return DELTA_CAP, "oracle (capped)"
    return summary.delta, "oracle"


def estimate_order(cfg: RunConfig, g: AdjacencyGraph, k: int, mode: MomentMode | None = None,
                   seed: int | None = None, n_v: int | None = None) -> dict:
    """One per-order record of an estimate report."""
    start = time.perf_counter()
    seed = cfg.seed if seed is None else seed
    s_k = subspace_dimension(g, k, cfg.include_null)
    record: dict = {"k": k}
    if s_k == 0:
        record.update(status="empty complex", s_k=0)
        record["wall_time_s"] = time.perf_counter() - start
        return record
    summary = oracle.exact_betti(g, k) if g.n <= ORACLE_MAX_VERTICES else None
    delta, delta_source = _resolve_delta(cfg, g, k, summary)
    params = choose_params(cfg.epsilon, cfg.eta, delta)
    n_v = n_v or cfg.n_v or params.n_v
    m = cfg.m or params.m
    series = make_series(cfg.series, m, delta)
    table = build_moment_table(g, k, m, n_v, mode or _moment_mode(cfg), seed, cfg.include_null)
    est = estimate_betti(table, series, cfg.eta, delta)
    budget = est.budget
    record.update(
        status="ok",
        chi_k=est.chi_k,
        chi_raw=est.chi_raw,
        beta_estimate=est.beta_estimate,
        rank_estimate=est.rank_estimate,
        s_k_estimate=est.s_k_estimate,
        n_v=n_v,
        m=m,
        delta=delta,
        delta_source=delta_source,
        series=cfg.series,
        seeds={"master": seed, "vector_stream": "(0, l)", "job_stream": "(1, l * (m + 1) + i)"},
        error_budget={
            "poly": budget.poly_error, "trace": budget.trace_error, "shot": budget.shot_error,
            "shot_bound_valid": budget.shot_bound_valid, "total": budget.total,
        },
    )
    if summary is not None:
        chi_true = summary.beta_k / summary.s_k
        record["oracle"] = {
            "beta_k": summary.beta_k, "s_k": summary.s_k, "chi_k": chi_true,
            "delta_k": summary.delta_k, "abs_error_chi": abs(est.chi_k - chi_true),
        }
    record["wall_time_s"] = time.perf_counter() - start
    return record


def cmd_estimate(cfg: RunConfig) -> dict:
    g = load_graph(cfg)
    if g.n > MAX_STATEVECTOR_QUBITS:
        raise ScaleCapError(f"n={g.n} exceeds the statevector cap of {MAX_STATEVECTOR_QUBITS}")
    records = [estimate_order(cfg, g, k) for k in _orders(cfg, g.n)]
    return _report("estimate", cfg, n=g.n, records=records)


# --- oracle ------------------------------------------------------------------------

def _summary_record(summary) -> dict:
    out = dataclasses.asdict(summary)
    out["eigenvalues"] = list(out["eigenvalues"])
    if summary.s_k == 0:
        out["status"] = "empty complex"
    return out


def cmd_oracle(cfg: RunConfig) -> dict:
    g = load_graph(cfg)
    records = [_summary_record(oracle.exact_betti(g, k)) for k in _orders(cfg, g.n)]
    return _report("oracle", cfg, n=g.n, records=records,
                   betti=[r["beta_k"] for r in records])


# --- persistence ---------------------------------------------------------------------

PERSISTENCE_COLUMNS = ["eps_scale", "k", "source", "beta_k", "chi_k", "delta_k", "s_k"]


def persistence_rows(cfg: RunConfig) -> list[dict]:
    pc = load_points(cfg.points)
    if cfg.scales is not None:
        plan = FiltrationPlan(tuple(float(s) for s in cfg.scales))
    else:
        plan = filtration_scales(pc, cfg.metric, cfg.scale_strategy, cfg.scale_count)
    rows = []
    for eps in plan.scales:
        g = build_adjacency(pc, cfg.metric, eps)
        for k in _orders(cfg, g.n):
            if cfg.source in ("oracle", "both"):
                s = oracle.exact_betti(g, k)
                rows.append({"eps_scale": eps, "k": k, "source": "oracle", "beta_k": s.beta_k,
                             "chi_k": s.beta_k / s.s_k if s.s_k else "", "delta_k": s.delta_k,
                             "s_k": s.s_k})
            if cfg.source in ("estimate", "both"):
                rec = estimate_order(cfg, g, k)
                if rec["status"] == "ok":
                    rows.append({"eps_scale": eps, "k": k, "source": "estimate",
                                 "beta_k": rec["beta_estimate"], "chi_k": rec["chi_k"],
                                 "delta_k": rec["delta"] * g.n, "s_k": rec["s_k_estimate"]})
                else:
                    rows.append({"eps_scale": eps, "k": k, "source": "estimate", "beta_k": 0,
                                 "chi_k": "", "delta_k": "", "s_k": 0})
    return rows


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({c: "" if row.get(c) is None else row.get(c) for c in columns})
    return buf.getvalue()


def cmd_persistence(cfg: RunConfig) -> str:
    return _csv(persistence_rows(cfg), PERSISTENCE_COLUMNS)


# --- noise sweep -----------------------------------------------------------------------

NOISE_COLUMNS = ["p1", "p2", "pmeas", "n_v", "trials", "mean_beta", "var_beta", "mean_abs_error"]
FIDELITY_COLUMNS = ["preset", "n", "depth", "p1", "p2", "pmeas", "hellinger"]


def _trial_seed(master: int, *key: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(2,) + key).generate_state(1)[0])


def noise_sweep_rows(cfg: RunConfig) -> list[dict]:
    g = load_graph(cfg)
    k = _orders(cfg, g.n)[0]
    truth = oracle.exact_betti(g, k).beta_k if g.n <= ORACLE_MAX_VERTICES else None
    pmeas = cfg.grid_pmeas if cfg.grid_pmeas is not None else cfg.grid_p2
    rows = []
    for a, p1 in enumerate(cfg.grid_p1):
        for b, (p2, pm) in enumerate(zip(cfg.grid_p2, pmeas)):
            noise = NoiseModel(p1, p2, pm)
            mode = MomentMode.noisy(cfg.shots, noise)
            for c, n_v in enumerate(cfg.grid_n_v):
                betas = []
                for t in range(cfg.trials):
                    rec = estimate_order(cfg, g, k, mode, _trial_seed(cfg.seed, a, b, c, t), n_v)
                    if rec["status"] != "ok":
                        raise EmptyComplexError(f"empty complex at order k={k}")
                    betas.append(rec["beta_estimate"])
                betas = np.array(betas)
                rows.append({
                    "p1": p1, "p2": p2, "pmeas": pm, "n_v": n_v, "trials": cfg.trials,
                    "mean_beta": float(betas.mean()),
                    "var_beta": float(betas.var(ddof=1)) if betas.size > 1 else 0.0,
                    "mean_abs_error": "" if truth is None else float(np.abs(betas - truth).mean()),
                })
    return rows


def top_fraction_hellinger(ideal: dict[int, float], observed, fraction: float = 0.1) -> float:
    """Hellinger distance restricted to the most likely noise-free outcomes.

    Both distributions are restricted to the top ``fraction`` of the ideal
    support (at least one outcome) and renormalized.
    """
    if not ideal:
        return 0.0
    ranked = sorted(ideal, key=lambda b: (-ideal[b], b))
    keep = ranked[: max(1, math.ceil(fraction * len(ranked)))]
    obs = observed.distribution() if hasattr(observed, "distribution") else dict(observed)
    p = {b: ideal[b] for b in keep}
    q = {b: obs.get(b, 0.0) for b in keep}
    tp, tq = sum(p.values()), sum(q.values())
    if tq == 0:
        return 1.0
    return hellinger({b: v / tp for b, v in p.items()}, {b: v / tq for b, v in q.items()})


def fidelity_rows(cfg: RunConfig) -> list[dict]:
    """Hellinger distance between noise-free and noisy outcome histograms vs circuit depth.

    The input is the uniform superposition (Hadamard column 0); the circuit
    applies the degree-``m`` moment block sequence (``m`` defaults to 1).
    """
    i = cfg.m or 1
    pmeas = cfg.grid_pmeas if cfg.grid_pmeas is not None else cfg.grid_p2
    rows = []
    for name in cfg.fidelity_presets or ["edge", "square", "cube"]:
        g = preset_complex(name)
        k = 0 if cfg.k == "all" else min(cfg.k, g.n - 1)
        v = hadamard_state(g.n, 0)
        ideal = ideal_outcome_distribution(v, i, g, k, cfg.include_null)
        depth = moment_circuit_depth(g.n, i, g, k)
        for a, p1 in enumerate(cfg.grid_p1):
            for b, (p2, pm) in enumerate(zip(cfg.grid_p2, pmeas)):
                rng = RngStream(cfg.seed, (3, a, b, g.n)).generator()
                hist = noisy_outcome_histogram(v, i, g, k, cfg.shots, NoiseModel(p1, p2, pm), rng,
                                               cfg.include_null)
                rows.append({"preset": name, "n": g.n, "depth": depth, "p1": p1, "p2": p2,
                             "pmeas": pm, "hellinger": top_fraction_hellinger(ideal, hist)})
    return rows


def cmd_noise_sweep(cfg: RunConfig) -> str:
    if cfg.fidelity_out:
        Path(cfg.fidelity_out).write_text(_csv(fidelity_rows(cfg), FIDELITY_COLUMNS))
    return _csv(noise_sweep_rows(cfg), NOISE_COLUMNS)


# --- resources / schedule ------------------------------------------------------------------

def cmd_resources(cfg: RunConfig) -> dict:
    graph = None
    if any(getattr(cfg, name) is not None for name in ("preset", "points", "edges")):
        graph = load_graph(cfg)
    k = 0 if cfg.k == "all" else cfg.k
    if graph is not None:
        ns = [graph.n]
    else:
        ns = cfg.ns or ([cfg.n_vertices] if cfg.n_vertices else [2, 4, 8, 16, 32, 64])
    reports = [resource_report(n, m, graph, k).to_dict() for m in cfg.ms for n in ns]
    curves = {}
    for m in cfg.ms:
        depths = [moment_circuit_depth(n, m, graph, k) for n in ns]
        curves[str(m)] = {"n": ns, "depth": depths,
                          "affine_r2": affine_r2(ns, depths) if len(ns) > 2 else None}
    if cfg.depth_out:
        rows = [{"n": n, "m": m, "depth": d} for m in cfg.ms
                for n, d in zip(curves[str(m)]["n"], curves[str(m)]["depth"])]
        Path(cfg.depth_out).write_text(_csv(rows, ["n", "m", "depth"]))
    return _report("resources", cfg, reports=reports, depth_curves=curves)


def cmd_schedule(cfg: RunConfig) -> dict:
    n = cfg.n_vertices
    if n is None and any(getattr(cfg, name) is not None for name in ("preset", "points", "edges")):
        n = load_graph(cfg).n
    if n is None or n < 2:
        raise ConfigError("n_vertices", "schedule needs n_vertices >= 2 (or a graph input)")
    sched = round_robin_schedule(n)
    pairs = [p for rnd in sched.rounds for p in rnd]
    return _report("schedule", cfg, n=n, rounds=[[list(p) for p in r] for r in sched.rounds],
                   n_rounds=len(sched.rounds), n_pairs=len(pairs),
                   covers_all_pairs=len(pairs) == len(set(pairs)) == n * (n - 1) // 2)


def _report(command: str, cfg: RunConfig, **body) -> dict:
    return {"schema": SCHEMA, "command": command, "config": cfg.to_dict(), **body}


# --- argument parsing ----------------------------------------------------------------------

def _parse_k(text: str):
    return text if text == "all" else int(text)


def _parse_delta(text: str):
    return text if text == "oracle" else float(text)


def _list_of(kind):
    def parse(text: str):
        return [kind(t) for t in text.split(",") if t.strip()]
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nisqtda", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with RunConfig fields")
    special = {"k": _parse_k, "delta": _parse_delta}
    for name, f in _FIELDS.items():
        flag = "--" + name.replace("_", "-")
        if name == "include_null":
            parser.add_argument(flag, dest=name, action="store_const", const=True, default=None)
        elif name in _LIST_FIELDS:
            parser.add_argument(flag, dest=name, type=_list_of(_LIST_FIELDS[name]), default=None,
                                help="comma-separated list")
        elif name in special:
            parser.add_argument(flag, dest=name, type=special[name], default=None)
        else:
            kind = {"int": int, "float": float}.get(_base_type(f), str)
            parser.add_argument(flag, dest=name, type=kind, default=None)
    return parser


def _base_type(f: dataclasses.Field) -> str:
    text = str(f.type)
    for kind in ("int", "float"):
        if text.startswith(kind):
            return kind
    return "str"


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
    for name in _FIELDS:
        val = getattr(args, name)
        if val is not None:
            data[name] = val
    return config_from_mapping(data)


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


HANDLERS = {
    "estimate": cmd_estimate, "oracle": cmd_oracle, "persistence": cmd_persistence,
    "noise-sweep": cmd_noise_sweep, "resources": cmd_resources, "schedule": cmd_schedule,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        validate(cfg, args.command)
        payload = HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScaleCapError as exc:
        print(f"scale cap: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except EmptyComplexError as exc:
        print(f"empty complex: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(payload, cfg.out)
    records = payload.get("records") if isinstance(payload, dict) else None
    if records and all(r.get("status") == "empty complex" for r in records):
        return EXIT_EMPTY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
