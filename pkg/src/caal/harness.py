"""Experiment configuration, seeded grid execution, budget enforcement and
CSV emission.

A config file is an INI-style text file with one `[section]` per experiment
cell; unknown keys are hard errors.  Per-run seeds are `base_seed + run
index`, so grids are reproducible run for run (and byte-identical in CSV
form, wall-clock column aside).
"""

from __future__ import annotations

import configparser
import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .eqtest import SamplerParams
from .learners import LEARNERS, HypothesisSelection, run_ceal
from .mat import run_mat
from .mealy import MealyMachine, equivalent, parse_dot
from .obstree import ObservationTree, UpdateStrategy
from .reviser import Reviser
from .sul import NoiseKind, NoiseSpec, RepeatsPolicy, SystemHandle

FRAMEWORKS = ("mat", "ceal")
STRATEGIES = ("most_recent", "most_frequent")
NOISE_KINDS = ("none", "input", "output")

DEFAULT_SYMBOL_BUDGET = 10_000_000


class ConfigurationError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """One experiment cell: a target learned `runs` times under fixed
    framework, learner, strategies, repeats, noise and budgets."""

    experiment_id: str
    target: str
    framework: str = "ceal"
    learner: str = "lstar_rs"
    update: str = "most_recent"
    selection: str = "most_frequent"
    min_repeats: int = 1
    max_repeats: int = 1
    agreement: float = 0.8
    noise_kind: str = "none"
    noise_level: float = 0.0
    expected_infix_len: float = 3.0
    extra_states: int = 2
    survive_budget: int = 2000
    symbol_budget: int = DEFAULT_SYMBOL_BUDGET
    runs: int = 20
    base_seed: int = 0
    mutate_at: int | None = None
    mutate_seed: int = 0

    def validate(self):
        if self.framework not in FRAMEWORKS:
            raise ConfigurationError(f"unsupported framework: {self.framework}")
        if self.learner not in LEARNERS:
            raise ConfigurationError(f"unsupported learner: {self.learner}")
        if self.update not in STRATEGIES:
            raise ConfigurationError(f"unsupported update strategy: {self.update}")
        if self.selection not in STRATEGIES:
            raise ConfigurationError(f"unsupported selection strategy: {self.selection}")
        if self.noise_kind not in NOISE_KINDS:
            raise ConfigurationError(f"unsupported noise kind: {self.noise_kind}")
        if self.runs < 1:
            raise ConfigurationError("runs must be positive")
        if self.symbol_budget < 1:
            raise ConfigurationError("symbol budget must be positive")
        return self


@dataclass
class RunRecord:
    """One learning run's outcome and cost metrics (CSV columns follow this
    field order exactly)."""

    experiment_id: str
    run_id: int
    framework: str
    learner: str
    target: str
    noise_kind: str
    noise_level: float
    min_repeats: int
    max_repeats: int
    seed: int
    success: bool
    symbols: int
    tests: int
    resets: int
    eq_symbols: int
    eq_fraction: float
    restarts: int
    conflicts: int
    distinct_hypotheses: int
    wall_clock_ms: float


CSV_COLUMNS = tuple(f.name for f in fields(RunRecord))


def _run_seeds(seed: int):
    noise_seed, sampler_seed = np.random.SeedSequence(seed).generate_state(2)
    return int(noise_seed), int(sampler_seed)


def derive_mutant(target: MealyMachine, seed: int) -> MealyMachine:
    """A copy of `target` with one reachable transition's output flipped to a
    different symbol, deterministic in `seed`."""
    if len(target.outputs) < 2:
        raise ConfigurationError("mutation needs at least two output symbols")
    rng = np.random.default_rng(seed)
    q = int(rng.integers(target.n_states))
    a = int(rng.integers(target.n_inputs))
    old = int(target.output_fun[q, a])
    shift = 1 + int(rng.integers(len(target.outputs) - 1))
    new = (old + shift) % len(target.outputs)
    outf = np.array(target.output_fun)
    outf[q, a] = new
    return MealyMachine(target.initial, target.inputs, target.outputs,
                        np.array(target.transitions), outf)


def run_single(cfg: ExperimentConfig, run_index: int, target: MealyMachine,
               events=None) -> RunRecord:
    """Execute one seeded run of a cell against a pre-parsed target."""
    seed = cfg.base_seed + run_index
    noise_seed, sampler_seed = _run_seeds(seed)
    noise = NoiseSpec(NoiseKind(cfg.noise_kind), cfg.noise_level, noise_seed)
    mutations = None
    truth = target
    if cfg.mutate_at is not None:
        mutant = derive_mutant(target, cfg.mutate_seed)
        mutations = [(cfg.mutate_at, mutant)]
        truth = mutant
    system = SystemHandle(target, noise, mutations=mutations, symbol_budget=cfg.symbol_budget)
    policy = RepeatsPolicy(cfg.min_repeats, cfg.max_repeats, cfg.agreement)
    params = SamplerParams(cfg.expected_infix_len, cfg.extra_states)
    rng = np.random.default_rng(sampler_seed)
    factory = LEARNERS[cfg.learner]

    start = time.perf_counter()
    if cfg.framework == "ceal":
        tree = ObservationTree(target.inputs, target.outputs, UpdateStrategy(cfg.update))
        reviser = Reviser(tree, system, policy=policy, sampler_params=params,
                          survive_budget=cfg.survive_budget, rng=rng, events=events)
        machine, stats = run_ceal(factory, reviser, HypothesisSelection(cfg.selection))
        restarts, conflicts, eq_symbols = reviser.restarts, reviser.conflicts, reviser.eq_symbols
    else:
        machine, stats = run_mat(factory, system, policy, sampler_params=params,
                                 survive_budget=cfg.survive_budget, rng=rng, events=events)
        restarts = 0
        conflicts = 1 if stats.outcome == "cache_conflict" else 0
        eq_symbols = stats.eq_symbols
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    success = machine is not None and equivalent(machine, truth) is None
    return RunRecord(
        experiment_id=cfg.experiment_id,
        run_id=run_index,
        framework=cfg.framework,
        learner=cfg.learner,
        target=cfg.target,
        noise_kind=cfg.noise_kind,
        noise_level=cfg.noise_level,
        min_repeats=cfg.min_repeats,
        max_repeats=cfg.max_repeats,
        seed=seed,
        success=success,
        symbols=system.symbols,
        tests=system.tests,
        resets=system.resets,
        eq_symbols=eq_symbols,
        eq_fraction=(eq_symbols / system.symbols) if system.symbols else 0.0,
        restarts=restarts,
        conflicts=conflicts,
        distinct_hypotheses=stats.distinct_hypotheses,
        wall_clock_ms=elapsed_ms,
    )


def _worker(args):
    cfg, run_index = args
    target = _load_target_cached(cfg.target)
    return run_single(cfg, run_index, target)


_TARGET_CACHE: dict = {}


def _load_target_cached(path: str) -> MealyMachine:
    machine = _TARGET_CACHE.get(path)
    if machine is None:
        machine = load_target(path)
        _TARGET_CACHE[path] = machine
    return machine


def load_target(path: str) -> MealyMachine:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read target {path}: {exc}") from exc
    return parse_dot(text)


def worker_count() -> int:
    env = os.environ.get("CAAL_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[RunRecord]:
    """All seeded runs of one cell, in run order.  The target is parsed (and
    the mutation derived) before any run starts, so configuration problems
    surface immediately."""
    cfg.validate()
    target = _load_target_cached(cfg.target)
    if cfg.mutate_at is not None:
        derive_mutant(target, cfg.mutate_seed)
    if workers is None:
        workers = worker_count()
    if workers <= 1:
        return [run_single(cfg, i, target) for i in range(cfg.runs)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, [(cfg, i) for i in range(cfg.runs)]))


def run_grid(cells: list[ExperimentConfig], workers: int | None = None) -> list[RunRecord]:
    """Every run of every cell, serialized in deterministic (cell, run)
    order regardless of the worker count."""
    for cfg in cells:
        cfg.validate()
        _load_target_cached(cfg.target)
    if workers is None:
        workers = worker_count()
    if workers <= 1:
        records = []
        for cfg in cells:
            records.extend(run_experiment(cfg, workers=1))
        return records
    jobs = [(cfg, i) for cfg in cells for i in range(cfg.runs)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, jobs))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([getattr(rec, col) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


_CONFIG_PARSERS = {
    "target": str,
    "framework": str,
    "learner": str,
    "update": str,
    "selection": str,
    "min_repeats": int,
    "max_repeats": int,
    "agreement": float,
    "noise_kind": str,
    "noise_level": float,
    "expected_infix_len": float,
    "extra_states": int,
    "survive_budget": int,
    "symbol_budget": int,
    "runs": int,
    "base_seed": int,
    "mutate_at": int,
    "mutate_seed": int,
}


def load_config(path) -> list[ExperimentConfig]:
    """Parse a grid description: one [section] per cell, key=value lines.
    Unknown keys are rejected outright."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config {path}: {exc}") from exc
    cells = []
    for section in parser.sections():
        kwargs = {"experiment_id": section}
        for key, raw in parser.items(section):
            convert = _CONFIG_PARSERS.get(key)
            if convert is None:
                raise ConfigurationError(f"unknown config key {key!r} in [{section}]")
            try:
                kwargs[key] = convert(raw)
            except ValueError as exc:
                raise ConfigurationError(
                    f"bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
        if "target" not in kwargs:
            raise ConfigurationError(f"[{section}] is missing the target key")
        cells.append(ExperimentConfig(**kwargs).validate())
    if not cells:
        raise ConfigurationError(f"no experiment cells in {path}")
    return cells
