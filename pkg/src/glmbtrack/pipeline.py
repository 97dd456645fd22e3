"""Experiment pipeline: simulate runs, filter scans, score, write CSV outputs.

Monte Carlo runs are independent: run r draws its simulation stream from
SeedSequence([seed, r, 0]) and its filter stream from [seed, r, 1], so serial
and pooled execution produce identical results and identical CSV bytes.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import RunConfig
from .glmb import GlmbDensity, Hypothesis, extract_estimates, glmb_predict, glmb_update, prune_and_cap
from .mdb import birth_existences, make_birth_components, newborn_likelihoods
from .metrics import cardinality_series, ospa
from .models import Measurement, survival_probability
from .rfs import LabelAllocator, LabeledSet
from .sim import generate_measurements, generate_truth, load_measurements
from .smc import resample


@dataclass(frozen=True)
class ScanEstimate:
    """Extracted state set and cardinality distribution for one scan."""

    scan: int
    estimate: LabeledSet
    cardinality: np.ndarray


def _refresh_particles(density: GlmbDensity, target_count: int, rng: np.random.Generator) -> GlmbDensity:
    """Resample degenerate or oversized track densities, sharing results.

    A track is refreshed when its particle count differs from target_count
    (fresh births carry the birth particle count) or its effective sample size
    fell below half its count. Shared density objects are resampled once.
    """
    replacements: dict[int, object] = {}
    out = []
    for hyp in density.hypotheses:
        tracks = {}
        for label in hyp.labels:
            d = hyp.tracks[label]
            got = replacements.get(id(d))
            if got is None:
                if d.count != target_count or d.effective_sample_size() < d.count / 2.0:
                    got = resample(d, target_count, rng)
                else:
                    got = d
                replacements[id(d)] = got
            tracks[label] = got
        out.append(Hypothesis(hyp.labels, hyp.history_id, hyp.log_weight, tracks))
    return GlmbDensity(tuple(out), density.scan_index)


def filter_scans(
    scans: Sequence[tuple[int, Sequence[Measurement]]],
    config: RunConfig,
    rng: np.random.Generator,
    enable_births: bool = True,
) -> list[ScanEstimate]:
    """Run the tracker over consecutive scans starting from the empty density.

    Scan 0 is filtered with no prior tracks and no prior births; afterwards
    every scan's unclaimed measurements seed birth components that enter the
    prediction to the following scan. enable_births=False suppresses the
    birth model entirely (no track can ever start).
    """
    budget = config.filter.budget
    p_s = config.filter.survival_probability
    survival = lambda states: survival_probability(states, p_s)  # noqa: E731
    allocator = LabelAllocator()
    births: tuple = ()
    glmb = GlmbDensity.empty(0)
    out: list[ScanEstimate] = []
    for scan, zs in scans:
        if scan != len(out):
            raise ValueError(f"expected scan {len(out)}, got {scan}")
        if scan > 0:
            glmb = glmb_predict(glmb, births, config.motion, budget, rng, survival)
        posterior, records = glmb_update(glmb, zs, config.sensor, budget)
        posterior = prune_and_cap(posterior, budget.min_weight, budget.max_hypotheses)
        estimate, rho = extract_estimates(posterior)
        if enable_births:
            r_u = newborn_likelihoods(zs, posterior, records)
            r_b = birth_existences(r_u, config.birth)
            births = make_birth_components(zs, r_b, r_u, config.birth, scan, rng, allocator)
        else:
            births = ()
        glmb = _refresh_particles(posterior, config.filter.particles_per_track, rng)
        out.append(ScanEstimate(scan, estimate, rho))
    return out


@dataclass(frozen=True)
class RunResult:
    """Scores and traces of one Monte Carlo run."""

    run: int
    ospa: np.ndarray
    cardinality_mean: np.ndarray
    cardinality_std: np.ndarray
    truth_counts: np.ndarray
    track_rows: tuple[tuple, ...]
    truth_rows: tuple[tuple, ...]


def run_single(config: RunConfig, run_index: int) -> RunResult:
    """Simulate and filter one run; deterministic in (config.seed, run_index)."""
    sim_rng = np.random.default_rng(np.random.SeedSequence([config.seed, run_index, 0]))
    filter_rng = np.random.default_rng(np.random.SeedSequence([config.seed, run_index, 1]))
    truth = generate_truth(config.scenario, config.motion, sim_rng)
    records = generate_measurements(truth, config.sensor, sim_rng)
    estimates = filter_scans([(r.scan, r.measurements) for r in records], config, filter_rng)

    ospa_curve = np.array([
        ospa(est.estimate.positions(), rec.truth.positions(), config.ospa)
        for est, rec in zip(estimates, records)
    ])
    truth_counts = np.array([len(rec.truth) for rec in records], dtype=int)
    card = cardinality_series([est.cardinality for est in estimates], truth_counts)
    track_rows = tuple(
        (run_index, est.scan, s.label.birth_scan, s.label.birth_index, s.position[0], s.position[1])
        for est in estimates
        for s in est.estimate
    )
    truth_rows = tuple(
        (run_index, rec.scan, s.label.birth_scan, s.label.birth_index, s.position[0], s.position[1])
        for rec in records
        for s in rec.truth
    )
    return RunResult(
        run=run_index,
        ospa=ospa_curve,
        cardinality_mean=np.array([c[0] for c in card]),
        cardinality_std=np.array([c[1] for c in card]),
        truth_counts=truth_counts,
        track_rows=track_rows,
        truth_rows=truth_rows,
    )


def _run_single_args(args: tuple[RunConfig, int]) -> RunResult:
    return run_single(*args)


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated Monte Carlo results plus the files written."""

    config: RunConfig
    ospa: np.ndarray
    cardinality_mean: np.ndarray
    cardinality_std: np.ndarray
    truth_counts: np.ndarray
    files: dict[str, str]


def _fmt(value) -> str:
    return repr(float(value))


def write_outputs(results: Sequence[RunResult], out_dir: str) -> dict[str, str]:
    """Write the four CSV outputs; fixed order and float formatting so equal
    results give byte-identical files."""
    os.makedirs(out_dir, exist_ok=True)
    runs = len(results)
    scans = len(results[0].ospa)
    files = {}

    path = os.path.join(out_dir, "ospa.csv")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("scan,mean_ospa," + ",".join(f"run_{r}" for r in range(runs)) + "\n")
        for k in range(scans):
            vals = [results[r].ospa[k] for r in range(runs)]
            fh.write(",".join([str(k), _fmt(np.mean(vals))] + [_fmt(v) for v in vals]) + "\n")
    files["ospa"] = path

    path = os.path.join(out_dir, "cardinality.csv")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("scan,truth,est_mean,est_std\n")
        for k in range(scans):
            truth = np.mean([results[r].truth_counts[k] for r in range(runs)])
            mean = np.mean([results[r].cardinality_mean[k] for r in range(runs)])
            std = np.mean([results[r].cardinality_std[k] for r in range(runs)])
            fh.write(",".join([str(k), _fmt(truth), _fmt(mean), _fmt(std)]) + "\n")
    files["cardinality"] = path

    for name, attr in (("tracks", "track_rows"), ("truth", "truth_rows")):
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("run,scan,label_birth_time,label_birth_index,p_x,p_y\n")
            for result in results:
                for run, scan, bt, bi, px, py in getattr(result, attr):
                    fh.write(f"{run},{scan},{bt},{bi},{_fmt(px)},{_fmt(py)}\n")
        files[name] = path
    return files


def run_experiment(config: RunConfig, out_dir: str | None = None) -> ExperimentReport:
    """Execute config.runs Monte Carlo runs (pooled when workers > 1) and
    write the aggregate CSVs."""
    out_dir = out_dir or config.output_dir
    tasks = [(config, r) for r in range(config.runs)]
    if config.workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, config.runs)) as pool:
            results = list(pool.map(_run_single_args, tasks))
    else:
        results = [run_single(config, r) for r in range(config.runs)]
    files = write_outputs(results, out_dir)
    return ExperimentReport(
        config=config,
        ospa=np.stack([r.ospa for r in results]),
        cardinality_mean=np.stack([r.cardinality_mean for r in results]),
        cardinality_std=np.stack([r.cardinality_std for r in results]),
        truth_counts=np.stack([r.truth_counts for r in results]),
        files=files,
    )


def replay_measurements(config: RunConfig, measurements_path: str, out_dir: str) -> dict[str, str]:
    """Filter a recorded measurement file and write the track estimates.

    The filter stream is SeedSequence([seed, 0, 1]), matching run 0 of a
    simulated experiment.
    """
    scans = load_measurements(measurements_path)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0, 1]))
    estimates = filter_scans(scans, config, rng)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "tracks.csv")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("run,scan,label_birth_time,label_birth_index,p_x,p_y\n")
        for est in estimates:
            for s in est.estimate:
                fh.write(
                    f"0,{est.scan},{s.label.birth_scan},{s.label.birth_index},"
                    f"{_fmt(s.position[0])},{_fmt(s.position[1])}\n"
                )
    return {"tracks": path}
