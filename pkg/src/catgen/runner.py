"""Batch driver behind the CLI: resolves presets, runs sweep points, writes CSVs.

Each sweep point is an independent job that writes its own files, so workers
never share a writer. Numbers are written with 17 significant digits and the
manifest carries no timestamps, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import cmath
import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analytic, closed, tomography
from . import open_system as osys
from .errors import InvariantViolation
from .model import SystemParams, effective_for, rwa_validity
from .presets import KINDS, SWEEPABLE, Preset, get_preset, resolve_params, resolve_time

SAMPLE_INTERVAL = 0.01
CLOSED_KINDS = ("entanglement", "closed", "closed_tomography")


@dataclass
class RunConfig:
    preset: str | None = None
    kind: str | None = None
    t_end: object = None
    overrides: dict = field(default_factory=dict)
    sweep: dict | None = None
    out: Path = Path("out")
    workers: int = 1
    step: float | None = None
    truncation: int | None = None
    step_divisor: int | None = None
    sample_interval: float = SAMPLE_INTERVAL
    observables: tuple | None = None

    def resolved_preset(self) -> Preset:
        if self.preset is not None:
            base = get_preset(self.preset)
        else:
            base = Preset("custom", self.kind or "closed", "explicit configuration")
        kind = self.kind or base.kind
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}; valid kinds: {', '.join(KINDS)}")
        settings = dict(base.settings)
        settings.update(self.overrides)
        sweep = base.sweep if self.sweep is None else self.sweep
        t_end = base.t_end if self.t_end is None else self.t_end
        preset = Preset(base.name, kind, base.description, settings, t_end, dict(sweep))
        for key in list(preset.sweep) + list(settings):
            if key not in SWEEPABLE:
                raise KeyError(f"unknown parameter {key!r}; valid names: {', '.join(SWEEPABLE)}")
        return preset


def fmt(x) -> str:
    if x is None:
        return "nan"
    return format(float(x), ".17g")


def write_csv(path: Path, header, columns) -> None:
    rows = zip(*columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def output_times(t_end: float, interval: float, extra=()) -> np.ndarray:
    n = int(math.floor(t_end / interval + 1e-9))
    grid = {round(k * interval, 12) for k in range(n + 1)}
    grid.add(float(t_end))
    grid.update(float(x) for x in extra if 0 <= x <= t_end)
    return np.array(sorted(grid))


def point_label(point: dict) -> str:
    return "_".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in point.items())


def expand_sweep(sweep: dict) -> list:
    if not sweep:
        return [{}]
    keys = list(sweep)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(sweep[k] for k in keys))]


# --- per-kind jobs ---------------------------------------------------------------

def _closed_config(params, job):
    return closed.IntegratorConfig(
        n_d=job["truncation"] if job["truncation"] is not None else 14,
        step=job["step"],
        step_divisor=job["step_divisor"] or 160,
        sample_interval=job["sample_interval"],
    )


def _open_config(params, job):
    return osys.open_integrator_config(
        params, n_d=job["truncation"], step=job["step"], step_divisor=job["step_divisor"],
        sample_interval=job["sample_interval"],
    )


def _run_entanglement(params, t_end, job, out):
    sol = analytic.rwa_solution(params)
    t = output_times(t_end, job["sample_interval"])
    s = [analytic.entropy(sol, x) for x in t]
    n = [analytic.log_negativity_closed(sol, x) for x in t]
    write_csv(out / "entanglement.csv", ["gt", "S", "N"], [t, s, n])
    return {"entanglement.csv"}, {}, None


def _run_closed(params, t_end, job, out):
    cfg = _closed_config(params, job)
    sol = analytic.rwa_solution(params)
    t_s = math.pi / abs(sol.delta) if sol.delta else t_end
    t = output_times(t_end, job["sample_interval"], [t_s])
    traj = closed.integrate(params, cfg, t_end, times=t)
    files = set()
    n = [closed.mean_excitation_numeric(s) for s in traj]
    n_rwa = [analytic.mean_excitation(sol, x) for x in t]
    write_csv(out / "mean_excitation.csv", ["gt", "n", "n_rwa"], [t, n, n_rwa])
    files.add("mean_excitation.csv")
    f = [closed.fidelity_vs_rwa(s, sol) for s in traj]
    write_csv(out / "fidelity.csv", ["gt", "f"], [t, f])
    files.add("fidelity.csv")
    alphas = [analytic.alpha_t(sol, x) for x in t]
    write_csv(out / "alpha.csv", ["gt", "alpha_re", "alpha_im"],
              [t, [a.real for a in alphas], [a.imag for a in alphas]])
    files.add("alpha.csv")
    if params.coupling_variant == "sigma_z_displacement":
        pairs = [closed.condition_on_qubit(s) for s in traj]
        cat = [closed.fidelity_vs_cat(s, a) for s, a in zip(traj, alphas)]
        prw = [analytic.cat_probabilities(sol, x) for x in t]
        write_csv(out / "cat_fidelity.csv", ["gt", "f_plus", "f_minus"],
                  [t, [c[0] for c in cat], [c[1] for c in cat]])
        write_csv(out / "probabilities.csv", ["gt", "p_plus", "p_minus", "P_plus_rwa", "P_minus_rwa"],
                  [t, [p.p_plus for p in pairs], [p.p_minus for p in pairs],
                   [p[0] for p in prw], [p[1] for p in prw]])
        files |= {"cat_fidelity.csv", "probabilities.csv"}
    return files, traj.diagnostics, cfg


def _theta_0(alpha: complex) -> float:
    return cmath.phase(alpha) - 0.5 * math.pi


def _run_closed_tomography(params, t_end, job, out):
    cfg = _closed_config(params, job)
    sol = analytic.rwa_solution(params)
    traj = closed.integrate(params, cfg, t_end, times=[t_end])
    state = traj.final
    alpha = analytic.alpha_t(sol, t_end)
    theta = _theta_0(alpha)
    pair = closed.condition_on_qubit(state)
    f_plus, f_minus = closed.fidelity_vs_cat(state, alpha)
    files = set()
    neg = {}
    for tag, vec in (("plus", pair.plus), ("minus", pair.minus)):
        if vec is None:
            continue
        grid = tomography.wigner(vec)
        pts = grid.points().ravel()
        write_csv(out / f"wigner_{tag}.csv", ["beta_re", "beta_im", "W"],
                  [pts.real, pts.imag, grid.values.ravel()])
        q = tomography.quadrature_distribution(vec, theta)
        write_csv(out / f"quad_{tag}.csv", ["X", "P"], [q.X, q.P])
        files |= {f"wigner_{tag}.csv", f"quad_{tag}.csv"}
        neg[tag] = tomography.wigner_negativity_volume(grid)
    write_csv(out / "summary.csv",
              ["gt", "p_plus", "p_minus", "f_plus", "f_minus", "theta_0", "alpha_re", "alpha_im",
               "negativity_plus", "negativity_minus"],
              [[t_end], [pair.p_plus], [pair.p_minus], [f_plus], [f_minus], [theta],
               [alpha.real], [alpha.imag], [neg.get("plus")], [neg.get("minus")]])
    files.add("summary.csv")
    return files, traj.diagnostics, cfg


def _open_observables(state, alpha):
    plus, minus = osys.condition_on_qubit_open(state)
    return (
        osys.fidelity_open(plus, alpha), osys.fidelity_open(minus, alpha),
        plus.probability, minus.probability, plus, minus,
    )


def _run_open(params, t_end, job, out):
    cfg = _open_config(params, job)
    sol = analytic.rwa_solution(params)
    t_s = math.pi / abs(sol.delta)
    t = output_times(t_end, job["sample_interval"], [t_s])
    traj = osys.integrate_master(params, cfg, t_end, times=t)
    lneg = [osys.log_negativity_numeric(s) for s in traj]
    write_csv(out / "log_negativity.csv", ["gt", "N", "N_raw"],
              [t, [x.value for x in lneg], [x.raw for x in lneg]])
    obs = [_open_observables(s, analytic.alpha_t(sol, x)) for s, x in zip(traj, t)]
    write_csv(out / "fidelity.csv", ["gt", "F_plus", "F_minus"],
              [t, [o[0] for o in obs], [o[1] for o in obs]])
    write_csv(out / "probabilities.csv", ["gt", "P_plus", "P_minus"],
              [t, [o[2] for o in obs], [o[3] for o in obs]])
    write_csv(out / "invariants.csv",
              ["gt", "trace", "hermiticity", "min_eigenvalue", "purity", "top_population"],
              [t, [s.trace for s in traj], [s.hermiticity_residual for s in traj],
               [s.min_eigenvalue for s in traj], [s.purity for s in traj],
               [s.top_population for s in traj]])
    k = int(np.searchsorted(t, t_s))
    o = obs[k]
    write_csv(out / "summary.csv", ["gt", "F_plus", "F_minus", "P_plus", "P_minus", "N"],
              [[t[k]], [o[0]], [o[1]], [o[2]], [o[3]], [lneg[k].value]])
    files = {"log_negativity.csv", "fidelity.csv", "probabilities.csv", "invariants.csv", "summary.csv"}
    return files, traj.diagnostics, cfg


def _run_open_snapshot(params, t_end, job, out, what):
    cfg = _open_config(params, job)
    sol = analytic.rwa_solution(params)
    traj = osys.integrate_master(params, cfg, t_end, times=[t_end])
    alpha = analytic.alpha_t(sol, t_end)
    f_plus, _, p_plus, _, plus, _ = _open_observables(traj.final, alpha)
    header = ["gt", "F_plus", "P_plus"]
    values = [[t_end], [f_plus], [p_plus]]
    files = {"summary.csv"}
    if plus.defined and what == "wigner":
        grid = tomography.wigner(plus.rho_r)
        pts = grid.points().ravel()
        write_csv(out / "wigner_plus.csv", ["beta_re", "beta_im", "W"],
                  [pts.real, pts.imag, grid.values.ravel()])
        header += ["interference_amplitude", "negativity_volume"]
        values += [[tomography.interference_amplitude(grid, alpha)],
                   [tomography.wigner_negativity_volume(grid)]]
        files.add("wigner_plus.csv")
    if plus.defined and what == "quadrature":
        q = tomography.quadrature_distribution(plus.rho_r, _theta_0(alpha))
        write_csv(out / "quad_plus.csv", ["X", "P"], [q.X, q.P])
        header += ["theta_0", "fringe_amplitude"]
        values += [[q.theta], [tomography.fringe_amplitude(q, tomography.fringe_wavenumber(alpha))]]
        files.add("quad_plus.csv")
    write_csv(out / "summary.csv", header, values)
    return files, traj.diagnostics, cfg


def _run_open_wigner(params, t_end, job, out):
    return _run_open_snapshot(params, t_end, job, out, "wigner")


def _run_open_quadrature(params, t_end, job, out):
    return _run_open_snapshot(params, t_end, job, out, "quadrature")


RUNNERS = {
    "entanglement": _run_entanglement,
    "closed": _run_closed,
    "closed_tomography": _run_closed_tomography,
    "open": _run_open,
    "open_wigner": _run_open_wigner,
    "open_quadrature": _run_open_quadrature,
}


def _effective_summary(params: SystemParams) -> dict:
    eff = effective_for(params)
    val = rwa_validity(params, eff)
    return {
        "n_0": eff.n_0, "delta": eff.delta, "g": eff.g, "negative_detuning": eff.negative_detuning,
        "rwa_ratios": val.ratios, "rwa_pass": val.passed,
    }


def run_point(job: dict) -> dict:
    """Run one sweep point; never raises for numeric invariant violations."""
    out = Path(job["dir"])
    out.mkdir(parents=True, exist_ok=True)
    params = resolve_params(job["values"])
    t_end = resolve_time(job["t_end"], params)
    entry = {
        "label": job["label"],
        "dir": job["rel"],
        "params": params.as_dict(),
        "effective": _effective_summary(params),
        "t_end": t_end,
    }
    try:
        files, diagnostics, cfg = RUNNERS[job["kind"]](params, t_end, job, out)
    except InvariantViolation as exc:
        entry.update(status="failed", error=str(exc), diagnostics=exc.diagnostics, files=[])
        return entry
    if job["observables"]:
        for name in sorted(files - set(job["observables"])):
            (out / name).unlink()
        files = files & set(job["observables"])
    entry.update(status="ok", files=sorted(files), diagnostics=diagnostics)
    if cfg is not None:
        entry["integrator"] = {
            "method": cfg.method, "n_d": cfg.n_d, "step": cfg.resolved_step(params),
            "norm_renormalize": cfg.norm_renormalize,
        }
    return entry


@dataclass
class RunResult:
    manifest: dict
    out: Path

    @property
    def ok(self) -> bool:
        return not self.manifest["partial"]


def _observable_files(names):
    if not names:
        return None
    return tuple(n if n.endswith(".csv") else f"{n}.csv" for n in names)


def plan(config: RunConfig) -> tuple:
    preset = config.resolved_preset()
    points = expand_sweep(preset.sweep)
    jobs = []
    for point in points:
        label = point_label(point)
        rel = label or "."
        values = preset.values(point)
        params = resolve_params(values)
        if preset.kind in CLOSED_KINDS and params.dissipative:
            raise ValueError(
                f"kind {preset.kind!r} has no dissipation; nonzero gamma_q or kappa_r needs kind = open"
            )
        jobs.append({
            "label": label,
            "rel": rel,
            "dir": str(Path(config.out) / rel),
            "values": values,
            "kind": preset.kind,
            "t_end": preset.t_end,
            "step": config.step,
            "truncation": config.truncation,
            "step_divisor": config.step_divisor,
            "sample_interval": config.sample_interval,
            "observables": _observable_files(config.observables),
        })
    return preset, jobs


def run(config: RunConfig) -> RunResult:
    preset, jobs = plan(config)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    workers = max(1, int(config.workers))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            entries = list(pool.map(run_point, jobs))
    else:
        entries = [run_point(j) for j in jobs]
    manifest = {
        "code_version": __version__,
        "preset": preset.name,
        "kind": preset.kind,
        "description": preset.description,
        "t_end_spec": preset.t_end,
        "sweep": preset.sweep,
        "settings": {
            "step": config.step, "truncation": config.truncation,
            "step_divisor": config.step_divisor, "sample_interval": config.sample_interval,
        },
        "points": entries,
        "partial": any(e["status"] != "ok" for e in entries),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return RunResult(manifest, out)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
