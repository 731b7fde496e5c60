"""Dispatch validated scenario configs to the physics pipelines.

Each kind expands into independent work items.  Items run in order, or
in a process pool when ``jobs > 1``; results are merged in the declared
order either way, so reports do not depend on scheduling.
"""

import datetime
import math
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context

import numpy as np
from scipy.linalg import expm

from .. import __version__
from ..aa import aa_phase, aa_vs_berry_convergence
from ..berry import berry_phase_adiabatic_numeric, berry_phase_connection, berry_phase_discrete, build_frames
from ..core import spin_operators, wrap_phase
from ..errors import ContractViolation, DegeneracyError, DegeneracySplittingError, GeometricPhaseError
from ..evolution import ParameterPath, evolve
from ..optics import PolarizerChain, chain_phase
from ..sphere import geodesic_polygon, polygon_solid_angle
from ..systems import constant_family, cone_path, loop_path, quadrupole_family, spin_field_family, spin_level_index
from ..wz import build_degenerate_frames, operator_distance, wz_holonomy_adiabatic_oracle, wz_holonomy_discrete
from .config import KINDS
from .report import Check, Row, RunReport

# errors that mean the scenario itself is wrong rather than one row failing
SYSTEMIC_ERRORS = (DegeneracyError, DegeneracySplittingError, ContractViolation)

CONVENTIONS = {
    "hbar": 1.0,
    "inner_product": "conjugate-linear in the first argument",
    "principal_phase": "(-pi, pi]",
    "solid_angle_orientation": "right-hand rule about the outward normal",
    "berry_phase": "-sum arg <n_k|n_k+1> = -m * solid angle",
    "pancharatnam_chain": "ph<input|final> = -alpha/2",
}


class ScenarioAbort(GeometricPhaseError):
    """A systemic failure that invalidates the whole scenario."""


def _aligned(measured, predicted):
    """``predicted`` moved by whole turns onto the branch of ``measured``, plus |difference|."""
    if measured is None or predicted is None:
        return None, None
    p = float(measured + wrap_phase(predicted - measured))
    return p, abs(float(measured) - p)


def _row(cfg, level, measured=None, predicted=None, **kw):
    predicted, deviation = _aligned(measured, predicted)
    measured = None if measured is None else float(measured)
    return Row(cfg["name"], cfg["kind"], level, measured_phase=measured, predicted_phase=predicted,
               deviation=deviation, **kw)


def _failed(cfg, level, exc, **kw):
    return Row(cfg["name"], cfg["kind"], level, notes=f"error={type(exc).__name__}: {exc}", flagged=True, **kw)


def _cap(theta):
    return 2.0 * math.pi * (1.0 - math.cos(theta))


def _levels(s, levels):
    if levels:
        return list(levels)
    return [s - k for k in range(int(round(2 * s)) + 1)]


def _fmt(x):
    return repr(float(x))


# -- work items (module level so a process pool can pickle them) -------------

def task_berry_loop(cfg, s, coupling, points, levels, omega, method, label):
    family = spin_field_family(s, coupling)
    path = loop_path(points)
    idx = [spin_level_index(s, m, coupling) for m in levels]
    frames = build_frames(family, path, levels=idx)
    fn = berry_phase_discrete if method == "discrete" else berry_phase_connection
    rows = []
    for m, i in zip(levels, idx):
        phase = fn(frames, i).phase
        winding = int(round((phase - wrap_phase(phase)) / (2 * math.pi)))
        rows.append(_row(cfg, f"s={s:g},m={m:g}", phase, -m * omega, samples=len(points) - 1,
                         notes=f"{label};winding={winding}"))
    return rows


def task_berry_adiabatic(cfg, s, coupling, theta, m, samples, sweep_time, steps_per_time, leakage_tol):
    family = spin_field_family(s, coupling)
    path = cone_path(theta, samples)
    steps = int(math.ceil(steps_per_time * sweep_time))
    kw = dict(samples=samples, steps=steps, sweep_time=float(sweep_time), extra={"theta": float(theta)})
    level = f"s={s:g},m={m:g}"
    try:
        dec = berry_phase_adiabatic_numeric(family, path, spin_level_index(s, m, coupling), sweep_time, steps,
                                            leakage_tol=leakage_tol)
    except SYSTEMIC_ERRORS:
        raise
    except GeometricPhaseError as exc:
        return [_failed(cfg, level, exc, **kw)]
    notes = f"theta={_fmt(theta)};dynamical={_fmt(dec.dynamical)};winding={dec.winding}"
    return [_row(cfg, level, dec.geometric, -m * _cap(theta), fidelity=dec.fidelity, notes=notes, **kw)]


def _coherent_state(s, theta):
    _, sy, _ = spin_operators(s)
    top = np.zeros(int(round(2 * s)) + 1, dtype=complex)
    top[0] = 1.0
    return expm(-1j * theta * sy) @ top


def task_precession(cfg, s, coupling, field_strength, theta, steps, periods, cyclicity_tol):
    sz = spin_operators(s)[2]
    omega = coupling * field_strength
    duration = periods * 2.0 * math.pi / abs(omega)
    family = constant_family(omega * sz)
    path = ParameterPath(np.array([0.0, duration]), np.zeros((2, 1)), closed=True)
    level = f"s={s:g},theta={_fmt(theta)}"
    kw = dict(steps=steps, sweep_time=duration)
    traj = evolve(family, path, _coherent_state(s, theta), steps)
    try:
        dec = aa_phase(traj, cyclicity_tol)
    except SYSTEMIC_ERRORS:
        raise
    except GeometricPhaseError as exc:
        return [_failed(cfg, level, exc, **kw)]
    predicted = -math.copysign(1.0, omega) * periods * s * _cap(theta)
    notes = f"total={_fmt(dec.total)};dynamical={_fmt(dec.dynamical)};winding={dec.winding}"
    return [_row(cfg, level, dec.geometric, predicted, fidelity=dec.fidelity, notes=notes, **kw)]


def task_sweep(cfg, s, coupling, theta, m, samples, sweep_time, steps_per_time, cyclicity_tol):
    family = spin_field_family(s, coupling)
    path = cone_path(theta, samples)
    (row,) = aa_vs_berry_convergence(family, path, spin_level_index(s, m, coupling), [sweep_time],
                                     steps_per_time=steps_per_time, cyclicity_tol=cyclicity_tol)
    level = f"s={s:g},m={m:g}"
    kw = dict(samples=samples, steps=row.steps, sweep_time=float(sweep_time), fidelity=row.fidelity)
    if row.flagged:
        return [Row(cfg["name"], cfg["kind"], level, notes=f"error={row.note}", flagged=True, **kw)]
    return [_row(cfg, level, row.beta, -m * _cap(theta), notes=f"berry_discrete={_fmt(row.berry_reference)}", **kw)]


def task_wz_discrete(cfg, s, coupling, theta, block, samples):
    family = quadrupole_family(s, coupling)
    frames = build_degenerate_frames(family, cone_path(theta, samples), block)
    D = wz_holonomy_discrete(frames)
    defect = D.unitarity_defect()
    return [
        _row(cfg, f"block={block},k={k}", ph, None, samples=samples,
             notes=f"discrete;unitarity_defect={_fmt(defect)}")
        for k, ph in enumerate(D.eigenphases)
    ]


def task_wz_oracle(cfg, s, coupling, theta, block, samples, sweep_time, steps_per_time, leakage_tol):
    family = quadrupole_family(s, coupling)
    path = cone_path(theta, samples)
    steps = int(math.ceil(steps_per_time * sweep_time))
    kw = dict(samples=samples, steps=steps, sweep_time=float(sweep_time))
    level = f"block={block},oracle"
    frames = build_degenerate_frames(family, path, block)
    D = wz_holonomy_discrete(frames)
    try:
        O = wz_holonomy_adiabatic_oracle(family, path, block, sweep_time, steps, leakage_tol=leakage_tol,
                                         initial_basis=frames.bases[0])
    except SYSTEMIC_ERRORS:
        raise
    except GeometricPhaseError as exc:
        return [_failed(cfg, level, exc, **kw)]
    dist = operator_distance(O.entries, D.entries)
    notes = f"operator_distance={_fmt(dist)};leakage={_fmt(O.leakage)}"
    return [_row(cfg, level, None, None, fidelity=1.0 - O.leakage, notes=notes,
                 extra={"operator_distance": dist}, **kw)]


def _spinor_spec(v):
    if isinstance(v, str):
        return v
    if len(v) == 2:
        return np.array([complex(a, b) for a, b in v])
    return np.array(v, dtype=float)


def task_chain(cfg, label, vertices):
    chain = PolarizerChain.of([_spinor_spec(v) for v in vertices])
    try:
        res = chain_phase(chain)
    except SYSTEMIC_ERRORS:
        raise
    except GeometricPhaseError as exc:
        return [_failed(cfg, label, exc)]
    notes = f"solid_angle={_fmt(res.solid_angle.value)};transmission={_fmt(res.transmission)}"
    return [_row(cfg, label, res.phase, res.predicted, notes=notes)]


# -- expansion into work items ----------------------------------------------

def _expand_berry_cone(cfg):
    sy, nu = cfg["system"], cfg["numerics"]
    items = []
    for s in sy["spin"]:
        for theta in sy["theta"]:
            levels = _levels(s, sy["levels"])
            if nu["method"] == "adiabatic":
                for m in levels:
                    for T in nu["sweep_times"]:
                        items.append((task_berry_adiabatic, dict(
                            s=s, coupling=sy["coupling"], theta=theta, m=m, samples=nu["samples"],
                            sweep_time=T, steps_per_time=nu["steps_per_time"], leakage_tol=nu["leakage_tol"])))
            else:
                path = cone_path(theta, nu["samples"])
                items.append((task_berry_loop, dict(
                    s=s, coupling=sy["coupling"], points=path.points, levels=levels, omega=_cap(theta),
                    method=nu["method"], label=f"theta={_fmt(theta)}")))
    return items


def _expand_custom_loop(cfg):
    sy, nu = cfg["system"], cfg["numerics"]
    verts = np.array(sy["vertices"], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    omega = polygon_solid_angle(verts).value
    points = geodesic_polygon(verts, nu["samples"])
    return [
        (task_berry_loop, dict(s=s, coupling=sy["coupling"], points=points, levels=_levels(s, sy["levels"]),
                               omega=omega, method=nu["method"], label=f"solid_angle={_fmt(omega)}"))
        for s in sy["spin"]
    ]


def _expand_precession(cfg):
    sy, nu = cfg["system"], cfg["numerics"]
    return [
        (task_precession, dict(s=s, coupling=sy["coupling"], field_strength=sy["field_strength"], theta=theta,
                               steps=nu["steps"], periods=nu["periods"], cyclicity_tol=nu["cyclicity_tol"]))
        for s in sy["spin"] for theta in sy["theta"]
    ]


def _expand_sweep(cfg):
    sy, nu = cfg["system"], cfg["numerics"]
    return [
        (task_sweep, dict(s=sy["spin"], coupling=sy["coupling"], theta=sy["theta"], m=sy["level"],
                          samples=nu["samples"], sweep_time=T, steps_per_time=nu["steps_per_time"],
                          cyclicity_tol=nu["cyclicity_tol"]))
        for T in nu["sweep_times"]
    ]


def _expand_wz(cfg):
    sy, nu = cfg["system"], cfg["numerics"]
    base = dict(s=sy["spin"], coupling=sy["coupling"], theta=sy["theta"], block=sy["block"], samples=nu["samples"])
    items = [(task_wz_discrete, base)]
    for T in nu["sweep_times"]:
        items.append((task_wz_oracle, dict(base, sweep_time=T, steps_per_time=nu["steps_per_time"],
                                           leakage_tol=nu["leakage_tol"])))
    return items


def _expand_chain(cfg):
    sy = cfg["system"]
    items = []
    if sy["vertices"]:
        items.append((task_chain, dict(label="chain", vertices=sy["vertices"])))
    rng = np.random.default_rng(cfg["seed"])
    for i in range(sy["random_chains"]):
        n = int(rng.integers(sy["min_vertices"], sy["max_vertices"] + 1))
        z = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
        verts = [[[float(c.real), float(c.imag)] for c in v] for v in z]
        items.append((task_chain, dict(label=f"random-{i}", vertices=verts)))
    return items


# -- acceptance checks per kind ----------------------------------------------

def _every_row(rows, tol):
    bad = [r.level for r in rows if r.deviation is None or r.deviation > tol]
    return [Check(f"deviation <= {tol:g} on every row", not bad, ", ".join(bad))]


def _series_checks(values, tol, slack, what):
    if not values:
        return [Check(f"final {what} < {tol:g}", False, "no rows")]
    ok_mono = all(b <= a * (1.0 + slack) for a, b in zip(values, values[1:]))
    series = ", ".join(_fmt(v) for v in values)
    return [
        Check(f"final {what} < {tol:g}", values[-1] < tol, series),
        Check(f"{what} non-increasing (slack {slack:g})", ok_mono, series),
    ]


def _check_berry_cone(cfg, rows):
    nu = cfg["numerics"]
    if nu["method"] != "adiabatic":
        return _every_row(rows, nu["tolerance"])
    checks = []
    groups = {}
    for r in rows:
        groups.setdefault((r.level, r.extra.get("theta")), []).append(r)
    for series in groups.values():
        devs = [r.deviation for r in series if r.deviation is not None]
        checks += _series_checks(devs, nu["tolerance"], nu["monotone_slack"], f"deviation [{series[0].level}]")
    return checks


def _check_sweep(cfg, rows):
    nu = cfg["numerics"]
    devs = [r.deviation for r in rows if r.deviation is not None]
    return _series_checks(devs, nu["tolerance"], nu["monotone_slack"], "deviation")


def _check_wz(cfg, rows):
    nu = cfg["numerics"]
    checks = []
    defects = [float(r.notes.split("unitarity_defect=")[1]) for r in rows if "unitarity_defect=" in r.notes]
    checks.append(Check("discrete holonomy unitary within 1e-8", all(d < 1e-8 for d in defects)))
    dists = [r.extra["operator_distance"] for r in rows if "operator_distance" in r.extra]
    if nu["sweep_times"]:
        checks += _series_checks(dists, nu["tolerance"], nu["monotone_slack"], "oracle distance")
    return checks


def _check_rows(cfg, rows):
    return _every_row(rows, cfg["numerics"]["tolerance"])


PIPELINES = {
    "berry-cone": (_expand_berry_cone, _check_berry_cone),
    "berry-custom-loop": (_expand_custom_loop, _check_rows),
    "aa-precession": (_expand_precession, _check_rows),
    "aa-vs-berry-sweep": (_expand_sweep, _check_sweep),
    "wz-quadrupole": (_expand_wz, _check_wz),
    "pancharatnam-chain": (_expand_chain, _check_rows),
}


def self_check(kinds=KINDS, pipelines=PIPELINES):
    """Every scenario kind must map to exactly one pipeline."""
    missing = sorted(set(kinds) - set(pipelines))
    extra = sorted(set(pipelines) - set(kinds))
    if missing or extra:
        raise RuntimeError(f"scenario dispatch mismatch: missing {missing}, unregistered {extra}")


self_check()


def _call(item):
    fn, kwargs = item
    return fn(**kwargs)


def _tolerances(numerics):
    return {k: v for k, v in numerics.items() if "tol" in k or k == "monotone_slack"}


def run_scenario(config, jobs=1):
    """Run every work item of ``config`` and assemble the report.

    Systemic physics errors abort with ScenarioAbort; other physics
    errors become flagged rows.
    """
    cfg = config.echo()
    expand, check = PIPELINES[config.kind]
    items = [(fn, dict(kw, cfg=cfg)) for fn, kw in expand(cfg)]
    try:
        if jobs > 1 and len(items) > 1:
            with ProcessPoolExecutor(max_workers=jobs, mp_context=get_context("spawn")) as pool:
                batches = list(pool.map(_call, items))
        else:
            batches = [_call(it) for it in items]
    except SYSTEMIC_ERRORS as exc:
        raise ScenarioAbort(f"{type(exc).__name__}: {exc}") from exc
    rows = tuple(r for batch in batches for r in batch)
    provenance = {
        "artifact": "geomphase",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "conventions": CONVENTIONS,
        "tolerances": _tolerances(cfg["numerics"]),
    }
    return RunReport(cfg, rows, tuple(check(cfg, rows)), provenance)
