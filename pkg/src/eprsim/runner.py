"""Scenario pipeline: prepare, attach devices, measure, analyze, report.

``run_scenario`` executes a scenario end to end and writes
``report.json`` (plus ``records.csv`` when sampling) into the output
directory. The report has a fixed set of top-level keys; sections whose
analysis was not selected are null. Every number in the report is a
deterministic function of the scenario file and the seed, so reruns are
byte-identical regardless of worker count; the timings section counts
work units instead of measuring wall-clock time for the same reason.

Exit codes: 0 success, 2 scenario validation failure, 3 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .errors import ScenarioError, StateError, UndefinedConditionalError
from .evolution import (
    FreeEvolution,
    equal_outcome_probability,
    evolve_back,
    gauge_equivalence_check,
    retrodicted_pair_state,
)
from .linalg import SubsystemLayout
from .locality import (
    ConditionalEvent,
    axis_payload,
    bell_locality_test,
    chsh_report,
    conditional_probability,
    estimate_correlations,
    exact_correlation_table,
    factorization_test,
    joint_table,
    lhv_brute_force,
    pair_records,
)
from .measurement import (
    SAMPLE_CHUNK,
    PointerDevice,
    attach_device,
    measure_unitary,
    records_to_csv,
    sample_outcomes,
)
from .observers import (
    ObserverFrame,
    carol_view,
    equal_reading_probability,
    matrix_payload,
    no_signaling_check,
    pointer_joint_distribution,
    reduced_view,
)
from .quantum import (
    Outcome,
    QuantumSystem,
    X_AXIS,
    Y_AXIS,
    axes_equal,
    axis_ket,
    born_probability,
    make_singlet,
)
from .scenario import Scenario, load_scenario, scenario_to_dict

REPORT_KEYS = (
    "scenario",
    "seed",
    "probabilities",
    "locality",
    "chsh",
    "frames",
    "retrodiction",
    "timings",
)

LHV_MIXTURES = 200


def _prepare_state(scenario: Scenario) -> QuantumSystem:
    labels = (scenario.stations[0].particle, scenario.stations[1].particle)
    spec = scenario.state
    if spec.kind == "singlet":
        return make_singlet(labels)
    layout = SubsystemLayout.of((labels[0], 2), (labels[1], 2))
    if spec.kind == "product":
        outcome = Outcome.from_name(spec.outcome)
        axis = spec.axis.to_axis()
        vec = np.kron(axis_ket(axis, outcome), axis_ket(axis, outcome.opposite))
        return QuantumSystem(layout, vec)
    vec = np.array([complex(re, im) for re, im in spec.amplitudes])
    try:
        return QuantumSystem(layout, vec)
    except StateError as exc:
        raise ScenarioError(str(exc), location="state.amplitudes") from None


def _alt_axis(station):
    if len(station.axes) > 1:
        return station.axes[1].to_axis()
    primary = station.primary_axis()
    return X_AXIS if not axes_equal(primary, X_AXIS) else Y_AXIS


def _conditional_payload(source, side, outcome, own_axis, partner_axis, partner_outcome) -> dict:
    event = ConditionalEvent(
        side, outcome, own_axis, partner_axis=partner_axis, partner_outcome=partner_outcome
    )
    try:
        value = conditional_probability(source, event)
        return {"value": value, "undefined": False}
    except UndefinedConditionalError as exc:
        return {
            "value": None,
            "undefined": True,
            "joint_probability": exc.joint_probability,
            "conditioning_probability": exc.conditioning_probability,
        }


def _probabilities_section(pre, scenario, axis_a, axis_b, record_pairs) -> dict:
    obs_a = scenario.stations[0].observer
    obs_b = scenario.stations[1].observer
    table = joint_table(pre, axis_a, axis_b)
    up_a = born_probability(
        pre, [(scenario.stations[0].particle, axis_a, Outcome.UP)]
    )
    eq5 = _conditional_payload(pre, "a", Outcome.UP, axis_a, axis_b, Outcome.DOWN)
    eq6_cond = _conditional_payload(pre, "a", Outcome.UP, axis_a, axis_b, Outcome.UP)
    section = {
        "settings": {"axis_a": axis_payload(axis_a), "axis_b": axis_payload(axis_b)},
        "eq4": {"tag": "eq4", "observer": obs_a, "outcome": "up", "value": up_a},
        "eq5": {
            "tag": "eq5",
            "target": {"observer": obs_a, "outcome": "up"},
            "given": {"observer": obs_b, "outcome": "down"},
            **eq5,
        },
        "eq6": {
            "tag": "eq6",
            "joint": {"outcome_a": "up", "outcome_b": "up", "value": float(table[0, 0])},
            "conditional": {
                "target": {"observer": obs_a, "outcome": "up"},
                "given": {"observer": obs_b, "outcome": "up"},
                **eq6_cond,
            },
        },
        "joint_table": [[float(x) for x in row] for row in table],
        "sampled": None,
    }
    if record_pairs is not None:
        n = len(record_pairs)
        up_counts = {obs_a: 0, obs_b: 0}
        equal = 0
        for rec_a, rec_b in record_pairs:
            if rec_a.outcome is Outcome.UP:
                up_counts[obs_a] += 1
            if rec_b.outcome is Outcome.UP:
                up_counts[obs_b] += 1
            if rec_a.outcome is rec_b.outcome:
                equal += 1
        section["sampled"] = {
            "trials": n,
            "up_frequency": {name: count / n for name, count in up_counts.items()},
            "equal_outcome_records": equal,
            "opposite_outcome_fraction": (n - equal) / n,
        }
    return section


def _locality_section(pre, scenario, setting_pairs) -> dict | None:
    want_bell = "bell_locality" in scenario.analyses
    want_fact = "factorization" in scenario.analyses
    if not want_bell and not want_fact:
        return None
    section: dict = {"bell_locality": None, "factorization": None}
    if want_bell:
        results = []
        for axis_a, axis_b in setting_pairs:
            rep = bell_locality_test(pre, axis_a, axis_b)
            rep["tag"] = "eq7" if rep["holds"] else "eq8"
            results.append(rep)
        section["bell_locality"] = results
    if want_fact:
        section["factorization"] = [
            factorization_test(pre, axis_a, axis_b) for axis_a, axis_b in setting_pairs
        ]
    return section


def _chsh_section(pre, scenario, exact_sampling_off, workers) -> tuple[dict | None, int, int]:
    want_chsh = "chsh" in scenario.analyses
    want_lhv = "lhv_baseline" in scenario.analyses
    if not want_chsh and not want_lhv:
        return None, 0, 0
    st_a, st_b = scenario.stations
    axes_a = tuple(a.to_axis() for a in st_a.axes)
    axes_b = tuple(b.to_axis() for b in st_b.axes)
    setting_pairs = [(sa, sb) for sa in axes_a for sb in axes_b]
    section: dict = {}
    sampled_trials = 0
    chunks = 0
    if want_chsh:
        exact_table = exact_correlation_table(pre, setting_pairs)
        section = chsh_report(exact_table)
        section["tag"] = "chsh"
        section["sampled"] = None
        if not exact_sampling_off and scenario.trials > 0:
            n_pair = max(1, scenario.trials // len(setting_pairs))
            child_seeds = np.random.SeedSequence(scenario.seed).generate_state(
                len(setting_pairs), np.uint64
            )
            all_pairs = []
            for (axis_a, axis_b), child in zip(setting_pairs, child_seeds):
                settings = [
                    (st_a.observer, st_a.particle, st_a.device, axis_a),
                    (st_b.observer, st_b.particle, st_b.device, axis_b),
                ]
                records = sample_outcomes(pre, settings, n_pair, int(child), workers)
                all_pairs.extend(pair_records(records))
                sampled_trials += n_pair
                chunks += -(-n_pair // SAMPLE_CHUNK)
            emp = chsh_report(estimate_correlations(all_pairs))
            emp["trials_per_setting"] = n_pair
            section["sampled"] = emp
    if want_lhv:
        mix_seed = scenario.seed if scenario.seed is not None else 0
        section["lhv_baseline"] = lhv_brute_force(
            (axes_a[0], axes_a[1]), (axes_b[0], axes_b[1]), n_mixtures=LHV_MIXTURES, seed=mix_seed
        )
    return section, sampled_trials, chunks


def _frames_section(pre, post, scenario, axis_a, axis_b, god_view) -> dict:
    st_a, st_b = scenario.stations
    alice = ObserverFrame(st_a.observer, {st_a.particle, st_a.device})
    bob = ObserverFrame(st_b.observer, {st_b.particle, st_b.device})
    alice_layout = pre.layout.restricted({st_a.particle, st_a.device})
    bob_layout = pre.layout.restricted({st_b.particle, st_b.device})
    carol_layout = post.layout.restricted({st_a.device, st_b.device})
    carol_rho = carol_view(post)

    post_alt_b = measure_unitary(
        measure_unitary(pre, st_a.particle, st_a.device, axis_a),
        st_b.particle,
        st_b.device,
        _alt_axis(st_b),
    )
    post_only_a = measure_unitary(pre, st_a.particle, st_a.device, axis_a)
    post_alt_a = measure_unitary(
        measure_unitary(pre, st_a.particle, st_a.device, _alt_axis(st_a)),
        st_b.particle,
        st_b.device,
        axis_b,
    )
    post_only_b = measure_unitary(pre, st_b.particle, st_b.device, axis_b)
    deviations = {
        st_a.observer: {
            "partner_axis_change": no_signaling_check(post, post_alt_b, alice),
            "partner_unmeasured": no_signaling_check(post, post_only_a, alice),
        },
        st_b.observer: {
            "partner_axis_change": no_signaling_check(post, post_alt_a, bob),
            "partner_unmeasured": no_signaling_check(post, post_only_b, bob),
        },
    }
    max_dev = max(v for d in deviations.values() for v in d.values())
    section = {
        "pre": {
            st_a.observer: matrix_payload(reduced_view(pre, alice), alice_layout),
            st_b.observer: matrix_payload(reduced_view(pre, bob), bob_layout),
        },
        "post": {
            st_a.observer: matrix_payload(reduced_view(post, alice), alice_layout),
            st_b.observer: matrix_payload(reduced_view(post, bob), bob_layout),
            "carol": matrix_payload(carol_rho, carol_layout),
            "pointer_distribution": pointer_joint_distribution(carol_rho).tolist(),
            "equal_reading_probability": equal_reading_probability(carol_rho),
        },
        "no_signaling": {
            "deviations": deviations,
            "max_deviation": max_dev,
            "holds": max_dev <= 1e-10,
        },
        "god_view": None,
    }
    if god_view:
        section["god_view"] = {
            "pre": matrix_payload(pre.density(), pre.layout),
            "post": matrix_payload(post.density(), post.layout),
        }
    return section


def _retrodiction_section(prepared, scenario, axis_a) -> dict:
    st_a, st_b = scenario.stations
    labels = (st_a.particle, st_b.particle)
    retro = retrodicted_pair_state(Outcome.UP, axis_a, labels)
    ev = FreeEvolution(
        scenario.retrodiction.t0, scenario.retrodiction.t1, scenario.retrodiction.energy
    )
    evolved, phase = evolve_back(retro, ev)
    overlap = None
    if prepared.is_pure:
        overlap = float(abs(np.vdot(prepared.state, retro.state)) ** 2)
    partner_down = born_probability(evolved, [(st_b.particle, axis_a, Outcome.DOWN)])
    perp = _perpendicular(axis_a)
    gauge = gauge_equivalence_check(prepared, evolved, [(axis_a, axis_a), (perp, perp)])
    return {
        "axis": axis_payload(axis_a),
        "outcome": "up",
        "evolution": {
            "t0": scenario.retrodiction.t0,
            "t1": scenario.retrodiction.t1,
            "energy": scenario.retrodiction.energy,
        },
        "phase": [float(phase.real), float(phase.imag)],
        "phase_modulus": float(abs(phase)),
        "overlap_squared_with_prepared": overlap,
        "partner_opposite_probability": partner_down,
        "same_axis_equal_outcome": {
            "prepared": equal_outcome_probability(prepared, axis_a, axis_a),
            "retrodicted": equal_outcome_probability(evolved, axis_a, axis_a),
        },
        "gauge_equivalence": gauge,
    }


def _perpendicular(axis):
    from .quantum import MeasurementAxis

    n = axis.unit_vector
    candidate = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(candidate) < 1e-12:
        candidate = np.array([1.0, 0.0, 0.0])
    return MeasurementAxis.from_vector(candidate)


def execute(
    scenario: Scenario, *, exact: bool = False, god_view: bool = False, workers: int = 1
) -> tuple[dict, str | None]:
    """Run all selected analyses; returns (report, csv text or None)."""
    st_a, st_b = scenario.stations
    axis_a = st_a.primary_axis()
    axis_b = st_b.primary_axis()
    prepared = _prepare_state(scenario)
    pre = attach_device(
        attach_device(prepared, st_a.particle, PointerDevice(st_a.device)),
        st_b.particle,
        PointerDevice(st_b.device),
    )
    post = measure_unitary(
        measure_unitary(pre, st_a.particle, st_a.device, axis_a),
        st_b.particle,
        st_b.device,
        axis_b,
    )

    sampling = scenario.trials > 0 and not exact
    csv_text = None
    record_pairs = None
    sampled_total = 0
    chunks = 0
    if sampling:
        settings = [
            (st_a.observer, st_a.particle, st_a.device, axis_a),
            (st_b.observer, st_b.particle, st_b.device, axis_b),
        ]
        records = sample_outcomes(pre, settings, scenario.trials, scenario.seed, workers)
        csv_text = records_to_csv(records)
        record_pairs = pair_records(records)
        sampled_total += scenario.trials
        chunks += -(-scenario.trials // SAMPLE_CHUNK)

    all_axes_a = [a.to_axis() for a in st_a.axes]
    all_axes_b = [b.to_axis() for b in st_b.axes]
    setting_pairs = [(sa, sb) for sa in all_axes_a for sb in all_axes_b]

    probabilities = None
    if "probabilities" in scenario.analyses:
        probabilities = _probabilities_section(pre, scenario, axis_a, axis_b, record_pairs)

    locality = _locality_section(pre, scenario, setting_pairs)

    chsh, chsh_trials, chsh_chunks = _chsh_section(pre, scenario, exact, workers)
    sampled_total += chsh_trials
    chunks += chsh_chunks

    frames = None
    if "frames" in scenario.analyses:
        frames = _frames_section(pre, post, scenario, axis_a, axis_b, god_view)

    retrodiction = None
    if "retrodiction" in scenario.analyses:
        retrodiction = _retrodiction_section(prepared, scenario, axis_a)

    report = {
        "scenario": scenario_to_dict(scenario),
        "seed": scenario.seed,
        "probabilities": probabilities,
        "locality": locality,
        "chsh": chsh,
        "frames": frames,
        "retrodiction": retrodiction,
        "timings": {
            "trials_requested": scenario.trials,
            "trials_sampled": sampled_total,
            "sampling_chunks": chunks,
            "analyses_run": len(scenario.analyses),
            "hilbert_dimension": post.dim,
        },
    }
    assert tuple(report.keys()) == REPORT_KEYS
    return report, csv_text


def _summary_lines(report: dict) -> list[str]:
    lines = []
    sc = report["scenario"]
    lines.append(f"scenario  {sc['name']}  (state: {sc['state']['kind']})")
    for st in sc["stations"]:
        axes = ", ".join(
            f"theta={a['theta_deg']:g} phi={a['phi_deg']:g}" for a in st["axes"]
        )
        lines.append(f"  station  {st['observer']:<8s} particle={st['particle']} "
                     f"device={st['device']}  axes: {axes}")
    probs = report["probabilities"]
    if probs:
        eq5 = probs["eq5"]
        eq5_text = "undefined" if eq5["undefined"] else f"{eq5['value']:.6f}"
        lines.append(
            f"  probabilities  P(up)={probs['eq4']['value']:.6f}  "
            f"P(up|partner down)={eq5_text}  joint(up,up)={probs['eq6']['joint']['value']:.6f}"
        )
        if probs["sampled"]:
            s = probs["sampled"]
            freqs = "  ".join(f"{k}:{v:.4f}" for k, v in s["up_frequency"].items())
            lines.append(
                f"  sampled        trials={s['trials']}  up freq {freqs}  "
                f"equal-outcome records={s['equal_outcome_records']}"
            )
    loc = report["locality"]
    if loc:
        for name in ("bell_locality", "factorization"):
            if loc[name]:
                worst = max(r["gap"] for r in loc[name])
                all_hold = all(r["holds"] for r in loc[name])
                lines.append(f"  {name.replace('_', ' '):<14s} holds={all_hold}  max gap={worst:.6f}")
    chsh = report["chsh"]
    if chsh:
        if "S" in chsh:
            lines.append(
                f"  chsh           |S|={chsh['S']:.7f}  classical bound={chsh['classical_bound']:g}  "
                f"quantum value={chsh['quantum_value']:.7f}"
            )
            if chsh.get("sampled"):
                lines.append(f"  chsh sampled   |S|={chsh['sampled']['S']:.4f}")
        if chsh.get("lhv_baseline"):
            lhv = chsh["lhv_baseline"]
            lines.append(
                f"  lhv baseline   max |S|={lhv['max_abs_S']:g} over 16 strategies  "
                f"mixtures max={lhv['mixture_max_abs_S']:.6f}"
            )
    frames = report["frames"]
    if frames:
        lines.append(
            f"  frames         equal-reading prob={frames['post']['equal_reading_probability']:.6f}  "
            f"no-signaling max dev={frames['no_signaling']['max_deviation']:.2e}"
        )
    retro = report["retrodiction"]
    if retro:
        overlap = retro["overlap_squared_with_prepared"]
        overlap_text = "n/a" if overlap is None else f"{overlap:.6f}"
        lines.append(
            f"  retrodiction   overlap^2={overlap_text}  "
            f"phase=({retro['phase'][0]:+.4f}, {retro['phase'][1]:+.4f})  "
            f"same-axis agree={retro['gauge_equivalence']['observables'][0]['agree']}"
        )
    return lines


def run_scenario(
    path: str | Path,
    out_dir: str | Path = ".",
    *,
    seed: int | None = None,
    trials: int | None = None,
    exact: bool = False,
    god_view: bool = False,
    workers: int = 1,
) -> int:
    """Execute a scenario file and write reports into ``out_dir``."""
    try:
        scenario = load_scenario(path).with_overrides(seed=seed, trials=trials)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    try:
        report, csv_text = execute(
            scenario, exact=exact, god_view=god_view, workers=workers
        )
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report_path = out / "report.json"
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        written = [str(report_path)]
        if csv_text is not None:
            csv_path = out / "records.csv"
            csv_path.write_text(csv_text)
            written.append(str(csv_path))
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for line in _summary_lines(report):
        print(line)
    print("  wrote " + "  ".join(written))
    return 0
