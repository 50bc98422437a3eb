"""Declarative experiment descriptions, loaded from TOML.

A scenario names the prepared state, two measurement stations (observer,
particle, pointer device, one or more axes in degrees), the analyses to
run, and the sampling budget. Parsing is strict: unknown keys, wrong
types, and violated invariants raise :class:`ScenarioError` with a
field location so a user can fix the file. Parsed scenarios round-trip
through :func:`scenario_to_toml` exactly (floats serialize via repr).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib as _toml
except ModuleNotFoundError:
    import tomli as _toml

from .errors import ScenarioError
from .quantum import MeasurementAxis, Outcome

ANALYSES = (
    "probabilities",
    "bell_locality",
    "factorization",
    "chsh",
    "lhv_baseline",
    "frames",
    "retrodiction",
)

STATE_KINDS = ("singlet", "product", "custom")

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class AxisSpec:
    """Axis in degrees as written in the file; kept verbatim so
    serialization round-trips bit for bit."""

    theta_deg: float
    phi_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta_deg", float(self.theta_deg))
        object.__setattr__(self, "phi_deg", float(self.phi_deg))
        if not math.isfinite(self.theta_deg) or not math.isfinite(self.phi_deg):
            raise ScenarioError(f"axis angles must be finite, got {self}")
        if not 0.0 <= self.theta_deg <= 180.0:
            raise ScenarioError(f"theta_deg must lie in [0, 180], got {self.theta_deg}")

    def to_axis(self) -> MeasurementAxis:
        return MeasurementAxis.from_degrees(self.theta_deg, self.phi_deg)


@dataclass(frozen=True)
class StateSpec:
    """Prepared pair state: the singlet, an anti-correlated product
    along an axis, or explicit amplitudes ((re, im) pairs, length 4)."""

    kind: str
    axis: AxisSpec | None = None
    outcome: str | None = None
    amplitudes: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ScenarioError(
                f"state kind must be one of {STATE_KINDS}, got {self.kind!r}",
                location="state.kind",
            )
        if self.kind == "product":
            if self.axis is None or self.outcome is None:
                raise ScenarioError(
                    "product state requires 'axis' and 'outcome'", location="state"
                )
            if self.outcome not in ("up", "down"):
                raise ScenarioError(
                    f"outcome must be 'up' or 'down', got {self.outcome!r}",
                    location="state.outcome",
                )
        if self.kind == "custom":
            if self.amplitudes is None:
                raise ScenarioError("custom state requires 'amplitudes'", location="state")
            object.__setattr__(
                self,
                "amplitudes",
                tuple(tuple(float(x) for x in pair) for pair in self.amplitudes),
            )
            if len(self.amplitudes) != 4 or any(len(p) != 2 for p in self.amplitudes):
                raise ScenarioError(
                    "amplitudes must be 4 (re, im) pairs", location="state.amplitudes"
                )


@dataclass(frozen=True)
class StationSpec:
    """One measurement station: who measures which particle with which
    device, and the axis (or two axes, for CHSH) they may choose."""

    observer: str
    particle: str
    device: str
    axes: tuple[AxisSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        for name, value in (
            ("observer", self.observer),
            ("particle", self.particle),
            ("device", self.device),
        ):
            if not isinstance(value, str) or not value:
                raise ScenarioError(f"station {name} must be a nonempty string")
        if not self.axes:
            raise ScenarioError(
                f"station {self.observer!r} needs at least one axis", location="stations"
            )

    def primary_axis(self) -> MeasurementAxis:
        return self.axes[0].to_axis()


@dataclass(frozen=True)
class RetrodictionSpec:
    """Free-evolution parameters for the retrodiction analysis."""

    t0: float = 0.0
    t1: float = 1.0
    energy: float = 1.0

    def __post_init__(self):
        for name in ("t0", "t1", "energy"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not math.isfinite(value):
                raise ScenarioError(
                    f"retrodiction.{name} must be finite", location=f"retrodiction.{name}"
                )


@dataclass(frozen=True)
class Scenario:
    """A full validated experiment description."""

    name: str
    state: StateSpec
    stations: tuple[StationSpec, ...]
    analyses: tuple[str, ...]
    trials: int = 0
    seed: int | None = None
    retrodiction: RetrodictionSpec = field(default_factory=RetrodictionSpec)

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "analyses", tuple(self.analyses))
        if not self.name or not isinstance(self.name, str):
            raise ScenarioError("scenario name must be a nonempty string", location="name")
        if len(self.stations) != 2:
            raise ScenarioError(
                f"exactly two stations are supported, got {len(self.stations)}",
                location="stations",
            )
        labels = [s.particle for s in self.stations] + [s.device for s in self.stations]
        if len(set(labels)) != 4:
            raise ScenarioError(
                f"particle and device labels must all differ, got {labels}",
                location="stations",
            )
        if len({s.observer for s in self.stations}) != 2:
            raise ScenarioError("observer names must differ", location="stations")
        if not self.analyses:
            raise ScenarioError("at least one analysis must be selected", location="analyses")
        for a in self.analyses:
            if a not in ANALYSES:
                raise ScenarioError(
                    f"unknown analysis {a!r}; choose from {ANALYSES}", location="analyses"
                )
        if len(set(self.analyses)) != len(self.analyses):
            raise ScenarioError("analyses must not repeat", location="analyses")
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ScenarioError(
                f"trials must be a non-negative integer, got {self.trials!r}",
                location="trials",
            )
        if self.seed is not None:
            if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
                raise ScenarioError(
                    f"seed must be an integer in [0, 2^64), got {self.seed!r}",
                    location="seed",
                )
        if self.trials > 0 and self.seed is None:
            raise ScenarioError("a seed is required whenever trials > 0", location="seed")
        if "chsh" in self.analyses or "lhv_baseline" in self.analyses:
            for s in self.stations:
                if len(s.axes) != 2:
                    raise ScenarioError(
                        f"chsh/lhv_baseline need exactly 2 axes per station; "
                        f"station {s.observer!r} has {len(s.axes)}",
                        location="stations",
                    )

    def with_overrides(self, seed: int | None = None, trials: int | None = None) -> "Scenario":
        """New scenario with command-line overrides applied and the
        invariants re-checked."""
        updates = {}
        if seed is not None:
            updates["seed"] = seed
        if trials is not None:
            updates["trials"] = trials
        return replace(self, **updates) if updates else self


def _check_keys(table: dict, allowed: set[str], location: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ScenarioError(
            f"unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}", location=location
        )


def _get(table: dict, key: str, kinds, location: str, required: bool = True, default=None):
    if key not in table:
        if required:
            raise ScenarioError(f"missing required key {key!r}", location=location)
        return default
    value = table[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        names = (
            kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        )
        raise ScenarioError(
            f"expected {names} for {key!r}, got {type(value).__name__}",
            location=f"{location}.{key}" if location else key,
        )
    return value


def _axis_from_dict(data, location: str) -> AxisSpec:
    if not isinstance(data, dict):
        raise ScenarioError(
            f"axis must be a table with theta_deg/phi_deg, got {type(data).__name__}",
            location=location,
        )
    _check_keys(data, {"theta_deg", "phi_deg"}, location)
    theta = _get(data, "theta_deg", (int, float), location)
    phi = _get(data, "phi_deg", (int, float), location, required=False, default=0.0)
    try:
        return AxisSpec(float(theta), float(phi))
    except ScenarioError as exc:
        raise ScenarioError(str(exc), location=location) from None


def _state_from_dict(data: dict) -> StateSpec:
    _check_keys(data, {"kind", "axis", "outcome", "amplitudes"}, "state")
    kind = _get(data, "kind", str, "state")
    axis = _axis_from_dict(data["axis"], "state.axis") if "axis" in data else None
    outcome = _get(data, "outcome", str, "state", required=False)
    amplitudes = None
    if "amplitudes" in data:
        raw = _get(data, "amplitudes", list, "state")
        pairs = []
        for i, pair in enumerate(raw):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair)
            ):
                raise ScenarioError(
                    "each amplitude must be a [re, im] pair of numbers",
                    location=f"state.amplitudes[{i}]",
                )
            pairs.append((float(pair[0]), float(pair[1])))
        amplitudes = tuple(pairs)
    return StateSpec(kind, axis, outcome, amplitudes)


def _station_from_dict(data: dict, index: int) -> StationSpec:
    location = f"stations[{index}]"
    _check_keys(data, {"observer", "particle", "device", "axes"}, location)
    axes_raw = _get(data, "axes", list, location)
    axes = tuple(
        _axis_from_dict(a, f"{location}.axes[{i}]") for i, a in enumerate(axes_raw)
    )
    return StationSpec(
        observer=_get(data, "observer", str, location),
        particle=_get(data, "particle", str, location),
        device=_get(data, "device", str, location),
        axes=axes,
    )


def scenario_from_dict(data: dict) -> Scenario:
    _check_keys(
        data,
        {"name", "trials", "seed", "analyses", "state", "stations", "retrodiction"},
        "",
    )
    name = _get(data, "name", str, "")
    state = _state_from_dict(_get(data, "state", dict, ""))
    stations_raw = _get(data, "stations", list, "")
    stations = tuple(_station_from_dict(s, i) for i, s in enumerate(stations_raw))
    analyses_raw = _get(data, "analyses", list, "")
    for i, a in enumerate(analyses_raw):
        if not isinstance(a, str):
            raise ScenarioError("analyses entries must be strings", location=f"analyses[{i}]")
    trials = _get(data, "trials", int, "", required=False, default=0)
    seed = _get(data, "seed", int, "", required=False)
    retro = RetrodictionSpec()
    if "retrodiction" in data:
        rtable = _get(data, "retrodiction", dict, "")
        _check_keys(rtable, {"t0", "t1", "energy"}, "retrodiction")
        retro = RetrodictionSpec(
            t0=_get(rtable, "t0", (int, float), "retrodiction", required=False, default=0.0),
            t1=_get(rtable, "t1", (int, float), "retrodiction", required=False, default=1.0),
            energy=_get(
                rtable, "energy", (int, float), "retrodiction", required=False, default=1.0
            ),
        )
    return Scenario(
        name=name,
        state=state,
        stations=stations,
        analyses=tuple(analyses_raw),
        trials=trials,
        seed=seed,
        retrodiction=retro,
    )


def scenario_from_toml(text: str) -> Scenario:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML parse error: {exc}") from None
    return scenario_from_dict(data)


def bundled_scenarios() -> dict[str, str]:
    """Name -> TOML text for every scenario shipped with the package."""
    from importlib.resources import files

    folder = files("eprsim").joinpath("scenarios")
    out = {}
    for entry in folder.iterdir():
        if entry.name.endswith(".toml"):
            out[entry.name[: -len(".toml")]] = entry.read_text()
    return dict(sorted(out.items()))


def load_scenario(ref: str | Path) -> Scenario:
    """Load a scenario from a file path, or by bundled name."""
    path = Path(ref)
    if path.exists():
        return scenario_from_toml(path.read_text())
    bundled = bundled_scenarios()
    if str(ref) in bundled:
        return scenario_from_toml(bundled[str(ref)])
    raise ScenarioError(
        f"scenario {str(ref)!r} is neither a file nor a bundled name "
        f"(bundled: {sorted(bundled)})"
    )


def scenario_to_dict(s: Scenario) -> dict:
    """Plain-data form, also embedded verbatim in reports."""
    state: dict = {"kind": s.state.kind}
    if s.state.axis is not None:
        state["axis"] = {"theta_deg": s.state.axis.theta_deg, "phi_deg": s.state.axis.phi_deg}
    if s.state.outcome is not None:
        state["outcome"] = s.state.outcome
    if s.state.amplitudes is not None:
        state["amplitudes"] = [list(p) for p in s.state.amplitudes]
    return {
        "name": s.name,
        "trials": s.trials,
        "seed": s.seed,
        "analyses": list(s.analyses),
        "state": state,
        "stations": [
            {
                "observer": st.observer,
                "particle": st.particle,
                "device": st.device,
                "axes": [{"theta_deg": a.theta_deg, "phi_deg": a.phi_deg} for a in st.axes],
            }
            for st in s.stations
        ],
        "retrodiction": {
            "t0": s.retrodiction.t0,
            "t1": s.retrodiction.t1,
            "energy": s.retrodiction.energy,
        },
    }


def _toml_float(x: float) -> str:
    return repr(float(x))


def _toml_str(x: str) -> str:
    return json.dumps(x)


def _axis_inline(a: AxisSpec) -> str:
    return (
        "{ theta_deg = " + _toml_float(a.theta_deg) + ", phi_deg = " + _toml_float(a.phi_deg) + " }"
    )


def scenario_to_toml(s: Scenario) -> str:
    """Serialize so that parse(serialize(s)) == s exactly."""
    lines = [f"name = {_toml_str(s.name)}", f"trials = {s.trials}"]
    if s.seed is not None:
        lines.append(f"seed = {s.seed}")
    lines.append("analyses = [" + ", ".join(_toml_str(a) for a in s.analyses) + "]")
    lines.append("")
    lines.append("[state]")
    lines.append(f"kind = {_toml_str(s.state.kind)}")
    if s.state.axis is not None:
        lines.append(f"axis = {_axis_inline(s.state.axis)}")
    if s.state.outcome is not None:
        lines.append(f"outcome = {_toml_str(s.state.outcome)}")
    if s.state.amplitudes is not None:
        pairs = ", ".join(
            "[" + _toml_float(re) + ", " + _toml_float(im) + "]"
            for re, im in s.state.amplitudes
        )
        lines.append(f"amplitudes = [{pairs}]")
    lines.append("")
    lines.append("[retrodiction]")
    lines.append(f"t0 = {_toml_float(s.retrodiction.t0)}")
    lines.append(f"t1 = {_toml_float(s.retrodiction.t1)}")
    lines.append(f"energy = {_toml_float(s.retrodiction.energy)}")
    for st in s.stations:
        lines.append("")
        lines.append("[[stations]]")
        lines.append(f"observer = {_toml_str(st.observer)}")
        lines.append(f"particle = {_toml_str(st.particle)}")
        lines.append(f"device = {_toml_str(st.device)}")
        lines.append("axes = [" + ", ".join(_axis_inline(a) for a in st.axes) + "]")
    return "\n".join(lines) + "\n"


def build_outcome(name: str) -> Outcome:
    return Outcome.from_name(name)
