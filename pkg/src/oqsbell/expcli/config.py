"""Declarative sweep configuration.

A sweep is described by a single YAML document, for example::

    experiment: steady
    n_qubits: 20
    hamiltonian: {model: lmg, J: 1.0, h: 0.05}
    dissipator: {kind: davies, beta: 10.0}
    axes:
      - {name: h, min: 0.0, max: 0.3, count: 13}
      - {name: beta, min: 0.1, max: 30.0, count: 12, spacing: log}

:func:`load_spec` fills in every default so that :meth:`SweepSpec.resolved`
reproduces the run exactly.
"""

import copy
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from ..errors import ConfigError

EXPERIMENTS = ("steady", "trajectory", "attack")
FORMATS = ("csv", "json", "svg")

HAMILTONIAN_DEFAULTS = {
    "lmg": {"J": 1.0, "h": 0.0},
    "squared_z": {"omega": 1.0},
}
DISSIPATOR_DEFAULTS = {
    "davies": {"beta": None, "gamma0": 0.01, "coupling": "sy", "secular_tol": None},
    "rotated_ladder": {"zeta": None, "gamma": 1.0},
    "jump": {"operator": None, "scale": 1.0, "gamma": None},
    "measurement": {"kappa": None, "observable": "sz"},
}
INITIAL_DEFAULTS = {
    "dicke": {"k": None},
    "dicke_superposition": {"k1": None, "k2": None},
    "gaussian": {"variance": None},
    "thermal": {"beta": None},
    "file": {"path": None},
    "steady": {"dissipator": None},
}
SPIN_OPERATORS = ("sx", "sy", "sz", "splus", "sminus")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def values(self):
        if self.count == 1:
            return np.array([self.min], dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def as_dict(self):
        return {"name": self.name, "min": self.min, "max": self.max,
                "count": self.count, "spacing": self.spacing}


@dataclass
class SweepSpec:
    experiment: str
    n_qubits: int
    hamiltonian: dict
    dissipator: dict
    axes: list = field(default_factory=list)
    times: Optional[list] = None
    p_values: Optional[list] = None
    initial_state: Optional[dict] = None
    experiment_id: Optional[str] = None
    evolution_method: str = "eig"
    formats: tuple = ("csv", "json")

    def resolved(self):
        """Plain-data form of the spec with all defaults filled in."""
        return {
            "experiment": self.experiment,
            "experiment_id": self.experiment_id,
            "n_qubits": self.n_qubits,
            "hamiltonian": copy.deepcopy(self.hamiltonian),
            "dissipator": copy.deepcopy(self.dissipator),
            "initial_state": copy.deepcopy(self.initial_state),
            "axes": [a.as_dict() for a in self.axes],
            "times": None if self.times is None else [float(t) for t in self.times],
            "p_values": None if self.p_values is None else [float(p) for p in self.p_values],
            "evolution_method": self.evolution_method,
            "formats": list(self.formats),
        }

    def kappas(self):
        kappa = self.dissipator.get("kappa")
        return [float(k) for k in kappa] if isinstance(kappa, list) else [float(kappa)]


def _fill(section, defaults_by_kind, key, where):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    kind = section.get(key)
    if kind not in defaults_by_kind:
        raise ConfigError(f"{where}.{key} must be one of {sorted(defaults_by_kind)}, got {kind!r}")
    out = {key: kind}
    defaults = defaults_by_kind[kind]
    unknown = set(section) - set(defaults) - {key}
    if unknown:
        raise ConfigError(f"unknown fields in {where}: {sorted(unknown)}")
    for name, default in defaults.items():
        value = section.get(name, default)
        if value is None and default is None and name not in ("secular_tol",):
            raise ConfigError(f"{where}.{name} is required for {key} {kind!r}")
        out[name] = value
    return out


def _resolve_dissipator(section, where, allow_kappa_list=False):
    d = _fill(section, DISSIPATOR_DEFAULTS, "kind", where)
    kind = d["kind"]
    if kind == "jump" and d["operator"] not in SPIN_OPERATORS:
        raise ConfigError(f"{where}.operator must be one of {SPIN_OPERATORS}")
    if kind == "measurement":
        if d["observable"] not in ("sx", "sy", "sz"):
            raise ConfigError(f"{where}.observable must be sx, sy or sz")
        if isinstance(d["kappa"], list) and not allow_kappa_list:
            raise ConfigError(f"{where}.kappa may only be a list for attack experiments")
    if kind == "davies" and d["coupling"] not in SPIN_OPERATORS:
        raise ConfigError(f"{where}.coupling must be one of {SPIN_OPERATORS}")
    return d


def _parse_axis(raw, i):
    if not isinstance(raw, dict) or "name" not in raw:
        raise ConfigError(f"axes[{i}] must be a mapping with a name")
    try:
        axis = Axis(name=str(raw["name"]), min=float(raw["min"]),
                    max=float(raw.get("max", raw["min"])),
                    count=int(raw.get("count", 1)), spacing=str(raw.get("spacing", "linear")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"axes[{i}] is malformed: {exc}") from None
    if axis.count < 1:
        raise ConfigError(f"axes[{i}].count must be >= 1")
    if axis.max < axis.min:
        raise ConfigError(f"axes[{i}] range is empty ({axis.min} > {axis.max})")
    if axis.spacing not in ("linear", "log"):
        raise ConfigError(f"axes[{i}].spacing must be linear or log")
    if axis.spacing == "log" and axis.min <= 0:
        raise ConfigError(f"axes[{i}] log spacing needs a positive minimum")
    return axis


def _parse_grid(raw, where):
    """A time or probability grid: an explicit list or a {min, max, count} range."""
    if raw is None:
        return None
    if isinstance(raw, list):
        values = [float(v) for v in raw]
    elif isinstance(raw, dict):
        values = list(_parse_axis(dict(raw, name=where), 0).values())
    else:
        raise ConfigError(f"{where} must be a list or a range mapping")
    if any(v < 0 for v in values) or any(b < a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{where} must be non-negative and ascending")
    if len(set(values)) != len(values):
        raise ConfigError(f"{where} must be strictly ascending")
    return [float(v) for v in values]


def sweepable_sections(spec):
    sections = {"hamiltonian": spec.hamiltonian, "dissipator": spec.dissipator}
    if spec.initial_state is not None:
        sections["initial_state"] = spec.initial_state
        if spec.initial_state.get("kind") == "steady":
            sections["initial_state.dissipator"] = spec.initial_state["dissipator"]
    return sections


def resolve_axis_target(spec, name):
    """Map an axis name (bare or ``section.field``) to ``(section, field)``."""
    sections = sweepable_sections(spec)
    if "." in name:
        section, _, fld = name.rpartition(".")
        if section in sections and fld in sections[section] and fld not in ("kind", "model"):
            return section, fld
        raise ConfigError(f"axis {name!r} does not refer to a declared field")
    hits = [s for s, d in sections.items() if name in d and name not in ("kind", "model")]
    if not hits:
        raise ConfigError(f"axis {name!r} does not refer to a declared field")
    if len(hits) > 1:
        raise ConfigError(f"axis {name!r} is ambiguous between {hits}; use a section prefix")
    return hits[0], name


def spec_from_dict(raw, experiment=None):
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    raw = copy.deepcopy(raw)
    exp = raw.pop("experiment", None) or experiment
    if experiment is not None and exp != experiment:
        raise ConfigError(f"configuration declares experiment {exp!r} but {experiment!r} was requested")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    known = {"experiment_id", "n_qubits", "hamiltonian", "dissipator", "axes", "times",
             "p", "initial_state", "evolution_method", "formats"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level fields: {sorted(unknown)}")

    n = raw.get("n_qubits")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ConfigError(f"n_qubits must be an integer >= 2, got {n!r}")
    ham = _fill(raw.get("hamiltonian", {"model": "lmg"}), HAMILTONIAN_DEFAULTS, "model", "hamiltonian")
    diss = _resolve_dissipator(raw.get("dissipator"), "dissipator", allow_kappa_list=exp == "attack")

    axes = [_parse_axis(a, i) for i, a in enumerate(raw.get("axes") or [])]
    if len(axes) > 2:
        raise ConfigError("at most two sweep axes are supported")
    if len({a.name for a in axes}) != len(axes):
        raise ConfigError("axis names must be distinct")

    initial = raw.get("initial_state")
    if initial is not None:
        initial = _fill(initial, INITIAL_DEFAULTS, "kind", "initial_state")
        if initial["kind"] == "steady":
            initial["dissipator"] = _resolve_dissipator(initial["dissipator"], "initial_state.dissipator")

    method = raw.get("evolution_method", "eig")
    if method not in ("eig", "expm", "rk"):
        raise ConfigError(f"evolution_method must be eig, expm or rk, got {method!r}")
    formats = _parse_formats(raw.get("formats", ["csv", "json"]))

    spec = SweepSpec(experiment=exp, n_qubits=n, hamiltonian=ham, dissipator=diss, axes=axes,
                     initial_state=initial, experiment_id=str(raw.get("experiment_id") or exp),
                     evolution_method=method, formats=formats)

    if exp == "steady":
        if raw.get("times") is not None or raw.get("p") is not None or initial is not None:
            raise ConfigError("steady experiments take no times, p grid or initial state")
        if diss["kind"] == "measurement":
            raise ConfigError("measurement dephasing alone has no unique steady state to sweep")
    elif exp == "trajectory":
        spec.times = _parse_grid(raw.get("times"), "times")
        if not spec.times:
            raise ConfigError("trajectory experiments need a non-empty times grid")
        if initial is None:
            raise ConfigError("trajectory experiments need an initial_state")
    else:
        if diss["kind"] != "measurement":
            raise ConfigError("attack experiments need a measurement dissipator")
        if initial is None or initial["kind"] != "steady":
            raise ConfigError("attack experiments start from initial_state {kind: steady, dissipator: ...}")
        spec.p_values = _parse_grid(raw.get("p"), "p")
        if not spec.p_values:
            raise ConfigError("attack experiments need a non-empty p grid")
        if any(k < 0 for k in spec.kappas()):
            raise ConfigError("measurement rates must be >= 0")
        if any(k == 0 for k in spec.kappas()):
            raise ConfigError("p = kappa t is undefined for kappa = 0; use a trajectory experiment")

    for axis in axes:
        resolve_axis_target(spec, axis.name)
        if axis.name in ("kappa", "dissipator.kappa") and exp == "attack":
            raise ConfigError("attack experiments sweep kappa through dissipator.kappa, not an axis")
    return spec


def _parse_formats(raw):
    if isinstance(raw, str):
        raw = [f.strip() for f in raw.split(",") if f.strip()]
    formats = tuple(raw)
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ConfigError(f"unknown output formats {bad}; choose from {FORMATS}")
    return formats


def load_spec(path, experiment=None):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return spec_from_dict(raw, experiment)
