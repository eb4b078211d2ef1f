"""Configuration-driven sweeps reproducing the steady-state, trajectory and measurement studies."""

from .config import Axis, SweepSpec, load_spec, spec_from_dict
from .emit import emit, write_csv, write_json, write_svg
from .runner import (SweepResult, run, run_measurement_attack, run_steady_phase_diagram,
                     run_trajectory)
