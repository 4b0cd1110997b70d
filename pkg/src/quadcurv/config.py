"""Tolerance configuration.

All thresholds live in one JSON file (``tolerances.json`` next to this module).
A user file passed with ``--tolerances`` overrides individual keys. Reports echo
the tolerances they were judged against via :meth:`Tolerances.as_dict`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

DEFAULTS_PATH = Path(__file__).with_name("tolerances.json")


@dataclass(frozen=True)
class Tolerances:
    algebraic_rel: float
    closed_form_abs: float
    fd_abs: float
    fd_identity_rel: float
    quadrature_identity_rel: float
    homogeneous_identity_rel: float
    el_closed_form: float
    el_fd_rel: float
    positive_R: float
    lcf_rel: float
    lcf_fd_rel: float
    cotton_div_rel: float
    cotton_div_fd_rel: float
    einstein_rel: float
    einstein_fd_rel: float
    line_constraint: float
    boundary: float
    estimate_slack: float
    combined_norm_rel: float

    def as_dict(self) -> dict:
        return asdict(self)

    def updated(self, overrides: dict) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


def load_tolerances(path: str | Path | None = None) -> Tolerances:
    base = Tolerances(**json.loads(DEFAULTS_PATH.read_text()))
    if path is None:
        return base
    return base.updated(json.loads(Path(path).read_text()))


DEFAULT_TOLERANCES = load_tolerances()
