"""Suite configuration loaded from YAML; defaults ship with the package."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from mharm.errors import InvalidSpecError
from mharm.modes import GridSpec
from mharm.numerics import QuadratureSpec

KNOWN_CHECKS = frozenset(
    {
        "plancherel",
        "bargmann_mode",
        "bargmann_isometry",
        "generalized_isometry",
        "reconstruction",
        "sigma_table",
        "delta_table",
        "weight_rejection",
        "compact_bound",
        "gutzmer",
        "poisson_extension",
        "poisson_multiplier",
        "poisson_round_trip",
        "poisson_divergence",
        "analytic_vectors",
        "cross_terms",
        "hecke_bochner",
        "bessel_bridge",
        "bessel_asymptotic",
        "bandlimit",
        "pw_bound",
        "exponential_type",
    }
)


def default_config_text() -> str:
    return resources.files("mharm").joinpath("default_config.yaml").read_text()


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def grid_from(d: dict) -> GridSpec:
    return GridSpec(float(d["L"]), int(d["N"]), int(d["M"]))


@dataclass(frozen=True)
class SuiteConfig:
    grid: GridSpec
    quad: QuadratureSpec
    t: float
    R: float
    seeds: tuple[int, ...]
    tolerances: dict[str, float]
    output_dir: Path
    sections: dict[str, Any] = field(default_factory=dict)

    def tol(self, check: str) -> float:
        return self.tolerances[check]

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})


def config_from_dict(d: dict) -> SuiteConfig:
    try:
        tol = {str(k): float(v) for k, v in d["tolerances"].items()}
        unknown = sorted(set(tol) - KNOWN_CHECKS)
        if unknown:
            raise InvalidSpecError(f"tolerances reference unknown checks: {unknown}")
        if any(v < 0 for v in tol.values()):
            raise InvalidSpecError("tolerances must be nonnegative")
        missing = sorted(KNOWN_CHECKS - set(tol))
        if missing:
            raise InvalidSpecError(f"tolerances missing for checks: {missing}")
        q = d["quadrature"]
        quad = QuadratureSpec(
            int(q["hermite_nodes"]),
            int(q["circle_nodes"]),
            int(q["radial_nodes"]),
            None if q.get("radial_cutoff") is None else float(q["radial_cutoff"]),
        )
        t, R = float(d["t"]), float(d["R"])
        if not (t > 0 and R > 0):
            raise InvalidSpecError("t and R must be positive")
        base = {"grid", "quadrature", "t", "R", "seeds", "tolerances", "output_dir", "schema_version"}
        return SuiteConfig(
            grid=grid_from(d["grid"]),
            quad=quad,
            t=t,
            R=R,
            seeds=tuple(int(s) for s in d["seeds"]),
            tolerances=tol,
            output_dir=Path(d["output_dir"]),
            sections={k: v for k, v in d.items() if k not in base},
        )
    except (KeyError, TypeError) as e:
        raise InvalidSpecError(f"malformed configuration: {e}") from None


def load_config(path=None, overrides: dict | None = None) -> SuiteConfig:
    """Read the packaged defaults, then layer the file at ``path`` and ``overrides`` on top."""
    d = yaml.safe_load(default_config_text())
    if path is not None:
        user = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(user, dict):
            raise InvalidSpecError("configuration file must hold a mapping")
        d = _merge(d, user)
    if overrides:
        d = _merge(d, overrides)
    return config_from_dict(d)
