"""Declarative scenario configs: JSON schema, validation, construction.

A scenario bundles the synthetic scene, the frequency band, observation
directions (always completed to antipodal pairs), the spatial sampling grid,
the temporal scan window and thresholds.  Unknown keys are rejected.
"""

import hashlib
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import forward, geometry, imaging
from .errors import ConfigError
from .operators import NoiseSpec

SCHEMA_VERSION = 1

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3}
_POSINT = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "scene", "frequency", "directions", "sampling",
                 "eta_window"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "scene": {
            "type": "object",
            "additionalProperties": False,
            "required": ["shape", "profile", "trajectory", "pulses"],
            "properties": {
                "shape": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["ball", "disk", "kite", "rounded_square"]},
                        "radius": {"type": "number", "exclusiveMinimum": 0},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                        "half_width": {"type": "number", "exclusiveMinimum": 0},
                        "corner_radius": {"type": "number", "exclusiveMinimum": 0},
                        "center": _VEC,
                    },
                },
                "profile": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["polynomial2d", "constant", "gaussian"]},
                        "value": {"type": "number"},
                        "strength": {"type": "number"},
                        "eta_width": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "trajectory": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["fixed", "linear", "cardioid", "trifolium",
                                           "star", "sine_line", "helix"]},
                        "point": _VEC,
                        "velocity": _VEC,
                        "start": _VEC,
                        "t_max": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "pulses": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "wave_speed": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "frequency": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count"],
            "properties": {
                "kappa": {"type": "number"},
                "half_band": {"type": "number", "exclusiveMinimum": 0},
                "omega_min": {"type": "number"},
                "omega_max": {"type": "number"},
                "count": _POSINT,
            },
        },
        "directions": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "angles_deg": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "fibonacci_hemisphere": _POSINT,
                "vectors": {"type": "array", "items": _VEC, "minItems": 1},
            },
            "minProperties": 1,
            "maxProperties": 1,
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "required": ["box_min", "box_max", "resolution"],
            "properties": {
                "box_min": _VEC,
                "box_max": _VEC,
                "resolution": {"type": "array", "items": _POSINT, "minItems": 2,
                                "maxItems": 3},
            },
        },
        "eta_window": {
            "type": "object",
            "additionalProperties": False,
            "required": ["step"],
            "properties": {
                "min": {"type": "number"},
                "max": {"type": "number"},
                "halfwidth": {"type": "number", "exclusiveMinimum": 0},
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "required": ["level"],
            "properties": {
                "level": {"type": "number", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
                "distribution": {"enum": ["uniform", "gaussian"]},
            },
        },
        "thresholds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_threshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "cutoff_rel": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            },
        },
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"points_per_axis": {"type": "integer", "minimum": 4}},
        },
        "scan_resolution": {"type": "array", "items": _POSINT, "minItems": 2, "maxItems": 3},
        "strip": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["single", "pair"]},
                "etas": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
        },
        "hull_eta": {"type": "number"},
        "time_signal": {
            "type": "object",
            "additionalProperties": False,
            "required": ["receiver", "t_min", "t_max", "t_step"],
            "properties": {
                "receiver": _VEC,
                "t_min": {"type": "number", "exclusiveMinimum": 0},
                "t_max": {"type": "number"},
                "t_step": {"type": "number", "exclusiveMinimum": 0},
                "sphere_points": {"type": "integer", "minimum": 100},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "pgm"]}},
                "save_fields": {"type": "boolean"},
            },
        },
    },
}


@dataclass
class Scenario:
    """Validated, fully resolved run description."""

    name: str
    scene: forward.SourceScene
    grid: forward.FrequencyGrid
    pairs: list                 # [(dir_plus, dir_minus), ...]
    sampling: geometry.SamplingGrid
    eta_step: float
    eta_bounds: tuple | None    # absolute (min, max), or None with halfwidth
    eta_halfwidth: float | None
    noise: NoiseSpec | None
    rel_threshold: float
    cutoff_rel: float
    pts_per_axis: int
    scan_grid: geometry.SamplingGrid
    strip_mode: str = "single"
    strip_etas: list = field(default_factory=list)
    hull_eta: float | None = None
    time_signal: dict | None = None
    out_path: str = "out"
    formats: tuple = ("csv", "pgm")
    save_fields: bool = True
    config_hash: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    def etas_for(self, nominal_t):
        """Temporal scan grid for one pulse (absolute window or centered)."""
        if self.eta_halfwidth is not None:
            lo = nominal_t - self.eta_halfwidth
            hi = nominal_t + self.eta_halfwidth
        else:
            lo, hi = self.eta_bounds
        n = int(round((hi - lo) / self.eta_step)) + 1
        return lo + self.eta_step * np.arange(n)


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _directions(cfg, dim):
    """Resolve the direction spec into antipodal pairs."""
    if "angles_deg" in cfg:
        if dim != 2:
            raise ConfigError("angles_deg directions require a 2D scene")
        dirs = [np.array([np.cos(a), np.sin(a)])
                for a in np.deg2rad(cfg["angles_deg"])]
    elif "fibonacci_hemisphere" in cfg:
        if dim != 3:
            raise ConfigError("fibonacci_hemisphere directions require a 3D scene")
        n = cfg["fibonacci_hemisphere"]
        i = np.arange(n)
        z = (i + 0.5) / n
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        s = np.sqrt(1.0 - z * z)
        dirs = list(np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1))
    else:
        dirs = [np.asarray(v, dtype=np.float64) for v in cfg["vectors"]]
        if any(len(v) != dim for v in dirs):
            raise ConfigError("direction vectors do not match the scene dimension")
    pairs = []
    for v in dirs:
        d = geometry.direction(v)
        if any(np.linalg.norm(d - p) <= 1e-12 or np.linalg.norm(d + p) <= 1e-12
               for p, _ in pairs):
            continue  # antipode (or duplicate) already covered by a pair
        pairs.append((d, -d))
    return pairs


def load_scenario(cfg, name=None):
    """Validate a config dict and build the scenario."""
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid scenario: {exc.message}") from exc

    sc = cfg["scene"]
    shape = geometry.make_shape(**sc["shape"])
    profile = forward.make_profile(**sc["profile"])
    trajectory = geometry.make_trajectory(**sc["trajectory"])
    try:
        scene = forward.SourceScene(shape=shape, profile=profile, trajectory=trajectory,
                                    pulses=sc["pulses"],
                                    wave_speed=sc.get("wave_speed", 1.0))
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    fq = cfg["frequency"]
    if "half_band" in fq:
        grid = forward.FrequencyGrid(fq.get("kappa", 0.0), fq["half_band"], fq["count"])
    elif "omega_min" in fq and "omega_max" in fq:
        grid = forward.FrequencyGrid.from_interval(fq["omega_min"], fq["omega_max"],
                                                   fq["count"])
    else:
        raise ConfigError("frequency needs half_band or omega_min/omega_max")

    pairs = _directions(cfg["directions"], scene.dim)
    if not pairs:
        raise ConfigError("no observation directions")

    sp = cfg["sampling"]
    if len(sp["box_min"]) != scene.dim:
        raise ConfigError("sampling box does not match the scene dimension")
    sampling = geometry.SamplingGrid(tuple(sp["box_min"]), tuple(sp["box_max"]),
                                     tuple(sp["resolution"]))

    ew = cfg["eta_window"]
    if "halfwidth" in ew:
        bounds, halfwidth = None, float(ew["halfwidth"])
    elif "min" in ew and "max" in ew:
        bounds, halfwidth = (float(ew["min"]), float(ew["max"])), None
        if bounds[1] <= bounds[0]:
            raise ConfigError("eta_window max must exceed min")
    else:
        raise ConfigError("eta_window needs min/max or halfwidth")

    ncfg = cfg.get("noise")
    noise = None
    if ncfg and ncfg["level"] > 0:
        noise = NoiseSpec(ncfg["level"], seed=ncfg.get("seed", 0),
                          distribution=ncfg.get("distribution", "uniform"))

    th = cfg.get("thresholds", {})
    cutoff_default = (imaging.DEFAULT_CUTOFF_NOISY if noise
                      else imaging.DEFAULT_CUTOFF_CLEAN)
    rel_threshold = th.get("rel_threshold", imaging.DEFAULT_REL_THRESHOLD)
    cutoff_rel = th.get("cutoff_rel", cutoff_default)

    pts = cfg.get("quadrature", {}).get("points_per_axis")
    if pts is None:
        pts = forward.default_pts_per_axis(scene.dim)

    # The moment-profile scan only needs the peak of a one-dimensional
    # profile, so 3D scenarios default to a reduced scan grid.
    if "scan_resolution" in cfg:
        scan_res = tuple(cfg["scan_resolution"])
        if len(scan_res) != scene.dim:
            raise ConfigError("scan_resolution does not match the scene dimension")
    elif scene.dim == 3:
        scan_res = tuple(min(r, 21) for r in sampling.resolution)
    else:
        scan_res = sampling.resolution
    scan_grid = geometry.SamplingGrid(sampling.box_min, sampling.box_max, scan_res)

    out = cfg.get("outputs", {})
    strip = cfg.get("strip", {})
    return Scenario(
        name=name or cfg.get("name", "scenario"),
        scene=scene,
        grid=grid,
        pairs=pairs,
        sampling=sampling,
        eta_step=float(ew["step"]),
        eta_bounds=bounds,
        eta_halfwidth=halfwidth,
        noise=noise,
        rel_threshold=rel_threshold,
        cutoff_rel=cutoff_rel,
        pts_per_axis=int(pts),
        scan_grid=scan_grid,
        strip_mode=strip.get("mode", "single"),
        strip_etas=list(strip.get("etas", [])),
        hull_eta=cfg.get("hull_eta"),
        time_signal=cfg.get("time_signal"),
        out_path=out.get("path", "out"),
        formats=tuple(out.get("formats", ["csv", "pgm"])),
        save_fields=out.get("save_fields", True),
        config_hash=config_hash(cfg),
        raw=cfg,
    )


def load_scenario_file(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    import os

    return load_scenario(cfg, name=os.path.splitext(os.path.basename(path))[0])
