"""Strict YAML experiment configuration.

Every section and key is optional and falls back to the documented default,
but unknown keys are fatal. Errors carry the offending line number.
"""

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core import ConfigError, Constraints, RunConfig
from .criterion import DEFAULT_CAP, Boost, WeightingScheme, _metric_code, build_psi
from .optimizer import MODES, SaConfig
from .plant import PlantModel
from .surrogate import SurrogateModel

DEFAULT_VARIANTS = ("uniform", "rho=4", "rho=16", "uniform-random", "aprbs")


@dataclass
class ExperimentConfig:
    run: RunConfig = field(default_factory=lambda: RunConfig(200, 3, 0))
    mode: str = "fixed-surrogate"
    constraints: Constraints = field(
        default_factory=lambda: Constraints((-1.0, 1.0), [[-1.0, 1.0], [-1.0, 1.0]])
    )
    surrogate: SurrogateModel = field(default_factory=SurrogateModel)
    plant: dict = field(default_factory=dict)
    psi_resolution: tuple = (15, 15)
    psi_cap: int = DEFAULT_CAP
    metric: str = "euclidean"
    weighting: WeightingScheme = field(default_factory=WeightingScheme)
    sa: SaConfig = field(default_factory=SaConfig)
    aprbs_hold: tuple = (5, 10)
    output_dir: str = "rhc_out"
    plots: bool = True
    variants: tuple = DEFAULT_VARIANTS

    def make_plant(self, seed=None):
        kw = dict(self.plant)
        kw.setdefault("seed", self.run.seed if seed is None else seed)
        return PlantModel(input_box=self.constraints.input_box, **kw)


# -- typed field readers -------------------------------------------------------

def _float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise TypeError("expected true/false")
    return v


def _str(v):
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


def _list_of(conv, n=None):
    def read(v):
        if not isinstance(v, list):
            raise TypeError("expected a list")
        if n is not None and len(v) != n:
            raise TypeError(f"expected a list of {n} entries")
        return [conv(x) for x in v]
    return read


def _temperature(v):
    if v == "auto" or v is None:
        return None
    return _float(v)


SCHEMA = {
    "run": {"N": _int, "L": _int, "seed": _int, "normalization": _bool, "mode": _str},
    "constraints": {"input_box": _list_of(_float, 2),
                    "state_box": _list_of(_list_of(_float, 2))},
    "surrogate": {"a": _float, "b": _float, "initial_state": _list_of(_float, 2)},
    "plant": {"kind": _str, "a": _float, "b": _float, "nonlinearity": _str,
              "gain": _float, "y0": _float, "noise_std": _float},
    "psi": {"resolution": _list_of(_int), "cap": _int, "metric": _str},
    "weighting": {"base": _float, "boosts": None},
    "sa": {"initial_temperature": _temperature, "cooling_factor": _float,
           "iterations_per_temperature": _int, "temperature_levels": _int,
           "step_scale": _float, "restart_count": _int, "warm_start": _bool,
           "calibration_samples": _int},
    "baseline": {"aprbs_hold": _list_of(_int, 2)},
    "output": {"dir": _str, "plots": _bool},
    "compare": {"variants": _list_of(_str)},
}
BOOST_KEYS = {"lo": _list_of(_float), "hi": _list_of(_float), "rho": _float}


_CONSTRUCTOR = yaml.constructor.SafeConstructor()


class _Doc:
    """YAML mapping values with the source line of every key."""

    def __init__(self, source):
        self.source = source

    def error(self, node, msg):
        line = node.start_mark.line + 1 if node is not None else "?"
        return ConfigError(f"{self.source}:{line}: {msg}")

    def mapping(self, node, where):
        if not isinstance(node, yaml.MappingNode):
            raise self.error(node, f"{where} must be a mapping")
        out = {}
        for k, v in node.value:
            key = k.value
            if key in out:
                raise self.error(k, f"duplicate key '{where}.{key}'")
            out[key] = (k, v)
        return out

    def read(self, section, items, schema):
        vals = {}
        for key, (knode, vnode) in items.items():
            if key not in schema:
                raise self.error(
                    knode, f"unknown key '{section}.{key}' (allowed: {', '.join(schema)})"
                )
            conv = schema[key]
            if conv is None:
                vals[key] = vnode
                continue
            try:
                vals[key] = conv(_CONSTRUCTOR.construct_object(vnode, deep=True))
            except (TypeError, ValueError) as e:
                raise self.error(vnode, f"bad value for '{section}.{key}': {e}") from None
        return vals


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    return parse_config(text, str(path))


def parse_config(text, source="<config>"):
    doc = _Doc(source)
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else "?"
        raise ConfigError(f"{source}:{line}: YAML syntax error: {e}") from None
    sections = {} if root is None else doc.mapping(root, "config")
    cfg = ExperimentConfig()
    vals = {}
    for name, (knode, vnode) in sections.items():
        if name not in SCHEMA:
            raise doc.error(
                knode, f"unknown section '{name}' (allowed: {', '.join(SCHEMA)})"
            )
        vals[name] = (vnode, doc.read(name, doc.mapping(vnode, name), SCHEMA[name]))

    def section(name):
        return vals.get(name, (None, {}))

    def build(name, fn):
        node, v = section(name)
        try:
            return fn(v)
        except ConfigError as e:
            raise doc.error(node, f"[{name}] {e}") from None
        except TypeError as e:
            raise doc.error(node, f"[{name}] {e}") from None

    run = section("run")[1]
    cfg.mode = run.get("mode", cfg.mode)
    if cfg.mode not in MODES:
        raise doc.error(section("run")[0], f"run.mode must be one of {MODES}")
    cfg.run = build("run", lambda v: RunConfig(
        v.get("N", 200), v.get("L", 3), v.get("seed", 0), v.get("normalization", True)))
    cfg.constraints = build("constraints", lambda v: Constraints(
        v.get("input_box", (-1.0, 1.0)), v.get("state_box", [[-1.0, 1.0], [-1.0, 1.0]])))
    cfg.surrogate = build("surrogate", lambda v: SurrogateModel(
        v.get("a", 0.8), v.get("b", 0.2), v.get("initial_state", (0.0, 0.0))))

    plant = {
        {"a": "a_p", "b": "b_p"}.get(k, k): v for k, v in section("plant")[1].items()
    }
    cfg.plant = plant
    build("plant", lambda v: cfg.make_plant())

    psi = section("psi")[1]
    cfg.psi_resolution = tuple(psi.get("resolution", cfg.psi_resolution))
    cfg.psi_cap = psi.get("cap", cfg.psi_cap)
    cfg.metric = psi.get("metric", cfg.metric)

    wnode, w = section("weighting")
    boosts = []
    if "boosts" in w:
        bnode = w["boosts"]
        if not isinstance(bnode, yaml.SequenceNode):
            raise doc.error(bnode, "weighting.boosts must be a list")
        for item in bnode.value:
            bv = doc.read("weighting.boosts[]", doc.mapping(item, "boost"), BOOST_KEYS)
            missing = {"lo", "hi", "rho"} - set(bv)
            if missing:
                raise doc.error(item, f"boost is missing {sorted(missing)}")
            try:
                boosts.append(Boost(bv["lo"], bv["hi"], bv["rho"]))
            except ConfigError as e:
                raise doc.error(item, str(e)) from None
    cfg.weighting = build("weighting", lambda v: WeightingScheme(v.get("base", 1.0), boosts))
    try:
        cfg.weighting.check_inside(cfg.constraints)
    except ConfigError as e:
        raise doc.error(wnode, str(e)) from None

    cfg.sa = build("sa", lambda v: SaConfig(**v))
    cfg.aprbs_hold = tuple(section("baseline")[1].get("aprbs_hold", cfg.aprbs_hold))
    out = section("output")[1]
    cfg.output_dir = out.get("dir", cfg.output_dir)
    cfg.plots = out.get("plots", cfg.plots)
    cfg.variants = tuple(section("compare")[1].get("variants", cfg.variants))

    # cross-field checks that need the full picture
    try:
        build_psi(cfg.constraints, cfg.psi_resolution, cfg.psi_cap)
        _metric_code(cfg.metric)
    except ConfigError as e:
        raise doc.error(section("psi")[0], str(e)) from None
    if len(cfg.surrogate.initial_state) != cfg.constraints.dim:
        raise doc.error(section("surrogate")[0], "initial_state dimension != state box dimension")
    if not cfg.constraints.state_ok(cfg.surrogate.initial_state):
        raise doc.error(section("surrogate")[0], "initial_state lies outside the state box")
    lo, hi = cfg.aprbs_hold
    if not 1 <= lo <= hi:
        raise doc.error(section("baseline")[0], "aprbs_hold must satisfy 1 <= min <= max")
    return cfg
