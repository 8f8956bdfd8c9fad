"""Run configuration files.

A config is an INI file. All frequencies are angular, in rad/us (= rad*MHz),
times in us::

    [params]
    B = 1000
    dB = -100
    J0 = 20
    J1 = 20
    omega = 200

    [trace]                 ; evolve, fidelity-trace
    t_end = 1.2
    points = 2000
    families = cz_res_plus, iswap_plus
    frame = lab             ; evolve only

    [solve]                 ; solve-gates
    families = cz, iswap, nres
    max_n = 20
    max_m = 8
    nres_count = 3

    [noise]                 ; noise-sweep
    ratios = 0:0.2:0.01     ; start:stop:step (inclusive) or a comma list
    quad_order = 41
    evolution = numeric

    [gate:cz_minus]         ; optional named curves / recipes
    family = cz_res_minus
    J1 = 16
    tau = auto              ; or a number; auto solves with n, m
    n = 5
    m = 2

Gate sections override any ``[params]`` key. Everything is validated when
the file is loaded, before any computation starts.
"""
import configparser
from dataclasses import dataclass, field
import math

from .analytic import GateFamily
from .gatesolve import DEFAULT_MAX_M, DEFAULT_MAX_N, solve_nonresonant, solve_resonant
from .model import PulseParams

PARAM_KEYS = ("B", "dB", "J0", "J1", "omega")
TASKS = ("evolve", "fidelity-trace", "solve-gates", "noise-sweep")
DEFAULT_POINTS = 2000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GateSpec:
    name: str
    family: GateFamily
    params: PulseParams
    tau: float | None = None
    n: int | None = None
    m: int | None = None


@dataclass(frozen=True)
class TraceSettings:
    t_end: float = 1.2
    points: int = DEFAULT_POINTS
    frame: str = "lab"


@dataclass(frozen=True)
class SolveSettings:
    families: tuple = ("cz", "iswap")
    max_n: int = DEFAULT_MAX_N
    max_m: int = DEFAULT_MAX_M
    nres_count: int = 3


@dataclass(frozen=True)
class NoiseSettings:
    ratios: tuple = ()
    quad_order: int = 41
    evolution: str = "numeric"


@dataclass(frozen=True)
class RunConfig:
    task: str
    params: PulseParams
    gates: tuple = ()
    trace: TraceSettings = field(default_factory=TraceSettings)
    solve: SolveSettings = field(default_factory=SolveSettings)
    noise: NoiseSettings = field(default_factory=NoiseSettings)
    steps: int | None = None
    check_convergence: bool = False


def _float(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"[{section.name}] missing required key {key!r}")
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section.name}] {key} must be finite")
    return value


def _int(section, key, default=None, minimum=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"[{section.name}] missing required key {key!r}")
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not an integer") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"[{section.name}] {key} must be >= {minimum}")
    return value


def _list(raw):
    return tuple(item.strip() for item in raw.replace("\n", ",").split(",") if item.strip())


def parse_ratios(raw):
    """``"a:b:h"`` (inclusive of b) or a comma-separated list."""
    raw = raw.strip()
    try:
        if ":" in raw:
            start, stop, step = (float(v) for v in raw.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"bad ratio range {raw!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = tuple(round(start + k * step, 12) for k in range(count))
        else:
            values = tuple(float(v) for v in _list(raw))
    except ValueError:
        raise ConfigError(f"cannot parse ratios {raw!r}") from None
    if not values or any(v < 0 or not math.isfinite(v) for v in values):
        raise ConfigError("ratios must be a non-empty list of finite values >= 0")
    return values


def _params(section, base=None):
    values = {}
    for key in PARAM_KEYS:
        default = getattr(base, key) if base is not None else None
        if key == "J1" and default is None:
            default = 0.0
        values[key] = _float(section, key, default)
    try:
        return PulseParams(**values)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {exc}") from None


def _family(section, raw):
    try:
        return GateFamily.parse(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {exc}") from None


def resolve_tau(gate):
    """Gate time of a gate section, solving the gate condition when ``tau`` is not given."""
    if gate.tau is not None:
        return gate.tau
    p = gate.params
    if gate.family.resonant:
        sol = solve_resonant(p.J0, p.omega, gate.n, gate.m)
        if sol is None:
            raise ConfigError(f"[gate:{gate.name}] no valid resonant solution for n={gate.n}, m={gate.m}")
        if sol.family is not gate.family:
            raise ConfigError(f"[gate:{gate.name}] (n, m) = ({gate.n}, {gate.m}) gives {sol.family.value}, "
                              f"not {gate.family.value}")
        return sol.tau
    sol = solve_nonresonant(p.J0, p.J1, p.omega, gate.n)
    if gate.family is not GateFamily.CZ_CONST and sol.family is not gate.family:
        raise ConfigError(f"[gate:{gate.name}] n = {gate.n} gives {sol.family.value}, not {gate.family.value}")
    return sol.tau


def _gate(name, section, base):
    family = _family(section, section.get("family", name))
    params = _params(section, base)
    raw_tau = section.get("tau", "auto").strip().lower()
    n = _int(section, "n", -1)
    m = _int(section, "m", -1)
    if raw_tau == "auto":
        tau = None
        if family is GateFamily.CZ_CONST and params.J1 != 0:
            raise ConfigError(f"[{section.name}] cz_const needs J1 = 0")
        if family.resonant and (n < 1 or m < 1):
            raise ConfigError(f"[{section.name}] tau = auto needs n >= 1 and m >= 1 for {family.value}")
        if not family.resonant and n < 0:
            n = 0 if family is not GateFamily.CZ_NRES_MINUS else 1
    else:
        tau = _float(section, "tau")
        if tau < 0:
            raise ConfigError(f"[{section.name}] tau must be >= 0")
    gate = GateSpec(name=name, family=family, params=params, tau=tau,
                    n=n if n >= 0 else None, m=m if m >= 0 else None)
    if tau is None:
        gate = GateSpec(name, family, params, resolve_tau(gate), gate.n, gate.m)
    return gate


def load_config(text, task, steps=None, quad_order=None, check_convergence=False):
    """Parse and fully validate a config for `task`.

    Raises
    ------
    ConfigError
        On any missing, malformed or physically invalid entry.
    """
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if not cp.has_section("params"):
        raise ConfigError("config needs a [params] section")
    params = _params(cp["params"])
    if steps is not None and steps < 1:
        raise ConfigError("--steps must be >= 1")

    gates = []
    for name in cp.sections():
        if name.startswith("gate:"):
            gates.append(_gate(name[5:].strip(), cp[name], params))

    trace = TraceSettings()
    if cp.has_section("trace"):
        sec = cp["trace"]
        trace = TraceSettings(
            t_end=_float(sec, "t_end", trace.t_end),
            points=_int(sec, "points", trace.points, minimum=2),
            frame=sec.get("frame", "lab").strip().lower(),
        )
        if trace.t_end <= 0:
            raise ConfigError("[trace] t_end must be > 0")
        if trace.frame not in ("lab", "rotating"):
            raise ConfigError("[trace] frame must be lab or rotating")
        if not gates and "families" in sec:
            for raw in _list(sec["families"]):
                fam = _family(sec, raw)
                gates.append(GateSpec(name=fam.value, family=fam, params=params))

    solve = SolveSettings()
    if cp.has_section("solve"):
        sec = cp["solve"]
        fams = _list(sec.get("families", "cz, iswap"))
        bad = [f for f in fams if f not in ("cz", "iswap", "nres")]
        if bad or not fams:
            raise ConfigError(f"[solve] families must be drawn from cz, iswap, nres; got {fams}")
        solve = SolveSettings(
            families=fams,
            max_n=_int(sec, "max_n", DEFAULT_MAX_N, minimum=1),
            max_m=_int(sec, "max_m", DEFAULT_MAX_M, minimum=1),
            nres_count=_int(sec, "nres_count", 3, minimum=1),
        )

    noise = NoiseSettings()
    if cp.has_section("noise"):
        sec = cp["noise"]
        noise = NoiseSettings(
            ratios=parse_ratios(sec.get("ratios", "0:0.2:0.01")),
            quad_order=_int(sec, "quad_order", 41, minimum=1),
            evolution=sec.get("evolution", "numeric").strip().lower(),
        )
    if quad_order is not None:
        noise = NoiseSettings(noise.ratios, quad_order, noise.evolution)
    if noise.quad_order % 2 == 0:
        raise ConfigError("quad_order must be odd")
    if noise.evolution not in ("numeric", "analytic"):
        raise ConfigError("[noise] evolution must be numeric or analytic")

    if task == "fidelity-trace" and not gates:
        raise ConfigError("fidelity-trace needs [trace] families or [gate:NAME] sections")
    if task == "noise-sweep":
        if not noise.ratios:
            raise ConfigError("noise-sweep needs a [noise] section with ratios")
        if not gates:
            raise ConfigError("noise-sweep needs [gate:NAME] sections")
        for g in gates:
            if g.family is GateFamily.CZ_CONST and g.params.J1 != 0:
                raise ConfigError(f"[gate:{g.name}] cz_const needs J1 = 0")
    names = [g.name for g in gates]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate gate names: {names}")

    return RunConfig(task=task, params=params, gates=tuple(gates), trace=trace, solve=solve,
                     noise=noise, steps=steps, check_convergence=check_convergence)
