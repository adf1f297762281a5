"""Scenario configuration, built-in figure families and CSV/SVG output."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from .errors import ConfigError, InvalidInputError
from .free import FreeParams, free_track
from .metrology import qfim, sigma_min_series
from .pbg import PbgParams, pbg_track
from .quantumness import ObservableTrack, coherence_l1, hss, hss_witness
from .state import (StateKind, amplitude_derivatives, check_density_matrix,
                    density_matrix, drho_dparam, initial_amplitudes)

OBSERVABLES = ("qfi_theta", "qfi_phi", "sigma_min", "coherence", "hss", "chi")
SWEEP_PARAMS = ("phi", "omega3c")
PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
DETUNINGS = (-1.0, 0.2, 0.9)

# omega32 = 0.1 leaves a near-dark pole that decays on a time scale of
# hundreds, so no regime split shows up within t_max = 20
PBG_OMEGA32 = 1.0
# the free-space interference between the two decay channels traps population
# unless the upper levels are well resolved (omega32 >> gamma)
FREE_OMEGA32 = 5.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "custom"
    environment: str = "pbg"
    omega3c: float | None = -1.0
    omega32: float = PBG_OMEGA32
    gamma31: float | None = None
    gamma21: float | None = None
    theta: float = 0.5 * math.pi
    phi: float = 0.0
    state_kind: str = "two_level"
    t_max: float = 20.0
    dt: float = 0.01
    observables: tuple = ("qfi_theta", "qfi_phi")
    sweep: tuple | None = None
    sweep_param: str = "phi"

    def __post_init__(self):
        if self.environment not in ("pbg", "free"):
            raise InvalidInputError(f"environment must be pbg or free, got {self.environment!r}")
        if not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        if self.t_max < 10 * self.dt:
            raise InvalidInputError("t_max must be at least 10 dt")
        pbg = self.environment == "pbg"
        if pbg and self.omega3c is None:
            raise InvalidInputError("omega3c is required for environment = pbg")
        if not pbg and self.omega3c is not None:
            raise InvalidInputError("omega3c only applies to environment = pbg")
        if pbg and (self.gamma31 is not None or self.gamma21 is not None):
            raise InvalidInputError("gamma31/gamma21 only apply to environment = free")
        StateKind(self.state_kind)
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise InvalidInputError(f"unknown observables {bad}")
        object.__setattr__(self, "observables", tuple(self.observables))
        if self.sweep is not None:
            object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
        if self.sweep_param not in SWEEP_PARAMS:
            raise InvalidInputError(f"sweep_param must be one of {SWEEP_PARAMS}")
        if self.sweep_param == "omega3c" and self.sweep is not None and not pbg:
            raise InvalidInputError("an omega3c sweep needs environment = pbg")

    @property
    def times(self):
        n = int(math.floor(self.t_max / self.dt + 1e-9)) + 1
        return self.dt * np.arange(n)

    def sweep_values(self):
        if self.sweep is None:
            return (getattr(self, self.sweep_param),)
        return self.sweep

    def at(self, value):
        """Copy with the sweep parameter set to ``value`` and no sweep."""
        return dataclasses.replace(self, sweep=None, **{self.sweep_param: value})

    def to_dict(self):
        return dataclasses.asdict(self)


def _free(**kw):
    base = dict(environment="free", omega3c=None, gamma31=1.0, gamma21=1.0,
                omega32=FREE_OMEGA32, t_max=10.0)
    base.update(kw)
    return base


_FIGS = {
    "fig2": dict(observables=("qfi_theta", "qfi_phi"), sweep=PHASES),
    "fig3": dict(observables=("qfi_theta", "qfi_phi"), sweep=DETUNINGS, sweep_param="omega3c"),
    "fig5": dict(observables=("sigma_min",), sweep=PHASES),
    "fig6": dict(observables=("sigma_min",), sweep=DETUNINGS, sweep_param="omega3c"),
    "fig7": dict(observables=("coherence",), sweep=PHASES),
    "fig8": dict(observables=("coherence",), sweep=DETUNINGS, sweep_param="omega3c"),
    "fig9": dict(observables=("hss", "chi"), sweep=PHASES, state_kind="qutrit_hss"),
    "fig10": dict(observables=("hss", "chi"), sweep=DETUNINGS, sweep_param="omega3c",
                  state_kind="qutrit_hss"),
}

BUILTIN_SCENARIOS: dict[str, ScenarioConfig] = {}
for _name, _kw in _FIGS.items():
    BUILTIN_SCENARIOS[_name] = ScenarioConfig(name=_name, **_kw)
    if _kw.get("sweep_param", "phi") == "phi":
        BUILTIN_SCENARIOS[_name + "-free"] = ScenarioConfig(name=_name + "-free", **_free(**_kw))


# ---------------------------------------------------------------- config file

_FLOAT_KEYS = {"omega3c", "omega32", "gamma31", "gamma21", "theta", "phi", "t_max", "dt"}
_STR_KEYS = {"name", "environment", "state_kind", "sweep_param"}
_LIST_KEYS = {"observables", "sweep"}


def _coerce(key, value, lineno):
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number", lineno)
        return float(value)
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string", lineno)
        return value
    if not isinstance(value, list):
        raise ConfigError(f"{key} must be a list", lineno)
    if key == "observables":
        if not all(isinstance(v, str) for v in value):
            raise ConfigError("observables must be strings", lineno)
        bad = [v for v in value if v not in OBSERVABLES]
        if bad:
            raise ConfigError(f"unknown observables {bad}", lineno)
        return tuple(value)
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError("sweep values must be numbers", lineno)
    return tuple(float(v) for v in value)


def parse_config_text(text, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse ``key = value`` lines (TOML scalars and flat arrays, ``#`` comments).

    Keys left out keep the values of ``base`` (or the defaults). When the
    environment is switched to ``free`` the band-gap defaults are replaced by
    the free-space ones. Errors carry the offending line number.
    """
    seen: dict[str, tuple[object, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            item = tomli.loads(line)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {raw.strip()!r}: {exc}", lineno) from None
        (key, value), = item.items()
        if key not in _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        seen[key] = (_coerce(key, value, lineno), lineno)

    fields = (base or ScenarioConfig()).to_dict()
    env = seen.get("environment", (fields["environment"], 0))[0]
    if env == "free" and fields["environment"] != "free":
        fields.update(_free())
    elif env == "pbg" and fields["environment"] != "pbg":
        fields.update(environment="pbg", omega3c=-1.0, gamma31=None, gamma21=None,
                      omega32=PBG_OMEGA32, t_max=20.0)
    for key, (value, _) in seen.items():
        fields[key] = value
    try:
        return ScenarioConfig(**fields)
    except InvalidInputError as exc:
        # point at the line that set the offending key when we can tell
        lines = [ln for k, (_, ln) in seen.items() if k in str(exc)]
        raise ConfigError(str(exc), min(lines) if lines else None) from None


def load_config(path, base=None) -> ScenarioConfig:
    return parse_config_text(Path(path).read_text(), base)


# ---------------------------------------------------------------- evaluation

def propagator_track(cfg: ScenarioConfig):
    t = cfg.times
    if cfg.environment == "pbg":
        return pbg_track(t, PbgParams(cfg.omega32, cfg.omega3c))
    return free_track(t, FreeParams(cfg.gamma31, cfg.gamma21, cfg.omega32))


def compute_observables(cfg: ScenarioConfig, names=None, validate=True) -> dict:
    """Observable series for a single (non-swept) configuration.

    ``names`` defaults to ``cfg.observables``. Also returns ``"t"`` and, for
    inspection, ``"rho"``.
    """
    names = tuple(cfg.observables if names is None else names)
    track = propagator_track(cfg)
    kind = StateKind(cfg.state_kind)
    c = initial_amplitudes(cfg.theta, cfg.phi, kind)
    d_theta, d_phi = amplitude_derivatives(c, cfg.theta, cfg.phi)
    rho = density_matrix(track.m, c)
    if validate:
        check_density_matrix(rho)
    out = {"t": track.times, "rho": rho}
    if not names:
        return out
    dr_phi = drho_dparam(track.m, c, d_phi)
    if {"qfi_theta", "qfi_phi", "sigma_min"} & set(names):
        F = qfim(rho, drho_dparam(track.m, c, d_theta), dr_phi)
        out["qfi_theta"] = F[:, 0, 0]
        out["qfi_phi"] = F[:, 1, 1]
        out["sigma_min"] = sigma_min_series(F)[0]
    if "coherence" in names:
        out["coherence"] = coherence_l1(rho)
    if {"hss", "chi"} & set(names):
        h = hss(dr_phi)
        out["hss"] = h
        chi, backflow = hss_witness(ObservableTrack("hss", track.times, h))
        out["chi"] = chi.values
        out["backflow_integral"] = backflow
    return out


def _csv_text(times, cols, names):
    lines = [",".join(("t",) + tuple(names))]
    for i, t in enumerate(times):
        lines.append(",".join(["%.9g" % t] + ["%.9g" % cols[n][i] for n in names]))
    return "\n".join(lines) + "\n"


def _svg(path, series, name, sweep_param):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "vtype-pbg"
    fig, ax = plt.subplots(figsize=(6, 4))
    for value, (t, y) in series:
        ax.plot(t, np.where(np.isfinite(y), y, np.nan), lw=1.2,
                label=f"{sweep_param} = {value:.4g}")
    ax.set_xlabel("t")
    ax.set_ylabel(name)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run_scenario(cfg: ScenarioConfig, out_dir, svg=False):
    """Write one CSV per sweep value plus ``manifest.json``; returns the written paths."""
    from . import __version__

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = [n for n in OBSERVABLES if n in cfg.observables]
    written = []
    files = []
    per_obs = {n: [] for n in names}
    if names:
        for i, value in enumerate(cfg.sweep_values()):
            sub = cfg.at(value)
            res = compute_observables(sub)
            fname = f"{cfg.name}_{cfg.sweep_param}{i}.csv"
            (out / fname).write_text(_csv_text(res["t"], res, names))
            written.append(out / fname)
            files.append({"file": fname, cfg.sweep_param: value})
            for n in names:
                per_obs[n].append((value, (res["t"], res[n])))
        if svg:
            for n in names:
                p = out / f"{cfg.name}_{n}.svg"
                _svg(p, per_obs[n], n, cfg.sweep_param)
                written.append(p)
    manifest = {"library": "vtype_pbg", "version": __version__,
                "config": cfg.to_dict(), "outputs": files}
    mp = out / "manifest.json"
    mp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(mp)
    return written
