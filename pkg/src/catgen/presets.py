"""Named run configurations.

Every preset shares the base working point w_r/g_0 = 200, n_0 = 1,
xi = 1.5271 and delta = g unless it overrides one of them. The drive
frequency is derived from the delta/g ratio, so sweeping omega_r or xi keeps
the detuning condition.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields

from .model import SystemParams, drive_frequency_for, effective_for

PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))
DERIVATION_KEYS = ("delta_over_g", "n_0")
SWEEPABLE = PARAM_FIELDS + DERIVATION_KEYS

KINDS = ("entanglement", "closed", "closed_tomography", "open", "open_wigner", "open_quadrature")

BASE = {"omega_r": 200.0, "xi": 1.5271, "delta_over_g": 1.0, "n_0": 1}


@dataclass(frozen=True)
class Preset:
    """``t_end`` is a number in 1/g_0 or one of 't_s' (pi/delta), 'decoupling' (2 pi/delta)."""

    name: str
    kind: str
    description: str
    settings: dict = field(default_factory=dict)
    t_end: object = "decoupling"
    sweep: dict = field(default_factory=dict)

    def values(self, overrides: dict | None = None) -> dict:
        out = dict(BASE)
        out.update(self.settings)
        if overrides:
            out.update(overrides)
        return out


def resolve_params(values: dict) -> SystemParams:
    """SystemParams from preset values; omega_0 comes from delta_over_g unless given."""
    unknown = sorted(set(values) - set(SWEEPABLE))
    if unknown:
        raise KeyError(f"unknown parameter(s) {unknown}; valid names: {', '.join(SWEEPABLE)}")
    kw = {k: v for k, v in values.items() if k in PARAM_FIELDS}
    if kw.get("omega_0") is None:
        kw["omega_0"] = drive_frequency_for(
            float(kw["omega_r"]),
            float(kw["xi"]),
            n_0=int(values.get("n_0", 1)),
            delta_over_g=float(values.get("delta_over_g", 1.0)),
            g_0=float(kw.get("g_0", 1.0)),
            coupling_variant=kw.get("coupling_variant", "sigma_z_displacement"),
        )
    for k, v in kw.items():
        if k != "coupling_variant":
            kw[k] = float(v)
    return SystemParams(**kw)


def resolve_time(spec, params: SystemParams) -> float:
    if isinstance(spec, (int, float)):
        return float(spec)
    delta = abs(effective_for(params).delta)
    if delta == 0:
        raise ValueError(f"time spec {spec!r} needs a nonzero detuning")
    if spec == "t_s":
        return math.pi / delta
    if spec == "decoupling":
        return 2.0 * math.pi / delta
    return float(spec)


def _open(name, description, sweep, t_end="decoupling", kind="open", **settings):
    return Preset(name, kind, description, settings, t_end, sweep)


def _build() -> dict:
    p = {}

    def add(preset):
        p[preset.name] = preset

    add(Preset("fig2", "entanglement", "closed-form entropy and log-negativity", {}, 26.0))
    for w in (30, 50, 200):
        add(Preset(f"fig3a_w{w}", "closed", f"full-Hamiltonian dynamics, omega_r/g_0 = {w}",
                   {"omega_r": float(w)}))
    add(Preset("fig5", "closed", "qubit readout probabilities versus omega_r", {},
               "decoupling", {"omega_r": [30.0, 50.0, 200.0]}))
    add(Preset("fig6", "closed_tomography", "Wigner functions and quadratures of the conditioned cats",
               {}, "t_s"))

    g3 = [0.01, 0.05, 0.1]
    k3 = [0.001, 0.005, 0.01]
    add(_open("fig7a", "log-negativity, qubit decay sweep", {"gamma_q": g3}, 26.0,
              kappa_r=0.001))
    add(_open("fig7b", "log-negativity, oscillator decay sweep", {"kappa_r": k3}, 26.0,
              gamma_q=0.01))
    add(_open("fig7c", "log-negativity, qubit thermal sweep", {"nbar_q": [1.0, 3.0, 5.0]}, 26.0,
              gamma_q=0.01, kappa_r=0.001))
    add(_open("fig7d", "log-negativity, oscillator thermal sweep", {"nbar_r": [1.0, 3.0, 5.0]}, 26.0,
              gamma_q=0.01, kappa_r=0.001))

    for panel in "ab":
        add(_open(f"fig8{panel}", "open fidelities and probabilities, qubit decay sweep",
                  {"gamma_q": g3}, kappa_r=0.001))
    for panel in "cd":
        add(_open(f"fig8{panel}", "open fidelities and probabilities, qubit thermal sweep",
                  {"nbar_q": [1.0, 5.0, 8.0]}, gamma_q=0.01, kappa_r=0.001))
    for panel in "ab":
        add(_open(f"fig9{panel}", "open fidelities and probabilities, oscillator decay sweep",
                  {"kappa_r": k3}, gamma_q=0.01))
    for panel in "cd":
        add(_open(f"fig9{panel}", "open fidelities and probabilities, oscillator thermal sweep",
                  {"nbar_r": [1.0, 5.0, 8.0]}, gamma_q=0.01, kappa_r=0.001))

    fig10 = [
        ("gamma_q", [0.01, 0.1, 0.5], {"kappa_r": 0.02}),
        ("nbar_q", [1.0, 4.0, 6.0], {"kappa_r": 0.02, "gamma_q": 0.1}),
        ("kappa_r", [0.01, 0.05, 0.1], {"gamma_q": 0.1}),
        ("nbar_r", [1.0, 3.0, 5.0], {"gamma_q": 0.1, "kappa_r": 0.02}),
    ]
    letters = "abcdefghijkl"
    for i, (axis, values, fixed) in enumerate(fig10):
        for j, v in enumerate(values):
            settings = dict(fixed)
            settings[axis] = v
            add(_open(f"fig10{letters[3 * i + j]}", f"open W+ at t_s, {axis} = {v:g}", {}, "t_s",
                      kind="open_wigner", **settings))

    fig11 = [
        ("a", "gamma_q", [0.01, 0.1, 0.2, 0.5], {"kappa_r": 0.001}),
        ("b", "kappa_r", [0.001, 0.01, 0.02, 0.05], {"gamma_q": 0.1}),
        ("c", "nbar_q", [1.0, 4.0, 8.0, 12.0], {"gamma_q": 0.01, "kappa_r": 0.001}),
        ("d", "nbar_r", [1.0, 2.0, 3.0, 5.0], {"gamma_q": 0.1, "kappa_r": 0.01}),
    ]
    for panel, axis, values, fixed in fig11:
        add(_open(f"fig11{panel}", f"open P+[X(theta_0)] at t_s, {axis} sweep", {axis: values}, "t_s",
                  kind="open_quadrature", **fixed))

    add(Preset(
        "experiment",
        "open",
        "nanomechanical resonator: omega_r = 2pi x 58 MHz, g_0 = 2pi x 2.3 MHz, "
        "kappa_r = 2pi x 1.934 kHz, expressed in units of g_0",
        {"omega_r": 58.0 / 2.3, "kappa_r": 1.934e-3 / 2.3},
    ))
    return p


PRESETS = _build()


def _natural_key(name: str) -> list:
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", name)]


def preset_names() -> list:
    """Preset names in natural order (fig2 before fig10)."""
    return sorted(PRESETS, key=_natural_key)


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; valid names: {', '.join(preset_names())}") from None
