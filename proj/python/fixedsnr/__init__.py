"""Python access to the fixed-SNR cooperative relaying simulator."""

import json

from . import _core
from ._core import (
    ColoringError,
    ConfigError,
    InvariantError,
    error_prob_bound,
    fit_exponent,
    gamma2_rate,
    gmi_lower_bound,
    isolation_capacity,
    ledger_total,
    network_sum_rate,
    run_cli,
)

__all__ = [
    "ColoringError",
    "ConfigError",
    "InvariantError",
    "error_prob_bound",
    "fit_exponent",
    "gamma2_rate",
    "gmi_lower_bound",
    "isolation_capacity",
    "ledger_total",
    "network_sum_rate",
    "run_cli",
    "simulate",
    "sweep",
    "topology",
]


def topology(m, seed=1, k0=2, alpha=3.0, max_colors=19):
    """Grid, colourings and served sources as a dict."""
    return json.loads(_core.topology_json(m, seed=seed, k0=k0, alpha=alpha, max_colors=max_colors))


def simulate(m, **kwargs):
    """Monte Carlo SINR and rate report as a dict."""
    return json.loads(_core.simulate_json(m, **kwargs))


def sweep(ms=(2, 3, 4), **kwargs):
    """Scaling sweep over several grid sizes as a dict."""
    return json.loads(_core.sweep_json(list(ms), **kwargs))
