"""Figure rendering for the simulation report paths.

Figures are written as PNG files next to the delimited output; everything uses
the Agg backend so the CLI works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (7.0, 4.0)
_DPI = 130


def save_count_figure(path, times, counts, title):
    """Staircase plot of the four sign counters along a trajectory."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    series = {
        "s_minus": [c.s_minus for c in counts],
        "s_plus": [c.s_plus for c in counts],
        "sc_minus": [c.sc_minus for c in counts],
        "sc_plus": [c.sc_plus for c in counts],
    }
    styles = {"s_minus": "-", "s_plus": "--", "sc_minus": "-", "sc_plus": "--"}
    for name, values in series.items():
        ax.step(times, values, styles[name], where="post", label=name, alpha=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("sign variations")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_state_figure(path, times, states, title, ylabel="x_i(t)"):
    """One line per state component."""
    states = np.asarray(states)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i in range(states.shape[1]):
        ax.plot(times, states[:, i], label="component %d" % (i + 1), lw=1.2)
    ax.axhline(0.0, color="k", lw=0.6, alpha=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if states.shape[1] <= 10:
        ax.legend(loc="best", fontsize="small")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_flow_figure(path, times, flows, title):
    """Per-link flow time series for the ring model."""
    flows = np.asarray(flows)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i in range(flows.shape[1]):
        ax.plot(times, flows[:, i], label="link %d" % (i + 1), lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("flow")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if flows.shape[1] <= 10:
        ax.legend(loc="best", fontsize="small")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path
