"""Figure rendering for the experiment reports.

Each helper takes the same arrays that go into the CSV files and writes
one PNG next to them.  Rendering is byte-deterministic: the Agg backend
plus a suppressed Software metadata key keeps repeated renders of the
same data identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_DPI = 150


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)


def save_correlation_figure(
    path: Path,
    shifts: Sequence[float],
    values: Sequence[float],
    reference: Sequence[float],
    kinks: Sequence[float],
) -> None:
    """Exact correlation vs the -cos reference, with kinks marked."""
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.plot(shifts, values, "b-", linewidth=1.8, label="exact correlation")
    ax.plot(shifts, reference, "r--", linewidth=1.2, label="-cos reference")
    for i, k in enumerate(kinks):
        ax.axvline(k, color="gray", alpha=0.4, linewidth=0.8,
                   label="kinks" if i == 0 else None)
    ax.set_xlabel("shift")
    ax.set_ylabel("correlation")
    ax.set_ylim(-1.15, 1.15)
    ax.grid(alpha=0.3)
    ax.legend(loc="upper center", ncol=3, fontsize=9)
    _save(fig, path)


def save_chsh_figure(
    path: Path,
    deltas: Sequence[float],
    e_qm: Sequence[float],
    e_lhv: Sequence[float],
    setting_deltas: Sequence[float],
    s_qm: float,
    s_lhv: float,
) -> None:
    """Quantum vs local-model correlation curves with the four CHSH
    setting differences marked."""
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.plot(deltas, e_qm, "r-", linewidth=1.6, label="quantum -cos")
    ax.plot(deltas, e_lhv, "b-", linewidth=1.6, label="local model")
    for i, d in enumerate(setting_deltas):
        ax.axvline(d, color="gray", alpha=0.4, linewidth=0.8,
                   label="CHSH settings" if i == 0 else None)
    ax.set_xlabel("setting difference")
    ax.set_ylabel("correlation E")
    ax.set_title(f"S_qm = {s_qm:.4f}, S_local = {s_lhv:.4f}", fontsize=10)
    ax.grid(alpha=0.3)
    ax.legend(loc="upper center", ncol=3, fontsize=9)
    _save(fig, path)


def save_lattice_figure(
    path: Path,
    lattice: Sequence[float],
    target: float,
    nearest: float,
) -> None:
    """Achievable product-mean lattice against a target correlation."""
    fig, ax = plt.subplots(figsize=(7.0, 2.8))
    ax.plot(lattice, [0.0] * len(lattice), "o", color="tab:blue", markersize=5,
            label="achievable means")
    ax.axvline(target, color="red", linewidth=1.4, label=f"target {target:.4f}")
    ax.axvline(nearest, color="green", linestyle="--", linewidth=1.2,
               label=f"nearest {nearest:.4f}")
    ax.set_yticks([])
    ax.set_xlabel("product-correlation mean")
    ax.grid(alpha=0.3, axis="x")
    ax.legend(loc="upper center", ncol=3, fontsize=9)
    _save(fig, path)


def save_optical_figure(
    path: Path,
    deltas: Sequence[float],
    p_pp: Sequence[float],
    p_pm: Sequence[float],
    e_optical: Sequence[float],
    e_model: Sequence[float],
    empirical_delta: float,
    empirical_e: float,
    model_name: str,
) -> None:
    """Coincidence probabilities and the optical-vs-classical correlation
    curves, with the simulated point overlaid."""
    fig, (ax_p, ax_e) = plt.subplots(2, 1, figsize=(7.0, 6.4), sharex=True)
    ax_p.plot(deltas, p_pp, "b-", linewidth=1.5, label="P(++) = P(--)")
    ax_p.plot(deltas, p_pm, "r-", linewidth=1.5, label="P(+-) = P(-+)")
    ax_p.set_ylabel("coincidence probability")
    ax_p.grid(alpha=0.3)
    ax_p.legend(fontsize=9)

    ax_e.plot(deltas, e_optical, "k-", linewidth=1.6, label="optical cos 2d")
    ax_e.plot(deltas, e_model, "g--", linewidth=1.6, label=f"classical {model_name}")
    ax_e.plot([empirical_delta], [empirical_e], "g^", markersize=9,
              label="simulated E")
    ax_e.set_xlabel("setting difference")
    ax_e.set_ylabel("correlation E")
    ax_e.grid(alpha=0.3)
    ax_e.legend(fontsize=9)
    _save(fig, path)
