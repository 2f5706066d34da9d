"""Figure rendering for the report paths.

Each function draws one figure and saves it as a PNG in the directory the
caller names, returning the path.  Matplotlib runs on the Agg backend so
reports work headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .params import ParamSet, failure_probability_log2

_STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(fig, out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def failure_curve_figure(ps: ParamSet, out_dir: str) -> str:
    """log2 failure bound versus q, with the configured q and -lambda marked."""
    lo = max(2 * ps.p + 1, ps.q // 3)
    qs = [q for q in range(lo, 2 * ps.q + 1, max(1, ps.q // 200)) if q % 2]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ys = [failure_probability_log2(ps.with_overrides(q=q)) for q in qs]
        ax.plot(qs, ys, lw=1.5)
        ax.axhline(-ps.lam, color="tab:red", ls="--", lw=1, label=f"target -{ps.lam}")
        ax.axvline(ps.q, color="tab:green", ls=":", lw=1, label=f"q = {ps.q}")
        ax.set_xlabel("modulus q")
        ax.set_ylabel("log2 failure bound")
        ax.set_title(f"Decryption failure bound, n={ps.n}, weights ({ps.a1},{ps.a2},{ps.a3})")
        ax.legend()
    return _save(fig, out_dir, "failure_curve.png")


def margin_histogram_figure(ps: ParamSet, margins: list[int], out_dir: str) -> str:
    """Observed sup norms of the decryption intermediate against q/2."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.hist(margins, bins=min(40, max(8, len(set(margins)))), color="tab:blue", alpha=0.8)
        ax.axvline(ps.q / 2, color="tab:red", ls="--", lw=1.2, label="failure threshold q/2")
        ax.set_xlabel("max |coefficient| of c * k")
        ax.set_ylabel("trials")
        ax.set_title(f"Decryption margin over {len(margins)} trials")
        ax.legend()
    return _save(fig, out_dir, "margin_histogram.png")


def reduced_norms_figure(norms_before: list[float], norms_after: list[float], out_dir: str) -> str:
    """Row norms of the attack lattice before and after LLL."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        x = np.arange(len(norms_before))
        width = 0.4
        ax.bar(x - width / 2, norms_before, width, label="input basis")
        ax.bar(x + width / 2, norms_after, width, label="LLL reduced")
        ax.set_yscale("log")
        ax.set_xlabel("basis row")
        ax.set_ylabel("Euclidean norm")
        ax.set_title("Attack lattice before and after reduction")
        ax.legend()
    return _save(fig, out_dir, "reduced_norms.png")


def match_profile_figure(in_range_counts: np.ndarray, n: int, out_dir: str) -> str:
    """How many coefficients each candidate pair lands in range.

    The wrong pairs pile up far below n while a true hit must reach n
    exactly, which is what makes the exhaustive test discriminating.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.bar(np.arange(n + 1), in_range_counts, color="tab:purple", alpha=0.85)
        ax.set_yscale("symlog")
        ax.set_xlabel("coefficients inside the plaintext range")
        ax.set_ylabel("candidate pairs")
        ax.set_title("Exhaustive search separation profile")
    return _save(fig, out_dir, "match_profile.png")
