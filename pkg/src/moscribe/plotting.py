"""Report figures rendered alongside the delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_profile_figure(profile, path):
    """Mean similarity with its 95% CI band over the candidate durations."""
    durations = [e.duration_s for e in profile.entries]
    means = np.array([e.mean for e in profile.entries])
    halfwidths = np.array([e.ci_halfwidth for e in profile.entries])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(durations, means, marker="o", color="tab:blue")
    ax.fill_between(durations, means - halfwidths, means + halfwidths,
                    color="tab:blue", alpha=0.25)
    ax.set_xlabel("snippet duration (s)")
    ax.set_ylabel("start/end pose cosine similarity")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_word_frequency_figure(stats, path, population="bpmsd", top_n=30):
    """Horizontal bar chart of the most frequent words in a text population."""
    top = getattr(stats, population).top_words(top_n)
    fig, ax = plt.subplots(figsize=(6, max(3, 0.25 * len(top))))
    if top:
        words, counts = zip(*top)
        y = np.arange(len(words))
        ax.barh(y, counts, color="tab:green")
        ax.set_yticks(y, words)
        ax.invert_yaxis()
    ax.set_xlabel("count")
    ax.set_title(f"most frequent words ({population})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_metric_report_figure(report, path):
    """Bar chart of metric means with 95% CI error bars."""
    names = list(report.entries)
    means = [report.entries[n].mean for n in names]
    errors = [report.entries[n].ci_halfwidth for n in names]
    fig, ax = plt.subplots(figsize=(max(4, 0.9 * len(names)), 4))
    x = np.arange(len(names))
    ax.bar(x, means, yerr=errors, capsize=4, color="tab:purple", alpha=0.8)
    ax.set_xticks(x, names, rotation=30, ha="right")
    ax.set_ylabel("value")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
