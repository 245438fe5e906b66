"""Figure rendering for growth reports (file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def growth_plot(report, path) -> None:
    """Log-log picture of the sampled series, written to `path`."""
    ds = [s.d for s in report.samples]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    exact = [(d, s.exact) for d, s in zip(ds, report.samples)
             if s.exact is not None]
    if exact:
        ax.loglog([d for d, _ in exact], [v for _, v in exact],
                  "o-", label="exact", color="tab:blue")
    else:
        lower = [(d, s.lower) for d, s in zip(ds, report.samples)]
        ax.loglog([d for d, _ in lower], [v for _, v in lower],
                  "o-", label="lower bound", color="tab:green")
        upper = [(d, s.upper) for d, s in zip(ds, report.samples)
                 if s.upper is not None]
        if upper:
            ax.loglog([d for d, _ in upper], [v for _, v in upper],
                      "s--", label="upper bound", color="tab:red")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("equivalence constant")
    title = f"{report.family_desc}: {report.classification}"
    if report.tau_hat is not None:
        title += f" (tau = {report.tau_hat:.3g})"
    ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
