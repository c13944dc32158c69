"""Empirical rate/distortion bookkeeping and gap-to-bound computation."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .binmath import ChainParams, average_log_loss
from .bounds import RegionPoint, TestChannelPair, bsc_bounds

CSV_SCHEMA = "binceo-run-v1"

CSV_COLUMNS = (
    "scheme",
    "trial",
    "n",
    "empirical_r1",
    "empirical_r2",
    "empirical_sum_rate",
    "empirical_log_loss",
    "bound_sum_rate",
    "bound_distortion",
    "sum_rate_gap",
    "distortion_gap",
    "ber_u1",
    "ber_u2",
    "seeds",
)

# Empirical log-loss this far below the bound is flagged as suspicious
# rather than celebrated: it can only happen through Monte Carlo noise.
BELOW_BOUND_FLAG_MARGIN = 0.01


@dataclass
class RunReport:
    scheme: str
    trial: int
    n: int
    empirical_r1: float
    empirical_r2: float
    empirical_sum_rate: float
    empirical_log_loss: float
    theoretical: RegionPoint
    sum_rate_gap: float
    distortion_gap: float
    ber_u1: float
    ber_u2: float
    seeds: str

    @property
    def below_bound_flag(self) -> bool:
        return (
            self.empirical_log_loss
            < self.theoretical.distortion - BELOW_BOUND_FLAG_MARGIN
        )

    def csv_row(self) -> str:
        vals = (
            self.scheme,
            str(self.trial),
            str(self.n),
            repr(self.empirical_r1),
            repr(self.empirical_r2),
            repr(self.empirical_sum_rate),
            repr(self.empirical_log_loss),
            repr(self.theoretical.sum_rate),
            repr(self.theoretical.distortion),
            repr(self.sum_rate_gap),
            repr(self.distortion_gap),
            repr(self.ber_u1),
            repr(self.ber_u2),
            self.seeds,
        )
        return ",".join(vals)

    @classmethod
    def from_csv_row(cls, row: str) -> "RunReport":
        parts = row.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"expected {len(CSV_COLUMNS)} columns, got {len(parts)}")
        theo = RegionPoint(
            r1=float("nan"),
            r2=float("nan"),
            sum_rate=float(parts[7]),
            distortion=float(parts[8]),
        )
        return cls(
            scheme=parts[0],
            trial=int(parts[1]),
            n=int(parts[2]),
            empirical_r1=float(parts[3]),
            empirical_r2=float(parts[4]),
            empirical_sum_rate=float(parts[5]),
            empirical_log_loss=float(parts[6]),
            theoretical=theo,
            sum_rate_gap=float(parts[9]),
            distortion_gap=float(parts[10]),
            ber_u1=float(parts[11]),
            ber_u2=float(parts[12]),
            seeds=parts[13],
        )

    def text_block(self) -> str:
        lines = [
            f"scheme={self.scheme} trial={self.trial} n={self.n}",
            f"  rates: R1={self.empirical_r1:.4f} R2={self.empirical_r2:.4f} "
            f"sum={self.empirical_sum_rate:.4f} (bound {self.theoretical.sum_rate:.4f})",
            f"  log-loss: {self.empirical_log_loss:.4f} "
            f"(bound {self.theoretical.distortion:.4f})",
            f"  gaps: rate {self.sum_rate_gap:+.4f}  distortion {self.distortion_gap:+.4f}",
            f"  BER: u1 {self.ber_u1:.2e}  u2 {self.ber_u2:.2e}",
        ]
        if self.below_bound_flag:
            lines.append("  FLAG: empirical log-loss below the theoretical bound")
        return "\n".join(lines)


def empirical_rates_joint(m1: int, m2: int, n: int) -> tuple[float, float]:
    return m1 / n, m2 / n


def empirical_rates_successive(m1: int, k2: int, n: int) -> tuple[float, float]:
    return m1 / n, k2 / n


def report_run(
    scheme: str,
    trial: int,
    x: np.ndarray,
    recons: np.ndarray,
    rates: tuple[float, float],
    tc: TestChannelPair,
    p1: float,
    p2: float,
    u1_hat: np.ndarray,
    u1_true: np.ndarray,
    u2_hat: np.ndarray,
    u2_true: np.ndarray,
    seeds: str = "",
) -> RunReport:
    """Assemble a RunReport for one completed trial.

    BERs compare decoded words against the true quantized words; the
    theoretical reference point is the closed-form bound at the design
    test channels.
    """
    n = len(x)
    loss = average_log_loss(recons, x)
    theo = bsc_bounds(p1, p2, tc)
    r1, r2 = rates
    return RunReport(
        scheme=scheme,
        trial=trial,
        n=n,
        empirical_r1=r1,
        empirical_r2=r2,
        empirical_sum_rate=r1 + r2,
        empirical_log_loss=loss,
        theoretical=theo,
        sum_rate_gap=(r1 + r2) - theo.sum_rate,
        distortion_gap=loss - theo.distortion,
        ber_u1=float(np.mean(np.asarray(u1_hat) != np.asarray(u1_true))),
        ber_u2=float(np.mean(np.asarray(u2_hat) != np.asarray(u2_true))),
        seeds=seeds,
    )


def csv_header() -> str:
    return f"# schema={CSV_SCHEMA}\n" + ",".join(CSV_COLUMNS)


def summary_row(scheme: str, reports: list[RunReport]) -> str:
    """Mean/std summary over the trial rows of one scheme."""
    losses = np.array([r.empirical_log_loss for r in reports])
    sums = np.array([r.empirical_sum_rate for r in reports])
    theo = reports[0].theoretical
    vals = (
        f"{scheme}-summary",
        "-1",
        str(reports[0].n),
        repr(float(np.mean([r.empirical_r1 for r in reports]))),
        repr(float(np.mean([r.empirical_r2 for r in reports]))),
        repr(float(sums.mean())),
        repr(float(losses.mean())),
        repr(theo.sum_rate),
        repr(theo.distortion),
        repr(float(sums.mean() - theo.sum_rate)),
        repr(float(losses.mean() - theo.distortion)),
        repr(float(np.mean([r.ber_u1 for r in reports]))),
        repr(float(np.mean([r.ber_u2 for r in reports]))),
        f"std_loss={losses.std():.6g}",
    )
    return ",".join(vals)
