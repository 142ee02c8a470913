"""Figure presets: input schema and styling for each rendered figure.

Styling follows one convention throughout: simulation estimates are solid
lines with markers, closed-form curves are dashed, distribution-free
bounds are dotted.
"""

from __future__ import annotations

from dataclasses import dataclass, field


FIGURES_HELP = (
    "render one figure preset: fig3 energy outage, fig4 information outage, "
    "fig5 slot-split tradeoff, fig6 throughput surface+contour, fig7 density sweep"
)


class MissingColumnError(KeyError):
    """An input CSV lacks a column the figure needs."""

    def __init__(self, figure: str, csv_name: str, column: str):
        super().__init__(column)
        self.figure = figure
        self.csv_name = csv_name
        self.column = column

    def __str__(self) -> str:
        return f"{self.figure}: column {self.column!r} missing from {self.csv_name}"


class EmptyDataError(ValueError):
    """An input CSV holds a header but no rows."""


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    csv_name: str                  # produced by `bwpc reproduce <figure>`
    required: tuple[str, ...]      # columns that must exist
    log_y: bool = False            # outage plots use log-y
    log_x: bool = False
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    panes: tuple[str, ...] = field(default=("main",))


PRESETS: dict[str, FigureSpec] = {
    "fig3": FigureSpec(
        figure="fig3",
        csv_name="fig3.csv",
        required=(
            "T1_ms", "T2_ms", "E_C_uJ", "P_eo_sim", "P_eo_analytic",
            "P_eo_cantelli_upper", "P_eo_cantelli_lower",
        ),
        log_y=True,
        title="Energy outage vs activation threshold",
        xlabel="E_C (uJ)",
        ylabel="P_eo",
    ),
    "fig4": FigureSpec(
        figure="fig4",
        csv_name="fig4.csv",
        required=(
            "E_C_uJ", "gamma_R_dB", "P_io_sim_joint", "P_io_sim_thinned", "P_io_analytic",
        ),
        log_y=True,
        title="Information outage vs target SINR",
        xlabel="gamma_R (dB)",
        ylabel="P_io",
    ),
    "fig5": FigureSpec(
        figure="fig5",
        csv_name="fig5.csv",
        required=("eps_i", "T2_ms", "T1_ms", "feasible"),
        title="Optimal slot-split collections",
        xlabel="T2 (ms)",
        ylabel="T1 (ms)",
    ),
    "fig6": FigureSpec(
        figure="fig6",
        csv_name="fig6.csv",
        required=("T1_ms", "T2_ms", "R_analytic_bits_per_m2_ms"),
        title="Spatial throughput vs slot split",
        xlabel="T1 (ms)",
        ylabel="T2 (ms)",
        panes=("surface", "contour"),
    ),
    "fig7": FigureSpec(
        figure="fig7",
        csv_name="fig7.csv",
        required=("M", "lambda_per_m2_ms", "R_bits_per_m2_ms", "feasible"),
        log_x=True,
        title="Spatial throughput vs network density",
        xlabel="lambda (1/(m^2*ms))",
        ylabel="R (bits/(m^2*ms))",
    ),
}
