"""
CSV, summary-table and plot-script output for scenario runs.
"""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd
from jinja2 import Environment, StrictUndefined
from tabulate import tabulate

from models.schemas import CSV_COLUMNS, SweepRecord

logger = logging.getLogger(__name__)

PLOT_TEMPLATE = '''\
"""Regenerates the {{ title }} chart from {{ csv_name }}; writes {{ html_name }}."""

from pathlib import Path

import altair as alt
import pandas as pd

here = Path(__file__).resolve().parent
data = pd.read_csv(here / "{{ csv_name }}")
data["config"] = data["scheme"] + " M1=" + data["M1"].astype(str) + " M2=" + data["M2"].astype(str)
{% if scenario == "se-sweep" %}
data["series"] = data["config"] + " a=" + data["alpha"].astype(str)
chart = alt.Chart(data).mark_line(point=True).encode(
    x=alt.X("kappa:Q", title="active sub-carriers"),
    y=alt.Y("se_bits_per_s_per_hz:Q", title="SE (bits/s/Hz)"),
    color="series:N",
)
{% elif scenario == "se-ee" %}
data = data[data["ebn0_db"].abs() != float("inf")]
chart = alt.Chart(data).mark_line(point=True).encode(
    x=alt.X("ebn0_db:Q", title="required Eb/N0 (dB) at BER {{ target }}"),
    y=alt.Y("se_bits_per_s_per_hz:Q", title="SE (bits/s/Hz)"),
    color="config:N",
    tooltip=["alpha", "kappa", "ebn0_db", "se_bits_per_s_per_hz"],
)
{% elif scenario == "ber-curve" %}
data["series"] = data["config"] + " a=" + data["alpha"].astype(str)
data = data[data["ber"] > 0]
chart = alt.Chart(data).mark_line(point=True).encode(
    x=alt.X("ebn0_db:Q", title="Eb/N0 (dB)"),
    y=alt.Y("ber:Q", title="BER", scale=alt.Scale(type="log")),
    color="series:N",
).facet(column="channel:N")
{% else %}
chart = alt.Chart(data).mark_bar().encode(
    x=alt.X("config:N", title="configuration"),
    y=alt.Y("ber:Q", title="noiseless BER"),
    column="N:O",
)
{% endif %}
chart.properties(title="{{ title }}").save(str(here / "{{ html_name }}"))
'''

TITLES = {
    "se-sweep": "Spectral efficiency versus active sub-carriers",
    "se-ee": "SE/EE trade-off",
    "ber-curve": "BER performance",
    "selftest": "Noiseless loopback",
}


def records_frame(records: List[SweepRecord]) -> pd.DataFrame:
    """Records as a DataFrame in the fixed column order."""
    return pd.DataFrame([record.to_row() for record in records], columns=CSV_COLUMNS)


def write_csv(records: List[SweepRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records).to_csv(path, index=False, na_rep="NaN")
    logger.info(f"Wrote {len(records)} rows to {path}")
    return path


def render_plot_script(scenario: str, csv_name: str, target_ber: float = 1e-3) -> str:
    environment = Environment(undefined=StrictUndefined, keep_trailing_newline=True, trim_blocks=True)
    return environment.from_string(PLOT_TEMPLATE).render(
        scenario=scenario,
        title=TITLES.get(scenario, scenario),
        csv_name=csv_name,
        html_name=Path(csv_name).with_suffix(".html").name,
        target=f"{target_ber:g}",
    )


def write_plot_script(scenario: str, csv_path: Union[str, Path], target_ber: float = 1e-3) -> Path:
    csv_path = Path(csv_path)
    script_path = csv_path.with_name(f"plot_{csv_path.stem}.py")
    script_path.write_text(render_plot_script(scenario, csv_path.name, target_ber), encoding="utf-8")
    logger.info(f"Wrote plot script {script_path}")
    return script_path


def summary_table(records: List[SweepRecord]) -> str:
    """Human-readable table of the key columns (mean bias when measured)."""
    headers = ["scheme", "N", "M1", "M2", "kappa", "alpha", "channel", "Eb/N0 (dB)", "BER", "SE"]
    with_bias = any(record.mean_bias is not None for record in records)
    if with_bias:
        headers.append("mean bias")
    rows = []
    for r in records:
        row = [r.scheme, r.n, r.m1, r.m2, r.kappa, r.alpha, r.channel, r.ebn0_db, r.ber, round(r.se_bits_per_s_per_hz, 4)]
        if with_bias:
            row.append(r.mean_bias)
        rows.append(row)
    return tabulate(rows, headers=headers, tablefmt="github", floatfmt=".4g", missingval="-")
