"""Module for residue-profile and valuation plots"""

import plotly.graph_objects as go
import plotly.offline as pyo
import pandas as pd
from typing import List, Optional, Tuple

from app.config import PLOT_HEIGHT, PLOT_WIDTH, RESIDUE_PLOT_MAX_MODULUS
from modules.rigidity import Automorphism, valuation_pairs
from modules.zgroup import Element, Model


def residue_profile_frame(model: Model, x: Element, max_modulus: int = RESIDUE_PLOT_MAX_MODULUS) -> pd.DataFrame:
    rows = []
    for n in range(2, max_modulus + 1):
        r = model.residue_elem(x, n)
        rows.append({"n": n, "residue": r, "fraction": r / n})
    return pd.DataFrame(rows)


def create_residue_profile_plot(
    model: Model,
    x: Element,
    max_modulus: int = RESIDUE_PLOT_MAX_MODULUS,
    y: Optional[Element] = None,
) -> go.Figure:
    """res_n(x)/n against n, optionally overlaid with a second element"""

    fig = go.Figure()
    for label, element, color in [("x", x, 'royalblue'), ("y", y, 'darkorange')]:
        if element is None:
            continue
        frame = residue_profile_frame(model, element, max_modulus)
        fig.add_trace(go.Scatter(
            x=frame["n"],
            y=frame["fraction"],
            mode='lines+markers',
            name=f"{label} = {model.element_text(element)}",
            line=dict(color=color, width=2),
            customdata=frame["residue"],
            hovertemplate="n=%{x}<br>residue=%{customdata}<extra></extra>"
        ))

    fig.update_layout(
        title="Residue profile",
        xaxis_title="n",
        yaxis_title="res_n / n",
        yaxis=dict(range=[-0.05, 1.05]),
        hovermode='x unified',
        width=PLOT_WIDTH,
        height=PLOT_HEIGHT,
        legend=dict(
            yanchor="top",
            y=0.99,
            xanchor="left",
            x=1.01
        )
    )

    return fig


def create_valuation_scatter(model: Model, f: Automorphism, elements: List[Element]) -> go.Figure:
    """nu1(x) against nu1(f(x)); an f_gamma witness lies on a line of slope gamma"""

    frame = valuation_pairs(model, f, elements)
    fig = go.Figure()
    fig.add_trace(go.Scatter(
        x=frame["nu1_x"],
        y=frame["nu1_fx"],
        mode='markers',
        name='samples',
        text=frame["element"],
        marker=dict(color='seagreen', size=7)
    ))
    if not frame.empty:
        low, high = float(frame["nu1_x"].min()), float(frame["nu1_x"].max())
        fig.add_trace(go.Scatter(
            x=[low, high],
            y=[low, high],
            mode='lines',
            name='identity',
            line=dict(color='gray', width=1, dash='dash')
        ))

    fig.update_layout(
        title=f"Level-1 values under {f.describe()}",
        xaxis_title="nu1(x)",
        yaxis_title="nu1(f(x))",
        width=PLOT_WIDTH,
        height=PLOT_HEIGHT
    )

    return fig


def save_plots_to_html(figures: List[Tuple[str, go.Figure]], output_path: str):
    """Save all plots to a single HTML file"""

    html_content = """
    <html>
    <head>
        <title>Z-group plots</title>
        <script src="https://cdn.plot.ly/plotly-latest.min.js"></script>
        <style>
            body { font-family: Arial, sans-serif; margin: 20px; }
            .section { margin-bottom: 50px; }
            h2 { color: #333; }
        </style>
    </head>
    <body>
    """

    for title, fig in figures:
        div = pyo.plot(fig, output_type='div', include_plotlyjs=False)
        html_content += f'<div class="section"><h2>{title}</h2>{div}</div>'

    html_content += """
    </body>
    </html>
    """

    with open(output_path, 'w') as f:
        f.write(html_content)
