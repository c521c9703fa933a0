"""
Tests for the plotly figures shown in the explorer.
"""

from modules.plots import (
    create_residue_profile_plot,
    create_valuation_scatter,
    residue_profile_frame,
    save_plots_to_html,
)
from modules.realspan import GammaDescriptor
from modules.rigidity import FGamma


class TestPlots:
    def test_residue_profile(self, exm_model):
        frame = residue_profile_frame(exm_model, exm_model.gen("u"), max_modulus=6)
        assert frame["n"].tolist() == [2, 3, 4, 5, 6]
        assert frame.loc[frame["n"] == 6, "residue"].item() == 3
        fig = create_residue_profile_plot(exm_model, exm_model.gen("u"), 6, y=exm_model.one())
        assert len(fig.data) == 2

    def test_valuation_scatter_and_html(self, laurent_model, rng, tmp_path):
        elements = laurent_model.spanning_elements() + laurent_model.random_elements(rng, 5)
        fig = create_valuation_scatter(laurent_model, FGamma(GammaDescriptor(1, 1)), elements)
        assert [trace.name for trace in fig.data] == ["samples", "identity"]
        path = tmp_path / "plots.html"
        save_plots_to_html([("Witness", fig)], str(path))
        assert "<h2>Witness</h2>" in path.read_text()
