"""Main Streamlit application"""

import streamlit as st
import os
import sys
import tempfile
import numpy as np

# Add the parent directory to Python path to fix imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.config import (
    ADVERSARIAL_CANDIDATES,
    DEFAULT_MAX_BITS,
    DEFAULT_NODE_CAP,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    RESIDUE_PLOT_MAX_MODULUS,
    SPAN_STRUCTURES,
)
from app.ui_helpers import (
    create_download_button,
    create_json_download_button,
    create_model_section,
    element_input,
    streamlit_progress,
)
from modules import profinite
from modules.formulas import is_quantifier_free, parse, size
from modules.plots import create_residue_profile_plot, create_valuation_scatter, save_plots_to_html
from modules.presburger import decide_sentence, eliminate_quantifiers, eval_qf_model, normalize
from modules.rigidity import NON_RIGID, RIGID, adversarial_search, decide_rigidity
from modules.selftest import run_selftest
from utils.errors import ZGroupError
from utils.spec_io import load_json_arg


# Page config
st.set_page_config(
    page_title="Z-Groups",
    page_icon="🧮",
    layout="wide"
)

# Title and description
st.title("🧮 Z-Groups: Presburger Models and Rigidity")
st.markdown("""
This tool builds finitely described models of Presburger arithmetic and explores:
- 🔣 Quantifier elimination and decisions for Presburger formulas
- 🧮 Elements, residues, valuations and separating formulas
- 🛡️ Rigidity verdicts with verified witness automorphisms
""")

# Sidebar settings
with st.sidebar:
    st.header("⚙️ Settings")
    seed = st.number_input("Seed", min_value=0, value=DEFAULT_SEED, step=1)
    samples = st.number_input("Samples", min_value=1, value=DEFAULT_SAMPLES, step=10)
    max_bits = st.number_input("Max bits", min_value=64, value=DEFAULT_MAX_BITS, step=64)
    node_cap = st.number_input("Node cap", min_value=100, value=DEFAULT_NODE_CAP, step=1000)
    st.caption("Span structures: " + "; ".join(SPAN_STRUCTURES.values()))

# Initialize session state
if 'verdict' not in st.session_state:
    st.session_state.verdict = None

model = create_model_section(int(max_bits))

st.markdown("---")

tab1, tab2, tab3, tab4, tab5 = st.tabs(
    ["🔣 Presburger", "🧮 Elements", "🛡️ Rigidity", "♾️ Profinite", "✅ Self-test"]
)

# Tab 1: Presburger formulas
with tab1:
    st.header("Presburger Formulas")
    text = st.text_input("Formula", value="A x. E y. (x = 2*y | x = 2*y + 1)", key="formula")
    col1, col2, col3 = st.columns(3)

    try:
        formula = parse(text)
    except ZGroupError as e:
        st.warning(f"⚠️ {e}")
        formula = None

    if formula is not None:
        with col1:
            if st.button("⚖️ Decide", key="decide_btn", use_container_width=True):
                try:
                    st.success(f"Result: **{decide_sentence(formula, int(node_cap))}**")
                except ZGroupError as e:
                    st.error(f"❌ {type(e).__name__}: {e}")
        with col2:
            if st.button("✂️ Eliminate quantifiers", key="qe_btn", use_container_width=True):
                try:
                    qf = formula if is_quantifier_free(formula) else eliminate_quantifiers(formula, int(node_cap))
                    st.code(str(qf))
                    st.caption(f"size {size(qf)}")
                except ZGroupError as e:
                    st.error(f"❌ {type(e).__name__}: {e}")
        with col3:
            if st.button("📐 Normal form", key="nf_btn", use_container_width=True):
                try:
                    qf = formula if is_quantifier_free(formula) else eliminate_quantifiers(formula, int(node_cap))
                    st.code(str(normalize(qf, int(node_cap))))
                except ZGroupError as e:
                    st.error(f"❌ {type(e).__name__}: {e}")

# Tab 2: Elements
with tab2:
    st.header("Elements of the Model")

    if model is None:
        st.warning("⚠️ Please choose or upload a model")
    else:
        col1, col2 = st.columns(2)
        with col1:
            x = element_input(model, "x", "elem_x", default="3")
        with col2:
            y = element_input(model, "y", "elem_y", default="1")

        if x is not None and y is not None:
            st.write(f"**x** = {model.element_text(x)}, **y** = {model.element_text(y)}")
            if model.ordered:
                try:
                    st.write(f"nu1(x) = {model.nu(x, 1)}, nu2(x) = {model.nu(x, 2)}")
                    st.write(f"compare(x, y) = {model.compare(x, y)}")
                except ZGroupError as e:
                    st.error(f"❌ {e}")

            if x != y:
                witness = model.separate(x, y)
                st.subheader("Separation")
                st.json(witness.to_json())
                if hasattr(witness, "formula"):
                    f = witness.formula("v")
                    st.write(
                        f"At x: {eval_qf_model(f, model, {'v': x})}, "
                        f"at y: {eval_qf_model(f, model, {'v': y})}"
                    )

            d_part, l_part = model.decompose(x)
            st.write(f"D-part: {model.element_text(d_part)}; L-part: {model.element_text(l_part)}")

            max_modulus = st.slider("Largest modulus", 5, 100, RESIDUE_PLOT_MAX_MODULUS, key="max_modulus")
            fig = create_residue_profile_plot(model, x, max_modulus, y=y)
            st.plotly_chart(fig, use_container_width=True)

# Tab 3: Rigidity
with tab3:
    st.header("Rigidity")

    if model is None:
        st.warning("⚠️ Please choose or upload a model")
    else:
        if st.button("🛡️ Decide Rigidity", key="rigidity_btn", type="primary"):
            progress_callback, clear = streamlit_progress()
            with st.spinner("Deciding rigidity and verifying the witness..."):
                verdict = decide_rigidity(model, samples=int(samples), seed=int(seed),
                                          progress_callback=progress_callback)
            clear()
            st.session_state.verdict = (model.spec, verdict)

        if st.session_state.verdict is not None and st.session_state.verdict[0] == model.spec:
            verdict = st.session_state.verdict[1]
            if verdict.status == RIGID:
                st.success("✅ Rigid")
            elif verdict.status == NON_RIGID:
                st.warning(f"🔁 Not rigid: {verdict.witness.describe()}")
            else:
                st.info("❔ Unknown")
            for line in verdict.justification:
                st.markdown(f"- {line}")

            create_json_download_button(verdict.to_json(), "verdict.json", "download_verdict")

            if verdict.report is not None:
                st.subheader("Verification")
                frame = verdict.report.to_frame()
                st.dataframe(frame, use_container_width=True)
                create_download_button(frame, "verification.csv", "download_verification")
                if verdict.report.moved_example:
                    st.caption(verdict.report.moved_example)

            if verdict.witness is not None and model.ordered:
                rng = np.random.default_rng(int(seed))
                elements = model.spanning_elements() + model.random_elements(rng, int(samples))
                fig = create_valuation_scatter(model, verdict.witness, elements)
                st.plotly_chart(fig, use_container_width=True)

                if st.button("💾 Save Plot to HTML", key="save_plot"):
                    with tempfile.NamedTemporaryFile(delete=False, suffix='.html') as tmp:
                        save_plots_to_html([("Witness", fig)], tmp.name)
                        with open(tmp.name, 'r') as f:
                            html_content = f.read()
                    st.download_button(
                        label="📥 Download HTML Report",
                        data=html_content,
                        file_name="witness_plot.html",
                        mime="text/html"
                    )

        st.subheader("Adversarial search")
        candidates = st.number_input("Candidates", min_value=10, value=ADVERSARIAL_CANDIDATES, step=100)
        if st.button("🎯 Search for automorphisms", key="adversarial_btn"):
            progress_callback, clear = streamlit_progress()
            with st.spinner("Trying candidate automorphisms..."):
                result = adversarial_search(model, int(candidates), seed=int(seed),
                                            progress_callback=progress_callback)
            clear()
            if result.found_none:
                st.success(f"✅ None of {result.candidates} candidates is a non-identity automorphism")
            else:
                st.warning(f"⚠️ {len(result.passing)} candidates passed verification")
            st.dataframe(result.frame.head(50), use_container_width=True)
            create_download_button(result.frame, "adversarial_search.csv", "download_adversarial")

# Tab 4: Profinite integers
with tab4:
    st.header("Profinite Integers")
    st.caption('Coordinates as JSON, e.g. {"support": {"2": "1/3", "3": "2"}, "default": "0"}')
    raw = st.text_input("Element", value='{"support": {"2": "1"}, "default": "0"}', key="profinite_x")
    try:
        value = profinite.from_json(load_json_arg(raw))
        st.write(f"**{value}**")
        moduli = range(2, st.slider("Moduli up to", 5, 100, 30, key="profinite_moduli") + 1)
        table = profinite.residue_table(value, moduli)
        st.dataframe(table, use_container_width=True)
        create_download_button(table, "residues.csv", "download_residues")
    except (ZGroupError, ValueError) as e:
        st.warning(f"⚠️ {e}")

# Tab 5: Self-test
with tab5:
    st.header("Acceptance Self-test")

    if st.button("✅ Run self-test", key="selftest_btn"):
        progress_callback, clear = streamlit_progress()
        with st.spinner("Running acceptance criteria..."):
            summary = run_selftest(int(samples), int(seed), progress_callback=progress_callback)
        clear()
        if summary["passed"].all():
            st.success("🎉 Every criterion passed")
            st.balloons()
        else:
            st.error("❌ Some criteria failed")
        st.dataframe(summary, use_container_width=True)
        create_download_button(summary, "selftest.csv", "download_selftest")
