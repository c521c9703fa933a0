"""UI helper functions for Streamlit"""

import streamlit as st
import pandas as pd
from typing import Optional

from modules.demos import d_shift_spec, exm_spec, l_translate_spec, laurent_spec, non_archimedean_spec
from modules.realspan import sqrt_rational
from modules.zgroup import UNORDERED, Element, Model, ModelSpec, build_model, spec_from_json
from utils.errors import ZGroupError
from utils.spec_io import dumps, load_json, load_json_arg

EXAMPLE_SPECS = {
    "Finite span: D'' = Q, L'' = Q*sqrt(2)": lambda: exm_spec(),
    "Laurent span: L'' = Q/(pi - 1)": lambda: laurent_spec(),
    "Laurent span: L'' = Q*sqrt(2)": lambda: laurent_spec(sqrt_rational(2)),
    "Unordered finite span": lambda: exm_spec(UNORDERED),
    "L below level 1": d_shift_spec,
    "D at level 2 only": l_translate_spec,
    "D split across levels": non_archimedean_spec,
}


def create_model_section(max_bits: int) -> Optional[Model]:
    """Pick an example model or upload a spec; returns the built model"""

    st.header("🧮 Model")

    col1, col2 = st.columns(2)

    with col1:
        source = st.radio("Model source:", ["Example model", "Upload spec (JSON)"], key="model_source")
        spec: Optional[ModelSpec] = None
        if source == "Example model":
            choice = st.selectbox("Example", list(EXAMPLE_SPECS), key="example_spec")
            spec = EXAMPLE_SPECS[choice]()
        else:
            uploaded = st.file_uploader("Model spec", type=['json'], key="spec_upload")
            if uploaded is not None:
                try:
                    spec = spec_from_json(load_json(uploaded))
                except ZGroupError as e:
                    st.error(f"Invalid spec: {e}")

    if spec is None:
        st.info("📌 Upload a model spec to continue")
        return None

    try:
        model = build_model(spec, max_bits=max_bits)
    except ZGroupError as e:
        st.error(f"❌ {type(e).__name__}: {e}")
        return None

    with col2:
        st.write("**Summary**")
        st.json(model.describe())
        create_json_download_button(spec.to_json(), "model_spec.json", "download_spec")

    st.dataframe(model.valuation_table(), use_container_width=True)
    return model


def element_input(model: Model, label: str, key: str, default: str = "1") -> Optional[Element]:
    """Text box taking an integer or an element JSON such as {"d": {"d0": "1/2"}, "a": {"u": 1}}"""

    text = st.text_input(label, value=default, key=key)
    try:
        value = load_json_arg(text)
        if isinstance(value, int) and not isinstance(value, bool):
            return model.from_int(value)
        return model.element_from_json(value)
    except (ZGroupError, AttributeError) as e:
        st.warning(f"⚠️ {label}: {e}")
        return None


def create_download_button(df: pd.DataFrame, filename: str, key: str):
    """Create a download button for dataframe as CSV"""

    csv = df.to_csv(index=False)
    st.download_button(
        label=f"📥 Download {filename}",
        data=csv,
        file_name=filename,
        mime="text/csv",
        key=key
    )


def create_json_download_button(obj, filename: str, key: str):
    st.download_button(
        label=f"📥 Download {filename}",
        data=dumps(obj, pretty=True),
        file_name=filename,
        mime="application/json",
        key=key
    )


def streamlit_progress():
    """st.progress bar plus status line, wrapped as a progress_callback"""

    progress_bar = st.progress(0)
    status_text = st.empty()

    def progress_callback(progress, message):
        progress_bar.progress(min(max(progress, 0.0), 1.0))
        status_text.text(message)

    def clear():
        progress_bar.empty()
        status_text.empty()

    return progress_callback, clear
