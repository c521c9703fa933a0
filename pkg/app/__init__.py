"""Streamlit explorer and command-line front end"""
