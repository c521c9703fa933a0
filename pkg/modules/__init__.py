"""Profinite integers, real spans, Presburger arithmetic, Z-groups and rigidity"""
