"""Stateless helpers: errors, number theory, intervals, sparse vectors, JSON, random formulas"""
