"""Correlation clustering via local search with weight flips."""
