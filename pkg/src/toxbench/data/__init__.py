"""Versioned layout data: pattern sets and the descriptor list."""
