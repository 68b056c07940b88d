"""Degrees-of-freedom analysis of linear interference networks with link erasures."""
