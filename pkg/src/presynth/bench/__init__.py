"""Benchmark circuit families and the matchgate compilation path."""
