"""Local synthesis backends."""
