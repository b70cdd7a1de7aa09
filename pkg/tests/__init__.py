"""cdgp test suite."""
