"""cdgp package."""
