"""Rich console object for cdgp."""

from rich.console import Console

console = Console()
