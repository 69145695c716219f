"""In-network compression, static query variables and base-station query merging for sensor networks."""

__version__ = "0.1.0"
