"""Grid-world foraging with a learning leader, shared models and greedy rivals."""

__version__ = "0.1.0"
