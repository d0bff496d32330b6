"""Bird-hunter learning testbed: seeded pixel environment, RL/IL trainers, demo capture."""

__version__ = "0.1.0"
