"""habitminer: periodic usage-pattern mining and next-activity prediction
for interval-based service event logs."""

__version__ = "0.1.0"
