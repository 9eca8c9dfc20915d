"""Clustering objects in object-centric event logs to simplify OC-DFG models."""

from importlib.resources import files

__version__ = "0.1.0"


def running_example_path():
    """Path of the bundled three-event running-example log."""
    return files(__package__) / "data" / "running_example.jsonocel"
