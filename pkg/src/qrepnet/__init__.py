"""qrepnet: simulation toolkit for encoded quantum repeater networks."""

__version__ = "0.1.0"
