"""critfan: exact weight fans, exponent arrangements and criticality checks."""

__version__ = "0.1.0"
