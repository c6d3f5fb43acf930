"""Missing-digit laboratory: sums of two prime squares over digit-restricted integers."""

__version__ = "0.1.0"
