"""Sum-of-squares multipliers on projective curves and surfaces."""

__version__ = "0.1.0"
