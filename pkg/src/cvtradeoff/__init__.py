"""Information-disturbance tradeoff for coherent states: analytic and Monte Carlo."""

__version__ = "0.1.0"
