"""Certificate-producing prover for integer coverage of parametric linear
inequality systems."""

__version__ = "0.1.0"
