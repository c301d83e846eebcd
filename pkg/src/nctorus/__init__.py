"""Deformed Heisenberg-module calculus: truncated series, twisted coproducts and verification suites."""

__version__ = "0.1.0"
