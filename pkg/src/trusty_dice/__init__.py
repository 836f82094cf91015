"""Randomized estimators, extractors, lotteries and envelope proofs with exact checks."""

__version__ = "0.1.0"
FORMAT_VERSION = "1"
