"""Confidence intervals and rater agreement for scarce quality-evaluation scores."""

__version__ = "0.1.0"
