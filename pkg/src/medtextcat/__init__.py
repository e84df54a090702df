"""Multi-label text categorization with chi-square feature selection."""

__version__ = "0.1.0"
