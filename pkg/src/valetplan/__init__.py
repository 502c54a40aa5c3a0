"""Planning engine for high-density automated valet parking."""

__version__ = "0.1.0"
