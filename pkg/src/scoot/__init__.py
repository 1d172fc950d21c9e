"""Style similarity between face sketches, with a meta-measure benchmark harness."""

__version__ = "0.1.0"
