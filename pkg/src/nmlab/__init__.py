"""nmlab - finite non-deterministic logical matrices, counter machines and monadicity."""

__version__ = "0.2.0"
