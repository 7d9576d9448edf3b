"""Toolkit for HPC code-model work: corpus curation, code-generation
benchmarking, OpenMP pragma equivalence, and performance-pair datasets."""

__version__ = "0.1.0"
