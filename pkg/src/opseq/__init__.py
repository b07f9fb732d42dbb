"""Opcode-sequence classification workbench.

Turns disassembly text (or a synthetic stand-in corpus) into balanced,
integer-encoded sequence datasets, trains grids of embedding+LSTM classifiers
built from scratch on numpy, and ranks hyper-parameter importance from the
resulting validation losses with interaction-controlled hierarchical analysis.
"""

__version__ = "0.1.0"
