"""
Soft-in-soft-out decoding of high-density parity-check algebraic codes.

Subpackages: ``galois`` (GF(2^m) arithmetic), ``codes`` (BCH/RS/product
constructions and encoders), ``channel`` (BPSK + AWGN + LLRs), ``tanner``
(graphs and fixed-schedule BP), ``abp`` (adaptive decoding with perturbed
bit selection), ``schedulers`` (partial layered and hybrid dynamic
schedules), ``product`` (row/column product decoding), ``exitscan``
(extrinsic-information analysis), ``harness`` (Monte Carlo simulation),
``cli`` (command line).
"""

__version__ = "0.1.0"
