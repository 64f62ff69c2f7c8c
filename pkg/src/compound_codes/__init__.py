"""Compound LDGM/LDPC nested codes for Wyner-Ziv and Gelfand-Pinsker coding."""

from .errors import DimensionMismatch, InconsistentSystem, NoPositiveThreshold, SearchSpaceTooLarge, SocketMismatch
from .gf2 import BinaryVector, SparseBinaryMatrix, enumerate_solutions, hamming_distance, mat_vec_mul, rank, syndrome
from .ensembles import CompoundCode, DegreeParams, build_compound, rates, sample_ldgm, sample_ldpc
from .codec import CosetConstraint, DecodeOutcome, DecodeStatus, enumerate_codebook, ml_decode, quantize, threshold_decode
from .protocols import ChannelSpec, TrialRecord, gp_trial, wz_trial

__version__ = "0.1.0"
