"""Wyner-Ziv and Gelfand-Pinsker coding pipelines over a compound code.

Wyner-Ziv: quantize the source with H1 z = 0, send the H2 syndrome, and let
the decoder find the nearest codeword to its side information inside the
coset fixed by both syndromes.

Gelfand-Pinsker: quantize the host with H1 z = 0 and H2 z = message, send
the quantization error, and let the decoder search the H1-only codebook and
read the message off the H2 syndrome.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

from .analysis import bernoulli_convolve
from .codec import DEFAULT_CAP, CosetConstraint, DecodeOutcome, DecodeStatus, ml_decode, quantize, threshold_decode
from .ensembles import CompoundCode, make_rng
from .gf2 import BinaryVector, hamming_distance, mat_vec_mul, syndrome

DECODERS = ("ml", "threshold")

TRIAL_CSV_HEADER = (
    "seed", "n", "m", "k1", "k2", "p", "delta", "D", "w",
    "distortion", "rate", "status", "msg_recovered", "constraint_met",
)


@dataclass(frozen=True)
class ChannelSpec:
    """Noise and budget parameters.

    p: channel (GP) or side-information (WZ) flip probability.
    delta: side-information noise; None means "same as p".
    D: design distortion of the WZ quantizer.
    w: GP input weight budget as a fraction of n.
    """

    p: float
    D: float = 0.11
    w: float = 0.25
    delta: Optional[float] = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", self.p)
        for name in ("p", "delta", "D", "w"):
            value = getattr(self, name)
            if not 0.0 <= value <= 0.5:
                raise ValueError(f"{name} = {value} outside [0, 1/2]")


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    distortion_fraction: float
    rate_used: float
    decode_status: DecodeStatus
    message_recovered: Optional[bool] = None
    constraint_met: Optional[bool] = None
    fallback: bool = field(default=False, compare=False)


def _bits(rng, size: int) -> BinaryVector:
    return BinaryVector.from_array(rng.integers(0, 2, size=size, dtype=int))


def _bernoulli(rng, size: int, prob: float) -> BinaryVector:
    return BinaryVector.from_array(rng.random(size) < prob)


def _decode(code, y, constraint, decoder, flip_prob, cap) -> DecodeOutcome:
    if decoder == "ml":
        return ml_decode(code, y, constraint, cap=cap)
    if decoder == "threshold":
        return threshold_decode(code, y, flip_prob, constraint, cap=cap)
    raise ValueError(f"unknown decoder {decoder!r}; expected one of {DECODERS}")


def wz_encode(code: CompoundCode, s: BinaryVector, *, cap: int = DEFAULT_CAP) -> tuple[BinaryVector, BinaryVector]:
    """Return (H2 z_hat, z_hat) for the distortion-minimizing z_hat with H1 z_hat = 0."""
    z_hat, _ = quantize(code, s, CosetConstraint.zero(code), cap=cap)
    return syndrome(code.H2, z_hat), z_hat


def wz_decode(
    code: CompoundCode,
    syn: BinaryVector,
    y: BinaryVector,
    effective_flip: float,
    *,
    decoder: str = "ml",
    cap: int = DEFAULT_CAP,
) -> tuple[BinaryVector, DecodeOutcome]:
    """Reconstruct the quantized source from its H2 syndrome and side information ``y``.

    Falls back to ``s_hat = y`` whenever the outcome is not DECODED.
    """
    constraint = CosetConstraint(BinaryVector.zeros(code.k1), syn)
    outcome = _decode(code, y, constraint, decoder, effective_flip, cap)
    if not outcome.decoded:
        return y, outcome
    return mat_vec_mul(outcome.z_hat, code.G), outcome


def wz_trial(code: CompoundCode, spec: ChannelSpec, seed: int, *, decoder: str = "ml", cap: int = DEFAULT_CAP) -> TrialRecord:
    """One Wyner-Ziv round trip.

    Draws, in order from PCG64(seed): the source s ~ Ber(1/2)^n, then the
    side-information noise ~ Ber(delta)^n.
    """
    rng = make_rng(seed)
    s = _bits(rng, code.n)
    y = s ^ _bernoulli(rng, code.n, spec.delta)
    syn, _ = wz_encode(code, s, cap=cap)
    s_hat, outcome = wz_decode(code, syn, y, bernoulli_convolve(spec.D, spec.delta), decoder=decoder, cap=cap)
    return TrialRecord(
        seed=seed,
        distortion_fraction=hamming_distance(s, s_hat) / code.n,
        rate_used=code.k2 / code.n,
        decode_status=outcome.status,
        fallback=not outcome.decoded,
    )


def gp_encode(
    code: CompoundCode, s_host: BinaryVector, msg: BinaryVector, spec: ChannelSpec, *, cap: int = DEFAULT_CAP
) -> tuple[BinaryVector, BinaryVector, bool]:
    """Embed ``msg`` as the H2 syndrome of the quantized host; return (u, z_hat, constraint_met)."""
    constraint = CosetConstraint(BinaryVector.zeros(code.k1), msg)
    z_hat, _ = quantize(code, s_host, constraint, cap=cap)
    u = s_host ^ mat_vec_mul(z_hat, code.G)
    return u, z_hat, u.weight() <= int(spec.w * code.n)


def gp_decode(
    code: CompoundCode,
    y: BinaryVector,
    *,
    decoder: str = "ml",
    flip_prob: Optional[float] = None,
    cap: int = DEFAULT_CAP,
) -> tuple[Optional[BinaryVector], DecodeOutcome]:
    """Decode over the H1-only codebook and return the H2 syndrome of the estimate.

    ``msg_hat`` is None only when no estimate exists (threshold decoder with
    NO_CODEWORD or AMBIGUOUS); an ML tie still yields the first minimizer.
    """
    outcome = _decode(code, y, CosetConstraint.zero(code), decoder, flip_prob, cap)
    if outcome.z_hat is None:
        return None, outcome
    return syndrome(code.H2, outcome.z_hat), outcome


def gp_trial(code: CompoundCode, spec: ChannelSpec, seed: int, *, decoder: str = "ml", cap: int = DEFAULT_CAP) -> TrialRecord:
    """One Gelfand-Pinsker round trip.

    Draws, in order from PCG64(seed): host s ~ Ber(1/2)^n, message
    ~ Ber(1/2)^k2, channel noise v ~ Ber(p)^n. The receiver sees
    y = u xor s xor v.
    """
    rng = make_rng(seed)
    s = _bits(rng, code.n)
    msg = _bits(rng, code.k2)
    u, _, met = gp_encode(code, s, msg, spec, cap=cap)
    y = u ^ s ^ _bernoulli(rng, code.n, spec.p)
    msg_hat, outcome = gp_decode(code, y, decoder=decoder, flip_prob=spec.p, cap=cap)
    return TrialRecord(
        seed=seed,
        distortion_fraction=u.weight() / code.n,
        rate_used=code.k2 / code.n,
        decode_status=outcome.status,
        message_recovered=msg_hat == msg,
        constraint_met=met,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def trial_row(record: TrialRecord, code: CompoundCode, spec: ChannelSpec) -> list[str]:
    values = (
        record.seed, code.n, code.m, code.k1, code.k2, spec.p, spec.delta, spec.D, spec.w,
        record.distortion_fraction, record.rate_used, record.decode_status.value,
        record.message_recovered, record.constraint_met,
    )
    return [_fmt(v) for v in values]


def write_trials_csv(fh: TextIO, records: Iterable[TrialRecord], code: CompoundCode, spec: ChannelSpec) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRIAL_CSV_HEADER)
    for rec in records:
        writer.writerow(trial_row(rec, code, spec))
