"""Haar wavelet denoising with periodized boundaries.

Analysis halves a signal into approximation and detail coefficients per
level; odd-length stages wrap the first element so every stage round-trips
exactly. Denoising soft-thresholds each detail level at ``factor`` times
that level's population standard deviation and inverse-transforms.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class WaveletDecomposition:
    """Coefficients of a level-L analysis.

    ``details`` is ordered deepest first (d_L, ..., d_1); ``stage_lens``
    records each stage's pre-padding input length so reconstruction can
    truncate wrap-around samples.
    """

    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    level: int
    original_len: int
    stage_lens: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level != len(self.details) or self.level != len(self.stage_lens):
            raise DataError("decomposition level disagrees with stored coefficients")
        if self.stage_lens and self.stage_lens[0] != self.original_len:
            raise DataError("stage lengths inconsistent with original length")


def haar_decompose(signal: np.ndarray, level: int) -> WaveletDecomposition:
    """Cascade of Haar analysis steps applied ``level`` times."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise DataError(f"haar_decompose expects 1-d input, got shape {x.shape}")
    if level < 1:
        raise DataError(f"level must be >= 1, got {level}")
    if len(x) < 2:
        raise DataError(f"signal too short for analysis: length {len(x)}")
    original_len = len(x)
    details: list[np.ndarray] = []
    stage_lens: list[int] = []
    for _ in range(level):
        if len(x) < 1:
            raise DataError("intermediate stage shorter than 1 sample")
        stage_lens.append(len(x))
        if len(x) % 2:
            x = np.concatenate([x, x[:1]])  # periodization wrap
        even = x[0::2]
        odd = x[1::2]
        details.append((even - odd) / _SQRT2)
        x = (even + odd) / _SQRT2
    return WaveletDecomposition(
        approx=x,
        details=tuple(reversed(details)),
        level=level,
        original_len=original_len,
        stage_lens=tuple(stage_lens),
    )


def soft_threshold(decomp: WaveletDecomposition, factor: float) -> WaveletDecomposition:
    """Shrink each detail level toward zero by factor * sigma_pop of that level."""
    if factor < 0:
        raise DataError(f"threshold factor must be >= 0, got {factor}")
    shrunk = []
    for d in decomp.details:
        tau = factor * float(np.std(d))
        shrunk.append(np.sign(d) * np.maximum(np.abs(d) - tau, 0.0))
    return replace(decomp, details=tuple(shrunk))


def reconstruct(decomp: WaveletDecomposition) -> np.ndarray:
    """Synthesis cascade, truncating each stage to its pre-padding length."""
    x = decomp.approx
    # details run d_L..d_1; stage_lens run stage 1..L inputs, so pair in reverse.
    for d, pre_len in zip(decomp.details, reversed(decomp.stage_lens)):
        padded = pre_len + (pre_len % 2)
        if len(x) != len(d) or 2 * len(x) != padded:
            raise DataError(
                f"inconsistent coefficient lengths: approx {len(x)}, detail {len(d)}, "
                f"stage length {pre_len}"
            )
        y = np.empty(padded)
        y[0::2] = (x + d) / _SQRT2
        y[1::2] = (x - d) / _SQRT2
        x = y[:pre_len]
    return x


def denoise(signal: np.ndarray, level: int = 4, factor: float = 2.0) -> np.ndarray:
    """decompose -> soft_threshold -> reconstruct with the stated defaults."""
    return reconstruct(soft_threshold(haar_decompose(signal, level), factor))
