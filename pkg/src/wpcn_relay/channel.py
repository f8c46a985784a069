"""Rayleigh block-fading source and the two hop rate functions.

Rayleigh amplitudes give exponentially distributed channel power gains, so
the gains are drawn directly as Exponential(rate lambda) variates, mean
1/lambda, independent across slots, relays and the two hops.
"""
from __future__ import annotations

import math

import numpy as np

from .core import SlotRealization

#: bit generator + variate algorithm recorded in output metadata.  PCG64 is
#: seeded through SeedSequence(seed, stream), so any (seed, stream) pair
#: reproduces the same gain sequence on any platform with the same numpy line.
RNG_ALGORITHM = "numpy-pcg64-seedseq-ziggurat-exponential"


class FadingSource:
    """Deterministic stream of per-slot channel gain realizations.

    The stream position counts drawn variates; one slot consumes exactly
    2*n_relays of them (source->relay then relay->dest).  Equal
    (seed, stream, lambda_rate, position) implies equal future output,
    whether gains are drawn slot by slot or in blocks.
    """

    __slots__ = ("seed", "stream", "lambda_rate", "_gen", "_position")

    def __init__(self, seed: int, lambda_rate: float = 1.0, stream: int = 0):
        if lambda_rate <= 0.0:
            raise ValueError("lambda_rate must be positive")
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed
        self.stream = stream
        self.lambda_rate = lambda_rate
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._position = 0

    @property
    def position(self) -> int:
        return self._position

    def split(self, stream: int) -> "FadingSource":
        """Independent source for the same seed under a distinct stream id."""
        return FadingSource(self.seed, self.lambda_rate, stream=stream)

    def draw_slot(self, slot: int, n_relays: int) -> SlotRealization:
        """Draw the 2*n_relays gains of one slot."""
        if n_relays < 1:
            raise ValueError("n_relays must be >= 1")
        row = self._gen.standard_exponential(2 * n_relays) / self.lambda_rate
        self._position += 2 * n_relays
        return SlotRealization(slot=slot,
                               gains_sr=row[:n_relays].tolist(),
                               gains_rd=row[n_relays:].tolist())

    def draw_block(self, n_slots: int, n_relays: int) -> np.ndarray:
        """Gains for n_slots consecutive slots, shape (n_slots, 2*n_relays).

        Consumes the stream exactly as n_slots draw_slot calls would; row t
        holds that slot's gains_sr followed by gains_rd.
        """
        if n_slots < 1 or n_relays < 1:
            raise ValueError("n_slots and n_relays must be >= 1")
        block = self._gen.standard_exponential((n_slots, 2 * n_relays))
        if self.lambda_rate != 1.0:
            block /= self.lambda_rate
        self._position += 2 * n_slots * n_relays
        return block


def rate_source_relay(gain: float, p_source_w: float, noise_var: float) -> float:
    """Achievable rate 0.5*log2(1 + g*Ps/sigma2) of the first hop."""
    if gain < 0.0:
        raise ValueError("gain must be >= 0")
    return 0.5 * math.log2(1.0 + gain * p_source_w / noise_var)


def rate_relay_dest(gain: float, p_relay_w: float, noise_var: float) -> float:
    """Achievable rate 0.5*log2(1 + g*Pr/sigma2) of the second hop."""
    if gain < 0.0:
        raise ValueError("gain must be >= 0")
    return 0.5 * math.log2(1.0 + gain * p_relay_w / noise_var)
