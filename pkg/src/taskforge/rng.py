"""Seedable, portable random number generation.

Everything downstream (sequence sampling, grounding search, scene spawning)
draws from :class:`Rng`, a splitmix64 generator implemented with plain integer
arithmetic. Unlike ``random.Random``, every derived draw (uniform, bounded
int, shuffle, weighted choice) is pinned here, so identical seeds reproduce
bit-identical tasks on any platform or Python version.

Algorithm: splitmix64 (Steele, Lea, Flood; public domain). State advances by
the 64-bit golden-gamma constant; output is the finalizing mix of the state.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Derive an independent child seed from a master seed.

    Used to split one CLI-level seed into per-task streams: child i gets
    ``mix(master + (i + 1) * gamma)``. Documented so external tooling can
    reproduce any single task in isolation.
    """
    return _mix64((master + (index + 1) * _GAMMA) & _MASK64)


class Rng:
    """splitmix64 stream with the handful of draw helpers the pipeline needs."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi]. Degenerate intervals return lo."""
        if hi <= lo:
            return lo
        return lo + (hi - lo) * self.random()

    def below(self, n: int) -> int:
        """Uniform int in [0, n). Modulo bias is < n / 2**64, irrelevant here;
        what matters is that the draw is identical everywhere."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        return self.next_u64() % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform int in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.below(hi - lo + 1)

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def weighted_index(self, weights: Sequence[float]) -> int:
        """Index drawn proportionally to nonnegative weights.

        Raises ValueError when the total weight is zero (callers treat that
        as a resample trigger or config error, per context).
        """
        total = 0.0
        for w in weights:
            if w < 0:
                raise ValueError("negative weight")
            total += w
        if total <= 0.0:
            raise ValueError("all weights are zero")
        r = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                return i
        return len(weights) - 1  # r landed on the top edge by rounding

    def fork(self, index: int) -> "Rng":
        """Child stream independent of this one; see :func:`derive_seed`."""
        return Rng(derive_seed(self._state, index))
