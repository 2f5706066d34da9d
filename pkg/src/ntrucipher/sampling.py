"""Seedable randomness and the ternary / product-form polynomial samplers.

RandomSource is a deterministic expander over a 32-byte seed: output block
i is SHAKE-256(seed || "blk" || LE64(i)), consumed as a byte stream and
served as little-endian 32-bit words.  The same seed always reproduces the
same stream; constructing without a seed pulls one from os.urandom, the
platform's cryptographically secure entropy source.  Test fixtures record
seeds as lowercase hex.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np

from .ring import Poly, negacyclic_mul, norm_l1

SEED_BYTES = 32
_BLOCK_BYTES = 4096


class RandomSource:
    """Deterministic word stream from a 32-byte seed.

    A single instance is owned by one consumer; sharing an instance across
    threads is not supported.  Derived, independently seeded child streams
    come from split().
    """

    def __init__(self, seed: bytes | None = None):
        if seed is None:
            seed = os.urandom(SEED_BYTES)
        seed = bytes(seed)
        if len(seed) != SEED_BYTES:
            raise ValueError(f"seed must be exactly {SEED_BYTES} bytes, got {len(seed)}")
        self.seed = seed
        self._block_index = 0
        self._buf = b""
        self._pos = 0

    @classmethod
    def from_hex(cls, hex_seed: str) -> "RandomSource":
        """Build from up to 64 hex digits, zero-padded on the left."""
        value = int(hex_seed, 16)
        return cls(value.to_bytes(SEED_BYTES, "big"))

    def _refill(self) -> None:
        h = hashlib.shake_256()
        h.update(self.seed)
        h.update(b"blk")
        h.update(self._block_index.to_bytes(8, "little"))
        self._buf = h.digest(_BLOCK_BYTES)
        self._pos = 0
        self._block_index += 1

    def randbytes(self, k: int) -> bytes:
        out = bytearray()
        while k > 0:
            if self._pos >= len(self._buf):
                self._refill()
            take = min(k, len(self._buf) - self._pos)
            out += self._buf[self._pos : self._pos + take]
            self._pos += take
            k -= take
        return bytes(out)

    def u32(self) -> int:
        return int.from_bytes(self.randbytes(4), "little")

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection from 32-bit words.

        Words at or above the largest multiple of bound below 2^32 are
        discarded, so no residue class is favored.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound > 2**32:
            raise ValueError("bound exceeds the 32-bit word range")
        limit = (2**32 // bound) * bound
        while True:
            w = self.u32()
            if w < limit:
                return w % bound

    def split(self, index: int) -> "RandomSource":
        """Independently seeded child stream number `index`.

        The child seed is SHAKE-256(seed || "split" || LE64(index)), so
        workers can consume their own streams in any order while the whole
        computation stays a pure function of the parent seed.
        """
        h = hashlib.shake_256()
        h.update(self.seed)
        h.update(b"split")
        h.update(int(index).to_bytes(8, "little"))
        return RandomSource(h.digest(SEED_BYTES))


def sample_ternary(n: int, a: int, e: int, rng: RandomSource) -> Poly:
    """Uniform ternary polynomial with exactly a ones and e minus-ones.

    Places the a + e non-zero coefficients by a partial Fisher-Yates pass:
    only the first a + e slots of the permutation are materialized, each
    chosen by unbiased rejection sampling.
    """
    if a < 0 or e < 0 or a + e > n:
        raise ValueError(f"need a, e >= 0 and a + e <= n, got a={a} e={e} n={n}")
    idx = list(range(n))
    m = a + e
    for i in range(m):
        j = i + rng.randbelow(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    coeffs = np.zeros(n, dtype=np.int64)
    coeffs[idx[:a]] = 1
    coeffs[idx[a:m]] = -1
    return Poly(coeffs)


def sample_binary(n: int, d: int, rng: RandomSource) -> Poly:
    """Uniform binary polynomial with exactly d one-coefficients."""
    if d < 0 or d > n:
        raise ValueError(f"need 0 <= d <= n, got d={d} n={n}")
    idx = list(range(n))
    for i in range(d):
        j = i + rng.randbelow(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    coeffs = np.zeros(n, dtype=np.int64)
    coeffs[idx[:d]] = 1
    return Poly(coeffs)


def sample_uniform(n: int, q: int, rng: RandomSource) -> Poly:
    """Uniform element of the centered mod-q coefficient box."""
    h = (q - 1) // 2
    coeffs = np.fromiter((rng.randbelow(q) - h for _ in range(n)), dtype=np.int64, count=n)
    return Poly(coeffs)


@dataclass(frozen=True)
class ProductFormPoly:
    """Sparse triple (A1, A2, A3) with combined = A1 * A2 + A3 over Z."""

    A1: Poly
    A2: Poly
    A3: Poly
    combined: Poly


def sample_product_form(n: int, a1: int, a2: int, a3: int, rng: RandomSource) -> ProductFormPoly:
    """Draw A_i from the ternary classes T(a_i, a_i) and combine exactly.

    The combination A1 * A2 + A3 is computed over the integers; its one
    norm can never exceed 4 a1 a2 + 2 a3, which is asserted per sample.
    """
    A1 = sample_ternary(n, a1, a1, rng)
    A2 = sample_ternary(n, a2, a2, rng)
    A3 = sample_ternary(n, a3, a3, rng)
    combined = negacyclic_mul(A1, A2)
    combined = Poly(combined.coeffs + A3.coeffs)
    bound = 4 * a1 * a2 + 2 * a3
    assert norm_l1(combined) <= bound, "product-form one norm exceeded its bound"
    return ProductFormPoly(A1=A1, A2=A2, A3=A3, combined=combined)
