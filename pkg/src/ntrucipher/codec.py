"""Byte <-> message-polynomial packing and the key / ciphertext file formats.

Packing (p = 3 only): the byte stream is framed as

    LE64 length | CRC32 of the data | data | zero padding

then cut into fixed-size payload chunks.  Each chunk, read as a big-endian
unsigned integer, is written in balanced ternary, least significant digit
in coefficient 0.  Chunk capacity is the largest whole number of bytes
that fits in n - 2 trits, keeping two reserve trits clear at the top; at
n = 256 that is 50 bytes per block.

File formats (all integers little-endian):

    key        "NTRK" | u8 version | u32 crc | 8 x u32 params | n x i16 k | n x i16 k_inv
    ciphertext "NTRC" | u8 version | u32 crc | 8 x u32 params | u32 blocks | per block n x i16

The crc field is a CRC32 over every byte that follows it, so any flipped
byte is caught at load time even when the damaged coefficient would still
be in range; the key loader additionally rechecks k * k_inv == 1 and
k == 1 mod p.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .cipher import Ciphertext, Plaintext, SecretKey
from .params import ParamSet, validate
from .ring import Poly, negacyclic_mul, norm_inf, reduce_mod_p

MAGIC_KEY = b"NTRK"
MAGIC_CIPHERTEXT = b"NTRC"
FORMAT_VERSION = 1

_HEADER_LEN = 12  # LE64 length + CRC32 inside the plaintext stream


class CodecError(Exception):
    """Base class for everything the codec can reject."""


class FormatError(CodecError):
    """Structural problems: bad magic, version, or byte counts."""


class CorruptionError(CodecError):
    """Well-framed file whose contents fail checksums or invariants."""


class IntegrityError(CodecError):
    """Decoded plaintext stream fails its length or CRC check."""


def block_payload_bytes(n: int) -> int:
    """Payload bytes per block: the most that fit in n - 2 trits."""
    b = 0
    cap = 3 ** (n - 2)
    while 256 ** (b + 1) <= cap:
        b += 1
    if b == 0:
        raise ValueError(f"ring degree n={n} is too small to carry bytes")
    return b


def _int_to_balanced_ternary(value: int, n: int) -> np.ndarray:
    digits = np.zeros(n, dtype=np.int64)
    i = 0
    while value:
        value, rem = divmod(value, 3)
        if rem == 2:
            rem = -1
            value += 1
        if i >= n:
            raise ValueError("value does not fit in the digit budget")
        digits[i] = rem
        i += 1
    return digits


def _balanced_ternary_to_int(digits: np.ndarray) -> int:
    value = 0
    for d in reversed(digits.tolist()):
        value = 3 * value + d
    return value


def encode_bytes(data: bytes, ps: ParamSet) -> list[Plaintext]:
    """Frame data and pack it into message polynomials.

    Always returns at least one block; empty input encodes to the bare
    header.  Only p = 3 has a digit alphabet matching the plaintext
    coefficient range, so other p are rejected.
    """
    if ps.p != 3:
        raise ValueError(f"byte packing is defined for p = 3, got p={ps.p}")
    b = block_payload_bytes(ps.n)
    stream = struct.pack("<Q", len(data)) + struct.pack("<I", zlib.crc32(data)) + data
    nblocks = max(1, -(-len(stream) // b))
    stream = stream.ljust(nblocks * b, b"\x00")
    out = []
    for i in range(nblocks):
        chunk = stream[i * b : (i + 1) * b]
        digits = _int_to_balanced_ternary(int.from_bytes(chunk, "big"), ps.n)
        out.append(Plaintext(Poly(digits)))
    return out


def decode_blocks(blocks: list[Plaintext], ps: ParamSet) -> bytes:
    """Reverse encode_bytes; any inconsistency raises IntegrityError."""
    if ps.p != 3:
        raise ValueError(f"byte packing is defined for p = 3, got p={ps.p}")
    b = block_payload_bytes(ps.n)
    chunks = []
    for blk in blocks:
        value = _balanced_ternary_to_int(blk.mu.coeffs)
        if value < 0 or value >= 256**b:
            raise IntegrityError("block value outside the byte range")
        chunks.append(value.to_bytes(b, "big"))
    stream = b"".join(chunks)
    if len(stream) < _HEADER_LEN:
        raise IntegrityError("stream shorter than its header")
    (length,) = struct.unpack_from("<Q", stream, 0)
    (crc,) = struct.unpack_from("<I", stream, 8)
    if _HEADER_LEN + length > len(stream):
        raise IntegrityError("length field exceeds the decoded stream")
    if len(blocks) != max(1, -(-(_HEADER_LEN + length) // b)):
        raise IntegrityError("block count does not match the length field")
    data = stream[_HEADER_LEN : _HEADER_LEN + length]
    if zlib.crc32(data) != crc:
        raise IntegrityError("plaintext checksum mismatch")
    return data


def _pack_params(ps: ParamSet) -> bytes:
    return struct.pack("<8I", ps.n, ps.p, ps.q, ps.a1, ps.a2, ps.a3, ps.a_mu, ps.lam)


def _unpack_params(raw: bytes) -> ParamSet:
    n, p, q, a1, a2, a3, a_mu, lam = struct.unpack("<8I", raw)
    return ParamSet(n=n, p=p, q=q, a1=a1, a2=a2, a3=a3, a_mu=a_mu, lam=lam)


def _pack_coeffs(f: Poly, q: int) -> bytes:
    if (q - 1) // 2 > 32767:
        raise FormatError(f"q={q} exceeds the 16-bit coefficient format")
    if norm_inf(f) > (q - 1) // 2:
        raise FormatError("coefficients outside the centered mod-q range")
    return f.coeffs.astype("<i2").tobytes()


def _unpack_coeffs(raw: bytes, n: int) -> Poly:
    return Poly(np.frombuffer(raw, dtype="<i2", count=n).astype(np.int64))


def _frame(magic: bytes, body: bytes) -> bytes:
    return magic + struct.pack("<B", FORMAT_VERSION) + struct.pack("<I", zlib.crc32(body)) + body


def _unframe(magic: bytes, data: bytes, kind: str) -> bytes:
    if len(data) < 9:
        raise FormatError(f"{kind} file shorter than its preamble")
    if data[:4] != magic:
        raise FormatError(f"not a {kind} file (bad magic {data[:4]!r})")
    version = data[4]
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported {kind} format version {version}")
    (crc,) = struct.unpack_from("<I", data, 5)
    body = data[9:]
    if zlib.crc32(body) != crc:
        raise CorruptionError(f"{kind} file checksum mismatch")
    return body


def serialize_key(sk: SecretKey) -> bytes:
    ps = sk.params
    body = _pack_params(ps) + _pack_coeffs(sk.k, ps.q) + _pack_coeffs(sk.k_inv, ps.q)
    return _frame(MAGIC_KEY, body)


def deserialize_key(data: bytes) -> SecretKey:
    """Parse and fully revalidate a key file.

    Beyond the checksum this rechecks the parameter invariants, the
    coefficient ranges, k * k_inv == 1 mod q, and k == 1 mod p, so a key
    that loads is a key that works.
    """
    body = _unframe(MAGIC_KEY, data, "key")
    if len(body) < 32:
        raise FormatError("key file truncated before the parameter block")
    ps = _unpack_params(body[:32])
    problems = validate(ps)
    if problems:
        raise CorruptionError("key parameter block invalid: " + "; ".join(problems))
    expect = 32 + 2 * 2 * ps.n
    if len(body) != expect:
        raise FormatError(f"key file body is {len(body)} bytes, expected {expect}")
    half = (ps.q - 1) // 2
    k = _unpack_coeffs(body[32 : 32 + 2 * ps.n], ps.n)
    k_inv = _unpack_coeffs(body[32 + 2 * ps.n :], ps.n)
    if norm_inf(k) > half or norm_inf(k_inv) > half:
        raise CorruptionError("key coefficients outside the centered mod-q range")
    if negacyclic_mul(k, k_inv, ps.q) != Poly.one(ps.n):
        raise CorruptionError("stored inverse does not invert k")
    if reduce_mod_p(k, ps.p) != Poly.one(ps.n):
        raise CorruptionError("k is not congruent to 1 mod p")
    # k == 1 mod p makes this division exact, recovering k' = (k - 1) / p
    shifted = k.coeffs.copy()
    shifted[0] -= 1
    return SecretKey(k=k, k_inv=k_inv, k_prime=Poly(shifted // ps.p), params=ps)


def serialize_ciphertext(blocks: list[Ciphertext], ps: ParamSet) -> bytes:
    """Pack encrypted blocks with a parameter echo; zero blocks is legal."""
    parts = [_pack_params(ps), struct.pack("<I", len(blocks))]
    for blk in blocks:
        if blk.c.n != ps.n:
            raise FormatError(f"block degree {blk.c.n} does not match n={ps.n}")
        parts.append(_pack_coeffs(blk.c, ps.q))
    return _frame(MAGIC_CIPHERTEXT, b"".join(parts))


def deserialize_ciphertext(data: bytes) -> tuple[list[Ciphertext], ParamSet]:
    body = _unframe(MAGIC_CIPHERTEXT, data, "ciphertext")
    if len(body) < 36:
        raise FormatError("ciphertext file truncated before the block table")
    ps = _unpack_params(body[:32])
    problems = validate(ps)
    if problems:
        raise CorruptionError("ciphertext parameter block invalid: " + "; ".join(problems))
    (nblocks,) = struct.unpack_from("<I", body, 32)
    expect = 36 + nblocks * 2 * ps.n
    if len(body) != expect:
        raise FormatError(f"ciphertext body is {len(body)} bytes, expected {expect}")
    half = (ps.q - 1) // 2
    out = []
    for i in range(nblocks):
        start = 36 + i * 2 * ps.n
        c = _unpack_coeffs(body[start : start + 2 * ps.n], ps.n)
        if norm_inf(c) > half:
            raise CorruptionError(f"block {i} coefficients outside the mod-q range")
        out.append(Ciphertext(c))
    return out, ps
