"""KeyGen, Enc, Dec for the secret-key scheme over Z_q[x]/(x^n + 1).

The secret key is k = 1 + p*k' with k' drawn in product form, redrawn
until k is invertible mod q.  Encryption masks the ternary message with a
fresh ephemeral r:

    c = p * r * k^-1 + mu  (mod q)

and decryption multiplies back by k:

    c * k = p * (r + mu * k') + mu  (mod q)

Because k == 1 (mod p), reducing the centered product mod p strips the
mask and returns mu exactly whenever no coefficient of the intermediate
wrapped past q/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .params import ParamSet, require_valid
from .ring import (
    Poly,
    add,
    center_mod,
    invert_mod_q,
    negacyclic_mul,
    norm_inf,
    reduce_mod_p,
    scalar_mul,
)
from .sampling import ProductFormPoly, RandomSource, sample_product_form, sample_ternary

KEYGEN_MAX_TRIES = 100


@dataclass(frozen=True)
class SecretKey:
    """k with its cached inverse; k_prime = (k - 1) / p is kept for the
    sparse decryption path, the witness only when this process drew it."""

    k: Poly
    k_inv: Poly
    k_prime: Poly
    params: ParamSet
    k_prime_witness: ProductFormPoly | None = None
    iterations: int = field(default=1, compare=False)


@dataclass(frozen=True)
class Plaintext:
    """Message polynomial; coefficients live in [-(p-1)/2, (p-1)/2]."""

    mu: Poly


@dataclass(frozen=True)
class Ciphertext:
    """One encrypted block: a centered mod-q polynomial."""

    c: Poly


@dataclass(frozen=True)
class EncryptionTranscript:
    """Ephemeral draw attached to its ciphertext, for tests and attacks."""

    r_witness: ProductFormPoly
    c: Ciphertext


def _key_coeff_bound(ps: ParamSet) -> int:
    # sup norm of 1 + p*k': |A1*A2| <= 2*min(a1,a2) per coefficient,
    # |A3| <= 1 when a3 > 0
    kp = 2 * min(ps.a1, ps.a2) + (1 if ps.a3 > 0 else 0)
    return 1 + ps.p * kp


def keygen(ps: ParamSet, rng: RandomSource, max_tries: int = KEYGEN_MAX_TRIES) -> SecretKey:
    """Draw k = 1 + p*k' until it is invertible mod q.

    Raises if the parameters let key coefficients wrap mod q (that would
    silently break the k == 1 mod p structure) or if the retry budget is
    exhausted, which at sane parameters indicates a broken setup.
    """
    require_valid(ps)
    if _key_coeff_bound(ps) > (ps.q - 1) // 2:
        raise ValueError(
            f"q={ps.q} is too small for the key structure at weights "
            f"({ps.a1},{ps.a2},{ps.a3}): coefficients of 1 + p*k' would wrap"
        )
    one = Poly.one(ps.n)
    for attempt in range(1, max_tries + 1):
        witness = sample_product_form(ps.n, ps.a1, ps.a2, ps.a3, rng)
        k = add(one, scalar_mul(ps.p, witness.combined))
        k_inv = invert_mod_q(k, ps.q)
        if k_inv is None:
            continue
        return SecretKey(
            k=k,
            k_inv=k_inv,
            k_prime=witness.combined,
            params=ps,
            k_prime_witness=witness,
            iterations=attempt,
        )
    raise RuntimeError(f"no invertible key after {max_tries} draws at {ps}")


def sample_plaintext(ps: ParamSet, rng: RandomSource) -> Plaintext:
    """Random message with a_mu ones and a_mu minus-ones (p = 3 layout)."""
    if ps.p != 3:
        raise ValueError("weighted message sampling is defined for p = 3")
    return Plaintext(sample_ternary(ps.n, ps.a_mu, ps.a_mu, rng))


def _check_plaintext(mu: Poly, ps: ParamSet) -> None:
    if mu.n != ps.n:
        raise ValueError(f"message degree {mu.n} does not match n={ps.n}")
    if norm_inf(mu) > (ps.p - 1) // 2:
        raise ValueError(f"message coefficients exceed the mod-{ps.p} centered range")


def encrypt_with_transcript(
    mu: Plaintext, sk: SecretKey, rng: RandomSource
) -> tuple[Ciphertext, EncryptionTranscript]:
    """Encrypt and also hand back the ephemeral witness that was used."""
    ps = sk.params
    _check_plaintext(mu.mu, ps)
    r = sample_product_form(ps.n, ps.a1, ps.a2, ps.a3, rng)
    # r * k^-1 through the sparse factors: A1*(A2*k^-1) + A3*k^-1
    t = negacyclic_mul(sk.k_inv, r.A2, ps.q)
    t = negacyclic_mul(t, r.A1, ps.q)
    t = add(t, negacyclic_mul(sk.k_inv, r.A3, ps.q), ps.q)
    c = add(scalar_mul(ps.p, t), mu.mu, ps.q)
    ct = Ciphertext(c)
    return ct, EncryptionTranscript(r_witness=r, c=ct)


def encrypt(mu: Plaintext, sk: SecretKey, rng: RandomSource) -> Ciphertext:
    """Mask mu with a fresh ephemeral draw; never reuses randomness."""
    ct, _ = encrypt_with_transcript(mu, sk, rng)
    return ct


def decrypt_with_intermediate(ct: Ciphertext, sk: SecretKey) -> tuple[Plaintext, Poly, int]:
    """Decrypt and expose the centered intermediate c*k and its sup norm.

    The sup norm against q/2 is the margin that decides decryption
    failure, so callers can monitor how close a parameter set runs.
    """
    ps = sk.params
    if ct.c.n != ps.n:
        raise ValueError(f"ciphertext degree {ct.c.n} does not match n={ps.n}")
    # c * k = c + p * (c * k_prime); k_prime is sparse for honest keys
    t = negacyclic_mul(ct.c, sk.k_prime, ps.q)
    c_prime = center_mod(add(ct.c, scalar_mul(ps.p, t)), ps.q)
    mu = reduce_mod_p(c_prime, ps.p)
    return Plaintext(mu), c_prime, norm_inf(c_prime)


def decrypt(ct: Ciphertext, sk: SecretKey) -> Plaintext:
    """Recover the message; deterministic, no randomness involved."""
    mu, _, _ = decrypt_with_intermediate(ct, sk)
    return mu
