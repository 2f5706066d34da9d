"""Desk-scale cryptanalysis: exhaustive search, the shared-key lattice
attack, and a naive uniformity distinguisher.

Everything here targets toy parameters.  The point is to make the
security story concrete and testable, not to threaten the recommended
set: the exhaustive search is capped by candidate-space size, the lattice
attack by the exact-arithmetic LLL dimension limit.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import chi2 as _chi2

from .cipher import Ciphertext, SecretKey, encrypt_with_transcript, keygen, sample_plaintext
from .lll import MAX_DIM, lll_reduce
from .params import ParamSet, require_valid
from .ring import (
    Poly,
    center_mod,
    invert_mod_q,
    negacyclic_mul,
    norm_inf,
    reduce_mod_p,
    scalar_mul,
    sub,
)
from .sampling import ProductFormPoly, RandomSource, sample_product_form, sample_uniform

BRUTE_FORCE_CAP = 2**24


@dataclass(frozen=True)
class KeyspaceReport:
    log2_keyspace: float
    log2_plaintext_space: float
    floor_bits: int
    keyspace_above_floor: bool
    plaintext_space_above_floor: bool


def keyspace_report(ps: ParamSet, norm_bound: int = 1, floor_bits: int = 80) -> KeyspaceReport:
    """Size of the naive search spaces against the 2^floor_bits floor.

    Keys are counted as coefficient vectors of sup norm at most
    norm_bound, n * log2(2*norm_bound + 1) bits; plaintexts as the full
    ternary box for p = 3, n * log2(p) bits.
    """
    log2_keys = ps.n * math.log2(2 * norm_bound + 1)
    log2_msgs = ps.n * math.log2(ps.p)
    return KeyspaceReport(
        log2_keyspace=log2_keys,
        log2_plaintext_space=log2_msgs,
        floor_bits=floor_bits,
        keyspace_above_floor=log2_keys >= floor_bits,
        plaintext_space_above_floor=log2_msgs >= floor_bits,
    )


def enumerate_ternary(n: int, a: int, e: int) -> list[tuple[int, ...]]:
    """All ternary vectors with a ones and e minus-ones, lexicographic by
    support choice."""
    out = []
    for plus in itertools.combinations(range(n), a):
        rest = [i for i in range(n) if i not in plus]
        for minus in itertools.combinations(rest, e):
            v = [0] * n
            for i in plus:
                v[i] = 1
            for i in minus:
                v[i] = -1
            out.append(tuple(v))
    return out


def enumerate_product_form(n: int, a1: int, a2: int, a3: int) -> list[tuple[int, ...]]:
    """Distinct combined values A1*A2 + A3 in first-seen enumeration order."""
    t1 = enumerate_ternary(n, a1, a1)
    t2 = enumerate_ternary(n, a2, a2)
    t3 = enumerate_ternary(n, a3, a3)
    seen: dict[tuple[int, ...], None] = {}
    for v1 in t1:
        p1 = Poly(v1)
        for v2 in t2:
            prod = negacyclic_mul(p1, Poly(v2)).coeffs
            for v3 in t3:
                combined = tuple((prod + np.array(v3, dtype=np.int64)).tolist())
                if combined not in seen:
                    seen[combined] = None
    return list(seen)


def _ternary_count(n: int, a: int, e: int) -> int:
    return math.comb(n, a) * math.comb(n - a, e)


def _negacyclic_matrix(f: Poly) -> np.ndarray:
    """Rows are the coefficient vectors of x^i * f, so v @ M == v * f."""
    n = f.n
    m = np.zeros((n, n), dtype=np.int64)
    row = f.coeffs.copy()
    for i in range(n):
        m[i] = row
        row = np.roll(row, 1)
        row[0] = -row[0]
    return m


@dataclass
class CrackContext:
    """Reusable candidate tables for brute_force_crack at one ParamSet."""

    ps: ParamSet
    r_matrix: np.ndarray  # distinct ephemeral candidates, enumeration order
    keys: list[tuple[Poly, Poly, np.ndarray]]  # (k', k, matrix of p * k^-1)


def prepare_crack_context(ps: ParamSet) -> CrackContext:
    require_valid(ps)
    pairs = _ternary_count(ps.n, ps.a1, ps.a1) * _ternary_count(ps.n, ps.a2, ps.a2) * _ternary_count(
        ps.n, ps.a3, ps.a3
    )
    if pairs**2 > BRUTE_FORCE_CAP:
        raise ValueError(
            f"candidate pair space around 2^{2 * math.log2(max(pairs, 1)):.0f} "
            f"exceeds the exhaustive-search cap 2^{math.log2(BRUTE_FORCE_CAP):.0f}"
        )
    candidates = enumerate_product_form(ps.n, ps.a1, ps.a2, ps.a3)
    r_matrix = np.array(candidates, dtype=np.int64)
    keys = []
    for cand in candidates:
        kp = Poly(cand)
        k = Poly(kp.coeffs * ps.p)
        k = Poly(k.coeffs + Poly.one(ps.n).coeffs)
        k_inv = invert_mod_q(k, ps.q)
        if k_inv is None:
            continue
        keys.append((kp, k, _negacyclic_matrix(scalar_mul(ps.p, k_inv, ps.q))))
    return CrackContext(ps=ps, r_matrix=r_matrix, keys=keys)


def brute_force_crack(
    ct: Ciphertext,
    ps: ParamSet,
    context: CrackContext | None = None,
    find_all: bool = False,
):
    """Exhaust (k', r) candidate pairs against one ciphertext.

    For each candidate key the whole ephemeral table is tested at once:
    a hit is a pair whose mu = c - p * r * k^-1 lands every coefficient
    in the plaintext range.  Returns the first (r, k, mu) hit in
    enumeration order, a list of all hits when find_all is set, or None.
    """
    if context is None:
        context = prepare_crack_context(ps)
    elif context.ps != ps:
        raise ValueError("context was prepared for a different parameter set")
    c_row = ct.c.coeffs
    half_p = (ps.p - 1) // 2
    h = (ps.q - 1) // 2
    hits = []
    for _, k, m_pkinv in context.keys:
        residual = (c_row - context.r_matrix @ m_pkinv + h) % ps.q - h
        ok = np.flatnonzero(np.all(np.abs(residual) <= half_p, axis=1))
        for row in ok:
            triple = (Poly(context.r_matrix[row]), k, Poly(residual[row]))
            if not find_all:
                return triple
            hits.append(triple)
    if find_all:
        return hits
    return None


@dataclass(frozen=True)
class LatticeBasis:
    """Rows of the 2n x 2n attack lattice [[I, C], [0, qI]]."""

    rows: np.ndarray
    n: int
    q: int


def build_attack_lattice(c_diff: Poly, ps: ParamSet) -> LatticeBasis:
    """Lattice whose short vectors expose (k, r) pairs with k*c == r mod q.

    Row i < n is (e_i | coefficients of x^i * c_diff); row n + i is
    (0 | q e_i).  The determinant is q^n.
    """
    n = ps.n
    rows = np.zeros((2 * n, 2 * n), dtype=np.int64)
    rows[:n, :n] = np.eye(n, dtype=np.int64)
    rows[:n, n:] = _negacyclic_matrix(center_mod(c_diff, ps.q))
    rows[n:, n:] = ps.q * np.eye(n, dtype=np.int64)
    return LatticeBasis(rows=rows, n=n, q=ps.q)


def build_joint_attack_lattice(c_diffs: list[Poly], ps: ParamSet) -> np.ndarray:
    """Stack several difference relations into one (m+1)n x (m+1)n basis.

    The first n rows are (e_i | x^i d_1 | ... | x^i d_m); below them sits
    a q-identity block per difference.  A key shared by every transmission
    yields the row (k | r_1 - r_0 | ... | r_m - r_0), which must be short
    in all blocks at once, so spurious short vectors are much rarer than
    in any single-difference lattice.
    """
    n = ps.n
    m = len(c_diffs)
    dim = n * (m + 1)
    rows = np.zeros((dim, dim), dtype=np.int64)
    rows[:n, :n] = np.eye(n, dtype=np.int64)
    for j, d in enumerate(c_diffs):
        lo = n * (j + 1)
        rows[:n, lo : lo + n] = _negacyclic_matrix(center_mod(d, ps.q))
        rows[lo : lo + n, lo : lo + n] = ps.q * np.eye(n, dtype=np.int64)
    return rows


def verify_lattice_relation(k: Poly, r: Poly, c: Poly, ps: ParamSet) -> bool:
    """Check that (k | u) maps onto (k | r) under the attack lattice.

    u = (r - k*c) / q must be an exact integer vector, and the row-vector
    product (k | u) @ basis must reproduce (k | r) componentwise.
    """
    t = sub(r, negacyclic_mul(k, c)).coeffs
    if (t % ps.q).any():
        return False
    u = t // ps.q
    basis = build_attack_lattice(c, ps).rows
    vec = np.concatenate([k.coeffs, u])
    out = vec @ basis
    target = np.concatenate([k.coeffs, r.coeffs])
    return bool(np.array_equal(out, target))


@dataclass(frozen=True)
class AttackTranscript:
    """t ciphertexts of one message under one key (the attack scenario),
    with ground truth attached for calibration and tests."""

    cts: list[Ciphertext]
    ps: ParamSet
    key: SecretKey | None
    r_witnesses: list[ProductFormPoly]
    mu: Poly | None


def make_attack_transcript(
    ps: ParamSet, t: int, rng: RandomSource, fresh_key_per_message: bool = False
) -> AttackTranscript:
    """Encrypt one message t times.

    With fresh_key_per_message the shared-key premise is broken on
    purpose, which the attack is expected to report as NotFound.
    """
    if t < 2:
        raise ValueError("the attack needs at least two ciphertexts")
    sk = keygen(ps, rng)
    mu = sample_plaintext(ps, rng)
    cts = []
    witnesses = []
    for _ in range(t):
        if fresh_key_per_message and cts:
            sk = keygen(ps, rng)
        ct, tr = encrypt_with_transcript(mu, sk, rng)
        cts.append(ct)
        witnesses.append(tr.r_witness)
    return AttackTranscript(
        cts=cts,
        ps=ps,
        key=None if fresh_key_per_message else sk,
        r_witnesses=witnesses,
        mu=mu.mu,
    )


def _candidate_validates(k_cand: Poly, cts: list[Ciphertext], ps: ParamSet) -> bool:
    k_inv = invert_mod_q(k_cand, ps.q)
    if k_inv is None:
        return False
    ref = None
    for ct in cts:
        prod = center_mod(negacyclic_mul(ct.c, k_cand, ps.q), ps.q)
        mu = reduce_mod_p(prod, ps.p)
        if ref is None:
            ref = mu
        elif mu != ref:
            return False
    return True


def multiple_transmission_attack(
    transcript: AttackTranscript,
    delta=None,
    return_details: bool = False,
):
    """Recover the shared key from repeated encryptions of one message.

    Ciphertext differences cancel the message: (c_i - c_0) / p mod q
    equals (r_i - r_0) * k^-1, so the joint lattice over the differences
    contains the short row (k | r_1 - r_0 | ...).  LLL often lands on a
    multiple g*k of the key instead, where g is some small polynomial
    that happens to shorten k.  Because k == 1 mod p, such a row reduces
    to g mod p, so dividing each candidate by its own centered mod-p
    residue maps rotations, negations, and small multiples alike back to
    the normalized key.  Survivors of a sup-norm screen must decrypt
    every transmission identically before they are accepted.  Returns
    the key normalized to == 1 mod p, or None.
    """
    ps = transcript.ps
    if delta is None:
        delta = Fraction(99, 100)
    if len(transcript.cts) < 2:
        raise ValueError("the attack needs at least two ciphertexts")
    if 2 * ps.n > MAX_DIM:
        raise ValueError(f"lattice dimension {2 * ps.n} exceeds the LLL cap {MAX_DIM}")
    p_inv = pow(ps.p, -1, ps.q)
    kp_bound = 2 * min(ps.a1, ps.a2) + (1 if ps.a3 > 0 else 0)
    k_bound = 1 + ps.p * kp_bound
    details = {"norms_before": [], "norms_after": [], "rows_tried": 0, "wall_time": 0.0}
    start = time.perf_counter()
    c0 = transcript.cts[0].c
    diffs = [
        scalar_mul(p_inv, sub(other.c, c0), ps.q)
        for other in transcript.cts[1 : MAX_DIM // ps.n]
    ]
    basis = build_joint_attack_lattice(diffs, ps)
    details["norms_before"] = [float(np.linalg.norm(row)) for row in basis]
    reduced = lll_reduce(basis, delta=delta)
    details["norms_after"] = [float(np.linalg.norm(row)) for row in reduced]
    found = None
    order = np.argsort([np.linalg.norm(row) for row in reduced])
    for idx in order:
        f = Poly(reduced[idx][: ps.n])
        if f.is_zero():
            continue
        k_cand = _normalize_key_candidate(f, ps)
        if k_cand is None or norm_inf(k_cand) > k_bound:
            continue
        details["rows_tried"] += 1
        if _candidate_validates(k_cand, transcript.cts, ps):
            found = k_cand
            break
    details["wall_time"] = time.perf_counter() - start
    if return_details:
        return found, details
    return found


def _normalize_key_candidate(f: Poly, ps: ParamSet) -> Poly | None:
    """Divide f by its centered mod-p residue, aiming at f = g * k.

    When the guess is right the quotient is exactly the key: g*k == g
    mod p, and the division cancels g.  The result is only kept when it
    still reduces to 1 mod p, which rules out junk rows cheaply."""
    g = reduce_mod_p(f, ps.p)
    if g.is_zero():
        return None
    g_inv = invert_mod_q(g, ps.q)
    if g_inv is None:
        return None
    k_cand = center_mod(negacyclic_mul(f, g_inv, ps.q), ps.q)
    if reduce_mod_p(k_cand, ps.p) != Poly.one(ps.n):
        return None
    return k_cand


def key_matches_up_to_symmetry(candidate: Poly, k: Poly) -> bool:
    """True when candidate is +-x^j * k for some rotation j."""
    n = k.n
    for j in range(n):
        rot = negacyclic_mul(k, Poly.monomial(n, j))
        if candidate == rot or candidate == Poly(-rot.coeffs):
            return True
    return False


@dataclass(frozen=True)
class DistinguisherSample:
    label: str  # "d0" masked samples, "d1" uniform samples
    value: Poly


@dataclass(frozen=True)
class DistinguisherReport:
    label: str
    samples: int
    alpha: float
    slot_p_values: tuple[float, ...]
    rejected_slots: int
    rejected_fraction: float
    aggregate_p_value: float
    aggregate_rejects: bool


def chi_square_report(values: list[Poly], ps: ParamSet, alpha: float = 0.01, label: str = "") -> DistinguisherReport:
    """Marginal chi-square per coefficient slot plus a pooled statistic.

    Each slot's empirical distribution over the q residues is tested
    against uniform; the pooled statistic sums the per-slot statistics
    (chi-square with n*(q-1) degrees of freedom under the null).
    """
    n, q = ps.n, ps.q
    counts = np.zeros((n, q), dtype=np.int64)
    for v in values:
        counts[np.arange(n), v.coeffs % q] += 1
    m = len(values)
    expected = m / q
    stats = ((counts - expected) ** 2 / expected).sum(axis=1)
    slot_p = _chi2.sf(stats, q - 1)
    total_stat = float(stats.sum())
    aggregate_p = float(_chi2.sf(total_stat, n * (q - 1)))
    rejected = int((slot_p < alpha).sum())
    return DistinguisherReport(
        label=label,
        samples=m,
        alpha=alpha,
        slot_p_values=tuple(float(x) for x in slot_p),
        rejected_slots=rejected,
        rejected_fraction=rejected / n,
        aggregate_p_value=aggregate_p,
        aggregate_rejects=aggregate_p < alpha,
    )


def sample_distinguisher_values(ps: ParamSet, label: str, count: int, rng: RandomSource) -> list[Poly]:
    """Draw from d0 (masked quotients r * k^-1) or d1 (uniform)."""
    out = []
    if label == "d1":
        for _ in range(count):
            out.append(sample_uniform(ps.n, ps.q, rng))
        return out
    if label != "d0":
        raise ValueError(f"unknown distribution label {label!r}")
    for _ in range(count):
        while True:
            k = sample_product_form(ps.n, ps.a1, ps.a2, ps.a3, rng).combined
            k_inv = invert_mod_q(k, ps.q)
            if k_inv is not None:
                break
        r = sample_product_form(ps.n, ps.a1, ps.a2, ps.a3, rng).combined
        out.append(negacyclic_mul(r, k_inv, ps.q))
    return out


def decision_distinguisher_harness(
    ps: ParamSet, samples: int, rng: RandomSource, alpha: float = 0.01, label: str = "d0"
) -> DistinguisherReport:
    """Sample one side of the decision problem and run the chi-square scan.

    The d1 side calibrates the test (rejection rate should sit near
    alpha); the d0 verdict is reported, never asserted, since a marginal
    frequency test has no business resolving the decision problem.
    """
    require_valid(ps)
    values = sample_distinguisher_values(ps, label, samples, rng)
    return chi_square_report(values, ps, alpha=alpha, label=label)
