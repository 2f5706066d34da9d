"""Parameter sets, validation, and the decryption-failure estimate.

The failure model treats each coefficient of the decryption intermediate
p*(r + mu*k') + mu as approximately Gaussian with standard deviation

    sigma = sqrt((4 a1 a2 + 2 a3) * (2 - a_mu / n))

and bounds the per-message failure probability by n * erfc(x) with
x = (q - 2) / (2 sqrt(2) p sigma).  A parameter set is considered safe
when log2 of that bound is below -lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import sympy

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class ParamSet:
    """Scheme parameters: ring degree n, message modulus p, ring modulus q,
    product-form weights a1, a2, a3, message weight a_mu, security target lam."""

    n: int
    p: int
    q: int
    a1: int
    a2: int
    a3: int
    a_mu: int
    lam: int = 80

    def with_overrides(self, **kwargs) -> "ParamSet":
        return replace(self, **kwargs)


PROFILES: dict[str, ParamSet] = {
    # recommended set: 2560-bit ciphertexts, failure estimate near 2^-130
    "recommended": ParamSet(n=256, p=3, q=1087, a1=5, a2=5, a3=5, a_mu=102, lam=80),
    # small set for demos and fast tests; offers no security margin
    "toy-16": ParamSet(n=16, p=3, q=257, a1=1, a2=1, a3=1, a_mu=6, lam=8),
}


def get_profile(name: str) -> ParamSet:
    try:
        return PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(PROFILES))
        raise KeyError(f"unknown profile {name!r}; available profiles: {known}") from None


def validate(ps: ParamSet) -> list[str]:
    """All invariant violations of ps, empty when the set is well formed."""
    out = []
    if ps.n < 2 or ps.n & (ps.n - 1) != 0:
        out.append(f"n={ps.n} is not a power of two >= 2")
    if ps.p < 3 or ps.p % 2 == 0 or not sympy.isprime(ps.p):
        out.append(f"p={ps.p} is not an odd prime")
    if ps.q < 3 or ps.q % 2 == 0 or not sympy.isprime(ps.q):
        out.append(f"q={ps.q} is not an odd prime")
    if ps.p >= ps.q:
        out.append(f"p={ps.p} must be smaller than q={ps.q}")
    for name in ("a1", "a2", "a3"):
        a = getattr(ps, name)
        if a < 0:
            out.append(f"{name}={a} is negative")
        elif 2 * a > ps.n:
            out.append(f"{name}={a} leaves no room: need 2*{name} <= n={ps.n}")
    if not 0 <= ps.a_mu <= ps.n:
        out.append(f"a_mu={ps.a_mu} outside 0..n={ps.n}")
    if ps.lam <= 0:
        out.append(f"lambda={ps.lam} must be positive")
    return out


def require_valid(ps: ParamSet) -> None:
    problems = validate(ps)
    if problems:
        raise ValueError("invalid parameter set: " + "; ".join(problems))


def erfc(x: float) -> float:
    """Complementary error function (thin wrapper pinned by the test suite)."""
    return math.erfc(x)


def log_erfc_asymptotic(x: float, terms: int) -> float:
    """ln erfc(x) from the large-x expansion with a fixed term count.

    ln erfc(x) = -x^2 - ln(x sqrt(pi)) + ln(1 - 1/(2x^2) + 3/(4x^4) - ...)
    The series is alternating and asymptotic: the truncation error is
    bounded by the first omitted term, about (2*terms+1)!!/(2x^2)^(terms+1).
    """
    if x <= 0:
        raise ValueError("asymptotic branch needs x > 0")
    s = 1.0
    term = 1.0
    inv = 1.0 / (2.0 * x * x)
    for k in range(1, terms + 1):
        term *= -(2 * k - 1) * inv
        s += term
    return -x * x - math.log(x * _SQRT_PI) + math.log(s)


def log_erfc(x: float) -> float:
    """Natural log of erfc(x), stable far into the tail.

    Below x = 6 the direct value is well inside double range and is used
    as is; beyond it the asymptotic expansion takes over, truncated when
    the terms stop shrinking (error bounded by the first omitted term,
    under 1e-16 relative for x > 6).
    """
    if x <= 6.0:
        return math.log(math.erfc(x))
    s = 1.0
    term = 1.0
    inv = 1.0 / (2.0 * x * x)
    k = 1
    while True:
        nxt = term * -(2 * k - 1) * inv
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-18:
            break
        s += nxt
        term = nxt
        k += 1
    return -x * x - math.log(x * _SQRT_PI) + math.log(s)


def sigma(ps: ParamSet) -> float:
    """Model standard deviation of one decryption-intermediate coefficient."""
    return math.sqrt((4 * ps.a1 * ps.a2 + 2 * ps.a3) * (2 - ps.a_mu / ps.n))


def failure_probability_log2(ps: ParamSet) -> float:
    """log2 of the union bound n * erfc((q - 2) / (2 sqrt(2) p sigma))."""
    x = (ps.q - 2) / (2 * math.sqrt(2) * ps.p * sigma(ps))
    return (log_erfc(x) + math.log(ps.n)) / math.log(2)


def meets_failure_target(ps: ParamSet) -> bool:
    return failure_probability_log2(ps) < -ps.lam


def deterministic_bound_check(ps: ParamSet) -> bool:
    """True when q > 8 p (2 a1 a2 + a3) + 2, which rules out failures outright."""
    return ps.q > 8 * ps.p * (2 * ps.a1 * ps.a2 + ps.a3) + 2


@dataclass(frozen=True)
class FailureReport:
    sigma: float
    bound: float  # tail threshold (q - 2) / (2 p)
    log2_failure: float
    meets_target: bool
    deterministic: bool


def failure_report(ps: ParamSet) -> FailureReport:
    return FailureReport(
        sigma=sigma(ps),
        bound=(ps.q - 2) / (2 * ps.p),
        log2_failure=failure_probability_log2(ps),
        meets_target=meets_failure_target(ps),
        deterministic=deterministic_bound_check(ps),
    )


def _round_nearest(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class SpaceSizes:
    secret_key_bits: int
    ephemeral_key_bits: int
    plaintext_bits: int
    ciphertext_bits: int


def space_sizes(ps: ParamSet, k_inf: int = 1, r_inf: int = 1) -> SpaceSizes:
    """Nominal object sizes in bits.

    Key material is counted at n * round(log2(2*norm + 1)) bits for the
    caller-supplied sup-norm bounds; plaintext and ciphertext at
    n * round(log2 p) and n * round(log2 q).
    """
    if k_inf < 1 or r_inf < 1:
        raise ValueError("sup-norm bounds must be at least 1")
    return SpaceSizes(
        secret_key_bits=ps.n * _round_nearest(math.log2(2 * k_inf + 1)),
        ephemeral_key_bits=ps.n * _round_nearest(math.log2(2 * r_inf + 1)),
        plaintext_bits=ps.n * _round_nearest(math.log2(ps.p)),
        ciphertext_bits=ps.n * _round_nearest(math.log2(ps.q)),
    )


def expected_nonzero_count(ps: ParamSet) -> tuple[int, float]:
    """Worst-case non-zero budget 4 a1 a2 + 2 a3 and its ratio to 2n/3."""
    count = 4 * ps.a1 * ps.a2 + 2 * ps.a3
    return count, count / (2 * ps.n / 3)


_FIELD_KEYS = ("n", "p", "q", "a1", "a2", "a3", "a_mu", "lambda")


def params_to_text(ps: ParamSet) -> str:
    """Flat key=value rendering, one field per line."""
    values = (ps.n, ps.p, ps.q, ps.a1, ps.a2, ps.a3, ps.a_mu, ps.lam)
    return "".join(f"{k}={v}\n" for k, v in zip(_FIELD_KEYS, values))


def params_from_text(text: str) -> ParamSet:
    """Parse the key=value form; unknown or duplicate keys are rejected."""
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            seen[key] = int(value.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: {key} is not an integer") from None
    missing = [k for k in _FIELD_KEYS if k not in seen]
    if missing:
        raise ValueError("missing keys: " + ", ".join(missing))
    return ParamSet(
        n=seen["n"],
        p=seen["p"],
        q=seen["q"],
        a1=seen["a1"],
        a2=seen["a2"],
        a3=seen["a3"],
        a_mu=seen["a_mu"],
        lam=seen["lambda"],
    )
