"""Secret-key encryption over the negacyclic ring Z_q[x]/(x^n + 1).

Keys are sparse product-form polynomials, messages are small ternary
polynomials, and decryption succeeds whenever an intermediate stays
inside the centered window, which the parameter tools quantify.  The
package also ships byte codecs, framed file formats, seedable sampling,
and a desk-scale cryptanalysis toolkit for judging toy parameter sets.
"""

from .cipher import (
    Ciphertext,
    EncryptionTranscript,
    Plaintext,
    SecretKey,
    decrypt,
    decrypt_with_intermediate,
    encrypt,
    encrypt_with_transcript,
    keygen,
    sample_plaintext,
)
from .codec import (
    CodecError,
    CorruptionError,
    FormatError,
    IntegrityError,
    block_payload_bytes,
    decode_blocks,
    deserialize_ciphertext,
    deserialize_key,
    encode_bytes,
    serialize_ciphertext,
    serialize_key,
)
from .params import (
    FailureReport,
    PROFILES,
    ParamSet,
    SpaceSizes,
    failure_probability_log2,
    failure_report,
    get_profile,
    sigma,
    space_sizes,
    validate,
)
from .ring import (
    Poly,
    add,
    invert_mod_q,
    negacyclic_mul,
    neg,
    norm_inf,
    norm_l1,
    norm_l2_centered,
    reduce_mod_p,
    scalar_mul,
    sub,
)
from .sampling import (
    ProductFormPoly,
    RandomSource,
    sample_product_form,
    sample_ternary,
    sample_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "Ciphertext",
    "CodecError",
    "CorruptionError",
    "EncryptionTranscript",
    "FailureReport",
    "FormatError",
    "IntegrityError",
    "PROFILES",
    "ParamSet",
    "Plaintext",
    "Poly",
    "ProductFormPoly",
    "RandomSource",
    "SecretKey",
    "SpaceSizes",
    "add",
    "block_payload_bytes",
    "decode_blocks",
    "decrypt",
    "decrypt_with_intermediate",
    "deserialize_ciphertext",
    "deserialize_key",
    "encode_bytes",
    "encrypt",
    "encrypt_with_transcript",
    "failure_probability_log2",
    "failure_report",
    "get_profile",
    "invert_mod_q",
    "keygen",
    "neg",
    "negacyclic_mul",
    "norm_inf",
    "norm_l1",
    "norm_l2_centered",
    "reduce_mod_p",
    "sample_plaintext",
    "sample_product_form",
    "sample_ternary",
    "sample_uniform",
    "scalar_mul",
    "serialize_ciphertext",
    "serialize_key",
    "sigma",
    "space_sizes",
    "sub",
    "validate",
    "__version__",
]
