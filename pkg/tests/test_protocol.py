from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acshare.primitives import FramingError, Rng, WidthMismatchError, digest
from acshare.protocol import (
    CorruptCiphertextError,
    EmptyPayloadError,
    IntegrityError,
    SystemParams,
    access_query,
    decrypt_data,
    derive_data_key,
    derive_private_key,
    derive_session_key,
    encrypt_data,
    make_cipher_bundle,
    new_system_params,
    recover_payload,
    registration_digest,
    unwrap_ciphertext,
    validation_messages,
    wrap_ciphertext,
)

from reference import (
    ref_access_query,
    ref_private_key,
    ref_registration_digest,
    ref_session_key,
    ref_validation_pair,
)

widths = st.sampled_from((8, 16, 32, 64))
ids = st.binary(min_size=1, max_size=40)


def fixed(width):
    return st.binary(min_size=width, max_size=width)


# one frozen tuple, all six derived values computed with the reference
# implementation and pinned here as literals
GOLDEN_INPUT = dict(
    user_id=b"user-000",
    password=bytes(range(16)),
    s=bytes.fromhex("00112233445566778899aabbccddeeff"),
    m=bytes.fromhex("ffeeddccbbaa99887766554433221100"),
    public_param=bytes.fromhex("0f1e2d3c4b5a69788796a5b4c3d2e1f0"),
    attribute=bytes.fromhex("a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5"),
    nonce=bytes.fromhex("1234567890abcdef1234567890abcdef"),
    width=16,
)
GOLDEN_DIGEST = "cf1f8b10936e2a5a5edf8f0e738ed0c5"
GOLDEN_PRIVATE_KEY = "0ab9c3888f5d700acf4f1e53d1772334"
GOLDEN_QUERY = "858ca60cef329d7657ce7c5cb666a61f"
GOLDEN_SESSION_KEY = "ff0d586c57a09cd0cae1f0d64d3b2b99"
GOLDEN_V1 = "06b30906b2d81fd709954be4a7a45fbe"
GOLDEN_V2 = "121dcdb0c04e621ee9195c278eeb31c2"


class TestGoldenVectors:
    def test_registration_digest(self):
        g = GOLDEN_INPUT
        out = registration_digest(g["user_id"], g["password"], g["s"], g["width"])
        assert out.hex() == GOLDEN_DIGEST

    def test_private_key(self):
        g = GOLDEN_INPUT
        out = derive_private_key(g["m"], g["public_param"], g["s"], g["attribute"], g["width"])
        assert out.hex() == GOLDEN_PRIVATE_KEY

    def test_access_query(self):
        g = GOLDEN_INPUT
        out = access_query(
            bytes.fromhex(GOLDEN_DIGEST), g["user_id"], bytes.fromhex(GOLDEN_PRIVATE_KEY), g["width"]
        )
        assert out.hex() == GOLDEN_QUERY

    def test_session_key(self):
        g = GOLDEN_INPUT
        out = derive_session_key(g["public_param"], g["m"], g["attribute"], g["width"])
        assert out.hex() == GOLDEN_SESSION_KEY

    def test_validation_pair(self):
        g = GOLDEN_INPUT
        pair = validation_messages(
            g["user_id"],
            bytes.fromhex(GOLDEN_SESSION_KEY),
            g["s"],
            g["nonce"],
            bytes.fromhex(GOLDEN_PRIVATE_KEY),
            g["m"],
            g["attribute"],
            g["width"],
        )
        assert pair.v1.hex() == GOLDEN_V1
        assert pair.v2.hex() == GOLDEN_V2


class TestOracleAgreement:
    @given(st.data(), widths, ids)
    def test_registration_digest(self, data, width, user_id):
        password = data.draw(fixed(width))
        s = data.draw(fixed(width))
        assert registration_digest(user_id, password, s, width) == ref_registration_digest(
            user_id, password, s, width
        )

    @given(st.data(), widths)
    def test_private_key(self, data, width):
        m, pp, s, a = (data.draw(fixed(width)) for _ in range(4))
        assert derive_private_key(m, pp, s, a, width) == ref_private_key(m, pp, s, a, width)

    @given(st.data(), widths, ids)
    def test_access_query(self, data, width, user_id):
        reg_digest = data.draw(fixed(width))
        private_key = data.draw(fixed(width))
        assert access_query(reg_digest, user_id, private_key, width) == ref_access_query(
            reg_digest, user_id, private_key, width
        )

    @given(st.data(), widths)
    def test_session_key(self, data, width):
        pp, m, a = (data.draw(fixed(width)) for _ in range(3))
        assert derive_session_key(pp, m, a, width) == ref_session_key(pp, m, a, width)

    @given(st.data(), widths, ids)
    def test_validation_pair(self, data, width, user_id):
        sk, s, nonce, pk, m, a = (data.draw(fixed(width)) for _ in range(6))
        pair = validation_messages(user_id, sk, s, nonce, pk, m, a, width)
        assert (pair.v1, pair.v2) == ref_validation_pair(user_id, sk, s, nonce, pk, m, a, width)
        assert pair.nonce == nonce


class TestSystemParams:
    @given(st.integers(min_value=0, max_value=2**64 - 1), widths)
    def test_widths_and_distinctness(self, seed, width):
        params = new_system_params(Rng(seed), width)
        assert len(params.s) == width == len(params.m)
        assert params.s != params.m
        assert params.width == width


class TestDataPipeline:
    @given(st.data(), widths, st.binary(min_size=1, max_size=300))
    def test_encrypt_decrypt_round_trip(self, data, width, payload):
        s = data.draw(fixed(width))
        m = data.draw(fixed(width))
        assert decrypt_data(encrypt_data(payload, s, m), s, m) == payload

    def test_empty_payload_rejected(self):
        with pytest.raises(EmptyPayloadError):
            encrypt_data(b"", b"\x01" * 8, b"\x02" * 8)

    def test_decrypt_empty_is_empty(self):
        assert decrypt_data(b"", b"\x01" * 8, b"\x02" * 8) == b""

    @given(st.data(), widths, st.binary(min_size=1, max_size=200))
    def test_wrap_length_relation(self, data, width, encrypted):
        owner_key = data.draw(fixed(width))
        key = data.draw(st.binary(min_size=1, max_size=32))
        wrapped = wrap_ciphertext(encrypted, owner_key, key)
        assert len(wrapped) == len(encrypted) + width + 8
        back, stripped = unwrap_ciphertext(wrapped, key)
        assert back == encrypted
        assert stripped == owner_key

    def test_unwrap_rejects_garbage(self):
        with pytest.raises(CorruptCiphertextError):
            unwrap_ciphertext(b"\xff" * 3, b"key")

    @given(st.data(), widths, st.binary(min_size=1, max_size=200))
    def test_bundle_round_trip(self, data, width, payload):
        rng = Rng(data.draw(st.integers(0, 2**32)))
        params = new_system_params(rng, width)
        owner_key = rng.take(width)
        bundle = make_cipher_bundle(payload, params, owner_key)
        assert bundle.payload_digest == digest(payload)
        assert recover_payload(bundle.wrapped, bundle.payload_digest, params.s, params.m) == payload

    @given(st.data(), st.binary(min_size=1, max_size=80))
    def test_flips_never_return_wrong_payload(self, data, payload):
        width = 16
        rng = Rng(2024)
        params = new_system_params(rng, width)
        bundle = make_cipher_bundle(payload, params, rng.take(width))
        # corrupt one byte anywhere in the data-bearing prefix
        span = len(bundle.wrapped) - width - 4
        index = data.draw(st.integers(0, span - 1))
        delta = data.draw(st.integers(1, 255))
        corrupt = bytearray(bundle.wrapped)
        corrupt[index] ^= delta
        with pytest.raises((CorruptCiphertextError, IntegrityError)):
            recover_payload(bytes(corrupt), bundle.payload_digest, params.s, params.m)

    def test_integrity_error_carries_both_digests(self):
        width = 16
        rng = Rng(5)
        params = new_system_params(rng, width)
        bundle = make_cipher_bundle(b"payload", params, rng.take(width))
        with pytest.raises(IntegrityError) as info:
            recover_payload(bundle.wrapped, digest(b"other"), params.s, params.m)
        assert info.value.advertised == digest(b"other").hex()
        assert info.value.actual == digest(b"payload").hex()


class TestValidationMessages:
    def test_nonce_width_enforced(self):
        g = GOLDEN_INPUT
        with pytest.raises(WidthMismatchError):
            validation_messages(
                g["user_id"],
                bytes.fromhex(GOLDEN_SESSION_KEY),
                g["s"],
                b"\x01",  # wrong width
                bytes.fromhex(GOLDEN_PRIVATE_KEY),
                g["m"],
                g["attribute"],
                g["width"],
            )


class TestDataKey:
    def test_deterministic_and_order_sensitive(self):
        assert derive_data_key(b"m" * 8, b"s" * 8) == derive_data_key(b"m" * 8, b"s" * 8)
        assert derive_data_key(b"m" * 8, b"s" * 8) != derive_data_key(b"s" * 8, b"m" * 8)
