import dataclasses
import random

import pytest

from iotsec.certificates import (
    CertificateStatus,
    SubjectKind,
    canonical_encoding,
    decode_certificate,
    encode_certificate,
    issue_certificate,
    self_signed_certificate,
    verify_certificate,
)
from iotsec.curves import P256
from iotsec.ecc import keygen
from iotsec.errors import MalformedEncoding

ROOT = keygen(P256, random.Random(1))
SUBJECT = keygen(P256, random.Random(2))


@pytest.fixture
def cert():
    return issue_certificate(P256, ROOT, "gw1", SubjectKind.GATEWAY, SUBJECT.q, issued_at=3)


def test_issued_certificate_verifies(cert):
    assert verify_certificate(P256, ROOT.q, cert)
    assert cert.subject_kind is SubjectKind.GATEWAY
    assert cert.issued_at == 3


def test_any_field_change_breaks_verification(cert):
    assert not verify_certificate(P256, ROOT.q, dataclasses.replace(cert, subject_id="gw2"))
    assert not verify_certificate(P256, ROOT.q, dataclasses.replace(cert, subject_kind=SubjectKind.USER))
    assert not verify_certificate(P256, ROOT.q, dataclasses.replace(cert, issued_at=4))
    assert not verify_certificate(P256, ROOT.q, dataclasses.replace(cert, subject_public_key=ROOT.q))


def test_self_signed_is_not_trusted():
    forged = self_signed_certificate(P256, SUBJECT, "alice", SubjectKind.USER)
    assert verify_certificate(P256, SUBJECT.q, forged)
    assert not verify_certificate(P256, ROOT.q, forged)


def test_encoding_is_stable(cert):
    data = encode_certificate(P256, cert)
    assert data.startswith(canonical_encoding(P256, cert))
    decoded = decode_certificate(P256, data)
    assert decoded == cert
    assert encode_certificate(P256, decoded) == data


@pytest.mark.parametrize("cut", [0, 5, 20, 60])
def test_truncated_certificates(cert, cut):
    with pytest.raises(MalformedEncoding):
        decode_certificate(P256, encode_certificate(P256, cert)[:cut])


def test_unknown_kind_code(cert):
    data = bytearray(encode_certificate(P256, cert))
    # prefix (12) + id length (2) + "gw1" (3) -> kind byte
    data[12 + 2 + 3] = 9
    with pytest.raises(MalformedEncoding):
        decode_certificate(P256, bytes(data))


def test_status_values():
    assert {s.value for s in CertificateStatus} == {"active", "revoked", "unknown"}
