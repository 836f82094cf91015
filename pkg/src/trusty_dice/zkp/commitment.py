"""Commitments standing in for sealed envelopes.

``hash`` mode: SHA-256 over a 32-byte nonce followed by the canonical JSON
serialization of the payload.  ``ideal`` mode: the payload sits in an escrow
object that releases it only on :meth:`Escrow.open`, exactly as deposited.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Any, Literal

CommitMode = Literal["hash", "ideal"]
NONCE_BYTES = 32


def canonical_bytes(payload: Any) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def digest(payload: Any, nonce: bytes) -> str:
    return hashlib.sha256(nonce + canonical_bytes(payload)).hexdigest()


class SealedError(RuntimeError):
    pass


class Escrow:
    """Trusted holder of a payload; unreadable until opened."""

    __slots__ = ("_payload", "_opened")

    def __init__(self, payload: Any):
        self._payload = payload
        self._opened = False

    @property
    def opened(self) -> bool:
        return self._opened

    def peek(self):
        if not self._opened:
            raise SealedError("escrow is sealed")
        return self._payload

    def open(self):
        self._opened = True
        return self._payload


@dataclass(frozen=True)
class Opening:
    payload: Any
    nonce: str | None = None  # hex, hash mode only


@dataclass(frozen=True)
class Commitment:
    mode: CommitMode
    digest: str | None = None
    escrow: Escrow | None = None

    def public(self) -> dict:
        """What the verifier sees before opening."""
        if self.mode == "hash":
            return {"mode": "hash", "digest": self.digest}
        return {"mode": "ideal"}


def commit(payload: Any, mode: CommitMode, rng: random.Random) -> tuple[Commitment, Opening]:
    if mode == "hash":
        nonce = rng.getrandbits(8 * NONCE_BYTES).to_bytes(NONCE_BYTES, "big")
        return Commitment("hash", digest=digest(payload, nonce)), Opening(payload, nonce.hex())
    if mode == "ideal":
        return Commitment("ideal", escrow=Escrow(payload)), Opening(payload)
    raise ValueError(f"unknown commitment mode {mode!r}")


def verify_opening(commitment: Commitment | dict, opening: Opening) -> bool:
    """Binding check; ideal openings come from the escrow and always verify."""
    public = commitment.public() if isinstance(commitment, Commitment) else commitment
    if public["mode"] == "ideal":
        return True
    if opening.nonce is None:
        return False
    try:
        nonce = bytes.fromhex(opening.nonce)
    except ValueError:
        return False
    return len(nonce) == NONCE_BYTES and digest(opening.payload, nonce) == public["digest"]
