"""Gödel coding of sentences.

A sentence is coded as the big-endian integer of ``0x01`` followed by the
UTF-8 bytes of its canonical text. The leading byte keeps leading
parentheses from being lost and makes the image decidable by a round trip.
"""

from __future__ import annotations

from .logic import LogicError, Sentence, Signature, L_VAL_VARPI, parse_sentence, print_canonical

PREFIX = b"\x01"


class NotInImage(LogicError):
    """The natural number is not the code of any sentence."""


def godel_code(s: Sentence) -> int:
    return int.from_bytes(PREFIX + print_canonical(s).encode("utf-8"), "big")


def code_of_text(text: str) -> int:
    return int.from_bytes(PREFIX + text.encode("utf-8"), "big")


def godel_decode(n: int, sig: Signature = L_VAL_VARPI) -> Sentence:
    if not isinstance(n, int) or n <= 0:
        raise NotInImage(n)
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    if not raw.startswith(PREFIX):
        raise NotInImage(n)
    try:
        text = raw[1:].decode("utf-8")
        s = parse_sentence(text, sig)
    except (UnicodeDecodeError, LogicError) as exc:
        raise NotInImage(n) from exc
    if print_canonical(s) != text:
        raise NotInImage(n)
    return s


def in_image(n: int, sig: Signature = L_VAL_VARPI) -> bool:
    try:
        godel_decode(n, sig)
    except NotInImage:
        return False
    return True
