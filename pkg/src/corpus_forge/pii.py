"""PII scrubbing: email, IPv6, IPv4 and phone spans become placeholder tokens."""

from __future__ import annotations

import enum
import ipaddress
import re
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

from .model import Document, FilterOutcome, KEEP, Reason


class PiiKind(str, enum.Enum):
    EMAIL = "Email"
    IPV6 = "IPv6"
    IPV4 = "IPv4"
    PHONE = "Phone"


EMAIL_RE = re.compile(r"(?<![\w.%+-])[\w.%+-]+@[\w-]+(?:\.[\w-]+)*\.[^\W\d_]{2,}(?![\w@])")

# candidate only; validated with the ipaddress module
IPV6_RE = re.compile(r"(?<![\w:.])(?:[0-9A-Fa-f]{0,4}:){2,7}(?:[0-9A-Fa-f]{1,4}|(?:\d{1,3}\.){3}\d{1,3})?(?![\w:])")

_OCTET = r"(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)"
IPV4_RE = re.compile(rf"(?<![\w.]){_OCTET}(?:\.{_OCTET}){{3}}(?![\w]|\.\d)")

# international "+NNN ..." or trunk-prefixed "0NN ..." digit groups; dots are
# not separators so that dates like 01.02.2023 survive
PHONE_RE = re.compile(
    r"(?<![\w+/-])"
    r"(?:\+\d{1,3}(?:[ -]?\(0\))?|\(?0\d{1,2}\)?)"
    r"(?:[ /-]?\d{2,4}){2,4}"
    r"(?![\w/-])"
)
PHONE_MIN_DIGITS = 8
PHONE_MAX_DIGITS = 12


def _valid_ipv6(span: str) -> bool:
    if span.count(":") < 2:
        return False
    try:
        ipaddress.IPv6Address(span)
    except ValueError:
        return False
    return True


def _valid_phone(span: str) -> bool:
    digits = sum(c.isdigit() for c in span)
    return PHONE_MIN_DIGITS <= digits <= PHONE_MAX_DIGITS


PATTERNS: Dict[PiiKind, Tuple[re.Pattern, Optional[Callable[[str], bool]]]] = {
    PiiKind.EMAIL: (EMAIL_RE, None),
    PiiKind.IPV6: (IPV6_RE, _valid_ipv6),
    PiiKind.IPV4: (IPV4_RE, None),
    PiiKind.PHONE: (PHONE_RE, _valid_phone),
}


@dataclass(frozen=True)
class PiiRuleSet:
    rules: Sequence[Tuple[PiiKind, str]] = (
        (PiiKind.EMAIL, "[EMAIL]"),
        (PiiKind.IPV6, "[IP]"),
        (PiiKind.IPV4, "[IP]"),
        (PiiKind.PHONE, "[PHONE]"),
    )

    def __post_init__(self):
        # replacement tokens must never be matched themselves (idempotence)
        for kind, token in self.rules:
            for other, (pattern, validator) in PATTERNS.items():
                for m in pattern.finditer(token):
                    if validator is None or validator(m.group()):
                        raise ValueError(f"token {token!r} for {kind.value} is matchable by {other.value}")

    @classmethod
    def from_mapping(cls, mapping: Dict[str, str]) -> "PiiRuleSet":
        """Build from a ``{"email": "[EMAIL]", "ip": "[IP]", ...}`` config section.

        Keys are ``email``, ``ipv6``, ``ipv4``, ``phone``; ``ip`` sets both IP
        kinds. An empty token disables that kind. Application order is fixed.
        """
        lowered = {k.lower(): v for k, v in mapping.items()}
        rules = []
        for kind, token in cls().rules:
            key = kind.value.lower()
            if key in lowered:
                token = lowered[key]
            elif key.startswith("ip") and "ip" in lowered:
                token = lowered["ip"]
            if token:
                rules.append((kind, token))
        return cls(tuple(rules))


DEFAULT_RULES = PiiRuleSet()


def scrub_text(text: str, rules: PiiRuleSet = DEFAULT_RULES) -> Tuple[str, Dict[PiiKind, int]]:
    counts: Dict[PiiKind, int] = {}
    for kind, token in rules.rules:
        pattern, validator = PATTERNS[kind]
        n = 0

        def repl(m: re.Match) -> str:
            nonlocal n
            if validator is not None and not validator(m.group()):
                return m.group()
            n += 1
            return token

        text = pattern.sub(repl, text)
        if n:
            counts[kind] = n
    return text, counts


def scrub(doc: Document, rules: PiiRuleSet = DEFAULT_RULES) -> Tuple[Document, FilterOutcome]:
    text, counts = scrub_text(doc.text, rules)
    if not counts:
        return doc, KEEP
    detail = ",".join(f"{k.value}={v}" for k, v in counts.items())
    return doc.replace(text=text), FilterOutcome.transformed(Reason.PII_SCRUBBED, detail)
