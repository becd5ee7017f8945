"""CVSS v3.1 base metrics: vector parsing, base score computation, severity bands.

Base metric group only. Temporal and environmental metric tokens are
rejected rather than ignored, so a vector string either describes exactly
the eight base metrics or it does not parse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterator


class CvssError(ValueError):
    """Base class for vector parsing and scoring errors."""


class MalformedVector(CvssError):
    """Vector string syntax is broken or carries a non-base metric token."""


class UnknownMetricValue(CvssError):
    """A metric key carries a value outside its legal set."""


class DuplicateMetric(CvssError):
    """The same metric key appears more than once."""


class MissingMetric(CvssError):
    """One of the eight base metrics is absent."""


class DomainError(CvssError):
    """Numeric input outside [0, 10]."""


class AttackVector(Enum):
    NETWORK = "N"
    ADJACENT = "A"
    LOCAL = "L"
    PHYSICAL = "P"


class AttackComplexity(Enum):
    LOW = "L"
    HIGH = "H"


class PrivilegesRequired(Enum):
    NONE = "N"
    LOW = "L"
    HIGH = "H"


class UserInteraction(Enum):
    NONE = "N"
    REQUIRED = "R"


class Scope(Enum):
    UNCHANGED = "U"
    CHANGED = "C"


class ImpactMetric(Enum):
    """Shared value set for confidentiality, integrity, and availability."""

    NONE = "N"
    LOW = "L"
    HIGH = "H"


class Severity(Enum):
    NONE = "None"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    CRITICAL = "Critical"


# Numeric weights for each metric value.
AV_WEIGHT = {
    AttackVector.NETWORK: 0.85,
    AttackVector.ADJACENT: 0.62,
    AttackVector.LOCAL: 0.55,
    AttackVector.PHYSICAL: 0.2,
}
AC_WEIGHT = {AttackComplexity.LOW: 0.77, AttackComplexity.HIGH: 0.44}
# PR weight depends on scope.
PR_WEIGHT_UNCHANGED = {
    PrivilegesRequired.NONE: 0.85,
    PrivilegesRequired.LOW: 0.62,
    PrivilegesRequired.HIGH: 0.27,
}
PR_WEIGHT_CHANGED = {
    PrivilegesRequired.NONE: 0.85,
    PrivilegesRequired.LOW: 0.68,
    PrivilegesRequired.HIGH: 0.50,
}
UI_WEIGHT = {UserInteraction.NONE: 0.85, UserInteraction.REQUIRED: 0.62}
IMPACT_WEIGHT = {ImpactMetric.HIGH: 0.56, ImpactMetric.LOW: 0.22, ImpactMetric.NONE: 0.0}

VECTOR_PREFIX = "CVSS:3.1"

# Canonical metric order for serialization; also the order used when
# reporting which metrics are missing.
_METRIC_ORDER = ("AV", "AC", "PR", "UI", "S", "C", "I", "A")
_METRIC_ENUMS = {
    "AV": AttackVector,
    "AC": AttackComplexity,
    "PR": PrivilegesRequired,
    "UI": UserInteraction,
    "S": Scope,
    "C": ImpactMetric,
    "I": ImpactMetric,
    "A": ImpactMetric,
}


@dataclass(frozen=True)
class CvssVector:
    """The eight base metrics of one vulnerability."""

    attack_vector: AttackVector
    attack_complexity: AttackComplexity
    privileges_required: PrivilegesRequired
    user_interaction: UserInteraction
    scope: Scope
    confidentiality: ImpactMetric
    integrity: ImpactMetric
    availability: ImpactMetric

    def to_string(self) -> str:
        """Canonical vector form, prefix always included."""
        parts = [
            VECTOR_PREFIX,
            f"AV:{self.attack_vector.value}",
            f"AC:{self.attack_complexity.value}",
            f"PR:{self.privileges_required.value}",
            f"UI:{self.user_interaction.value}",
            f"S:{self.scope.value}",
            f"C:{self.confidentiality.value}",
            f"I:{self.integrity.value}",
            f"A:{self.availability.value}",
        ]
        return "/".join(parts)


@dataclass(frozen=True)
class BaseScore:
    """One-decimal score in [0.0, 10.0] plus its severity band."""

    value: float
    severity: Severity

    def __str__(self) -> str:
        return format_score(self.value)


def format_score(value: float) -> str:
    """Serialize a one-decimal score without float noise, e.g. '8.1'."""
    return f"{value:.1f}"


def parse_vector(text: str) -> CvssVector:
    """Decode a CVSS v3.1 base vector string.

    The 'CVSS:3.1/' prefix is optional and metric order is free, but each
    of the eight base metrics must appear exactly once. Any other token
    (including temporal or environmental metrics) is rejected.
    """
    body = text.strip()
    if body.startswith(VECTOR_PREFIX + "/"):
        body = body[len(VECTOR_PREFIX) + 1 :]
    elif body == VECTOR_PREFIX:
        body = ""
    if not body:
        raise MissingMetric(f"vector has no metrics: {text!r}")

    seen: dict[str, Enum] = {}
    for token in body.split("/"):
        key, sep, raw = token.partition(":")
        if not sep or not key or not raw:
            raise MalformedVector(f"bad metric token {token!r}")
        enum_cls = _METRIC_ENUMS.get(key)
        if enum_cls is None:
            raise MalformedVector(f"unknown metric key in token {token!r}")
        if key in seen:
            raise DuplicateMetric(f"metric {key} given more than once (token {token!r})")
        try:
            seen[key] = enum_cls(raw)
        except ValueError:
            raise UnknownMetricValue(f"illegal value in token {token!r}") from None

    missing = [key for key in _METRIC_ORDER if key not in seen]
    if missing:
        raise MissingMetric(f"missing metric(s): {', '.join(missing)}")

    return CvssVector(
        attack_vector=seen["AV"],  # type: ignore[arg-type]
        attack_complexity=seen["AC"],  # type: ignore[arg-type]
        privileges_required=seen["PR"],  # type: ignore[arg-type]
        user_interaction=seen["UI"],  # type: ignore[arg-type]
        scope=seen["S"],  # type: ignore[arg-type]
        confidentiality=seen["C"],  # type: ignore[arg-type]
        integrity=seen["I"],  # type: ignore[arg-type]
        availability=seen["A"],  # type: ignore[arg-type]
    )


def round_up(x: float) -> float:
    """Smallest one-decimal value >= x, via integer arithmetic.

    Works at 1e-5 precision so that float representation error in the
    sub-score products cannot push a score across a tenth boundary.
    """
    if x < 0 or x > 10:
        raise DomainError(f"score input {x!r} outside [0, 10]")
    scaled = math.floor(x * 100000 + 0.5)
    if scaled % 10000 == 0:
        return scaled / 100000
    return (scaled // 10000 + 1) / 10


def severity_of(value: float) -> Severity:
    """Map a one-decimal score to its severity band."""
    if value < 0.0 or value > 10.0:
        raise DomainError(f"score {value!r} outside [0.0, 10.0]")
    tenths = round(value * 10)
    if tenths == 0:
        return Severity.NONE
    if tenths <= 39:
        return Severity.LOW
    if tenths <= 69:
        return Severity.MEDIUM
    if tenths <= 89:
        return Severity.HIGH
    return Severity.CRITICAL


def base_score(v: CvssVector) -> BaseScore:
    """Compute the base score of a vector.

    Impact and exploitability sub-scores are combined and rounded up to
    one decimal; a vector with no impact at all scores 0.0.
    """
    c = IMPACT_WEIGHT[v.confidentiality]
    i = IMPACT_WEIGHT[v.integrity]
    a = IMPACT_WEIGHT[v.availability]
    iss = 1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a)

    if v.scope is Scope.UNCHANGED:
        impact = 6.42 * iss
        pr = PR_WEIGHT_UNCHANGED[v.privileges_required]
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
        pr = PR_WEIGHT_CHANGED[v.privileges_required]

    exploitability = (
        8.22
        * AV_WEIGHT[v.attack_vector]
        * AC_WEIGHT[v.attack_complexity]
        * pr
        * UI_WEIGHT[v.user_interaction]
    )

    if impact <= 0:
        value = 0.0
    elif v.scope is Scope.UNCHANGED:
        value = round_up(min(impact + exploitability, 10.0))
    else:
        value = round_up(min(1.08 * (impact + exploitability), 10.0))

    return BaseScore(value=value, severity=severity_of(value))


def iter_vectors() -> Iterator[CvssVector]:
    """Yield all 2,592 possible base vectors in a fixed order."""
    for av, ac, pr, ui, s, c, i, a in product(
        AttackVector, AttackComplexity, PrivilegesRequired, UserInteraction,
        Scope, ImpactMetric, ImpactMetric, ImpactMetric,
    ):
        yield CvssVector(av, ac, pr, ui, s, c, i, a)
