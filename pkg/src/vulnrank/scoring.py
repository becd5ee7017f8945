"""The unbounded threat score used for stack ranking.

    (cvss + wx) * (utility + 1) * (opportune + 1) * environmental product

All arithmetic is exact: CVSS scores are one-decimal values, exploit
counts and category multipliers are small integers, and environmental
weights are decimal fractions, so every score is computed in Decimal
with no float noise and no rounding. Scores have no upper bound.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Iterable, Mapping, Sequence

from vulnrank.cvss import BaseScore, base_score, severity_of
from vulnrank.feeds import AssetContext, Criticality, CveRecord, Exposure, InvalidCategory, Labeler
from vulnrank.wx import WxCount

logger = logging.getLogger(__name__)


class ScoringError(ValueError):
    """Base class for scoring failures."""


class InvalidConfig(ScoringError):
    """An environmental weight table carries a non-positive weight."""


class MissingLabels(ScoringError):
    """Records lack triage labels and no predictor was supplied."""

    def __init__(self, cve_ids: Sequence[str]):
        self.cve_ids = tuple(cve_ids)
        super().__init__(f"no triage labels for: {', '.join(self.cve_ids)}")


class MissingCvss(ScoringError):
    """Records carry neither a vector nor a published score."""

    def __init__(self, cve_ids: Sequence[str]):
        self.cve_ids = tuple(cve_ids)
        super().__init__(f"no CVSS vector or score for: {', '.join(self.cve_ids)}")


@dataclass(frozen=True)
class TriageLabels:
    """Utility category, opportune flag, and who assigned them."""

    utility: int
    opportune: int
    source: Labeler

    def __post_init__(self):
        if self.utility not in (0, 1, 2):
            raise InvalidCategory(f"utility must be 0, 1, or 2, got {self.utility!r}")
        if self.opportune not in (0, 1):
            raise InvalidCategory(f"opportune must be 0 or 1, got {self.opportune!r}")


@dataclass(frozen=True)
class EnvironmentalFactors:
    exposure_weight: Decimal
    criticality_weight: Decimal

    def __post_init__(self):
        for w in (self.exposure_weight, self.criticality_weight):
            if w <= 0:
                raise InvalidConfig(f"environmental weight {w} must be positive")

    @property
    def product(self) -> Decimal:
        return self.exposure_weight * self.criticality_weight


NEUTRAL_ENV = EnvironmentalFactors(Decimal(1), Decimal(1))


@dataclass(frozen=True)
class EnvWeights:
    """Config weight tables for exposure and criticality."""

    exposure: Mapping[Exposure, Decimal]
    criticality: Mapping[Criticality, Decimal]


DEFAULT_ENV_WEIGHTS = EnvWeights(
    exposure={Exposure.PUBLIC: Decimal("1.5"), Exposure.PRIVATE: Decimal("1.0")},
    criticality={
        Criticality.HIGH: Decimal("1.5"),
        Criticality.MEDIUM: Decimal("1.2"),
        Criticality.LOW: Decimal("1.0"),
    },
)


@dataclass(frozen=True)
class ScoredVulnerability:
    """One CVE with all scoring inputs and its final threat score."""

    cve_id: str
    cvss: BaseScore
    wx: WxCount
    labels: TriageLabels
    env: EnvironmentalFactors
    threat_score: Decimal

    def __post_init__(self):
        expected = threat_score(self.cvss.value, self.wx.count, self.labels, self.env)
        if self.threat_score != expected:
            raise ScoringError(
                f"{self.cve_id}: threat score {self.threat_score} does not match "
                f"its inputs (expected {expected})"
            )


def _as_decimal_score(cvss) -> Decimal:
    if isinstance(cvss, Decimal):
        value = cvss
    else:
        # str() of a float is its shortest exact repr, so one-decimal
        # scores convert without binary noise (8.1 -> Decimal('8.1')).
        value = Decimal(str(cvss))
    if value < 0 or value > 10:
        raise ScoringError(f"cvss score {cvss!r} outside [0, 10]")
    return value


def env_factor(ctx: AssetContext | None, weights: EnvWeights = DEFAULT_ENV_WEIGHTS) -> EnvironmentalFactors:
    """Environmental factors for one asset context; neutral when absent."""
    if ctx is None:
        return NEUTRAL_ENV
    try:
        exposure_weight = weights.exposure[ctx.exposure]
        criticality_weight = weights.criticality[ctx.criticality]
    except KeyError as exc:
        raise InvalidConfig(f"no weight configured for {exc.args[0]}") from None
    return EnvironmentalFactors(exposure_weight, criticality_weight)


def threat_score(cvss, wx: int, labels: TriageLabels, env: EnvironmentalFactors = NEUTRAL_ENV) -> Decimal:
    """Exact threat score; unbounded above, never rounded."""
    if wx < 0:
        raise ScoringError(f"wx count {wx} must be non-negative")
    base = _as_decimal_score(cvss)
    return (base + wx) * (labels.utility + 1) * (labels.opportune + 1) * env.product


def format_quantity(value: Decimal) -> str:
    """Render a Decimal without trailing zeros or exponent notation."""
    value = value.normalize()
    if value == value.to_integral_value():
        return str(value.quantize(Decimal(1)))
    return str(value)


def resolve_base_score(record: CveRecord) -> BaseScore:
    """The CVSS score used for scoring a record.

    A vector always wins over a published score; disagreement is logged,
    since published scores drift across NVD revisions.
    """
    if record.vector is not None:
        computed = base_score(record.vector)
        if record.published_score is not None and record.published_score != computed.value:
            logger.warning(
                "%s: vector-derived score %s disagrees with published %s; using vector",
                record.cve_id,
                computed.value,
                record.published_score,
            )
        return computed
    if record.published_score is not None:
        return BaseScore(value=record.published_score, severity=severity_of(record.published_score))
    raise MissingCvss([record.cve_id])


def score_portfolio(
    records: Iterable[CveRecord],
    wx_map: Mapping[str, WxCount] | None = None,
    labels_map: Mapping[str, TriageLabels] | None = None,
    ctx_map: Mapping[str, AssetContext] | None = None,
    env_weights: EnvWeights = DEFAULT_ENV_WEIGHTS,
    predict_missing: Callable[[CveRecord], TriageLabels] | None = None,
) -> list[ScoredVulnerability]:
    """Score every record; output order follows input order.

    Records without an entry in ``wx_map`` count zero exploits; records
    without asset context score with neutral environmental factors.
    Records without labels are an error unless ``predict_missing`` is
    supplied to fill them in.
    """
    records = list(records)
    wx_map = wx_map or {}
    labels_map = labels_map or {}
    ctx_map = ctx_map or {}

    no_cvss = [r.cve_id for r in records if not r.scoring_eligible]
    if no_cvss:
        raise MissingCvss(no_cvss)
    if predict_missing is None:
        unlabeled = [r.cve_id for r in records if r.cve_id not in labels_map]
        if unlabeled:
            raise MissingLabels(unlabeled)

    scored = []
    for record in records:
        labels = labels_map.get(record.cve_id)
        if labels is None:
            labels = predict_missing(record)
        cvss = resolve_base_score(record)
        wx = wx_map.get(record.cve_id) or WxCount.zero(record.cve_id)
        env = env_factor(ctx_map.get(record.cve_id), env_weights)
        scored.append(
            ScoredVulnerability(
                cve_id=record.cve_id,
                cvss=cvss,
                wx=wx,
                labels=labels,
                env=env,
                threat_score=threat_score(cvss.value, wx.count, labels, env),
            )
        )
    return scored
