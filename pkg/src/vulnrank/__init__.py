"""vulnrank: threat-score vulnerability prioritization.

Combines CVSS v3.1 base scores with weaponized-exploit counts,
attacker-utility and opportune triage categories, and per-asset
environmental weights into one unbounded, stack-rankable threat score.
Text classifiers trained on SME-labeled descriptions automate the
category assignment at portfolio scale.
"""

from vulnrank.cvss import (
    BaseScore,
    CvssVector,
    Severity,
    base_score,
    parse_vector,
    severity_of,
)
from vulnrank.feeds import (
    AssetContext,
    CveRecord,
    LabeledExample,
    Labeler,
    ReferenceEntry,
    load_asset_context,
    load_cve_records,
    load_exploit_refs,
    load_labels,
    merge_labels,
    save_labels,
)
from vulnrank.report import (
    ComparisonReport,
    ExportFormat,
    RankedPortfolio,
    compare,
    export,
    rank,
    write_export,
)
from vulnrank.scoring import (
    DEFAULT_ENV_WEIGHTS,
    EnvironmentalFactors,
    EnvWeights,
    ScoredVulnerability,
    TriageLabels,
    env_factor,
    score_portfolio,
    threat_score,
)
from vulnrank.wx import WxCount, count_wx

__version__ = "0.1.0"

__all__ = [
    "AssetContext",
    "BaseScore",
    "ComparisonReport",
    "CveRecord",
    "CvssVector",
    "DEFAULT_ENV_WEIGHTS",
    "EnvWeights",
    "EnvironmentalFactors",
    "ExportFormat",
    "LabeledExample",
    "Labeler",
    "RankedPortfolio",
    "ReferenceEntry",
    "ScoredVulnerability",
    "Severity",
    "TriageLabels",
    "WxCount",
    "base_score",
    "compare",
    "count_wx",
    "env_factor",
    "export",
    "load_asset_context",
    "load_cve_records",
    "load_exploit_refs",
    "load_labels",
    "merge_labels",
    "parse_vector",
    "rank",
    "save_labels",
    "score_portfolio",
    "severity_of",
    "threat_score",
    "write_export",
]
