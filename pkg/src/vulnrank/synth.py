"""Deterministic synthetic fixtures: labeled corpora, CVE feeds, portfolios.

Real SME label sets are proprietary, so demos and verification run on
generated data instead. Descriptions are keyword-planted: each utility
category and the opportune flag get exclusive marker phrases wrapped in
seeded filler, which makes the corpora learnable by construction while
still looking like vulnerability text.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timezone

from vulnrank.feeds import CveRecord, LabeledExample, Labeler, ReferenceSource
from vulnrank.scoring import (
    DEFAULT_ENV_WEIGHTS,
    ScoredVulnerability,
    TriageLabels,
    score_portfolio,
)
from vulnrank.wx import WxCount

SYNTH_TS = datetime(2024, 1, 1, tzinfo=timezone.utc)

VENDORS = (
    "Acme", "Borealis", "Cobalt", "Drift", "Evergreen", "Foxglove", "Granite",
    "Harbor", "Ironwood", "Juniper", "Kestrel", "Larkspur",
)
COMPONENTS = (
    "gateway", "agent", "daemon", "console", "router", "scheduler", "broker",
    "collector", "proxy", "runtime", "updater", "portal",
)

UTILITY_PHRASES = {
    0: (
        "discloses verbose version banners and harmless build metadata to callers",
        "leaks benign diagnostic timing information in error responses",
        "exposes non-sensitive configuration listing through a status page",
    ),
    1: (
        "allows privilege escalation that attackers chain for lateral movement after an initial foothold",
        "permits session pivoting so an attacker can chain access toward internal segments",
        "enables token reuse that supports chaining into adjacent services",
    ),
    2: (
        "allows remote attackers to execute arbitrary code via crafted packets",
        "lets unauthenticated attackers execute arbitrary commands and take over the host",
        "allows remote code execution leading to full compromise of the appliance",
    ),
}

OPPORTUNE_PHRASES = (
    "The build ships with default credentials and a hardcoded admin password.",
    "A factory default password grants login without any exploit code.",
)


def _split_counts(n: int, fractions) -> list[int]:
    counts = [int(n * f) for f in fractions]
    counts[0] += n - sum(counts)
    return counts


def synth_labeled_corpus(
    n: int = 600,
    seed: int = 42,
    utility_split=(0.42, 0.32, 0.26),
    opportune_rate: float = 0.08,
    labeler: Labeler = Labeler.SME,
) -> list[LabeledExample]:
    """Labeled examples with planted-keyword descriptions attached."""
    rng = random.Random(seed)
    utilities = [c for c, count in enumerate(_split_counts(n, utility_split)) for _ in range(count)]
    rng.shuffle(utilities)
    opportune_ids = set(rng.sample(range(n), round(n * opportune_rate)))

    examples = []
    for i in range(n):
        utility = utilities[i]
        opportune = 1 if i in opportune_ids else 0
        vendor, component = rng.choice(VENDORS), rng.choice(COMPONENTS)
        version = f"{rng.randrange(1, 9)}.{rng.randrange(0, 20)}"
        sentence = rng.choice(UTILITY_PHRASES[utility])
        description = f"A flaw in {vendor} {component} before {version} {sentence}."
        if opportune:
            description += " " + rng.choice(OPPORTUNE_PHRASES)
        examples.append(
            LabeledExample(
                cve_id=f"CVE-2098-{10000 + i}",
                utility=utility,
                opportune=opportune,
                labeler=labeler,
                labeled_at=SYNTH_TS,
                description=description,
            )
        )
    return examples


def synth_cve_records(examples, seed: int = 42) -> list[CveRecord]:
    """A CVE record per example, with a seeded one-decimal published score."""
    rng = random.Random(seed + 1)
    return [
        CveRecord(
            cve_id=ex.cve_id,
            description=ex.description,
            published_score=rng.randrange(1, 101) / 10,
        )
        for ex in examples
    ]


def synth_portfolio(
    n: int = 1000, seed: int = 42, wx_rate: float = 0.05
) -> list[ScoredVulnerability]:
    """A scored portfolio whose CVSS and threat orderings provably differ.

    A dozen entries sit at CVSS 10.0 with no exploit references, while the
    exploit-reference mass (``wx_rate`` of entries, one of them with a
    huge count) lives at CVSS <= 9.0, so the top of the threat ranking
    cannot coincide with the top of the CVSS ranking.
    """
    rng = random.Random(seed)
    pinned_critical = 12
    records, labels_map, refs = [], {}, {}
    wx_ids = rng.sample(range(pinned_critical, n), round(n * wx_rate))
    big_wx = wx_ids[0]
    for i in range(n):
        cve_id = f"CVE-2097-{10000 + i}"
        if i < pinned_critical:
            score = 10.0
        else:
            score = rng.randrange(1, 91) / 10
        records.append(CveRecord(cve_id, f"synthetic finding {i}", published_score=score))
        labels_map[cve_id] = TriageLabels(
            utility=rng.choice((0, 1, 2)), opportune=rng.choice((0, 1)), source=Labeler.SME
        )
    wx_map = {}
    for i in wx_ids:
        cve_id = f"CVE-2097-{10000 + i}"
        count = 120 if i == big_wx else rng.randrange(1, 61)
        wx_map[cve_id] = WxCount(cve_id, count, {ReferenceSource.EXPLOITDB: count})
    return score_portfolio(records, wx_map, labels_map, env_weights=DEFAULT_ENV_WEIGHTS)


def write_cve_feed(path, records) -> None:
    """CVE feed file: one record per line in the documented field layout."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            row = {"id": rec.cve_id, "description": rec.description}
            if rec.vector is not None:
                row["vector"] = rec.vector.to_string()
            if rec.published_score is not None:
                row["score"] = rec.published_score
            if rec.references:
                row["references"] = [
                    {"url": r.url, "source": r.source.value, "exploit": r.is_exploit}
                    for r in rec.references
                ]
            fh.write(json.dumps(row) + "\n")


def write_ref_feed(path, rows) -> None:
    """Exploit reference feed: dicts with cve/url/source/exploit fields."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def write_context_feed(path, contexts) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ctx in contexts:
            fh.write(
                json.dumps(
                    {
                        "cve": ctx.cve_id,
                        "exposure": ctx.exposure.value,
                        "criticality": ctx.criticality.value,
                    }
                )
                + "\n"
            )
