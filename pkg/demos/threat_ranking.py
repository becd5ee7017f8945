"""Walkthrough: from CVSS-only triage to threat-score stack ranking.

Builds the three worked examples in memory, scores them with
    (cvss + wx) * (utility + 1) * (opportune + 1) * (environmental factors)
and shows why the ranking disagrees with plain CVSS: an insulin pump
with a hard-coded PIN (CVSS 6.8) outranks a TLS validation bug
(CVSS 7.5) because attackers get more out of it with less effort.
"""

from vulnrank import (
    AssetContext,
    CveRecord,
    Labeler,
    TriageLabels,
    WxCount,
    compare,
    export,
    rank,
    score_portfolio,
)
from vulnrank.feeds import Criticality, Exposure, ReferenceSource
from vulnrank.report import ExportFormat

RECORDS = [
    CveRecord(
        "CVE-2017-0143",
        "SMBv1 server allows remote attackers to execute arbitrary code",
        published_score=8.1,
    ),
    CveRecord(
        "CVE-2019-11324",
        "urllib3 mishandles certain CA certificate stores",
        published_score=7.5,
    ),
    CveRecord(
        "CVE-2020-27256",
        "hard-coded physician PIN in an insulin pump",
        published_score=6.8,
    ),
]

# Exploit-reference counts, as a feed crawler would produce them:
# 26 public exploits for the SMB bug, 2 for urllib3, none for the pump.
WX = {
    "CVE-2017-0143": WxCount("CVE-2017-0143", 26, {ReferenceSource.EXPLOITDB: 20, ReferenceSource.METASPLOIT: 4, ReferenceSource.GITHUB: 2}),
    "CVE-2019-11324": WxCount("CVE-2019-11324", 2, {ReferenceSource.GITHUB: 2}),
}

# SME triage: the SMB bug and the pump both give attackers "actions on
# objectives" (utility 2); the pump needs no exploit code at all
# (opportune 1).
LABELS = {
    "CVE-2017-0143": TriageLabels(utility=2, opportune=0, source=Labeler.SME),
    "CVE-2019-11324": TriageLabels(utility=0, opportune=0, source=Labeler.SME),
    "CVE-2020-27256": TriageLabels(utility=2, opportune=1, source=Labeler.SME),
}

scored = score_portfolio(RECORDS, WX, LABELS)
print("== ranked queue (neutral environment) ==")
print(export(rank(scored), ExportFormat.TEXT).decode())

print("CVSS order:   11324 (7.5) above 27256 (6.8)")
print("threat order:", " > ".join(s.cve_id.split("-")[-1] for s in rank(scored).entries))
print()

# The comparison view: how the two orderings bucket the same portfolio.
print("== comparison report ==")
print(export(compare(scored), ExportFormat.TEXT).decode())

# Environmental factors: the same pump CVE on a public, high-criticality
# asset multiplies by 1.5 * 1.5.
ctx = {"CVE-2020-27256": AssetContext("CVE-2020-27256", Exposure.PUBLIC, Criticality.HIGH)}
rescored = score_portfolio(RECORDS, WX, LABELS, ctx)
print("== with asset context on the pump ==")
for s in rank(rescored).entries:
    print(f"  {s.cve_id}: threat {s.threat_score} (env product {s.env.product})")
