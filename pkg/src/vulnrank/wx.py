"""Weaponized-exploit counts: how many distinct exploit references a CVE has.

The count is unbounded and deliberately unweighted: every distinct
exploit reference counts one, regardless of source or age.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from vulnrank.feeds import ReferenceEntry, ReferenceSource


@dataclass(frozen=True)
class WxCount:
    cve_id: str
    count: int
    per_source: Mapping[ReferenceSource, int]

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"{self.cve_id}: negative count")
        if self.count != sum(self.per_source.values()):
            raise ValueError(
                f"{self.cve_id}: count {self.count} does not reconcile with "
                f"per-source totals {dict(self.per_source)}"
            )

    @classmethod
    def zero(cls, cve_id: str) -> "WxCount":
        return cls(cve_id=cve_id, count=0, per_source=MappingProxyType({}))


def count_wx(refs: Mapping[str, Iterable[ReferenceEntry]]) -> dict[str, WxCount]:
    """Count exploit-flagged references per CVE.

    Input must already be URL-deduplicated (the reference feed loader
    guarantees this). CVEs absent from the feed simply have no entry;
    use ``WxCount.zero`` as the lookup default.
    """
    counts: dict[str, WxCount] = {}
    for cve_id, entries in refs.items():
        per_source: dict[ReferenceSource, int] = {}
        for entry in entries:
            if not entry.is_exploit:
                continue
            per_source[entry.source] = per_source.get(entry.source, 0) + 1
        counts[cve_id] = WxCount(
            cve_id=cve_id,
            count=sum(per_source.values()),
            per_source=MappingProxyType(per_source),
        )
    return counts
