"""Stack ranking and the CVSS-versus-threat-score comparison report.

Ranking is a total order: threat score descending, ties broken by higher
CVSS and then lexicographically smaller CVE id, so remediation queues
come out identical on every run. The comparison report buckets the same
portfolio twice: by integer CVSS band (10 down to 1) and by configurable
threat-score tiers, plus top-k agreement between the two orderings.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Iterable, Sequence

from vulnrank.cvss import format_score
from vulnrank.scoring import ScoredVulnerability, format_quantity

DEFAULT_TIER_BOUNDS = (Decimal(64), Decimal(32), Decimal(16), Decimal(8))
DEFAULT_TOP_K = (10, 100, 1000)

CSV_COLUMNS = (
    "rank",
    "cve_id",
    "threat_score",
    "cvss",
    "severity",
    "wx",
    "utility",
    "opportune",
    "env_product",
    "label_source",
)


class IoError(OSError):
    """Raised when an export cannot be written to its destination."""


class ExportFormat(Enum):
    TEXT = "text"
    CSV = "csv"
    STRUCTURED = "json-lines"

    @classmethod
    def parse(cls, name: str) -> "ExportFormat":
        if name == "structured":
            return cls.STRUCTURED
        try:
            return cls(name)
        except ValueError:
            legal = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown export format {name!r} (expected {legal})") from None


@dataclass(frozen=True)
class RankedPortfolio:
    """Scored vulnerabilities in rank order; position i holds rank i+1."""

    entries: tuple[ScoredVulnerability, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def ranked(self) -> Iterable[tuple[int, ScoredVulnerability]]:
        return enumerate(self.entries, start=1)


@dataclass(frozen=True)
class ComparisonReport:
    total: int
    cvss_bands: dict[int, int]
    critical_count: int
    threat_tiers: tuple[tuple[str, int], ...]
    top_k_overlap: dict[int, float]


def _order_key(s: ScoredVulnerability):
    return (-s.threat_score, -s.cvss.value, s.cve_id)


def _cvss_order_key(s: ScoredVulnerability):
    return (-s.cvss.value, s.cve_id)


def rank(scored: Iterable[ScoredVulnerability]) -> RankedPortfolio:
    """Total order by threat score, then CVSS, then CVE id."""
    return RankedPortfolio(entries=tuple(sorted(scored, key=_order_key)))


def _cvss_band(value: float) -> int:
    # Band k covers (k-1, k]; 0.0 joins band 1 so the bands partition.
    tenths = round(value * 10)
    return max(1, (tenths + 9) // 10)


def _tier_label(bounds: Sequence[Decimal], i: int) -> str:
    if i == 0:
        return f">={format_quantity(bounds[0])}"
    return f"{format_quantity(bounds[i])}-{format_quantity(bounds[i - 1])}"


def compare(
    scored: Iterable[ScoredVulnerability],
    tier_bounds: Sequence[Decimal] = DEFAULT_TIER_BOUNDS,
    top_k: Sequence[int] = DEFAULT_TOP_K,
) -> ComparisonReport:
    """Bucket the portfolio by CVSS band and by threat tier, and measure
    how far the two orderings agree at the top."""
    scored = list(scored)
    bounds = [Decimal(b) for b in tier_bounds]
    if list(bounds) != sorted(bounds, reverse=True) or len(set(bounds)) != len(bounds):
        raise ValueError(f"tier bounds must be strictly descending, got {tier_bounds}")

    cvss_bands = {band: 0 for band in range(10, 0, -1)}
    critical = 0
    tier_counts = [0] * (len(bounds) + 1)
    for s in scored:
        cvss_bands[_cvss_band(s.cvss.value)] += 1
        if round(s.cvss.value * 10) >= 90:
            critical += 1
        for i, bound in enumerate(bounds):
            if s.threat_score >= bound:
                tier_counts[i] += 1
                break
        else:
            tier_counts[-1] += 1

    tiers = tuple(
        (_tier_label(bounds, i), tier_counts[i]) for i in range(len(bounds))
    ) + ((f"<{format_quantity(bounds[-1])}", tier_counts[-1]),)

    by_threat = sorted(scored, key=_order_key)
    by_cvss = sorted(scored, key=_cvss_order_key)
    overlap = {}
    for k in top_k:
        if not 1 <= k <= len(scored):
            continue
        top_threat = {s.cve_id for s in by_threat[:k]}
        top_cvss = {s.cve_id for s in by_cvss[:k]}
        overlap[k] = len(top_threat & top_cvss) / len(top_threat | top_cvss)

    return ComparisonReport(
        total=len(scored),
        cvss_bands=cvss_bands,
        critical_count=critical,
        threat_tiers=tiers,
        top_k_overlap=overlap,
    )


def _portfolio_row(rank_pos: int, s: ScoredVulnerability) -> dict:
    return {
        "rank": rank_pos,
        "cve_id": s.cve_id,
        "threat_score": format_quantity(s.threat_score),
        "cvss": format_score(s.cvss.value),
        "severity": s.cvss.severity.value,
        "wx": s.wx.count,
        "utility": s.labels.utility,
        "opportune": s.labels.opportune,
        "env_product": format_quantity(s.env.product),
        "label_source": s.labels.source.value,
    }


def _portfolio_csv(portfolio: RankedPortfolio) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for pos, s in portfolio.ranked():
        writer.writerow(_portfolio_row(pos, s))
    return buf.getvalue()


def _portfolio_text(portfolio: RankedPortfolio) -> str:
    header = (
        f"{'rank':>5} {'cve_id':<18} {'threat':>12} {'cvss':>5} "
        f"{'severity':<8} {'wx':>5} {'util':>4} {'opp':>3} {'env':>6} {'source':<6}"
    )
    lines = [header]
    for pos, s in portfolio.ranked():
        row = _portfolio_row(pos, s)
        lines.append(
            f"{row['rank']:>5} {row['cve_id']:<18} {row['threat_score']:>12} "
            f"{row['cvss']:>5} {row['severity']:<8} {row['wx']:>5} "
            f"{row['utility']:>4} {row['opportune']:>3} {row['env_product']:>6} "
            f"{row['label_source']:<6}"
        )
    return "\n".join(lines) + "\n"


def _portfolio_jsonl(portfolio: RankedPortfolio) -> str:
    lines = [
        json.dumps(_portfolio_row(pos, s), separators=(",", ":"))
        for pos, s in portfolio.ranked()
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _report_text(report: ComparisonReport) -> str:
    # Two-column view: CVSS bands on the left, threat tiers on the right.
    left = [f"{'CVSS band':<12} {'count':>8}"]
    left += [f"{f'{b - 1}-{b}':<12} {report.cvss_bands[b]:>8}" for b in range(10, 0, -1)]
    right = [f"{'threat tier':<12} {'count':>8}"]
    right += [f"{label:<12} {count:>8}" for label, count in report.threat_tiers]

    width = max(len(line) for line in left)
    lines = []
    for i in range(max(len(left), len(right))):
        l = left[i] if i < len(left) else ""
        r = right[i] if i < len(right) else ""
        lines.append(f"{l:<{width}}   | {r}".rstrip())
    lines.append(f"total: {report.total}")
    lines.append(f"critical (9.0-10.0): {report.critical_count}")
    for k in sorted(report.top_k_overlap):
        lines.append(f"top-{k} overlap (jaccard): {report.top_k_overlap[k]:.4f}")
    return "\n".join(lines) + "\n"


def _report_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "bucket", "value"])
    for band in range(10, 0, -1):
        writer.writerow(["cvss_band", band, report.cvss_bands[band]])
    for label, count in report.threat_tiers:
        writer.writerow(["threat_tier", label, count])
    writer.writerow(["critical", "9.0-10.0", report.critical_count])
    for k in sorted(report.top_k_overlap):
        writer.writerow(["overlap", f"top-{k}", f"{report.top_k_overlap[k]:.4f}"])
    return buf.getvalue()


def _report_jsonl(report: ComparisonReport) -> str:
    rows = [{"kind": "total", "count": report.total}]
    rows += [
        {"kind": "cvss_band", "band": band, "count": report.cvss_bands[band]}
        for band in range(10, 0, -1)
    ]
    rows += [
        {"kind": "threat_tier", "tier": label, "count": count}
        for label, count in report.threat_tiers
    ]
    rows.append({"kind": "critical", "count": report.critical_count})
    rows += [
        {"kind": "overlap", "k": k, "jaccard": report.top_k_overlap[k]}
        for k in sorted(report.top_k_overlap)
    ]
    return "\n".join(json.dumps(row, separators=(",", ":")) for row in rows) + "\n"


def export(obj: RankedPortfolio | ComparisonReport, fmt: ExportFormat) -> bytes:
    """Deterministic bytes for a portfolio or comparison report."""
    if isinstance(obj, RankedPortfolio):
        renderers = {
            ExportFormat.TEXT: _portfolio_text,
            ExportFormat.CSV: _portfolio_csv,
            ExportFormat.STRUCTURED: _portfolio_jsonl,
        }
    elif isinstance(obj, ComparisonReport):
        renderers = {
            ExportFormat.TEXT: _report_text,
            ExportFormat.CSV: _report_csv,
            ExportFormat.STRUCTURED: _report_jsonl,
        }
    else:
        raise TypeError(f"cannot export {type(obj).__name__}")
    return renderers[fmt](obj).encode("utf-8")


def write_export(path, obj: RankedPortfolio | ComparisonReport, fmt: ExportFormat) -> None:
    data = export(obj, fmt)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write export to {path}: {exc}") from exc
