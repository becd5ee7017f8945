"""Feed loading, validation, and label-store round trips."""

import logging
from datetime import datetime, timezone

import pytest

from vulnrank.feeds import (
    AssetContext,
    Criticality,
    DuplicateId,
    Exposure,
    InvalidCategory,
    LabeledExample,
    Labeler,
    ParseError,
    ReferenceSource,
    SchemaError,
    attach_descriptions,
    format_ts,
    load_asset_context,
    load_cve_records,
    load_exploit_refs,
    load_labels,
    merge_labels,
    save_labels,
)

from conftest import WORKED_TRIO, trio_cve_rows, trio_ref_rows, write_jsonl


def ts(text):
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc)


class TestLoadCveRecords:
    def test_worked_trio(self, tmp_path):
        path = write_jsonl(tmp_path / "cves.jsonl", trio_cve_rows())
        records = load_cve_records(path)
        assert [r.cve_id for r in records] == [rec["id"] for rec in WORKED_TRIO]
        assert [r.description for r in records] == [rec["description"] for rec in WORKED_TRIO]
        assert all(r.vector is not None for r in records)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "cves.jsonl"
        path.write_text("")
        assert load_cve_records(path) == []

    def test_duplicate_id(self, tmp_path):
        rows = [
            {"id": "CVE-2020-0001", "description": "a", "score": 5.0},
            {"id": "CVE-2020-0001", "description": "b", "score": 5.0},
        ]
        path = write_jsonl(tmp_path / "cves.jsonl", rows)
        with pytest.raises(DuplicateId, match="CVE-2020-0001"):
            load_cve_records(path)

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "cves.jsonl"
        path.write_text('{"id": "CVE-2020-0001", "description": "a"}\nnot json\n')
        with pytest.raises(ParseError, match=":2"):
            load_cve_records(path)

    def test_missing_field_named(self, tmp_path):
        path = write_jsonl(tmp_path / "cves.jsonl", [{"id": "CVE-2020-0001"}])
        with pytest.raises(SchemaError, match="description"):
            load_cve_records(path)

    def test_bad_cve_id(self, tmp_path):
        path = write_jsonl(tmp_path / "cves.jsonl", [{"id": "CVE-20-1", "description": "a"}])
        with pytest.raises(SchemaError, match="CVE-20-1"):
            load_cve_records(path)

    def test_bad_vector_wrapped(self, tmp_path):
        rows = [{"id": "CVE-2020-0001", "description": "a", "vector": "AV:N/AC:L"}]
        path = write_jsonl(tmp_path / "cves.jsonl", rows)
        with pytest.raises(SchemaError, match="vector"):
            load_cve_records(path)

    def test_score_out_of_range(self, tmp_path):
        rows = [{"id": "CVE-2020-0001", "description": "a", "score": 11.0}]
        path = write_jsonl(tmp_path / "cves.jsonl", rows)
        with pytest.raises(SchemaError, match="11.0"):
            load_cve_records(path)

    def test_record_without_vector_or_score_loads(self, tmp_path):
        path = write_jsonl(tmp_path / "cves.jsonl", [{"id": "CVE-2020-0001", "description": "a"}])
        (record,) = load_cve_records(path)
        assert not record.scoring_eligible

    def test_deterministic(self, tmp_path):
        path = write_jsonl(tmp_path / "cves.jsonl", trio_cve_rows())
        assert load_cve_records(path) == load_cve_records(path)


class TestLoadExploitRefs:
    def test_wx_26_group(self, tmp_path):
        path = write_jsonl(tmp_path / "refs.jsonl", trio_ref_rows())
        grouped = load_exploit_refs(path)
        assert len(grouped["CVE-2017-0143"]) == 26
        assert len(grouped["CVE-2019-11324"]) == 2
        assert "CVE-2020-27256" not in grouped

    def test_same_url_deduplicated(self, tmp_path):
        row = {"cve": "CVE-2020-0001", "url": "https://x/1", "source": "GitHub", "exploit": True}
        path = write_jsonl(tmp_path / "refs.jsonl", [row, dict(row)])
        grouped = load_exploit_refs(path)
        assert len(grouped["CVE-2020-0001"]) == 1

    def test_non_exploit_reference_retained(self, tmp_path):
        rows = [
            {"cve": "CVE-2020-0001", "url": "https://x/1", "source": "Other", "exploit": False},
        ]
        grouped = load_exploit_refs(write_jsonl(tmp_path / "refs.jsonl", rows))
        (entry,) = grouped["CVE-2020-0001"]
        assert entry.is_exploit is False

    def test_unknown_source_downgraded_with_warning(self, tmp_path, caplog):
        rows = [
            {"cve": "CVE-2020-0001", "url": "https://x/1", "source": "PacketStorm", "exploit": True},
            {"cve": "CVE-2020-0001", "url": "https://x/2", "source": "PacketStorm", "exploit": True},
        ]
        path = write_jsonl(tmp_path / "refs.jsonl", rows)
        with caplog.at_level(logging.WARNING, logger="vulnrank.feeds"):
            grouped = load_exploit_refs(path)
        assert all(e.source is ReferenceSource.OTHER for e in grouped["CVE-2020-0001"])
        assert "2 reference(s)" in caplog.text

    def test_exploit_flag_defaults_false(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "url": "https://x/1", "source": "ExploitDB"}]
        grouped = load_exploit_refs(write_jsonl(tmp_path / "refs.jsonl", rows))
        assert grouped["CVE-2020-0001"][0].is_exploit is False

    def test_empty_url_rejected(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "url": "", "source": "Other"}]
        path = write_jsonl(tmp_path / "refs.jsonl", rows)
        with pytest.raises(SchemaError, match="url"):
            load_exploit_refs(path)


class TestLabels:
    def example(self, cve="CVE-2020-0001", utility=1, opportune=0, labeler=Labeler.SME, when="2021-01-01T00:00:00"):
        return LabeledExample(
            cve_id=cve, utility=utility, opportune=opportune, labeler=labeler, labeled_at=ts(when)
        )

    def test_round_trip(self, tmp_path):
        examples = [self.example(), self.example(cve="CVE-2020-0002", utility=2, opportune=1)]
        path = tmp_path / "labels.jsonl"
        save_labels(path, examples)
        assert sorted(load_labels(path), key=lambda e: e.cve_id) == examples

    def test_save_is_deterministic(self, tmp_path):
        examples = [self.example(cve=f"CVE-2020-{n:04d}") for n in range(9, 0, -1)]
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_labels(a, examples)
        save_labels(b, list(reversed(examples)))
        assert a.read_bytes() == b.read_bytes()

    def test_newest_wins_on_merge(self, tmp_path):
        older = self.example(utility=0, when="2021-01-01T00:00:00")
        newer = self.example(utility=2, when="2021-06-01T00:00:00")
        path = tmp_path / "labels.jsonl"
        save_labels(path, [older])
        save_labels(path, [newer])
        (loaded,) = load_labels(path)
        assert loaded.utility == 2

    def test_sme_beats_newer_model(self):
        sme = self.example(utility=1, labeler=Labeler.SME, when="2021-01-01T00:00:00")
        model = self.example(utility=2, labeler=Labeler.MODEL, when="2022-01-01T00:00:00")
        merged = merge_labels([sme, model])
        assert merged["CVE-2020-0001"].labeler is Labeler.SME

    def test_invalid_category(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "utility": 7, "opportune": 0, "labeler": "SME", "ts": "2021-01-01T00:00:00Z"}]
        path = write_jsonl(tmp_path / "labels.jsonl", rows)
        with pytest.raises(InvalidCategory):
            load_labels(path)

    def test_invalid_labeler(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "utility": 1, "opportune": 0, "labeler": "Bot", "ts": "2021-01-01T00:00:00Z"}]
        path = write_jsonl(tmp_path / "labels.jsonl", rows)
        with pytest.raises(InvalidCategory, match="labeler"):
            load_labels(path)

    def test_ts_z_suffix_round_trip(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "utility": 1, "opportune": 0, "labeler": "SME", "ts": "2021-01-01T12:30:00Z"}]
        path = write_jsonl(tmp_path / "labels.jsonl", rows)
        (loaded,) = load_labels(path)
        assert format_ts(loaded.labeled_at) == "2021-01-01T12:30:00Z"

    def test_proportions_survive_round_trip(self, tmp_path):
        # 42%/32%/26% utility split over a synthetic corpus of 50.
        counts = {0: 21, 1: 16, 2: 13}
        examples, n = [], 0
        for utility, count in counts.items():
            for _ in range(count):
                examples.append(self.example(cve=f"CVE-2021-{n:04d}", utility=utility))
                n += 1
        path = tmp_path / "labels.jsonl"
        save_labels(path, examples)
        loaded = load_labels(path)
        for utility, count in counts.items():
            assert sum(1 for e in loaded if e.utility == utility) == count


class TestAssetContext:
    def test_load(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "exposure": "Public", "criticality": "High"}]
        ctx = load_asset_context(write_jsonl(tmp_path / "ctx.jsonl", rows))
        assert ctx["CVE-2020-0001"] == AssetContext(
            "CVE-2020-0001", Exposure.PUBLIC, Criticality.HIGH
        )

    def test_duplicate_rejected(self, tmp_path):
        rows = [
            {"cve": "CVE-2020-0001", "exposure": "Public", "criticality": "High"},
            {"cve": "CVE-2020-0001", "exposure": "Private", "criticality": "Low"},
        ]
        path = write_jsonl(tmp_path / "ctx.jsonl", rows)
        with pytest.raises(DuplicateId):
            load_asset_context(path)

    def test_invalid_enum(self, tmp_path):
        rows = [{"cve": "CVE-2020-0001", "exposure": "DMZ", "criticality": "High"}]
        path = write_jsonl(tmp_path / "ctx.jsonl", rows)
        with pytest.raises(InvalidCategory):
            load_asset_context(path)


class TestAttachDescriptions:
    def test_join(self, tmp_path):
        records = load_cve_records(write_jsonl(tmp_path / "cves.jsonl", trio_cve_rows()))
        examples = [
            LabeledExample("CVE-2017-0143", 2, 0, Labeler.SME, ts("2021-01-01T00:00:00"))
        ]
        (joined,) = attach_descriptions(examples, records)
        assert "SMBv1" in joined.description

    def test_missing_record_named(self):
        examples = [
            LabeledExample("CVE-1999-9999", 0, 0, Labeler.SME, ts("2021-01-01T00:00:00"))
        ]
        with pytest.raises(SchemaError, match="CVE-1999-9999"):
            attach_descriptions(examples, [])
