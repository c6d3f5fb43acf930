"""Tests for the ledger summary cache."""

from src.data.cache import SummaryCache
from src.models.ledger import LedgerSummary


def make_summary(X: int = 50) -> LedgerSummary:
    return LedgerSummary(
        X=X,
        ds="g=10;forbidden=9",
        member_count=45,
        sum_r2=10.5,
        sum_r_star=7,
        sum_r_star_sq=11,
        nonzero=5,
        above_two=0,
        quadruple_count=0,
        defect_sum=-3,
        diagonal_reps=3,
        large_pairs=4,
        histogram={1: 3, 2: 2},
    )


class TestSummaryCache:
    def test_miss(self, tmp_path):
        cache = SummaryCache(cache_dir=str(tmp_path))
        assert cache.get(50, "g=10;forbidden=9") is None

    def test_round_trip(self, tmp_path):
        cache = SummaryCache(cache_dir=str(tmp_path))
        summary = make_summary()
        cache.set(summary)
        assert cache.get(50, "g=10;forbidden=9") == summary

    def test_version_is_part_of_key(self, tmp_path):
        SummaryCache(cache_dir=str(tmp_path), version="old").set(make_summary())
        cache = SummaryCache(cache_dir=str(tmp_path), version="new")
        assert cache.get(50, "g=10;forbidden=9") is None
        stats = cache.get_stats()
        assert stats["total_entries"] == 1
        assert stats["stale_entries"] == 1

    def test_invalidate_and_clear(self, tmp_path):
        cache = SummaryCache(cache_dir=str(tmp_path))
        cache.set(make_summary(50))
        cache.set(make_summary(100))
        assert cache.invalidate(50, "g=10;forbidden=9")
        assert not cache.invalidate(50, "g=10;forbidden=9")
        assert cache.clear_all() == 1
        assert cache.get_stats()["total_entries"] == 0

    def test_unreadable_entry_is_a_miss(self, tmp_path):
        cache = SummaryCache(cache_dir=str(tmp_path))
        cache.set(make_summary())
        for path in tmp_path.glob("ledger_*.json"):
            path.write_text("{not json", encoding="utf-8")
        assert cache.get(50, "g=10;forbidden=9") is None
