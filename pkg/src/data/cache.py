"""On-disk cache of ledger summaries."""

import hashlib
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Optional

from src import __version__
from src.errors import ReportIOError
from src.models.ledger import LedgerSummary

logger = logging.getLogger(__name__)


class SummaryCache:
    """Stores LedgerSummary JSON keyed by (X, digit set, code version).

    Ledgers are deterministic, so entries never expire; a new code version
    simply misses the old keys.
    """

    def __init__(self, cache_dir: str = ".cache", version: str = __version__):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory for cache files
            version: Code version mixed into every key
        """
        self.cache_dir = Path(cache_dir)
        self.version = version
        self._ensure_cache_dir()

    def _ensure_cache_dir(self) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ReportIOError(f"cannot create cache directory {self.cache_dir}: {e}") from e

    def _get_cache_key(self, X: int, ds_text: str) -> str:
        key_string = f"{X}_{ds_text}_{self.version}"
        return hashlib.md5(key_string.encode()).hexdigest()

    def _get_cache_path(self, key: str) -> Path:
        return self.cache_dir / f"ledger_{key}.json"

    def get(self, X: int, ds_text: str) -> Optional[LedgerSummary]:
        """
        Retrieve a cached summary.

        Args:
            X: Ledger bound
            ds_text: Digit set in DigitSet.to_text() form

        Returns:
            LedgerSummary or None on a miss
        """
        path = self._get_cache_path(self._get_cache_key(X, ds_text))
        if not path.exists():
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path}: {e}")
            return None
        logger.debug(f"Cache hit for X={X} {ds_text}")
        return LedgerSummary.from_dict(entry["data"])

    def set(self, summary: LedgerSummary) -> None:
        """Store a summary under its own (X, ds) key."""
        path = self._get_cache_path(self._get_cache_key(summary.X, summary.ds))
        entry = {
            "timestamp": datetime.now().isoformat(),
            "version": self.version,
            "key_args": [summary.X, summary.ds],
            "data": summary.to_dict(),
        }
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(entry, f, ensure_ascii=False, indent=2)
        except OSError as e:
            raise ReportIOError(f"cannot write cache entry {path}: {e}") from e

    def invalidate(self, X: int, ds_text: str) -> bool:
        path = self._get_cache_path(self._get_cache_key(X, ds_text))
        if path.exists():
            path.unlink()
            return True
        return False

    def clear_all(self) -> int:
        """
        Clear all cached summaries.

        Returns:
            Number of cache files deleted
        """
        count = 0
        for cache_file in self.cache_dir.glob("ledger_*.json"):
            cache_file.unlink()
            count += 1
        return count

    def get_stats(self) -> dict:
        """Entry counts, current-version share and size on disk."""
        cache_files = list(self.cache_dir.glob("ledger_*.json"))
        total_size = sum(f.stat().st_size for f in cache_files)

        current = 0
        for f in cache_files:
            try:
                with open(f, "r", encoding="utf-8") as fh:
                    if json.load(fh).get("version") == self.version:
                        current += 1
            except (OSError, json.JSONDecodeError):
                continue

        return {
            "total_entries": len(cache_files),
            "current_entries": current,
            "stale_entries": len(cache_files) - current,
            "total_size_bytes": total_size,
            "total_size_mb": round(total_size / (1024 * 1024), 2),
            "cache_dir": str(self.cache_dir),
            "version": self.version,
        }
