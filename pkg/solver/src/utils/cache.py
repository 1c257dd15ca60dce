"""Small in-memory cache for precomputed phase tables and masks."""

import threading
from collections import OrderedDict
from typing import Any, Callable, Hashable, Optional

import numpy as np


class ArrayCache:
    """Keyed LRU cache of read-only numpy arrays, safe to share between threads."""

    def __init__(self, max_entries: int = 32):
        """
        Initialize cache.

        Args:
            max_entries: Number of arrays kept before the least recently used is evicted
        """
        self.cache: "OrderedDict[Hashable, np.ndarray]" = OrderedDict()
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0
        self._lock = threading.RLock()

    def get(self, key: Hashable) -> Optional[np.ndarray]:
        """
        Get array from cache.

        Args:
            key: Cache key

        Returns:
            Cached array or None if not present
        """
        with self._lock:
            if key not in self.cache:
                return None
            self.cache.move_to_end(key)
            return self.cache[key]

    def set(self, key: Hashable, value: np.ndarray) -> None:
        """
        Store array in cache. The array is frozen (made read-only).

        Args:
            key: Cache key
            value: Array to cache
        """
        value.setflags(write=False)
        with self._lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            while len(self.cache) > self.max_entries:
                self.cache.popitem(last=False)

    def get_or_compute(self, key: Hashable, compute: Callable[[], np.ndarray]) -> np.ndarray:
        """
        Return the cached array for key, computing and storing it on a miss.

        Args:
            key: Cache key
            compute: Zero-argument function building the array

        Returns:
            Read-only array
        """
        # one computation per key even under concurrent misses
        with self._lock:
            cached = self.get(key)
            if cached is not None:
                self.hits += 1
                return cached
            self.misses += 1
            value = compute()
            self.set(key, value)
            return value

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def size(self) -> int:
        """Get number of entries in cache."""
        return len(self.cache)


# Global instance (singleton pattern)
_phase_cache_instance: Optional[ArrayCache] = None


def get_phase_cache() -> ArrayCache:
    """Get or create the process-wide phase table cache."""
    global _phase_cache_instance
    if _phase_cache_instance is None:
        _phase_cache_instance = ArrayCache()
    return _phase_cache_instance


def float_key(*values: Any) -> tuple:
    """Build a hashable cache key; floats are keyed by their exact bit pattern."""
    return tuple(float(v).hex() if isinstance(v, (float, np.floating)) else v for v in values)
