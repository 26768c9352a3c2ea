"""Three-namespace memo cache (single-qubit, two-qubit, plan level)."""
from __future__ import annotations

import threading
from collections import Counter
from typing import Any, Hashable

NAMESPACES = ("1q", "2q", "plan")


class MemoCache:
    def __init__(self):
        self._data: dict[str, dict[Hashable, Any]] = {ns: {} for ns in NAMESPACES}
        self._lock = threading.Lock()
        self.hits: Counter = Counter()
        self.misses: Counter = Counter()

    def get(self, ns: str, key: Hashable):
        with self._lock:
            val = self._data[ns].get(key)
            if val is None:
                self.misses[ns] += 1
            else:
                self.hits[ns] += 1
            return val

    def put(self, ns: str, key: Hashable, value) -> None:
        with self._lock:
            self._data[ns][key] = value

    def size(self, ns: str) -> int:
        return len(self._data[ns])

    def clear(self) -> None:
        with self._lock:
            for d in self._data.values():
                d.clear()
            self.hits.clear()
            self.misses.clear()


_DEFAULT = MemoCache()


def memo_get(key, ns: str = "1q", cache: MemoCache | None = None):
    return (cache or _DEFAULT).get(ns, key)


def memo_put(key, value, ns: str = "1q", cache: MemoCache | None = None) -> None:
    (cache or _DEFAULT).put(ns, key, value)
