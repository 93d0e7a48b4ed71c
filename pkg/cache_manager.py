import threading
import logging
import functools
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Optional

logger = logging.getLogger(__name__)

_MISSING = object()


@dataclass
class CacheMetrics:
    hits: int = 0
    misses: int = 0
    evictions: int = 0

    @property
    def hit_rate(self) -> float:
        total_requests = self.hits + self.misses
        return (self.hits / total_requests) * 100 if total_requests > 0 else 0.0


class LRUCache:
    """Bounded least-recently-used map with hit/miss accounting.

    Values must be immutable; the cache hands out the stored object itself.
    """

    def __init__(self, name: str, capacity: int):
        self.name = name
        self.capacity = capacity
        self.cache: OrderedDict[Hashable, Any] = OrderedDict()
        self.metrics = CacheMetrics()
        self.lock = threading.Lock()

    def get(self, key: Hashable, default: Any = None) -> Any:
        with self.lock:
            if key not in self.cache:
                self.metrics.misses += 1
                return default
            self.cache.move_to_end(key)
            self.metrics.hits += 1
            return self.cache[key]

    def set(self, key: Hashable, value: Any) -> None:
        with self.lock:
            if key in self.cache:
                self.cache.move_to_end(key)
            self.cache[key] = value
            if len(self.cache) > self.capacity:
                self.cache.popitem(last=False)
                self.metrics.evictions += 1

    def remove(self, key: Hashable) -> None:
        with self.lock:
            self.cache.pop(key, None)

    def clear(self) -> None:
        with self.lock:
            self.cache.clear()

    def __len__(self) -> int:
        return len(self.cache)

    def log_metrics(self) -> None:
        logger.debug(f"{self.name} cache - Hit Rate: {self.metrics.hit_rate:.2f}%, "
                     f"Hits: {self.metrics.hits}, Misses: {self.metrics.misses}, "
                     f"Evictions: {self.metrics.evictions}, Size: {len(self.cache)}")


_registry: Dict[str, LRUCache] = {}


def get_cache(name: str, capacity: int) -> LRUCache:
    """Return the process-wide cache called `name`, creating it on first use."""
    cache = _registry.get(name)
    if cache is None:
        cache = _registry.setdefault(name, LRUCache(name, capacity))
    return cache


def log_cache_metrics() -> None:
    for cache in _registry.values():
        cache.log_metrics()


def clear_caches() -> None:
    for cache in _registry.values():
        cache.clear()


def memoize(name: str, capacity: int, key: Optional[Callable[..., Hashable]] = None):
    """Cache results of a pure function in a named LRUCache.

    `key` maps the call arguments to a hashable key; by default the positional
    arguments and sorted keyword items are used.
    """
    def decorator(func):
        cache = get_cache(name, capacity)

        @functools.wraps(func)
        def wrapped(*args, **kwargs):
            cache_key = key(*args, **kwargs) if key else (args, tuple(sorted(kwargs.items())))
            result = cache.get(cache_key, _MISSING)
            if result is _MISSING:
                result = func(*args, **kwargs)
                cache.set(cache_key, result)
            return result
        wrapped.cache = cache
        return wrapped
    return decorator
