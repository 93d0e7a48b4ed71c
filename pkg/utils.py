import json
import time
import functools
import logging
from fractions import Fraction
from typing import Any, Callable, TypeVar, Union

# Type for decorators
F = TypeVar('F', bound=Callable[..., Any])

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


class MulffsError(Exception):
    """Base exception for every error raised by the library."""


class SchemaError(MulffsError):
    """Raised when JSON input does not match the expected layout."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def track_performance(func: F) -> F:
    """Decorator to log the execution time of a function for performance tracking."""
    @functools.wraps(func)
    def wrapped(*args: Any, **kwargs: Any) -> Any:
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = time.perf_counter() - start_time
        logger.debug(f"Function '{func.__name__}' executed in {execution_time:.4f} seconds.")
        return result
    return wrapped  # type: ignore


def format_rational(value: Rational) -> str:
    """Canonical "p/q" text: q > 0, gcd-reduced, integers written as "p/1"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(raw: Any, path: str = "$") -> Fraction:
    if isinstance(raw, bool):
        raise SchemaError(path, "expected a rational, got a boolean")
    if isinstance(raw, int):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise SchemaError(path, f"expected a \"p/q\" string, got {type(raw).__name__}")
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(path, f"malformed rational {raw!r}: {e}") from e


def to_json(obj: Any, **kwargs: Any) -> str:
    """Serialize to JSON with deterministic key ordering."""
    kwargs.setdefault("sort_keys", True)
    return json.dumps(obj, **kwargs)


def require_field(data: Any, key: str, path: str) -> Any:
    if not isinstance(data, dict):
        raise SchemaError(path, f"expected an object, got {type(data).__name__}")
    if key not in data:
        raise SchemaError(f"{path}.{key}", "missing field")
    return data[key]
