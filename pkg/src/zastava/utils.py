from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, Any, TypeVar

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

_T = TypeVar("_T")


def collect_errors(errors: dict[str, list[Any]], detail: dict[str, Any]) -> None:
    """
    Add the messages of one failed check to ``errors``, keyed by option.
    A single message is stored as a one-element list; messages for an option
    that already failed are appended in order.
    """
    for option, messages in detail.items():
        if not isinstance(messages, (list, tuple)):
            messages = [messages]
        errors.setdefault(option, []).extend(messages)


def chunked(items: Iterable[_T], size: int) -> Iterator[list[_T]]:
    """
    Split ``items`` into consecutive lists of at most ``size`` elements,
    preserving order.
    """
    if size < 1:
        raise ValueError("Chunk size must be positive, got %d" % size)
    iterator = iter(items)
    while chunk := list(itertools.islice(iterator, size)):
        yield chunk
