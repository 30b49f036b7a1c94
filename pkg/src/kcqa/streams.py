"""Small helpers for path-or-stream arguments and optional gzip."""

from __future__ import annotations

import gzip
import io
from contextlib import contextmanager
from pathlib import Path
from typing import BinaryIO, Iterator, Union

Source = Union[str, Path, BinaryIO]


def _wants_gzip(path: Path, gzipped: bool | None) -> bool:
    if gzipped is not None:
        return gzipped
    return path.suffix == ".gz"


@contextmanager
def open_bytes_source(source: Source, gzipped: bool | None = None) -> Iterator[BinaryIO]:
    """Yield a readable binary stream; paths infer gzip from a .gz suffix."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if _wants_gzip(path, gzipped):
            with gzip.open(path, "rb") as fh:
                yield fh
        else:
            with open(path, "rb") as fh:
                yield fh
    else:
        if gzipped:
            with gzip.GzipFile(fileobj=source, mode="rb") as fh:
                yield fh  # type: ignore[misc]
        else:
            yield source


@contextmanager
def open_bytes_sink(target: Source, gzipped: bool | None = None) -> Iterator[BinaryIO]:
    """Yield a writable binary stream.

    Gzip members are written with mtime=0 so identical data produces
    byte-identical files on every run.
    """
    if isinstance(target, (str, Path)):
        path = Path(target)
        if _wants_gzip(path, gzipped):
            with open(path, "wb") as raw:
                with gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as fh:
                    yield fh  # type: ignore[misc]
        else:
            with open(path, "wb") as fh:
                yield fh
    else:
        if gzipped:
            with gzip.GzipFile(filename="", fileobj=target, mode="wb", mtime=0) as fh:
                yield fh  # type: ignore[misc]
        else:
            yield target


def text_lines(stream: BinaryIO) -> Iterator[str]:
    """Decode a binary stream to utf-8 lines without reading it all at once."""
    return iter(io.TextIOWrapper(stream, encoding="utf-8"))
