import logging
import sys
from collections.abc import Callable, Iterable, Iterator, Mapping
from os import PathLike
from pathlib import Path
from types import TracebackType
from typing import IO, Any, Self

import orjson

from ..errors import RecordParseError

logger = logging.getLogger(__name__)

STDIO = "-"


def create_parents_or_fail(
    path: PathLike | str,
    overwrite: bool = False,
    create_parents: bool = True,
):
    """Make sure `path` can be written.

    Raises
    ------
    OSError
        If a file already exists and `overwrite` is False, or the parent directory
        is missing and `create_parents` is False
    """
    path = Path(path)
    if path.exists():
        if not overwrite:
            raise OSError(
                f"Cannot write file to {path}; a file already exists there. To "
                "overwrite it, pass `overwrite=True`."
            )
    else:
        if not path.parent.exists():
            if create_parents:
                path.parent.mkdir(parents=True, exist_ok=True)
            else:
                raise OSError(
                    f"Parent directory {path.parent} does not exist. Aborting. "
                    "To create the parent directory, pass `create_parents=True`."
                )


def _identity(data: dict[str, Any]) -> dict[str, Any]:
    return data


class JsonlReader[T]:
    """Stream records from a JSON Lines file, one line at a time.

    In strict mode the first bad line raises; in lenient mode bad lines are logged,
    counted in `skipped` and left out. Blank lines are ignored.

    Parameters
    ----------
    path : PathLike | str
        File to read, or "-" for standard input
    parse : Callable[[dict[str, Any]], T]
        Turns each decoded object into a record; raising `KeyError`, `TypeError` or
        `ValueError` marks the line as bad
    strict : bool
        Whether a bad line aborts the read
    """

    def __init__(
        self,
        path: PathLike | str,
        parse: Callable[[dict[str, Any]], T] = _identity,
        strict: bool = True,
    ):
        self.path = path
        self.parse = parse
        self.strict = strict
        self.skipped = 0
        self.read = 0

    def _lines(self) -> Iterator[bytes]:
        if str(self.path) == STDIO:
            yield from sys.stdin.buffer
            return
        with open(self.path, "rb") as f:
            yield from f

    def _parse_line(self, line: bytes, lineno: int) -> T:
        try:
            data = orjson.loads(line)
        except orjson.JSONDecodeError as e:
            raise RecordParseError(self.path, lineno, f"invalid JSON: {e}") from e
        if not isinstance(data, dict):
            raise RecordParseError(self.path, lineno, "expected a JSON object")
        try:
            return self.parse(data)
        except KeyError as e:
            raise RecordParseError(self.path, lineno, f"missing field {e}") from e
        except (TypeError, ValueError) as e:
            raise RecordParseError(self.path, lineno, str(e)) from e

    def __iter__(self) -> Iterator[T]:
        for lineno, line in enumerate(self._lines(), start=1):
            if not line.strip():
                continue
            try:
                record = self._parse_line(line, lineno)
            except RecordParseError as e:
                if self.strict:
                    raise
                self.skipped += 1
                logger.warning("Skipping %s", e)
                continue
            self.read += 1
            yield record


def read_jsonl[T](
    path: PathLike | str,
    parse: Callable[[dict[str, Any]], T] = _identity,
    strict: bool = True,
) -> Iterator[T]:
    """Stream the records of a JSON Lines file.

    Use `JsonlReader` directly to find out how many lines were skipped.
    """
    yield from JsonlReader(path, parse, strict)


class JsonlWriter:
    """Write JSON objects as lines to a file or standard output.

    Parameters
    ----------
    path : PathLike | str | None
        Output file; "-" or None writes to standard output
    overwrite : bool
        If True, overwrite an existing file
    create_parents : bool
        If True, create any necessary parent directories
    """

    def __init__(
        self,
        path: PathLike | str | None = None,
        overwrite: bool = False,
        create_parents: bool = True,
    ):
        self.path = STDIO if path is None else path
        self.overwrite = overwrite
        self.create_parents = create_parents
        self.written = 0
        self._file: IO[bytes] | None = None

    def __enter__(self) -> Self:
        if str(self.path) == STDIO:
            self._file = sys.stdout.buffer
        else:
            create_parents_or_fail(self.path, self.overwrite, self.create_parents)
            self._file = open(self.path, "wb")  # noqa: SIM115
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ):
        if self._file is None:
            return
        if self._file is sys.stdout.buffer:
            self._file.flush()
        else:
            self._file.close()
        self._file = None

    def write(self, record: Mapping[str, Any]):
        """Write one object as a line."""
        if self._file is None:
            raise RuntimeError("JsonlWriter must be used as a context manager.")
        self._file.write(orjson.dumps(record, option=orjson.OPT_APPEND_NEWLINE))
        self.written += 1


def write_jsonl(
    records: Iterable[Mapping[str, Any]],
    path: PathLike | str | None = None,
    overwrite: bool = False,
    create_parents: bool = True,
) -> int:
    """Write objects as JSON Lines.

    Parameters
    ----------
    records : Iterable[Mapping[str, Any]]
        Objects to write, consumed lazily
    path : PathLike | str | None
        Output file; "-" or None writes to standard output
    overwrite : bool
        If True, overwrite an existing file
    create_parents : bool
        If True, create any necessary parent directories

    Returns
    -------
    int
        Number of lines written
    """
    with JsonlWriter(path, overwrite, create_parents) as writer:
        for record in records:
            writer.write(record)
    return writer.written
