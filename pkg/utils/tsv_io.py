"""Plain TSV reading/writing: UTF-8, no header, no quoting, one record per line."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ned.errors import MalformedRow

PathLike = Union[str, Path]


def _lines(path: PathLike) -> Iterator[Tuple[int, str]]:
    text = Path(path).read_text(encoding="utf-8")
    # split on \n only; str.splitlines would also break on U+2028 and friends
    for i, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if line.strip():
            yield i, line


def read_rows(
    path: PathLike,
    n_fields: Optional[int] = None,
    *,
    min_fields: Optional[int] = None,
) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line_no, fields) for every non-blank line.

    ``n_fields`` demands an exact field count, ``min_fields`` a lower bound.
    """
    for line_no, line in _lines(path):
        fields = line.split("\t")
        if n_fields is not None and len(fields) != n_fields:
            raise MalformedRow(path, line_no, f"expected {n_fields} fields, saw {len(fields)}")
        if min_fields is not None and len(fields) < min_fields:
            raise MalformedRow(path, line_no, f"expected at least {min_fields} fields, saw {len(fields)}")
        yield line_no, fields


def parse_count(value: str, path: Optional[PathLike], line_no: int) -> int:
    try:
        n = int(value)
    except ValueError:
        raise MalformedRow(path, line_no, f"count is not an integer: {value!r}") from None
    if n < 0:
        raise MalformedRow(path, line_no, f"count is negative: {n}")
    return n


def format_row(fields: Sequence[object]) -> str:
    out = []
    for f in fields:
        s = str(f)
        if "\t" in s or "\n" in s:
            raise ValueError(f"field contains a tab or newline: {s!r}")
        out.append(s)
    return "\t".join(out)


def write_rows(path: PathLike, rows: Iterable[Sequence[object]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [format_row(r) for r in rows]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def render_decimal(value: float, places: int = 4) -> str:
    return f"{value:.{places}f}"
