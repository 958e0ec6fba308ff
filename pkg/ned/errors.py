"""Exception hierarchy shared by every pipeline stage.

Each class carries the process exit code the CLI uses when the error
escapes a subcommand: 1 usage, 2 input schema, 3 internal.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union


class NedError(Exception):
    exit_code = 3


class ConfigError(NedError):
    exit_code = 1


class InputError(NedError):
    exit_code = 2


class EmptyTitle(InputError):
    def __init__(self, raw: str):
        super().__init__(f"title is empty after canonicalization: {raw!r}")
        self.raw = raw


class MalformedRow(InputError):
    def __init__(self, path: Union[str, Path, None], line_no: int, reason: str):
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class UnresolvableTarget(InputError):
    def __init__(self, target: str, line_no: Optional[int] = None):
        suffix = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"cannot resolve link target {target!r}{suffix}")
        self.target = target
        self.line_no = line_no


class SchemaMismatch(InputError):
    pass


class MentionNotFound(InputError):
    def __init__(self, mention: str):
        super().__init__(f"mention {mention!r} does not occur in the document")
        self.mention = mention


class DocumentNotFound(InputError):
    def __init__(self, docid: str):
        super().__init__(f"document {docid!r} not found")
        self.docid = docid


class NoCandidates(NedError):
    def __init__(self, string: str):
        super().__init__(f"no candidate entities for {string!r}")
        self.string = string


class DegenerateTraining(NedError):
    pass


class NoAnswer(NedError):
    pass
