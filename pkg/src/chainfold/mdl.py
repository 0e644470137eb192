"""Machine description language: tokens, chains, lenient and strict parsing.

A token is one kind character plus up to two parameter characters; the
canonical form is always three characters, underscore padded ("b__",
"M1x"). Corpus text is messier: tokens appear space separated, underscore
separated, juxtaposed ("M24b"), or wrapped across lines mid-chain. The
lenient scanner accepts all of that. Strict mode insists on canonical
3-character packing and is meant for machine-written files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

KIND_CHARS = "bdSGMHhRLZ12"
PARAM_CHARS = "0123456789x_"
# '_' between tokens is a separator; inside a token it is padding.
SEPARATOR_CHARS = " \t\r\n_"
FACE_DIGITS = "012345"


class MdlError(ValueError):
    """Base class for chain-text problems."""


class UnknownKindError(MdlError):
    def __init__(self, position: int, char: str):
        super().__init__(f"unknown kind {char!r} at position {position}")
        self.position = position
        self.char = char


class TruncatedTokenError(MdlError):
    def __init__(self, position: int):
        super().__init__(f"token truncated at position {position}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str
    params: str = "__"
    offset: int = field(default=-1, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KIND_CHARS:
            raise UnknownKindError(self.offset, self.kind)
        if len(self.params) != 2 or any(c not in PARAM_CHARS for c in self.params):
            raise MdlError(f"bad params {self.params!r} for kind {self.kind!r}")

    @property
    def canonical(self) -> str:
        return self.kind + self.params

    def __str__(self) -> str:
        return self.canonical


@dataclass(frozen=True)
class Chain:
    tokens: tuple[Token, ...] = ()
    source: str | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def kinds(self) -> str:
        return "".join(t.kind for t in self.tokens)


def parse_mdl(text: str, strict: bool = False) -> Chain:
    """Scan MDL text into a Chain.

    Lenient rules: a token starts at any kind character; up to two
    following parameter characters are consumed greedily (kind letters are
    never parameters, but digits always are, so "G2 H" is G2_ then H__ and
    "M24b" is M24 then b__); whitespace and stray underscores between
    tokens are skipped; '#' comments run to end of line. Parameters never
    cross whitespace, so line wraps split tokens correctly.

    Strict mode requires every token to be exactly kind + 2 parameter
    characters; separators and comments are still allowed between tokens.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif c in SEPARATOR_CHARS:
            i += 1
        elif c in KIND_CHARS:
            start = i
            i += 1
            if strict:
                params = text[i : i + 2]
                if len(params) < 2 or any(p not in PARAM_CHARS for p in params):
                    raise TruncatedTokenError(start)
                i += 2
            else:
                params = ""
                while i < n and len(params) < 2 and text[i] in PARAM_CHARS:
                    params += text[i]
                    i += 1
                params = params.ljust(2, "_")
            tokens.append(Token(kind=c, params=params, offset=start))
        else:
            raise UnknownKindError(i, c)
    return Chain(tokens=tuple(tokens), source=text)


def write_canonical(chain: Chain) -> str:
    return "".join(t.canonical for t in chain)


def load_mdl(path: str | Path, strict: bool = False) -> Chain:
    return parse_mdl(Path(path).read_text(encoding="utf-8"), strict=strict)


@dataclass(frozen=True)
class AlphabetProfile:
    """A declared token alphabet; 'x' in an entry's parameters is a wildcard."""

    entries: tuple[str, ...]

    def __post_init__(self) -> None:
        for e in self.entries:
            if len(e) != 3 or e[0] not in KIND_CHARS:
                raise MdlError(f"bad profile entry {e!r}")

    @property
    def size(self) -> int:
        return len(self.entries)

    def matches(self, token: Token) -> bool:
        for entry in self.entries:
            if entry[0] != token.kind:
                continue
            if all(e == "x" or e == p for e, p in zip(entry[1:], token.params)):
                return True
        return False


SIX_TYPE_PROFILE = AlphabetProfile(("G0_", "H__", "L__", "R__", "b__", "M1x"))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    index: int
    message: str


def validate(chain: Chain, profile: AlphabetProfile | None = None) -> list[Diagnostic]:
    """Non-fatal lint over a parsed chain."""
    out: list[Diagnostic] = []
    if not chain.tokens:
        out.append(Diagnostic("empty-chain", -1, "chain has no tokens"))
    for i, t in enumerate(chain):
        if t.kind == "M":
            face, phase = t.params
            if face not in FACE_DIGITS or not (phase.isdigit() or phase == "x"):
                out.append(
                    Diagnostic(
                        "mover-params",
                        i,
                        f"mover {t.canonical} needs a face digit 0-5 and a "
                        "phase digit or 'x'",
                    )
                )
        elif t.kind == "G":
            if not t.params[0].isdigit():
                out.append(
                    Diagnostic(
                        "gluer-params", i, f"gluer {t.canonical} missing face digit"
                    )
                )
        if profile is not None and not profile.matches(t):
            out.append(
                Diagnostic(
                    "outside-profile", i, f"{t.canonical} not in declared alphabet"
                )
            )
    return out
