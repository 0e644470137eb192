"""The appendix chain corpus: versioned fixtures plus cross-machine stats.

Fixtures are verbatim transcriptions; anything hand-corrected must say so
(curated flag plus note). Verification re-checks each fixture against its
recorded expectations instead of trusting the manifest.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .folding import CollisionError, FoldedStructure, fold
from .geometry import MIRROR_Z, apply, cross, dot
from .mdl import Chain, MdlError, parse_mdl

ENV_FIXTURES = "CHAINFOLD_FIXTURES"

# the builder's hand-made counterpart fills a 4 x 5 x 7 scaffold
BUILD_VOLUME_BLOCKS = 140

# machines whose blocks the replication genome must spell out
GENOME_ROLES = ("copier", "decoder", "recycler", "sorter")


def fixtures_dir() -> Path:
    override = os.environ.get(ENV_FIXTURES)
    if override:
        return Path(override)
    return Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class Fixture:
    id: str
    path: Path
    mdl: str
    curated: bool
    note: str | None
    expected: dict

    @property
    def chain(self) -> Chain:
        return parse_mdl(self.mdl)

    @property
    def tags(self) -> dict:
        return self.expected.get("tags", {})


def load_manifest(directory: str | Path | None = None) -> dict[str, Fixture]:
    d = Path(directory) if directory is not None else fixtures_dir()
    raw = json.loads((d / "manifest.json").read_text(encoding="utf-8"))
    out: dict[str, Fixture] = {}
    for item in raw["fixtures"]:
        path = d / item["file"]
        fx = Fixture(
            id=item["id"],
            path=path,
            mdl=path.read_text(encoding="utf-8"),
            curated=bool(item.get("curated", False)),
            note=item.get("note"),
            expected=item.get("expected", {}),
        )
        if fx.id in out:
            raise ValueError(f"duplicate fixture id {fx.id!r}")
        if fx.curated and not fx.note:
            raise ValueError(f"curated fixture {fx.id!r} has no correction note")
        out[fx.id] = fx
    return out


def load_fixture(fixture_id: str, directory: str | Path | None = None) -> Fixture:
    corpus = load_manifest(directory)
    try:
        return corpus[fixture_id]
    except KeyError:
        raise KeyError(
            f"no fixture {fixture_id!r}; corpus has {len(corpus)} entries"
        ) from None


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    fixture_id: str
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _vsub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _helix_strides(structure: FoldedStructure, lead: int, unit: int):
    """Net displacement between successive repeat-unit anchors."""
    cells = structure.cells_by_index()
    starts = list(range(lead, len(cells), unit))
    return [_vsub(cells[b], cells[a]) for a, b in zip(starts, starts[1:])]


def _coplanar(cells) -> bool:
    cells = list(cells)
    if len(cells) < 4:
        return True
    origin = cells[0]
    u = None
    normal = None
    for c in cells[1:]:
        v = _vsub(c, origin)
        if v == (0, 0, 0):
            continue
        if u is None:
            u = v
            continue
        n = cross(u, v)
        if n != (0, 0, 0):
            normal = n
            break
    if normal is None:
        return True  # collinear
    return all(dot(normal, _vsub(c, origin)) == 0 for c in cells)


def _mirrored_cells(structure: FoldedStructure) -> dict[int, tuple]:
    raw = {i: apply(MIRROR_Z, c) for i, c in structure.cells_by_index().items()}
    lo = tuple(min(c[a] for c in raw.values()) for a in range(3))
    return {i: _vsub(c, lo) for i, c in raw.items()}


def verify_fixture(
    fixture: Fixture, corpus: dict[str, Fixture] | None = None
) -> VerifyReport:
    """Re-derive every recorded expectation; failures are reported, not raised."""
    checks: list[Check] = []
    try:
        chain = parse_mdl(fixture.mdl)
    except MdlError as exc:
        return VerifyReport(fixture.id, (Check("parses", False, str(exc)),))
    checks.append(Check("parses", True, f"{len(chain)} tokens"))

    want_count = fixture.expected.get("token_count")
    if want_count is not None:
        checks.append(
            Check(
                "token_count",
                len(chain) == want_count,
                f"{len(chain)} counted, {want_count} recorded",
            )
        )

    try:
        structure = fold(chain)
        free = True
        fold_detail = "collision-free"
    except CollisionError as exc:
        structure = fold(chain, permissive=True)
        free = False
        fold_detail = str(exc)
    want_free = fixture.expected.get("collision_free")
    if want_free is None:
        checks.append(Check("folds", True, fold_detail))
    else:
        checks.append(Check("collision_free", free == want_free, fold_detail))

    tags = fixture.tags
    if "helix" in tags:
        strides = _helix_strides(structure, tags["helix"]["lead"], tags["helix"]["unit"])
        ok = len(set(strides)) == 1 and len(strides) >= 2
        checks.append(Check("helix", ok, f"strides {sorted(set(strides))}"))
    if tags.get("sheet"):
        ok = _coplanar(structure.occupancy.keys())
        checks.append(Check("sheet", ok, "coplanar" if ok else "not coplanar"))
    if "mirror_of" in tags:
        other_id = tags["mirror_of"]
        others = corpus if corpus is not None else load_manifest(fixture.path.parent)
        try:
            other = fold(others[other_id].chain)
            ok = _mirrored_cells(other) == structure.cells_by_index()
            detail = f"z-mirror of {other_id}" if ok else f"differs from mirrored {other_id}"
        except (KeyError, CollisionError) as exc:
            ok, detail = False, f"cannot mirror against {other_id}: {exc}"
        checks.append(Check("mirror_of", ok, detail))
    return VerifyReport(fixture.id, tuple(checks))


def verify_corpus(
    directory: str | Path | None = None,
) -> dict[str, VerifyReport]:
    corpus = load_manifest(directory)
    return {fid: verify_fixture(fx, corpus) for fid, fx in corpus.items()}


def corpus_stats(directory: str | Path | None = None) -> dict:
    """Block counts per machine and the two headline ratios.

    The genome estimate charges one codon per block across the machines a
    self-replicator must describe (copier, decoder, recyclers, sorter).
    """
    corpus = load_manifest(directory)
    counts = {fid: len(fx.chain) for fid, fx in corpus.items()}

    per_machine: dict[str, dict] = {}
    for fid, fx in corpus.items():
        role = fx.tags.get("machine_role")
        if role is None:
            continue
        entry = per_machine.setdefault(role, {"fixtures": [], "blocks": 0})
        entry["fixtures"].append(fid)
        entry["blocks"] += counts[fid]
    for entry in per_machine.values():
        entry["fixtures"].sort()

    builder_ratio = (
        BUILD_VOLUME_BLOCKS / counts["fig11a"] if "fig11a" in counts else None
    )
    genome = sum(
        per_machine.get(role, {"blocks": 0})["blocks"] for role in GENOME_ROLES
    )
    fig31_lengths = {
        fid: n for fid, n in sorted(counts.items()) if fid.startswith("fig31")
    }
    return {
        "fixture_count": len(corpus),
        "per_machine_blocks": per_machine,
        "builder_ratio": builder_ratio,
        "genome_estimate_codons": genome,
        "fig31_lengths": fig31_lengths,
        "type_reduction": {
            "gluer_directions": {"before": 6, "after": 1},
            "mover_type_factor": 3,
            "sorter_type_factor": 2,
            "census_74_to_31": "composition not derivable from corpus alone",
        },
    }
