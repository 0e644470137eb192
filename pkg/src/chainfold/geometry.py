"""Integer lattice geometry: cells, proper rotations, mirrors.

Rotations are 3x3 integer matrices stored as nested tuples so they can be
dict keys and set members. The two generators fix the handedness of every
convention downstream:

    RX90: (x, y, z) -> (x, -z, y)
    RZ90: (x, y, z) -> (-y, x, z)
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

Cell = tuple[int, int, int]
Rot = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

IDENTITY: Rot = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
RX90: Rot = ((1, 0, 0), (0, 0, -1), (0, 1, 0))
RZ90: Rot = ((0, -1, 0), (1, 0, 0), (0, 0, 1))

# Improper transforms (det -1), used only for symmetry checks.
MIRROR_Y: Rot = ((1, 0, 0), (0, -1, 0), (0, 0, 1))
MIRROR_Z: Rot = ((1, 0, 0), (0, 1, 0), (0, 0, -1))


def apply(rot: Rot, cell: Cell) -> Cell:
    """Apply a rotation matrix to a cell (matrix times column vector)."""
    x, y, z = cell
    return (
        rot[0][0] * x + rot[0][1] * y + rot[0][2] * z,
        rot[1][0] * x + rot[1][1] * y + rot[1][2] * z,
        rot[2][0] * x + rot[2][1] * y + rot[2][2] * z,
    )


def compose(a: Rot, b: Rot) -> Rot:
    """Matrix product a @ b: the transform that applies b first, then a."""
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )  # type: ignore[return-value]


def inverse(rot: Rot) -> Rot:
    # Orthogonal with integer entries, so the inverse is the transpose.
    return tuple(tuple(rot[j][i] for j in range(3)) for i in range(3))  # type: ignore[return-value]


def power(rot: Rot, n: int) -> Rot:
    out = IDENTITY
    if n < 0:
        rot, n = inverse(rot), -n
    for _ in range(n):
        out = compose(rot, out)
    return out


def rotate_x(cell: Cell, quarter_turns: int = 1) -> Cell:
    return apply(power(RX90, quarter_turns), cell)


def rotate_z(cell: Cell, quarter_turns: int = 1) -> Cell:
    return apply(power(RZ90, quarter_turns), cell)


def translate(cells: Iterable[Cell], offset: Cell) -> list[Cell]:
    dx, dy, dz = offset
    return [(x + dx, y + dy, z + dz) for x, y, z in cells]


def cross(a: Cell, b: Cell) -> Cell:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dot(a: Cell, b: Cell) -> int:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@lru_cache(maxsize=1)
def rotation_group() -> frozenset[Rot]:
    """The proper rotation group of the cubic lattice, generated by closure.

    Starts from the two quarter-turn generators and multiplies until no new
    elements appear. The result has exactly 24 elements; a test pins that.
    """
    group: set[Rot] = {IDENTITY, RX90, RZ90}
    frontier = list(group)
    while frontier:
        nxt: list[Rot] = []
        for g in frontier:
            for gen in (RX90, RZ90):
                h = compose(gen, g)
                if h not in group:
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    return frozenset(group)


def bounding_box(cells: Iterable[Cell]) -> tuple[Cell, Cell]:
    """(min_corner, max_corner) of a non-empty cell collection."""
    cells = list(cells)
    if not cells:
        raise ValueError("bounding_box of empty cell set")
    xs, ys, zs = zip(*cells)
    return (min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs))
