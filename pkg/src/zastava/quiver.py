from __future__ import annotations

import functools
import re
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from zastava.exactalg import Ambient, LinearForm, Variable

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping

__all__ = [
    "DimVector",
    "NotQuiverType",
    "Quiver",
    "QuiverSyntaxError",
    "SymMatrix",
    "kappa_of",
    "parse_kappa",
    "parse_quiver",
    "quiver_of_kappa",
    "weights_of_N",
]

VERTEX_ID = re.compile(r"[A-Za-z0-9_]+")


class QuiverSyntaxError(ValueError):
    def __init__(self, message: str, lineno: int) -> None:
        super().__init__("line %d: %s" % (lineno, message))
        self.lineno = lineno


class NotQuiverType(ValueError):
    """The symmetric matrix does not come from any quiver."""


def _check_vertex_id(vertex: str) -> None:
    if not VERTEX_ID.fullmatch(vertex):
        raise ValueError("Invalid vertex id %r" % vertex)


@dataclass(frozen=True)
class Quiver:
    """
    A finite quiver: ordered vertex ids and a multiset of directed edges,
    given as a tuple of ``(source, target)`` pairs. Loops are allowed.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("Quiver vertices must be distinct")
        for vertex in self.vertices:
            _check_vertex_id(vertex)
        known = set(self.vertices)
        for source, target in self.edges:
            if source not in known or target not in known:
                raise ValueError(
                    "Edge %s -> %s has an endpoint outside the quiver"
                    % (source, target)
                )

    def __str__(self) -> str:
        return to_text(self)

    @functools.cached_property
    def _counts(self) -> Counter[tuple[str, str]]:
        return Counter(self.edges)

    def loops(self, vertex: str) -> int:
        return self._counts[vertex, vertex]

    def arrows(self, source: str, target: str) -> int:
        return self._counts[source, target]

    def between(self, i: str, j: str) -> int:
        """Number of edges joining distinct vertices, in either direction."""
        return self._counts[i, j] + self._counts[j, i]

    @property
    def is_edge_free(self) -> bool:
        return not self.edges

    def order(self, vertex: str) -> int:
        return self.vertices.index(vertex)

    def with_edges(self, edges: Iterable[tuple[str, str]]) -> Quiver:
        return Quiver(self.vertices, tuple(edges))


@functools.lru_cache(maxsize=None)
def _get_ambient(entries: tuple[tuple[str, int], ...]) -> Ambient:
    return Ambient(
        Variable(vertex, slot)
        for vertex, n in entries
        for slot in range(1, n + 1)
    )


@dataclass(frozen=True)
class DimVector:
    """
    A dimension vector ``(n_i)``. Entries keep the vertex order they were
    given in, which is also the order of the coordinates ``a_<i>_<slot>``.
    """

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for vertex, n in self.entries:
            _check_vertex_id(vertex)
            if vertex in seen:
                raise ValueError("Vertex %s appears twice" % vertex)
            if n < 0:
                raise ValueError("Dimension at %s must be nonnegative" % vertex)
            seen.add(vertex)

    @classmethod
    def of(cls, data: Mapping[str, int] | Iterable[tuple[str, int]]) -> DimVector:
        items = data.items() if hasattr(data, "items") else data
        return cls(tuple((str(v), int(n)) for v, n in items))

    @classmethod
    def for_quiver(
        cls,
        quiver: Quiver | SymMatrix,
        data: Mapping[str, int],
    ) -> DimVector:
        """
        Align ``data`` with the vertex order of ``quiver``; vertices that are
        not mentioned get dimension zero.
        """
        unknown = set(data) - set(quiver.vertices)
        if unknown:
            raise ValueError(
                "Unknown vertices in dimension vector: %s" % ", ".join(sorted(unknown))
            )
        return cls(tuple((v, int(data.get(v, 0))) for v in quiver.vertices))

    def __getitem__(self, vertex: str) -> int:
        for v, n in self.entries:
            if v == vertex:
                return n
        raise KeyError(vertex)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.entries)

    def __str__(self) -> str:
        return ",".join("%s=%d" % item for item in self.entries)

    def __le__(self, other: DimVector) -> bool:
        if self.vertices != other.vertices:
            raise ValueError("Dimension vectors over different vertex sets")
        return all(n <= m for (_, n), (_, m) in zip(self.entries, other.entries))

    def __add__(self, other: DimVector) -> DimVector:
        if self.vertices != other.vertices:
            raise ValueError("Dimension vectors over different vertex sets")
        return DimVector(
            tuple((v, n + m) for (v, n), (_, m) in zip(self.entries, other.entries))
        )

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.entries)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.entries)

    def zero(self) -> DimVector:
        return DimVector(tuple((v, 0) for v in self.vertices))

    def slots(self, vertex: str) -> range:
        return range(1, self[vertex] + 1)

    def variables(self, vertex: str | None = None) -> tuple[Variable, ...]:
        if vertex is None:
            return self.ambient().variables
        return tuple(Variable(vertex, slot) for slot in self.slots(vertex))

    def ambient(self) -> Ambient:
        return _get_ambient(self.entries)


@dataclass(frozen=True)
class SymMatrix:
    """A symmetric integer matrix indexed by vertex ids."""

    vertices: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        size = len(self.vertices)
        if len(set(self.vertices)) != size:
            raise ValueError("Matrix vertices must be distinct")
        for vertex in self.vertices:
            _check_vertex_id(vertex)
        if len(self.rows) != size or any(len(row) != size for row in self.rows):
            raise ValueError("Matrix must be %dx%d" % (size, size))
        for i in range(size):
            for j in range(i):
                if self.rows[i][j] != self.rows[j][i]:
                    raise ValueError(
                        "Matrix is not symmetric at (%s, %s)"
                        % (self.vertices[i], self.vertices[j])
                    )

    def __getitem__(self, key: tuple[str, str]) -> int:
        i, j = key
        return self.rows[self.vertices.index(i)][self.vertices.index(j)]

    @classmethod
    def zero(cls, vertices: Iterable[str]) -> SymMatrix:
        vertices = tuple(vertices)
        return cls(vertices, tuple((0,) * len(vertices) for _ in vertices))

    @property
    def is_quiver_type(self) -> bool:
        size = len(self.vertices)
        return all(
            self.rows[i][j] <= (1 if i == j else 0)
            for i in range(size)
            for j in range(size)
        )


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_quiver(text: str) -> Quiver:
    """
    Parse the line based quiver format::

        # the Kronecker quiver
        vertex 1
        vertex 2
        edge 1 2
        edge 1 2

    Edges may only refer to vertices declared on earlier lines.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        keyword, *args = line.split()
        if keyword == "vertex":
            if len(args) != 1:
                raise QuiverSyntaxError("expected 'vertex <id>'", lineno)
            (vertex,) = args
            if not VERTEX_ID.fullmatch(vertex):
                raise QuiverSyntaxError("invalid vertex id %r" % vertex, lineno)
            if vertex in vertices:
                raise QuiverSyntaxError("vertex %s declared twice" % vertex, lineno)
            vertices.append(vertex)
        elif keyword == "edge":
            if len(args) != 2:  # noqa: PLR2004
                raise QuiverSyntaxError("expected 'edge <src> <dst>'", lineno)
            for vertex in args:
                if vertex not in vertices:
                    raise QuiverSyntaxError("unknown vertex %s" % vertex, lineno)
            edges.append((args[0], args[1]))
        else:
            raise QuiverSyntaxError("unknown directive %r" % keyword, lineno)
    if not vertices:
        raise QuiverSyntaxError("no vertices declared", 0)
    return Quiver(tuple(vertices), tuple(edges))


def to_text(quiver: Quiver) -> str:
    lines = ["vertex %s" % v for v in quiver.vertices]
    lines.extend("edge %s %s" % edge for edge in quiver.edges)
    return "\n".join(lines) + "\n"


def parse_kappa(text: str) -> SymMatrix:
    """
    Parse a symmetric matrix: the first line lists vertex ids, each of the
    following lines holds one row of integers.
    """
    lines = [
        (lineno, line)
        for lineno, raw in enumerate(text.splitlines(), start=1)
        if (line := _strip_comment(raw))
    ]
    if not lines:
        raise QuiverSyntaxError("no vertices declared", 0)
    (_, header), *body = lines
    vertices = tuple(header.split())
    rows = []
    for lineno, line in body:
        try:
            rows.append(tuple(int(value) for value in line.split()))
        except ValueError:
            raise QuiverSyntaxError("row must contain integers", lineno) from None
    try:
        return SymMatrix(vertices, tuple(rows))
    except ValueError as exc:
        raise QuiverSyntaxError(str(exc), lines[-1][0]) from exc


def kappa_of(quiver: Quiver) -> SymMatrix:
    vertices = quiver.vertices
    return SymMatrix(
        vertices,
        tuple(
            tuple(
                1 - quiver.loops(i) if i == j else -quiver.between(i, j)
                for j in vertices
            )
            for i in vertices
        ),
    )


def quiver_of_kappa(kappa: SymMatrix) -> Quiver:
    """
    Build a quiver with the given matrix. Arrows between distinct vertices
    point from the earlier vertex to the later one.

    :raises NotQuiverType: If a diagonal entry exceeds one or an off-diagonal
        entry is positive.
    """
    if not kappa.is_quiver_type:
        raise NotQuiverType(
            "Matrix is not of quiver type: diagonal entries must be at most 1"
            " and off-diagonal entries at most 0"
        )
    vertices = kappa.vertices
    edges: list[tuple[str, str]] = []
    for i, source in enumerate(vertices):
        edges.extend([(source, source)] * (1 - kappa.rows[i][i]))
        for j in range(i + 1, len(vertices)):
            edges.extend([(source, vertices[j])] * -kappa.rows[i][j])
    return Quiver(vertices, tuple(edges))


def weights_of_N(
    quiver: Quiver,
    alpha: DimVector,
    *,
    orientation: Literal["source", "target"] = "source",
) -> list[LinearForm]:
    """
    The T-weights of ``N = ⊕ Hom(V_s, V_t)``, one per edge and pair of slots,
    written as ``a_s_l - a_t_j`` (or the reverse when ``orientation`` is
    ``"target"``). Zero weights on loops are left out.
    """
    weights = []
    for source, target in quiver.edges:
        for l in alpha.slots(source):  # noqa: E741
            for j in alpha.slots(target):
                if source == target and l == j:
                    continue
                form = LinearForm(Variable(source, l), Variable(target, j))
                weights.append(form if orientation == "source" else -form)
    return weights
