from typing import Dict, List, Optional, Sequence, Union

from loguru import logger

from edgeplan.core.exceptions import (
    CapacityMismatch,
    DegenerateEdge,
    TooFewVertices,
    TooManyEdges,
    TooManyRooms,
)
from edgeplan.core.models import (
    DirectedEdge,
    EdgeToken,
    Floorplan,
    ModelCapacity,
    Point2,
    RoomEdgeSequence,
    Violation,
    ViolationKind,
)
from edgeplan.polygonization.models import PolygonVertices


def make_room(
    edges: Sequence[DirectedEdge], capacity: ModelCapacity
) -> RoomEdgeSequence:
    """Tokenize ``edges`` (in order) and pad the room up to ``capacity.N``.

    An empty edge list yields a mock room.
    """
    if len(edges) > capacity.N:
        raise TooManyEdges(len(edges), capacity.N)

    for i, e in enumerate(edges):
        if e.is_degenerate():
            raise DegenerateEdge(index=i)

    tokens = [EdgeToken(edge=e, validity=1) for e in edges]
    tokens.extend([EdgeToken.padding()] * (capacity.N - len(edges)))
    return RoomEdgeSequence(tokens=tokens)


def make_mock_room(capacity: ModelCapacity) -> RoomEdgeSequence:
    return RoomEdgeSequence(tokens=[EdgeToken.padding()] * capacity.N)


def make_floorplan(
    rooms: Sequence[RoomEdgeSequence],
    capacity: ModelCapacity,
    scene_id: Optional[str] = None,
    metadata: Optional[Dict[str, str]] = None,
) -> Floorplan:
    """Assemble a floorplan of exactly ``capacity.M`` rooms, padding with mocks."""
    if len(rooms) > capacity.M:
        raise TooManyRooms(len(rooms), capacity.M)

    for r in rooms:
        if r.capacity != capacity.N:
            raise CapacityMismatch(capacity.N, r.capacity)

    padded = list(rooms) + [make_mock_room(capacity)] * (capacity.M - len(rooms))
    return Floorplan(rooms=padded, scene_id=scene_id, metadata=metadata or {})


def floorplan_from_edge_lists(
    rooms: Sequence[Sequence[DirectedEdge]],
    capacity: ModelCapacity,
    scene_id: Optional[str] = None,
) -> Floorplan:
    return make_floorplan(
        [make_room(edges, capacity) for edges in rooms], capacity, scene_id=scene_id
    )


def edges_from_vertex_loop(
    vertices: Union[PolygonVertices, Sequence[Point2]]
) -> List[DirectedEdge]:
    """Turn a closed vertex loop into its directed edges.

    Edge ``i`` runs from vertex ``i`` to vertex ``i + 1``; the last edge closes
    the loop back to the first vertex.
    """
    pts = vertices.vertices if isinstance(vertices, PolygonVertices) else vertices
    pts = [p if isinstance(p, Point2) else Point2.from_tuple(p) for p in pts]

    if len(pts) < 3:
        raise TooFewVertices(len(pts))

    k = len(pts)
    edges = []
    for i in range(k):
        e = DirectedEdge(p1=pts[i], p2=pts[(i + 1) % k])
        if e.is_degenerate():
            raise DegenerateEdge(index=i)
        edges.append(e)
    return edges


def rotate_room(room: RoomEdgeSequence, r: int) -> RoomEdgeSequence:
    """Cyclically rotate the valid prefix by ``r``; padding stays at the tail.

    Token ``i`` of the result is valid edge ``(i + r) mod valid_count``.
    """
    valid = [t for t in room.tokens if t.is_valid]
    if not valid:
        return room
    k = len(valid)
    r %= k
    rotated = valid[r:] + valid[:r]
    return RoomEdgeSequence(tokens=rotated + room.tokens[k:])


def reverse_room(room: RoomEdgeSequence) -> RoomEdgeSequence:
    """Traverse the valid prefix in the opposite direction."""
    valid = [t for t in room.tokens if t.is_valid]
    flipped = [EdgeToken(edge=t.edge.reversed(), validity=1) for t in reversed(valid)]
    return RoomEdgeSequence(tokens=flipped + room.tokens[len(valid) :])


def validate_floorplan(fp: Floorplan) -> List[Violation]:
    """Collect every invariant violation; an empty list means well-formed."""
    violations = []

    for m, room in enumerate(fp.rooms):
        seen_padding = False
        for n, token in enumerate(room.tokens):
            if not token.is_valid:
                seen_padding = True
                continue

            if seen_padding:
                violations.append(
                    Violation(
                        kind=ViolationKind.PADDING_ORDER,
                        room=m,
                        index=n,
                        detail="valid token follows a padding token",
                    )
                )

            edge = token.edge
            if edge.is_degenerate():
                violations.append(
                    Violation(
                        kind=ViolationKind.DEGENERATE_EDGE,
                        room=m,
                        index=n,
                        detail=f"p1 == p2 == {edge.p1.as_tuple()}",
                    )
                )

            for p in (edge.p1, edge.p2):
                if not p.in_unit_square():
                    violations.append(
                        Violation(
                            kind=ViolationKind.OUT_OF_RANGE,
                            room=m,
                            index=n,
                            detail=f"coordinate {p.as_tuple()} outside [0,1]^2",
                        )
                    )

    if violations:
        logger.debug(f"validate_floorplan: {len(violations)} violation(s)")

    return violations
