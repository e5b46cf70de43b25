import numpy as np


def signed_area(pts: np.ndarray) -> float:
    """Shoelace area of a closed loop; positive for counter-clockwise order."""
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def interior_angles_deg(pts: np.ndarray) -> np.ndarray:
    """Interior angle at every vertex of a closed loop, in degrees [0, 360)."""
    orientation = 1.0 if signed_area(pts) >= 0 else -1.0
    to_prev = np.roll(pts, 1, axis=0) - pts
    to_next = np.roll(pts, -1, axis=0) - pts

    cross = to_next[:, 0] * to_prev[:, 1] - to_next[:, 1] * to_prev[:, 0]
    dot = (to_next * to_prev).sum(axis=1)
    return np.degrees(np.arctan2(orientation * cross, dot)) % 360.0


def merge_duplicates(pts, tol: float):
    """Drop consecutive (cyclically) near-identical points, keeping the first."""
    merged = []
    for p in pts:
        if merged and _close(merged[-1], p, tol):
            continue
        merged.append(p)
    while len(merged) > 1 and _close(merged[-1], merged[0], tol):
        merged.pop()
    return merged


def _close(a, b, tol: float) -> bool:
    return float(np.hypot(a.x - b.x, a.y - b.y)) < tol
