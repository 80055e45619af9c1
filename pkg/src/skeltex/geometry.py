"""Joint/line geometry. All functions broadcast over leading axes; the last axis is xyz."""
import numpy as np

EPS = 1e-9


def jj_distance(p_j, p_k):
    """Euclidean distance between two joints."""
    return np.linalg.norm(np.subtract(p_j, p_k), axis=-1)


def jj_vector(p_j, p_k):
    return np.subtract(p_j, p_k, dtype=float)


def jj_orientation(p_j, p_k):
    """Unit vector from ``p_k`` to ``p_j``; the zero vector for coincident joints."""
    v = jj_vector(p_j, p_k)
    d = np.linalg.norm(v, axis=-1, keepdims=True)
    ok = d >= EPS
    return np.where(ok, v / np.where(ok, d, 1.0), 0.0)


def jl_distance(p_j, p_k, p_m):
    """Distance from joint ``p_j`` to the infinite line through ``p_k`` and ``p_m``.

    Magnitude of ``(p_j - p_k) x (p_j - p_m)`` over ``|p_k - p_m|``; 0 when the
    line endpoints coincide.
    """
    p_j = np.asarray(p_j, dtype=float)
    area = np.linalg.norm(np.cross(p_j - p_k, p_j - p_m), axis=-1)
    base = jj_distance(p_k, p_m)
    ok = base >= EPS
    return np.where(ok, area / np.where(ok, base, 1.0), 0.0)


def ll_angle(o1, o2):
    """Angle in [0, pi] between two orientations; 0 if either is the zero vector.

    Evaluated as atan2(|o1 x o2|, o1 . o2), which equals arccos of the dot
    product for unit inputs but stays accurate near 0 and pi.
    """
    o1 = np.asarray(o1, dtype=float)
    o2 = np.asarray(o2, dtype=float)
    cross = np.linalg.norm(np.cross(o1, o2), axis=-1)
    dot = np.einsum("...i,...i->...", o1, o2)
    zero = (np.linalg.norm(o1, axis=-1) < EPS) | (np.linalg.norm(o2, axis=-1) < EPS)
    return np.where(zero, 0.0, np.arctan2(cross, dot))
