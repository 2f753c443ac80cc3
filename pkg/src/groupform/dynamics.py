"""The evolution step: gradient repulsion plus merge-on-collision.

Each neighbor pushes an occupied cell away from itself at a distance
equal to the neighbor's size, so the net move is minus the central
difference of the surrounding occupancies: the group at ``k`` jumps to
``k - (T(k+1) - T(k-1))`` on a 1D torus, componentwise on a 2D torus.
Groups landing in the same cell merge by summing. Displacements of any
magnitude are legal and wrap around the torus.

``step`` is the vectorized kernel used everywhere; ``step_oracle`` is a
deliberately naive reference that tests every (target, source) pair
against the defining condition, kept around purely for equivalence
testing.
"""

from __future__ import annotations

import numpy as np

from .lattice import LatticeState, wrap

# One signed displacement per axis, in cells per step.
Displacement = tuple[int, ...]


def gradient(state: LatticeState, k) -> Displacement:
    """Central difference of the occupancy around cell ``k``, per axis.

    This is the displacement the group in ``k`` is pushed by: a larger
    right neighbor gives a positive component, moving the group left.
    """
    k = wrap(state.shape, k)
    v = state.values
    comps = []
    for axis, d in enumerate(state.shape.dims):
        up = list(k)
        dn = list(k)
        up[axis] = (k[axis] + 1) % d
        dn[axis] = (k[axis] - 1) % d
        comps.append(int(v[tuple(up)]) - int(v[tuple(dn)]))
    return tuple(comps)


def _central_differences(values: np.ndarray) -> list[np.ndarray]:
    """Per-axis central difference arrays; the displacement field."""
    return [
        np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)
        for axis in range(values.ndim)
    ]


def _scatter_merge(state: LatticeState, grads: list[np.ndarray]) -> LatticeState:
    """Move every occupied cell by minus its displacement and merge collisions.

    Generic over the displacement field; only the central difference ships.
    """
    v = state.values
    dims = state.shape.dims
    nonzero = v != 0
    sources = np.nonzero(nonzero)
    # reduce the displacement modulo the axis first: the raw difference
    # src - g could overflow int64 for occupancies near 2**63
    targets = tuple(
        (src - g[nonzero] % d) % d for src, g, d in zip(sources, grads, dims)
    )
    out = np.zeros(dims, dtype=np.int64)
    np.add.at(out.reshape(-1), np.ravel_multi_index(targets, dims), v[nonzero])
    result = LatticeState(state.shape, out)
    if result.total_mass() != state.total_mass():
        raise OverflowError("accumulation overflow: mass not conserved by step")
    return result


def step(state: LatticeState) -> LatticeState:
    """Advance the state one tick; total mass is conserved exactly.

    Only occupied cells are visited: each scatters its value onto
    ``wrap(k - gradient(k))`` and deposits on a common target accumulate.
    """
    return _scatter_merge(state, _central_differences(state.values))


def step_oracle(state: LatticeState) -> LatticeState:
    """Literal reference step: double loop over all (target, source) pairs.

    For every cell pair the defining condition "source minus target equals
    the central difference at the source, modulo the torus" is evaluated
    directly, with no skipping of empty cells and no precomputation.
    """
    dims = state.shape.dims
    if len(dims) == 1:
        (m1,) = dims
        t = state.values.tolist()
        out = [0] * m1
        for m in range(m1):
            acc = 0
            for k in range(m1):
                g = t[(k + 1) % m1] - t[(k - 1) % m1]
                if (k - m - g) % m1 == 0:
                    acc += t[k]
            out[m] = acc
    else:
        m1, m2 = dims
        t = state.values.tolist()
        out = [[0] * m2 for _ in range(m1)]
        for a in range(m1):
            for b in range(m2):
                acc = 0
                for x in range(m1):
                    row = t[x]
                    up = t[(x + 1) % m1]
                    dn = t[(x - 1) % m1]
                    for y in range(m2):
                        g1 = up[y] - dn[y]
                        g2 = row[(y + 1) % m2] - row[(y - 1) % m2]
                        if (x - a - g1) % m1 == 0 and (y - b - g2) % m2 == 0:
                            acc += row[y]
                out[a][b] = acc
    return LatticeState(state.shape, np.asarray(out, dtype=np.int64))
