"""Keyed, counter-based random streams.

Every stream is a Philox generator whose key is derived from
``(seed, role, *extra)`` through :class:`numpy.random.SeedSequence`.
Draws inside a stream are consumed in a fixed (row-major) order, so the
value at a given entry index depends only on the key and the index,
never on scheduling or thread counts.
"""

import numpy as np

# Stable integer tags for the roles a stream can play.
ROLES = {
    "goe": 1,
    "antisym": 2,
    "growth": 3,
    "limit": 4,
    "replication": 5,
    "probe": 6,
}


def _role_id(role):
    if isinstance(role, str):
        try:
            return ROLES[role]
        except KeyError:
            raise KeyError(f"unknown stream role {role!r}") from None
    return int(role)


def stream(seed, role, *extra):
    """Return a fresh generator keyed by ``(seed, role, *extra)``."""
    key = (_role_id(role),) + tuple(int(e) for e in extra)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master, index):
    """64-bit seed for replication ``index`` of a run keyed by ``master``."""
    ss = np.random.SeedSequence(
        entropy=int(master) & (2**64 - 1),
        spawn_key=(ROLES["replication"], int(index)),
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])
