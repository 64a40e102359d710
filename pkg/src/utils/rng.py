"""
Random stream utilities.

All randomness flows from one master seed. Child streams are derived with
numpy's SeedSequence spawn keys so that a stream depends only on
(master seed, key) and never on the order in which other streams are used.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def _seed_sequence(seed: int, key: int) -> np.random.SeedSequence:
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    return np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=(int(key),))


def node_rng(seed: int, node_index: int) -> np.random.Generator:
    """
    Return the generator that feeds one node column of one simulated dataset.

    Args:
        seed: Dataset seed
        node_index: Position of the node in the validated (topological) order

    Returns:
        numpy Generator private to that node
    """
    return np.random.default_rng(_seed_sequence(seed, node_index))


def child_seed(master_seed: int, replication: int) -> int:
    """Derive the 64-bit dataset seed of one Monte Carlo replication."""
    state = _seed_sequence(master_seed, replication).generate_state(1, dtype=np.uint64)
    return int(state[0])
