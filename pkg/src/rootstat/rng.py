"""Counter-based splittable random streams for reproducible parallel runs.

Stream derivation is a pure function of (master_seed, replica_index,
stage_tag); there is no sequential generator state to share, so replica
cells can run on any worker in any order and still draw identical values.

Derivation constants (fixed; any implementation following them reproduces
the same streams):

* splitmix64(v): x = (v + 0x9E3779B97F4A7C15) mod 2^64;
  x ^= x >> 30; x *= 0xBF58476D1CE4E5B9; x ^= x >> 27;
  x *= 0x94D049BB133111EB; x ^= x >> 31.
* stage tags hash through 64-bit FNV-1a over their UTF-8 bytes
  (offset 0xCBF29CE484222325, prime 0x100000001B3).
* key words: h1 = splitmix64(master_seed); h2 = splitmix64(h1 ^ replica);
  h3 = splitmix64(h2 ^ fnv1a64(stage)); k0 = splitmix64(h3);
  k1 = splitmix64(k0). (k0, k1) keys a Philox4x64-10 counter generator
  with counter starting at zero.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(v: int) -> int:
    x = (v + 0x9E3779B97F4A7C15) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def stream_key(master_seed: int, replica_index: int, stage_tag: str) -> tuple[int, int]:
    h = splitmix64(master_seed & _MASK64)
    h = splitmix64(h ^ (replica_index & _MASK64))
    h = splitmix64(h ^ fnv1a64(stage_tag.encode("utf-8")))
    k0 = splitmix64(h)
    k1 = splitmix64(k0)
    return k0, k1


def rng_stream(master_seed: int, replica_index: int,
               stage_tag: str) -> np.random.Generator:
    """Independent generator for one (replica, stage) work item."""
    k0, k1 = stream_key(master_seed, replica_index, stage_tag)
    key = np.array([k0, k1], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
