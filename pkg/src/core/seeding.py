import hashlib


def derive_seed(seed: int, name: str) -> int:
    """
    Derive a named sub-seed from the single experiment seed.

    The result depends only on (seed, name), so every consumer of randomness
    (sampling, init, keyword generation, Big Bird globals) gets its own stream
    and adding a new consumer never shifts the others.
    """
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
