"""Shared generators and oracles for the codec suites."""

import itertools
import math
import random
from collections import Counter
from fractions import Fraction

MAX_LEN = 64 * 1024


def suite_case(i: int) -> bytes:
    """Case ``i`` of the seeded suite: length log-uniform in 1 B to 64 KiB."""
    rng = random.Random(f"codec-suite/{i}")
    n = int(math.exp(rng.uniform(0, math.log(MAX_LEN))))
    kind = i % 4
    if kind == 0:
        return rng.randbytes(n)
    if kind == 1:
        alpha = rng.sample(range(256), rng.randint(1, 8))
        return bytes(rng.choice(alpha) for _ in range(n))
    if kind == 2:
        unit = rng.randbytes(rng.randint(1, 40))
        return (unit * (n // len(unit) + 1))[:n]
    words = [rng.randbytes(rng.randint(2, 8)) for _ in range(20)]
    out = bytearray()
    while len(out) < n:
        out += rng.choice(words)
    return bytes(out[:n])


def entropy_bits(data: bytes) -> float:
    """n * H(data), the empirical-entropy bound in bits."""
    n = len(data)
    return -sum(c * math.log2(c / n) for c in Counter(data).values())


def optimal_prefix_bits(data: bytes) -> int:
    """Exhaustive optimum over every complete prefix code for data's symbols.

    Complete codes on k leaves are exactly the length vectors with Kraft sum
    1; a lone symbol needs one bit.
    """
    freqs = list(Counter(data).values())
    k = len(freqs)
    if k == 1:
        return freqs[0]
    best = None
    for lengths in itertools.product(range(1, k), repeat=k):
        if sum(Fraction(1, 2 ** l) for l in lengths) != 1:
            continue
        cost = sum(f * l for f, l in zip(freqs, lengths))
        best = cost if best is None else min(best, cost)
    return best
