"""
テスト共通のフィクスチャと素数の組
"""
from typing import List, Tuple

import pytest
from sympy import primerange

from models.ring_core import RingContext, build_context

FULL_LIMIT = 10**4
DEFAULT_LIMIT = 2000
SMALL_LIMIT = 300


def prime_pairs(limit: int) -> List[Tuple[int, int]]:
    """3 <= s < p かつ s*p <= limit を満たす素数の組"""
    primes = list(primerange(3, limit // 3 + 1))
    return [(s, p) for i, s in enumerate(primes) for p in primes[i + 1:] if s * p <= limit]


DEFAULT_PAIRS = prime_pairs(DEFAULT_LIMIT)
SMALL_PAIRS = prime_pairs(SMALL_LIMIT)
FULL_PAIRS = prime_pairs(FULL_LIMIT)


@pytest.fixture
def ctx_11_23() -> RingContext:
    return build_context(11, 23)


@pytest.fixture
def ctx_29_41() -> RingContext:
    return build_context(29, 41)


@pytest.fixture
def ctx_3_7() -> RingContext:
    return build_context(3, 7)
