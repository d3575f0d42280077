"""Exact arithmetic in the free 2-step nilpotent group N_{2,m}.

Elements are Malcev normal forms

    a_1^alpha_1 ... a_m^alpha_m * prod_{i<j} [a_i, a_j]^gamma_ij

with the commutator convention [g, h] = g^-1 h^-1 g h and basic commutators
central.  The gamma block is indexed by pairs (i, j), i < j, row-major:
(1,2), (1,3), ..., (1,m), (2,3), ...

The ground truth for the product is the collection identity

    a_s a_t = a_t a_s [a_s, a_t]        (any s, t)

applied letter by letter (``collection_oracle``).  The closed forms below were
read off from it and the test suite pins them against the oracle; if you
change a sign here, the oracle will catch you.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

from .words import Word


@lru_cache(maxsize=None)
def pair_list(m: int) -> Tuple[Tuple[int, int], ...]:
    """All (i, j) with 1 <= i < j <= m, row-major; gamma follows this order."""
    return tuple((i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1))


@lru_cache(maxsize=None)
def _pair_index_map(m: int):
    return {p: t for t, p in enumerate(pair_list(m))}


def pair_index(m: int, i: int, j: int) -> int:
    return _pair_index_map(m)[(i, j)]


@dataclass(frozen=True)
class MalcevElement:
    m: int
    alpha: Tuple[int, ...]
    gamma: Tuple[int, ...]

    def __post_init__(self):
        if len(self.alpha) != self.m:
            raise ValueError("alpha length must equal m")
        if len(self.gamma) != self.m * (self.m - 1) // 2:
            raise ValueError("gamma length must equal m(m-1)/2")

    def is_identity(self) -> bool:
        return not any(self.alpha) and not any(self.gamma)


@lru_cache(maxsize=None)
def identity(m: int) -> MalcevElement:
    return MalcevElement(m, (0,) * m, (0,) * (m * (m - 1) // 2))


def generator(m: int, k: int) -> MalcevElement:
    if not (1 <= k <= m):
        raise ValueError(f"generator index {k} out of range 1..{m}")
    return MalcevElement(
        m,
        tuple(1 if i == k - 1 else 0 for i in range(m)),
        (0,) * (m * (m - 1) // 2),
    )


def multiply(x: MalcevElement, y: MalcevElement) -> MalcevElement:
    """Product in collected form.

    Moving y's a_i block left past x's a_j blocks (j > i) costs
    [a_i, a_j]^(-x_alpha_j * y_alpha_i) per pair, by bilinearity of the
    collection identity.
    """
    if x.m != y.m:
        raise ValueError("rank mismatch")
    m = x.m
    xa, ya = x.alpha, y.alpha
    alpha = tuple(xa[i] + ya[i] for i in range(m))
    gamma = []
    t = 0
    xg, yg = x.gamma, y.gamma
    for i in range(m):
        for j in range(i + 1, m):
            gamma.append(xg[t] + yg[t] - xa[j] * ya[i])
            t += 1
    return MalcevElement(m, alpha, tuple(gamma))


def inverse(x: MalcevElement) -> MalcevElement:
    m = x.m
    a = x.alpha
    alpha = tuple(-v for v in a)
    gamma = []
    t = 0
    for i in range(m):
        for j in range(i + 1, m):
            gamma.append(-x.gamma[t] - a[i] * a[j])
            t += 1
    return MalcevElement(m, alpha, tuple(gamma))


def commutator(x: MalcevElement, y: MalcevElement) -> MalcevElement:
    """[x, y] = x^-1 y^-1 x y; central, with gamma the alpha bilinear form."""
    if x.m != y.m:
        raise ValueError("rank mismatch")
    m = x.m
    xa, ya = x.alpha, y.alpha
    gamma = []
    for i in range(m):
        for j in range(i + 1, m):
            gamma.append(xa[i] * ya[j] - xa[j] * ya[i])
    return MalcevElement(m, (0,) * m, tuple(gamma))


def power(x: MalcevElement, k: int) -> MalcevElement:
    """x^k by square and multiply; negative k via the inverse."""
    if k < 0:
        return power(inverse(x), -k)
    acc = identity(x.m)
    base = x
    while k:
        if k & 1:
            acc = multiply(acc, base)
        base = multiply(base, base)
        k >>= 1
    return acc


def from_word(w: Word) -> MalcevElement:
    """Evaluate a word letter by letter with the closed-form product."""
    acc = identity(w.m)
    for l in w.letters:
        g = generator(w.m, abs(l))
        acc = multiply(acc, g if l > 0 else inverse(g))
    return acc


def collection_oracle(w: Word) -> MalcevElement:
    """Collect a letter sequence by literal rewriting; deliberately naive.

    Repeatedly applies a_t^e a_s^d -> a_s^d a_t^e [a_s, a_t]^(-e*d) for
    adjacent letters with t > s until the sequence is sorted by generator
    index, tracking the central commutator letters on the side, then merges
    exponents.  Quadratic and slow; exists to check from_word and multiply.
    """
    m = w.m
    letters = list(w.letters)
    gamma = [0] * (m * (m - 1) // 2)
    pidx = _pair_index_map(m)
    changed = True
    while changed:
        changed = False
        for p in range(len(letters) - 1):
            l1, l2 = letters[p], letters[p + 1]
            if abs(l1) > abs(l2):
                letters[p], letters[p + 1] = l2, l1
                e = 1 if l1 > 0 else -1
                d = 1 if l2 > 0 else -1
                gamma[pidx[(abs(l2), abs(l1))]] -= e * d
                changed = True
    alpha = [0] * m
    for l in letters:
        alpha[abs(l) - 1] += 1 if l > 0 else -1
    return MalcevElement(m, tuple(alpha), tuple(gamma))


def format_element(x: MalcevElement) -> str:
    """Render as a1^e ... [ai,aj]^g, omitting zero exponents and exponent 1;
    the identity renders as '1'."""
    parts = []
    for i, e in enumerate(x.alpha, start=1):
        if e == 1:
            parts.append(f"a{i}")
        elif e:
            parts.append(f"a{i}^{e}")
    for (i, j), g in zip(pair_list(x.m), x.gamma):
        if g == 1:
            parts.append(f"[a{i},a{j}]")
        elif g:
            parts.append(f"[a{i},a{j}]^{g}")
    return " ".join(parts) if parts else "1"
