"""Finite presentations of 2-step nilpotent quotients and their word problem.

A presentation file looks like

    # comment
    m s
    a1 a2^-1
    [a1,a2] a3

with m generators, declared nilpotency class s >= 2, and one relator word per
line.  Classes above 2 are projected to the 2-step image; every report states
that explicitly.

``normalize`` rewrites the relators through Nielsen moves mirroring the Smith
reduction of the exponent-sum matrix, so relator i becomes a_i^alpha_i * c_i
with c_i in the derived subgroup.  The normal closure of the relators is then
generated, modulo the relators themselves, by the central elements
[g_i, a_k]: conjugation in a 2-step group obeys w^-1 g w = g [g, w], and
[g, w] is bilinear in the exponent vector of w, so the commutators with the
generators span everything.  That reduces membership in the normal closure to
(1) divisibility of alpha coordinates by the alphas, (2) vanishing of alpha
off the normalized range, and (3) an integer lattice membership for the
leftover gamma part.  Rank-deficient exponent matrices fall outside this
normal form; all decision procedures then refuse with InconclusiveError.

Relators beyond the rank (extra relators when r > m, or the rank-deficient
leftovers) have zero exponent row after rewriting, hence live in the derived
subgroup; their gamma parts are folded into the closure lattice.  This is a
natural extension beyond the r <= m normal form and is only exercised when
such relators exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

from . import zmatrix
from .nilpotent2 import (
    MalcevElement,
    commutator,
    generator,
    inverse,
    multiply,
    pair_list,
    power,
)
from .words import (
    NielsenLog,
    RelatorSet,
    Word,
    nielsen_normalize,
    parse_word,
    rewrite_through_generator_moves,
)
from .zmatrix import (
    IntMatrix,
    SmithDecomposition,
    lattice_membership,
    rank as zrank,
    rational_membership,
)


class InconclusiveError(Exception):
    """The presentation is outside the regime where the procedure decides."""


@dataclass(frozen=True)
class NilPresentation:
    m: int
    s: int
    relators: RelatorSet

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one generator")
        if self.s < 2:
            raise ValueError("nilpotency class must be at least 2")
        if self.relators.m != self.m:
            raise ValueError("relator alphabet does not match m")


def parse_presentation(text: str) -> NilPresentation:
    header = None
    relator_words: list[Word] = []
    lines = text.splitlines()
    m = s = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: header must be 'm s'")
            try:
                m, s = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"line {lineno}: header must be two integers") from None
            header = (m, s)
        else:
            relator_words.append(parse_word(line, m))
    if header is None:
        raise ValueError("empty presentation file")
    return NilPresentation(m, s, RelatorSet(tuple(relator_words), m))


@dataclass(frozen=True)
class NormalizedPresentation:
    """Presentation in normal form: relator i reads a_i^alphas[i] * c_parts[i].

    ``closure_lattice`` spans the gamma coordinates of the central part of the
    normal closure: alpha_i * [a_i, a_k] for each normalized relator i and
    k != i, together with the gamma parts of extra_commutator_relators.
    ``rewritten`` keeps the relators as words over the new basis and
    ``nielsen_log`` the moves that got there.
    """

    m: int
    r: int
    s: int
    alphas: Tuple[int, ...]
    c_parts: Tuple[MalcevElement, ...]
    extra_commutator_relators: Tuple[MalcevElement, ...]
    nielsen_log: NielsenLog
    snf: SmithDecomposition
    closure_lattice: Tuple[Tuple[int, ...], ...]
    rewritten: RelatorSet

    @property
    def rank_full(self) -> bool:
        return self.snf.rank == min(self.r, self.m)

    @cached_property
    def normalized_relators(self) -> Tuple[MalcevElement, ...]:
        """Malcev images h_i = a_i^alphas[i] * c_parts[i] of the rewritten
        relators, one per normalized index."""
        out = []
        for i, (a, c) in enumerate(zip(self.alphas, self.c_parts)):
            out.append(multiply(power(generator(self.m, i + 1), a), c))
        return tuple(out)


def normalize(p: NilPresentation) -> NormalizedPresentation:
    from .nilpotent2 import from_word

    rewritten, log, snf = nielsen_normalize(p.relators)
    m = p.m
    images = [from_word(w) for w in rewritten.relators]
    k = snf.rank
    alphas = snf.invariant_factors
    c_parts = []
    for i in range(k):
        h = images[i]
        expected = tuple(alphas[i] if t == i else 0 for t in range(m))
        if h.alpha != expected:
            raise AssertionError("rewritten relator alpha does not match diagonal")
        c = multiply(inverse(power(generator(m, i + 1), alphas[i])), h)
        c_parts.append(c)
    extras = []
    for h in images[k:]:
        if any(h.alpha):
            raise AssertionError("relator beyond rank must be central")
        extras.append(h)
    vectors: list[Tuple[int, ...]] = []
    for i in range(k):
        for g in range(1, m + 1):
            if g == i + 1:
                continue
            vec = commutator(images[i], generator(m, g)).gamma
            if any(vec):
                vectors.append(vec)
    for h in extras:
        if any(h.gamma):
            vectors.append(h.gamma)
    return NormalizedPresentation(
        m=m,
        r=len(p.relators.relators),
        s=p.s,
        alphas=alphas,
        c_parts=tuple(c_parts),
        extra_commutator_relators=tuple(extras),
        nielsen_log=log,
        snf=snf,
        closure_lattice=tuple(vectors),
        rewritten=rewritten,
    )


def _require_rank_full(np_: NormalizedPresentation):
    if not np_.rank_full:
        raise InconclusiveError(
            "exponent-sum matrix is rank-deficient; the normal form does not decide"
        )


def express_in_normalized_basis(w: Word, np_: NormalizedPresentation) -> MalcevElement:
    """Evaluate a word written over the original presentation's generators.

    Normalization may substitute generators (the column moves of the Smith
    reduction), so a word meant relative to the input presentation has to go
    through the same substitutions before the coordinate-level deciders see
    it.  Words already phrased in the rewritten basis can skip this and call
    from_word directly.
    """
    from .nilpotent2 import from_word

    return from_word(rewrite_through_generator_moves(w, np_.nielsen_log))


def is_trivial_in_G(h: MalcevElement, np_: NormalizedPresentation) -> bool:
    """Membership of h in the normal closure of the relators inside N_{2,m}.

    h is taken in the rewritten basis; use express_in_normalized_basis for
    words over the original generators.  Solves a_i exponents by exact
    divisibility, requires alpha to vanish off the normalized range, then
    tests the leftover gamma part against the closure lattice.
    """
    if h.m != np_.m:
        raise ValueError("rank mismatch")
    _require_rank_full(np_)
    lam = []
    for i, a in enumerate(np_.alphas):
        q, rem = divmod(h.alpha[i], a)
        if rem:
            return False
        lam.append(q)
    for idx in range(len(np_.alphas), np_.m):
        if h.alpha[idx]:
            return False
    t = h
    rels = np_.normalized_relators
    for i, q in enumerate(lam):
        if q:
            t = multiply(t, power(rels[i], -q))
    if any(t.alpha):
        raise AssertionError("alpha failed to cancel")
    return lattice_membership(np_.closure_lattice, t.gamma) is not None


def is_trivial_mod_torsion(h: MalcevElement, np_: NormalizedPresentation) -> bool:
    """True iff some positive power of h lies in the normal closure.

    Rational analogue of is_trivial_in_G: divisibility turns into rational
    solvability (cleared by passing to h^n0 with n0 = lcm of the alphas) and
    the lattice test into Q-span membership.  Valid because modulo the
    closure lattice the relators commute with everything in sight, so the
    gamma residue of h^j is j times the residue of h up to lattice elements.
    """
    if h.m != np_.m:
        raise ValueError("rank mismatch")
    _require_rank_full(np_)
    n0 = math.lcm(*np_.alphas) if np_.alphas else 1
    u = power(h, n0)
    for idx in range(len(np_.alphas), np_.m):
        if u.alpha[idx]:
            return False
    t = u
    rels = np_.normalized_relators
    for i, a in enumerate(np_.alphas):
        q, rem = divmod(u.alpha[i], a)
        if rem:
            raise AssertionError("lcm clearing failed")
        if q:
            t = multiply(t, power(rels[i], -q))
    if any(t.alpha):
        raise AssertionError("alpha failed to cancel")
    return rational_membership(np_.closure_lattice, t.gamma)


def is_central_mod_torsion(h: MalcevElement, np_: NormalizedPresentation) -> bool:
    """True iff h commutes with every generator modulo torsion, i.e. h is
    central in the quotient by the torsion subgroup."""
    if h.m != np_.m:
        raise ValueError("rank mismatch")
    _require_rank_full(np_)
    for g in range(1, np_.m + 1):
        if not is_trivial_mod_torsion(commutator(h, generator(np_.m, g)), np_):
            return False
    return True


def _bilinear_matrix(m: int, w: Sequence[int]) -> list:
    """Matrix of v -> gamma([x, v]) on alpha coordinates, where x has alpha w.

    Row t for the pair (i, j) carries w_i at column j and -w_j at column i.
    """
    rows = []
    for (i, j) in pair_list(m):
        row = [0] * m
        row[j - 1] += w[i - 1]
        row[i - 1] -= w[j - 1]
        rows.append(row)
    return rows


def _commuting_profile_dim(np_: NormalizedPresentation, w: Sequence[int]) -> int:
    """Dimension over Q of {v : gamma-form(w, v) lies in the Q-span of the
    closure lattice}; the alpha profiles commuting with w modulo torsion."""
    m = np_.m
    npairs = m * (m - 1) // 2
    lat = [list(v) for v in np_.closure_lattice]
    L = len(lat)
    B = _bilinear_matrix(m, w)
    rows = []
    for t in range(npairs):
        rows.append(B[t] + [-lat[s][t] for s in range(L)])
    K = IntMatrix.from_rows(rows) if rows else IntMatrix(0, m + L, ())
    dim_solutions = (m + L) - zrank(K)
    lat_rank = zrank(IntMatrix.from_rows(lat)) if lat else 0
    return dim_solutions - (L - lat_rank)


def _center_profile_dim(np_: NormalizedPresentation) -> int:
    """Dimension over Q of the alpha profiles central modulo torsion."""
    m = np_.m
    npairs = m * (m - 1) // 2
    lat = [list(v) for v in np_.closure_lattice]
    L = len(lat)
    rows = []
    for g in range(m):
        w = [1 if t == g else 0 for t in range(m)]
        B = _bilinear_matrix(m, w)
        for t in range(npairs):
            row = B[t] + [0] * (m * L)
            for s in range(L):
                row[m + g * L + s] = -lat[s][t]
            rows.append(row)
    K = IntMatrix.from_rows(rows) if rows else IntMatrix(0, m + m * L, ())
    dim_solutions = (m + m * L) - zrank(K)
    lat_rank = zrank(IntMatrix.from_rows(lat)) if lat else 0
    return dim_solutions - m * (L - lat_rank)


def is_c_small(g: MalcevElement, np_: NormalizedPresentation) -> bool:
    """Centralizer smallness of g in the torsion-free quotient G0.

    Commutation with g only depends on alpha coordinates and is the rational
    linear condition gamma-form(g.alpha, v) in Q-span(closure_lattice).  g is
    centralizer-small iff that solution space is exactly
    span({g.alpha} + central profiles), which (the containment being
    automatic) is a dimension comparison.  This is the rational criterion:
    the centralizer equals <g> * Z(G0) up to finite index.  Degenerate case:
    for g central modulo torsion (the identity included) the answer is true
    iff G0 is abelian.
    """
    if g.m != np_.m:
        raise ValueError("rank mismatch")
    _require_rank_full(np_)
    if np_.r > np_.m - 2:
        raise InconclusiveError(
            "centralizer-smallness is only decided for r <= m - 2"
        )
    center_dim = _center_profile_dim(np_)
    if is_central_mod_torsion(g, np_):
        return center_dim == np_.m
    return _commuting_profile_dim(np_, g.alpha) == center_dim + 1


REGIME_UNDECIDABLE = "UNDECIDABLE_REGULAR"
REGIME_VIRTUALLY_ABELIAN = "VIRTUALLY_ABELIAN"
REGIME_FINITE = "FINITE"
REGIME_FINITE_ABELIAN = "FINITE_ABELIAN"
REGIME_INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class RegimeReport:
    """Classifier output for the (m, r) parameter regime of a presentation.

    The regime describes what holds for asymptotically almost every random
    presentation with these parameters; notes spell out the structural facts
    and flag the a.a.s. qualifier where it applies.
    """

    regime: str
    free_nilpotent_corank: Optional[int]
    diophantine: str
    notes: str
    rank: int
    invariant_factors: Tuple[int, ...]

    def to_jsonable(self) -> dict:
        return {
            "regime": self.regime,
            "corank": self.free_nilpotent_corank,
            "diophantine": self.diophantine,
            "notes": self.notes,
            "rank": self.rank,
            "invariant_factors": list(self.invariant_factors),
        }


def classify(np_: NormalizedPresentation) -> RegimeReport:
    m, r = np_.m, np_.r
    notes: list[str] = []
    if np_.s > 2:
        notes.append(
            f"declared nilpotency class {np_.s}; all computations use the "
            "2-step image (quotient by the third lower central subgroup)."
        )
    if not np_.rank_full:
        notes.append(
            "exponent-sum matrix is rank-deficient, which happens with "
            "vanishing probability for random relators; no regime assigned."
        )
        return RegimeReport(
            regime=REGIME_INCONCLUSIVE,
            free_nilpotent_corank=None,
            diophantine="UNKNOWN",
            notes=" ".join(notes),
            rank=np_.snf.rank,
            invariant_factors=np_.snf.invariant_factors,
        )
    if r <= m - 2:
        notes.append(
            f"quotient by the third lower central subgroup is virtually free "
            f"nilpotent of rank {m - r} (class 2). Asymptotically almost "
            "surely the group is regular, directly indecomposable, its "
            "torsion-free quotient has centralizer-small non-commuting "
            "generators, and its largest ring of scalars is the integers; "
            "the integers are definable by systems of equations, so "
            "Diophantine solvability over the group is undecidable."
        )
        return RegimeReport(
            regime=REGIME_UNDECIDABLE,
            free_nilpotent_corank=m - r,
            diophantine="UNDECIDABLE",
            notes=" ".join(notes),
            rank=np_.snf.rank,
            invariant_factors=np_.snf.invariant_factors,
        )
    if r == m - 1:
        notes.append(
            "one generator survives rationally: asymptotically almost surely "
            "the group is virtually abelian (finite-by-cyclic up to finite "
            "index), and equation solvability is decidable."
        )
        regime, dio = REGIME_VIRTUALLY_ABELIAN, "DECIDABLE"
    elif r == m:
        notes.append(
            "full-rank square regime: the abelianization is finite and the "
            "derived subgroup has finite exponent, so the group is finite; "
            "everything is decidable by enumeration."
        )
        regime, dio = REGIME_FINITE, "DECIDABLE"
    else:
        notes.append(
            "overdetermined regime: extra central relators kill the derived "
            "subgroup asymptotically almost surely, leaving a finite abelian "
            "group; equation solvability is decidable."
        )
        regime, dio = REGIME_FINITE_ABELIAN, "DECIDABLE"
    return RegimeReport(
        regime=regime,
        free_nilpotent_corank=None,
        diophantine=dio,
        notes=" ".join(notes),
        rank=np_.snf.rank,
        invariant_factors=np_.snf.invariant_factors,
    )
