"""Equation systems over the integers and over 2-step nilpotent groups.

Ring systems are polynomial equalities in an IR of nested tuples:
("const", n), ("var", name), ("add", t1, t2), ("neg", t), ("mul", t1, t2).
Binary subtraction normalizes to add-of-neg on input.  Group systems equate
words over declared variables and constants, with factors ("gen", name, exp)
and ("comm", u, v, exp).

The bridge is an equation-definability encoding of the integers inside a
group with two non-commuting centralizer-small constants a, b: writing
c = [a, b], the integer t is carried by c^t, whose defining system is
x = [a, y], [y, b] = 1.  Addition is plain multiplication inside that set,
negation is x1 x2 = 1, and multiplication of exponents is the five-equation
system

    x1 = [x1', b],   [x1', a] = 1,
    x2 = [a, x2'],   [x2', b] = 1,
    x3 = [x1', x2'],

transcribed literally; its sign consistency under this commutator orientation
is validated by the gadget-law check rather than re-derived.  compile_system
performs the standard structural recursion: one group-variable tuple per
distinct subterm (shared by structural identity), a domain gadget per ring
variable, constants as explicit powers c^n, one operation gadget per
composite subterm, and an equality per ring equation.

The bounded solvers are testing oracles.  They never claim unsolvability:
"no solution within the box" is all a search can report.  The group solver
backtracks over variables instead of scanning the full product box: at every
level it first checks all fully-determined equations, then assigns variables
forced by an equation of the shape x = (determined word), and only then
scans one variable's coordinate box, smallest coordinates first.  The work
limit therefore caps actual evaluations, not the nominal box volume (the
nominal volume of the gadget systems is astronomically larger than the work
the scheduler does).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .nilpotent2 import (
    MalcevElement,
    commutator,
    generator,
    identity,
    inverse,
    multiply,
    power,
)
from .presentation import NormalizedPresentation, is_trivial_in_G


class SearchSpaceError(Exception):
    """The bounded search exceeded its work limit."""


# ---------------------------------------------------------------------------
# ring terms


Term = tuple


def term_from_json(node) -> Term:
    if not isinstance(node, (list, tuple)) or not node:
        raise ValueError(f"bad term node: {node!r}")
    head = node[0]
    if head == "const":
        if len(node) != 2 or not isinstance(node[1], int):
            raise ValueError(f"bad const: {node!r}")
        return ("const", node[1])
    if head == "var":
        if len(node) != 2 or not isinstance(node[1], str):
            raise ValueError(f"bad var: {node!r}")
        return ("var", node[1])
    if head == "+":
        if len(node) != 3:
            raise ValueError(f"+ takes two arguments: {node!r}")
        return ("add", term_from_json(node[1]), term_from_json(node[2]))
    if head == "*":
        if len(node) != 3:
            raise ValueError(f"* takes two arguments: {node!r}")
        return ("mul", term_from_json(node[1]), term_from_json(node[2]))
    if head == "-":
        if len(node) == 2:
            return ("neg", term_from_json(node[1]))
        if len(node) == 3:
            return ("add", term_from_json(node[1]), ("neg", term_from_json(node[2])))
        raise ValueError(f"- takes one or two arguments: {node!r}")
    raise ValueError(f"unknown term head: {head!r}")


def term_to_json(t: Term) -> list:
    kind = t[0]
    if kind == "const":
        return ["const", t[1]]
    if kind == "var":
        return ["var", t[1]]
    if kind == "add":
        return ["+", term_to_json(t[1]), term_to_json(t[2])]
    if kind == "mul":
        return ["*", term_to_json(t[1]), term_to_json(t[2])]
    if kind == "neg":
        return ["-", term_to_json(t[1])]
    raise ValueError(f"unknown term kind: {kind!r}")


def term_vars(t: Term) -> set:
    kind = t[0]
    if kind == "var":
        return {t[1]}
    if kind == "const":
        return set()
    return set().union(*(term_vars(s) for s in t[1:]))


def eval_term(t: Term, assignment: Mapping[str, int]) -> int:
    kind = t[0]
    if kind == "const":
        return t[1]
    if kind == "var":
        return assignment[t[1]]
    if kind == "add":
        return eval_term(t[1], assignment) + eval_term(t[2], assignment)
    if kind == "mul":
        return eval_term(t[1], assignment) * eval_term(t[2], assignment)
    if kind == "neg":
        return -eval_term(t[1], assignment)
    raise ValueError(f"unknown term kind: {kind!r}")


@dataclass(frozen=True)
class RingSystem:
    variables: Tuple[str, ...]
    equations: Tuple[Tuple[Term, Term], ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        declared = set(self.variables)
        for lhs, rhs in self.equations:
            undeclared = (term_vars(lhs) | term_vars(rhs)) - declared
            if undeclared:
                raise ValueError(f"undeclared variables: {sorted(undeclared)}")

    def to_jsonable(self) -> dict:
        return {
            "variables": list(self.variables),
            "equations": [[term_to_json(a), term_to_json(b)] for a, b in self.equations],
        }

    @staticmethod
    def from_jsonable(data: Mapping) -> "RingSystem":
        eqs = tuple(
            (term_from_json(pair[0]), term_from_json(pair[1])) for pair in data["equations"]
        )
        return RingSystem(tuple(data["variables"]), eqs)


def ring_satisfies(S: RingSystem, assignment: Mapping[str, int]) -> bool:
    return all(eval_term(a, assignment) == eval_term(b, assignment) for a, b in S.equations)


def bounded_solve_ring(S: RingSystem, bound: int, limit: int = 2_000_000) -> List[Dict[str, int]]:
    """All integer solutions with every variable in [-bound, bound]."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    n = len(S.variables)
    if (2 * bound + 1) ** n > limit:
        raise SearchSpaceError(
            f"{(2 * bound + 1) ** n} assignments exceed the limit {limit}"
        )
    out = []
    for combo in itertools.product(range(-bound, bound + 1), repeat=n):
        assignment = dict(zip(S.variables, combo))
        if ring_satisfies(S, assignment):
            out.append(assignment)
    return out


# ---------------------------------------------------------------------------
# group words and systems


GroupWord = tuple


def gword(*factors) -> GroupWord:
    return tuple(factors)


def gen(name: str, exp: int = 1):
    return ("gen", name, exp)


def comm(u: GroupWord, v: GroupWord, exp: int = 1):
    return ("comm", u, v, exp)


def gword_names(w: GroupWord) -> set:
    names = set()
    for f in w:
        if f[0] == "gen":
            names.add(f[1])
        else:
            names |= gword_names(f[1]) | gword_names(f[2])
    return names


def eval_gword(w: GroupWord, env: Mapping[str, MalcevElement], m: int) -> MalcevElement:
    acc = identity(m)
    for f in w:
        if f[0] == "gen":
            acc = multiply(acc, power(env[f[1]], f[2]))
        elif f[0] == "comm":
            u = eval_gword(f[1], env, m)
            v = eval_gword(f[2], env, m)
            acc = multiply(acc, power(commutator(u, v), f[3]))
        else:
            raise ValueError(f"unknown factor {f!r}")
    return acc


def gword_to_json(w: GroupWord) -> list:
    out = []
    for f in w:
        if f[0] == "gen":
            out.append([f[1], f[2]])
        else:
            node = ["comm", gword_to_json(f[1]), gword_to_json(f[2])]
            if f[3] != 1:
                node.append(f[3])
            out.append(node)
    return out


def gword_from_json(nodes) -> GroupWord:
    factors = []
    for node in nodes:
        if not isinstance(node, (list, tuple)) or not node:
            raise ValueError(f"bad word factor: {node!r}")
        if node[0] == "comm":
            if len(node) == 3:
                factors.append(comm(gword_from_json(node[1]), gword_from_json(node[2])))
            elif len(node) == 4:
                factors.append(
                    comm(gword_from_json(node[1]), gword_from_json(node[2]), node[3])
                )
            else:
                raise ValueError(f"bad comm node: {node!r}")
        else:
            if len(node) != 2 or not isinstance(node[0], str) or not isinstance(node[1], int):
                raise ValueError(f"bad generator factor: {node!r}")
            factors.append(gen(node[0], node[1]))
    return tuple(factors)


@dataclass(frozen=True)
class GroupSystem:
    variables: Tuple[str, ...]
    constants: Tuple[str, ...]
    equations: Tuple[Tuple[GroupWord, GroupWord], ...]

    def __post_init__(self):
        names = set(self.variables) | set(self.constants)
        if len(names) != len(self.variables) + len(self.constants):
            raise ValueError("name collision between variables and constants")
        for lhs, rhs in self.equations:
            undeclared = (gword_names(lhs) | gword_names(rhs)) - names
            if undeclared:
                raise ValueError(f"undeclared names: {sorted(undeclared)}")

    def to_jsonable(self) -> dict:
        return {
            "variables": list(self.variables),
            "constants": list(self.constants),
            "equations": [[gword_to_json(a), gword_to_json(b)] for a, b in self.equations],
        }

    @staticmethod
    def from_jsonable(data: Mapping) -> "GroupSystem":
        eqs = tuple(
            (gword_from_json(pair[0]), gword_from_json(pair[1])) for pair in data["equations"]
        )
        return GroupSystem(tuple(data["variables"]), tuple(data["constants"]), eqs)


# ---------------------------------------------------------------------------
# ambients


class FreeNilpotentAmbient:
    """Free 2-step nilpotent group of rank m; constants a = a_1, b = a_2."""

    def __init__(self, m: int):
        if m < 2:
            raise ValueError("need m >= 2 for non-commuting constants")
        self.m = m

    def constants(self) -> Dict[str, MalcevElement]:
        return {"a": generator(self.m, 1), "b": generator(self.m, 2)}

    def is_trivial(self, el: MalcevElement) -> bool:
        return el.is_identity()


class QuotientAmbient:
    """Quotient of N_{2,m} by a normalized full-rank presentation.

    Constants pick the last two generators: in the regime r <= m - 2 they are
    centralizer-small modulo torsion, which is what the encoding needs.
    """

    def __init__(self, np_: NormalizedPresentation):
        if not np_.rank_full:
            raise ValueError("quotient ambient needs a full-rank presentation")
        if np_.m < 2:
            raise ValueError("need m >= 2 for non-commuting constants")
        self.np_ = np_
        self.m = np_.m

    def constants(self) -> Dict[str, MalcevElement]:
        return {"a": generator(self.m, self.m - 1), "b": generator(self.m, self.m)}

    def is_trivial(self, el: MalcevElement) -> bool:
        return is_trivial_in_G(el, self.np_)


Ambient = Union[FreeNilpotentAmbient, QuotientAmbient]


# ---------------------------------------------------------------------------
# e-definition templates


@dataclass(frozen=True)
class Template:
    """Equation-system fragment with named slots and private auxiliaries."""

    slots: Tuple[str, ...]
    aux: Tuple[str, ...]
    equations: Tuple[Tuple[GroupWord, GroupWord], ...]


def _rename_word(w: GroupWord, mapping: Mapping[str, str]) -> GroupWord:
    out = []
    for f in w:
        if f[0] == "gen":
            out.append(("gen", mapping.get(f[1], f[1]), f[2]))
        else:
            out.append(
                ("comm", _rename_word(f[1], mapping), _rename_word(f[2], mapping), f[3])
            )
    return tuple(out)


def instantiate_template(
    tpl: Template, mapping: Mapping[str, str]
) -> Tuple[Tuple[GroupWord, GroupWord], ...]:
    """Rename slots and auxiliaries; the mapping must cover both (no capture)."""
    for name in tpl.slots + tpl.aux:
        if name not in mapping:
            raise ValueError(f"mapping misses template name {name!r}")
    return tuple(
        (_rename_word(a, mapping), _rename_word(b, mapping)) for a, b in tpl.equations
    )


@dataclass(frozen=True)
class EDefinition:
    """Encoding of the ring of integers by k-tuples in a group with constants.

    Only k = 1 is shipped (t encoded as c^t for c = [a, b]); the compiler is
    written against the declared arity so nothing hardcodes 1 except the
    encoding itself.
    """

    arity: int
    constants: Tuple[str, ...]
    domain: Template
    add: Template
    neg: Template
    mul: Template
    equal: Template

    def constant_word(self, n: int) -> GroupWord:
        if n == 0:
            return ()
        return (comm((gen("a"),), (gen("b"),), n),)


def z_in_g_templates() -> EDefinition:
    a = (gen("a"),)
    b = (gen("b"),)
    x = (gen("x"),)
    y = (gen("y"),)
    one: GroupWord = ()
    domain = Template(
        slots=("x",),
        aux=("y",),
        equations=((x, (comm(a, y),)), ((comm(y, b),), one)),
    )
    add = Template(
        slots=("x1", "x2", "x3"),
        aux=(),
        equations=(((gen("x1"), gen("x2")), (gen("x3"),)),),
    )
    neg = Template(
        slots=("x1", "x2"),
        aux=(),
        equations=(((gen("x1"), gen("x2")), one),),
    )
    p1 = (gen("p1"),)
    p2 = (gen("p2"),)
    mul = Template(
        slots=("x1", "x2", "x3"),
        aux=("p1", "p2"),
        equations=(
            ((gen("x1"),), (comm(p1, b),)),
            ((comm(p1, a),), one),
            ((gen("x2"),), (comm(a, p2),)),
            ((comm(p2, b),), one),
            ((gen("x3"),), (comm(p1, p2),)),
        ),
    )
    equal = Template(
        slots=("x1", "x2"),
        aux=(),
        equations=(((gen("x1"),), (gen("x2"),)),),
    )
    return EDefinition(
        arity=1,
        constants=("a", "b"),
        domain=domain,
        add=add,
        neg=neg,
        mul=mul,
        equal=equal,
    )


# ---------------------------------------------------------------------------
# compiler


@dataclass(frozen=True)
class CompiledSystem:
    system: GroupSystem
    ring_system: RingSystem
    term_names: Tuple[Tuple[Term, str], ...]

    @property
    def term_variable(self) -> Dict[Term, str]:
        return dict(self.term_names)

    def ring_variable_names(self) -> Dict[str, str]:
        return {t[1]: name for t, name in self.term_names if t[0] == "var"}


def compile_system(edef: EDefinition, S: RingSystem) -> CompiledSystem:
    """Structural-recursion compiler from a ring system to a group system.

    One group variable per distinct subterm (structural identity), a domain
    gadget per ring variable, constants as explicit c^n words, operation
    gadgets joining argument tuples to result tuples, and the equality
    template at every ring-equation root.  Fresh names come from
    deterministic counters, so identical inputs compile to syntactically
    identical outputs.
    """
    if edef.arity != 1:
        raise ValueError("only arity-1 encodings are implemented")
    term_name: Dict[Term, str] = {}
    order: List[Term] = []
    variables: List[str] = []
    equations: List[Tuple[GroupWord, GroupWord]] = []
    counters = {"t": 0, "w": 0}

    def fresh(prefix: str) -> str:
        name = f"{prefix}{counters[prefix]}"
        counters[prefix] += 1
        return name

    def emit(tpl: Template, slot_names: Sequence[str]):
        mapping = dict(zip(tpl.slots, slot_names))
        for aux in tpl.aux:
            aux_name = fresh("w")
            mapping[aux] = aux_name
            variables.append(aux_name)
        equations.extend(instantiate_template(tpl, mapping))

    def visit(t: Term) -> str:
        if t in term_name:
            return term_name[t]
        kind = t[0]
        if kind == "var":
            name = "v_" + t[1]
            term_name[t] = name
            order.append(t)
            variables.append(name)
            emit(edef.domain, (name,))
            return name
        if kind == "const":
            name = fresh("t")
            term_name[t] = name
            order.append(t)
            variables.append(name)
            equations.append(((gen(name),), edef.constant_word(t[1])))
            return name
        args = [visit(s) for s in t[1:]]
        name = fresh("t")
        term_name[t] = name
        order.append(t)
        variables.append(name)
        if kind == "add":
            emit(edef.add, (args[0], args[1], name))
        elif kind == "neg":
            emit(edef.neg, (args[0], name))
        elif kind == "mul":
            emit(edef.mul, (args[0], args[1], name))
        else:
            raise ValueError(f"unknown term kind {kind!r}")
        return name

    for name in S.variables:
        visit(("var", name))
    for lhs, rhs in S.equations:
        ln = visit(lhs)
        rn = visit(rhs)
        emit(edef.equal, (ln, rn))

    system = GroupSystem(tuple(variables), edef.constants, tuple(equations))
    return CompiledSystem(
        system=system,
        ring_system=S,
        term_names=tuple((t, term_name[t]) for t in order),
    )


# ---------------------------------------------------------------------------
# bounded group solver


def _coordinate_candidates(dim: int, bound: int):
    # smallest-magnitude-first per coordinate: 0, 1, -1, 2, -2, ...
    seq = [0]
    for v in range(1, bound + 1):
        seq.append(v)
        seq.append(-v)
    return itertools.product(seq, repeat=dim)


def _bare_names(w: GroupWord) -> set:
    # names occurring as a direct generator factor, not inside a commutator
    return {f[1] for f in w if f[0] == "gen"}


def _commutator_only_variables(S: GroupSystem) -> set:
    """Variables whose every occurrence sits inside a commutator bracket.

    A class-2 commutator only sees alpha coordinates, so such a variable's
    central part never influences any equation: if an assignment satisfies
    the system, so does the one with that variable's gamma part zeroed.
    Existence searches may therefore fix the gamma part to zero."""
    appearing = set()
    bare = set()
    for lhs, rhs in S.equations:
        for w in (lhs, rhs):
            appearing |= gword_names(w)
            bare |= _bare_names(w)
    return (appearing - bare) & set(S.variables)


def _element_in_box(el: MalcevElement, bound: int) -> bool:
    return all(abs(v) <= bound for v in el.alpha + el.gamma)


def _forced_value(
    lhs: GroupWord, rhs: GroupWord, env: Mapping, m: int
) -> Optional[Tuple[str, MalcevElement]]:
    # x = w or w = x with w fully determined and x free, exponent +-1
    for a, b in ((lhs, rhs), (rhs, lhs)):
        if len(a) == 1 and a[0][0] == "gen" and a[0][1] not in env and abs(a[0][2]) == 1:
            if gword_names(b) <= env.keys():
                val = eval_gword(b, env, m)
                if a[0][2] == -1:
                    val = inverse(val)
                return a[0][1], val
    return None


def bounded_solve_group(
    S: GroupSystem,
    ambient: Ambient,
    bound: Union[int, Mapping[str, int]],
    *,
    pinned: Optional[Mapping[str, MalcevElement]] = None,
    find_all: bool = True,
    eval_limit: int = 20_000_000,
) -> List[Dict[str, MalcevElement]]:
    """Solutions with every variable's Malcev coordinates inside its box.

    ``bound`` is one box half-width for all variables or a per-variable
    mapping (key "*" as default).  ``pinned`` pre-assigns variables (their
    values need not lie in any box).  With find_all=False the search stops at
    the first solution.  An equation u = v holds when u v^-1 is trivial in
    the ambient.  The limit counts word evaluations and candidate elements,
    not nominal box volume; exceeding it raises SearchSpaceError.
    """
    m = ambient.m
    if isinstance(bound, int):
        boxes = {v: bound for v in S.variables}
    else:
        default = bound.get("*")
        boxes = {}
        for v in S.variables:
            bv = bound.get(v, default)
            if bv is None:
                raise ValueError(f"no box for variable {v!r}")
            boxes[v] = bv
    env: Dict[str, MalcevElement] = dict(ambient.constants())
    for name, val in (pinned or {}).items():
        if name not in S.variables:
            raise ValueError(f"pinned name {name!r} is not a variable")
        env[name] = val
    budget = [eval_limit]

    def spend(k: int = 1):
        budget[0] -= k
        if budget[0] < 0:
            raise SearchSpaceError("evaluation limit exceeded")

    def holds(lhs: GroupWord, rhs: GroupWord) -> bool:
        spend()
        u = eval_gword(lhs, env, m)
        v = eval_gword(rhs, env, m)
        return ambient.is_trivial(multiply(u, inverse(v)))

    eq_names = [
        (gword_names(lhs) | gword_names(rhs)) & set(S.variables)
        for lhs, rhs in S.equations
    ]
    n_pairs = m * (m - 1) // 2
    dim = m + n_pairs
    # in existence mode the central part of a commutator-only variable is
    # irrelevant (see _commutator_only_variables), so scan it as zero
    collapsed = _commutator_only_variables(S) if not find_all else set()
    solutions: List[Dict[str, MalcevElement]] = []

    def record():
        solutions.append({v: env[v] for v in S.variables})

    def recurse(remaining: Tuple[int, ...]) -> bool:
        """Returns True if the search should stop (find_all=False and found)."""
        assigned_here: List[str] = []
        try:
            # propagate: verify determined equations, assign forced variables
            rem = list(remaining)
            progress = True
            while progress:
                progress = False
                next_rem = []
                for idx in rem:
                    lhs, rhs = S.equations[idx]
                    missing = eq_names[idx] - env.keys()
                    if not missing:
                        if not holds(lhs, rhs):
                            return False
                        progress = True
                        continue
                    forced = _forced_value(lhs, rhs, env, m)
                    if forced is not None:
                        name, val = forced
                        spend()
                        if not _element_in_box(val, boxes[name]):
                            return False
                        env[name] = val
                        assigned_here.append(name)
                        progress = True
                    next_rem.append(idx)
                rem = next_rem
            free = [v for v in S.variables if v not in env]
            if not free:
                record()
                return not find_all
            # scan one variable from an equation with the fewest unassigned
            # names; among those prefer the variable shared by the most
            # remaining equations, so contradictions surface before
            # unrelated auxiliaries get enumerated.  Variables in no
            # equation are scanned last.
            best = None
            candidates: set = set()
            occurrences: Dict[str, int] = {}
            for idx in rem:
                missing = eq_names[idx] - env.keys()
                if not missing:
                    continue
                for v in missing:
                    occurrences[v] = occurrences.get(v, 0) + 1
                if best is None or len(missing) < best:
                    best = len(missing)
                    candidates = set(missing)
                elif len(missing) == best:
                    candidates |= missing
            if candidates:
                target = min(candidates, key=lambda v: (-occurrences[v], v))
            else:
                target = free[0]
            zero_gamma = (0,) * n_pairs
            if target in collapsed:
                candidates_iter = (
                    (alpha, zero_gamma)
                    for alpha in _coordinate_candidates(m, boxes[target])
                )
            else:
                candidates_iter = (
                    (coords[:m], coords[m:])
                    for coords in _coordinate_candidates(dim, boxes[target])
                )
            for alpha, gamma in candidates_iter:
                spend()
                env[target] = MalcevElement(m, alpha, gamma)
                stop = recurse(tuple(rem))
                del env[target]
                if stop:
                    return True
            return False
        finally:
            for name in assigned_here:
                env.pop(name, None)

    recurse(tuple(range(len(S.equations))))
    return solutions


# ---------------------------------------------------------------------------
# correspondence verification


@dataclass(frozen=True)
class CorrespondenceReport:
    """Outcome of the two-directional compiler check.

    missing_extensions: ring solutions (within B_ring) whose mapped tuples
    admit no auxiliary witness within the group box.  bad_projections:
    ring-variable exponent tuples that the compiled system accepts within the
    group box but the ring system rejects.  Both lists must stay empty; the
    bounded searches never prove unsolvability, so nothing beyond the boxes
    is claimed.
    """

    ring_solutions: int
    missing_extensions: Tuple[dict, ...]
    grid_points: int
    solvable_points: int
    bad_projections: Tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.missing_extensions and not self.bad_projections

    def to_jsonable(self) -> dict:
        return {
            "ring_solutions": self.ring_solutions,
            "missing_extensions": list(self.missing_extensions),
            "grid_points": self.grid_points,
            "solvable_points": self.solvable_points,
            "bad_projections": list(self.bad_projections),
            "ok": self.ok,
        }


def verify_correspondence(
    S: RingSystem,
    edef: EDefinition,
    ambient: Ambient,
    bound_ring: int,
    bound_group: int,
    *,
    eval_limit: int = 20_000_000,
) -> CorrespondenceReport:
    """Two-directional bounded check of the ring-to-group compilation.

    Direction (i): every ring solution within bound_ring, with every subterm
    tuple pinned to c^(subterm value), extends to a full group solution by
    auxiliary search within bound_group; the found assignment is re-verified
    by exact substitution.  Direction (ii): for every ring-variable exponent
    tuple in [-bound_group, bound_group]^k the compiled system is searched
    with exactly the ring-variable tuples pinned; solvable tuples must
    satisfy the ring system.  Because the domain gadget confines tuple
    variables to powers of c whose exponent is a gamma coordinate (bounded by
    the box), this grid covers every group solution within bound_group.
    """
    compiled = compile_system(edef, S)
    consts = ambient.constants()
    c = commutator(consts["a"], consts["b"])
    term_var = compiled.term_variable

    ring_solutions = bounded_solve_ring(S, bound_ring)
    missing = []
    for sol in ring_solutions:
        pin = {
            name: power(c, eval_term(t, sol)) for t, name in compiled.term_names
        }
        found = bounded_solve_group(
            compiled.system,
            ambient,
            bound_group,
            pinned=pin,
            find_all=False,
            eval_limit=eval_limit,
        )
        ok_here = False
        if found:
            env = dict(consts)
            env.update(found[0])
            ok_here = all(
                ambient.is_trivial(
                    multiply(eval_gword(a, env, ambient.m), inverse(eval_gword(b, env, ambient.m)))
                )
                for a, b in compiled.system.equations
            )
        if not ok_here:
            missing.append(sol)

    ring_vars = S.variables
    var_names = compiled.ring_variable_names()
    bad = []
    solvable = 0
    grid = 0
    for combo in itertools.product(
        range(-bound_group, bound_group + 1), repeat=len(ring_vars)
    ):
        grid += 1
        pin = {var_names[v]: power(c, t) for v, t in zip(ring_vars, combo)}
        found = bounded_solve_group(
            compiled.system,
            ambient,
            bound_group,
            pinned=pin,
            find_all=False,
            eval_limit=eval_limit,
        )
        if found:
            solvable += 1
            assignment = dict(zip(ring_vars, combo))
            if not ring_satisfies(S, assignment):
                bad.append(assignment)
    return CorrespondenceReport(
        ring_solutions=len(ring_solutions),
        missing_extensions=tuple(missing),
        grid_points=grid,
        solvable_points=solvable,
        bad_projections=tuple(bad),
    )


def odot_law_failures(
    edef: EDefinition,
    ambient: Ambient,
    t_max: int = 4,
    aux_bound: int = 4,
    *,
    eval_limit: int = 20_000_000,
) -> List[Tuple[int, int]]:
    """Check x3 = c^(t1*t2) across all witnesses of the instantiated
    multiplication gadget, for |t1|, |t2| <= t_max.

    For each pair, x1 and x2 are pinned to c^t1, c^t2 and all witnesses
    (auxiliaries within aux_bound, x3 within t_max^2) are enumerated; a pair
    fails if no witness exists or some witness yields a different x3.
    """
    consts = ambient.constants()
    c = commutator(consts["a"], consts["b"])
    tpl = edef.mul
    mapping = {"x1": "x1", "x2": "x2", "x3": "x3"}
    for i, aux in enumerate(tpl.aux, start=1):
        mapping[aux] = f"p{i}"
    aux_names = tuple(mapping[aux] for aux in tpl.aux)
    system = GroupSystem(
        variables=("x1", "x2", "x3") + aux_names,
        constants=edef.constants,
        equations=instantiate_template(tpl, mapping),
    )
    failures = []
    boxes = {"x3": t_max * t_max, "*": aux_bound}
    for t1 in range(-t_max, t_max + 1):
        for t2 in range(-t_max, t_max + 1):
            pin = {"x1": power(c, t1), "x2": power(c, t2)}
            sols = bounded_solve_group(
                system, ambient, boxes, pinned=pin, find_all=True, eval_limit=eval_limit
            )
            expected = power(c, t1 * t2)
            if not sols or any(s["x3"] != expected for s in sols):
                failures.append((t1, t2))
    return failures
