"""Ring systems, the group-equation compiler, and the bounded solvers."""

import json

import pytest

from nilq.diophantine import (
    FreeNilpotentAmbient,
    GroupSystem,
    QuotientAmbient,
    RingSystem,
    SearchSpaceError,
    bounded_solve_group,
    bounded_solve_ring,
    comm,
    compile_system,
    eval_gword,
    eval_term,
    gen,
    gword,
    gword_from_json,
    gword_to_json,
    instantiate_template,
    odot_law_failures,
    ring_satisfies,
    term_from_json,
    term_to_json,
    verify_correspondence,
    z_in_g_templates,
)
from nilq.nilpotent2 import commutator, generator, power
from nilq.presentation import normalize, parse_presentation


def _ring(variables, equations):
    return RingSystem(tuple(variables), tuple(equations))


V = lambda name: ("var", name)
C = lambda n: ("const", n)
ADD = lambda a, b: ("add", a, b)
MUL = lambda a, b: ("mul", a, b)


def test_term_json_roundtrip():
    t = ADD(MUL(V("x"), V("y")), C(-3))
    assert term_from_json(term_to_json(t)) == t
    # unary and binary minus both land on add/neg trees
    assert term_from_json(["-", ["var", "x"]]) == ("neg", V("x"))
    assert term_from_json(["-", ["var", "x"], ["var", "y"]]) == (
        "add",
        V("x"),
        ("neg", V("y")),
    )
    with pytest.raises(ValueError):
        term_from_json(["&", ["var", "x"]])


def test_eval_term():
    t = ADD(MUL(V("x"), V("x")), ("neg", C(4)))
    assert eval_term(t, {"x": 3}) == 5
    assert eval_term(t, {"x": -2}) == 0


def test_ring_system_validation_and_json():
    with pytest.raises(ValueError):
        _ring(["x"], [(V("x"), V("y"))])
    S = _ring(["x", "y"], [(ADD(V("x"), V("y")), C(1))])
    assert RingSystem.from_jsonable(S.to_jsonable()) == S
    assert ring_satisfies(S, {"x": 3, "y": -2})
    assert not ring_satisfies(S, {"x": 0, "y": 0})


def test_bounded_solve_ring_examples():
    S = _ring(["x"], [(MUL(V("x"), V("x")), C(4))])
    assert bounded_solve_ring(S, 5) == [{"x": -2}, {"x": 2}]
    S2 = _ring(["x"], [(MUL(V("x"), V("x")), C(2))])
    assert bounded_solve_ring(S2, 5) == []
    S3 = _ring(["x1", "x2", "x3"], [(ADD(V("x1"), V("x2")), V("x3"))])
    sols = bounded_solve_ring(S3, 2)
    # the box clips x3 too, so 19 of the 25 (x1,x2) pairs survive
    assert len(sols) == 19
    assert all(s["x1"] + s["x2"] == s["x3"] for s in sols)


def test_bounded_solve_ring_static_limit():
    S = _ring(["x", "y", "z"], [(V("x"), V("x"))])
    with pytest.raises(SearchSpaceError):
        bounded_solve_ring(S, 100, limit=1000)


def test_gword_json_roundtrip():
    w = gword(gen("x", 2), comm(gword(gen("a")), gword(gen("b")), -3))
    assert gword_from_json(gword_to_json(w)) == w


def test_eval_gword():
    m = 2
    a, b = generator(m, 1), generator(m, 2)
    w = gword(comm(gword(gen("a")), gword(gen("b")), 2))
    assert eval_gword(w, {"a": a, "b": b}, m) == power(commutator(a, b), 2)


def test_group_system_validation():
    with pytest.raises(ValueError):
        GroupSystem(("x",), ("x",), ())  # variable/constant collision
    with pytest.raises(ValueError):
        GroupSystem(("x",), (), (((gen("y"),), (gen("x"),)),))


def test_group_system_json_roundtrip():
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((gen("x"),), (comm(gword(gen("a")), gword(gen("b"))),)),),
    )
    assert GroupSystem.from_jsonable(S.to_jsonable()) == S


def test_templates_shape():
    edef = z_in_g_templates()
    assert edef.arity == 1
    assert len(edef.domain.equations) == 2 and len(edef.domain.aux) == 1
    assert len(edef.add.equations) == 1 and not edef.add.aux
    assert len(edef.neg.equations) == 1
    assert len(edef.mul.equations) == 5 and len(edef.mul.aux) == 2
    assert len(edef.equal.equations) == 1
    assert edef.constant_word(0) == ()
    (factor,) = edef.constant_word(3)
    assert factor[0] == "comm" and factor[3] == 3


def test_instantiate_template_needs_full_mapping():
    edef = z_in_g_templates()
    with pytest.raises(ValueError):
        instantiate_template(edef.mul, {"x1": "u"})


def test_compile_addition_shape():
    edef = z_in_g_templates()
    S = _ring(["x1", "x2", "x3"], [(ADD(V("x1"), V("x2")), V("x3"))])
    compiled = compile_system(edef, S)
    # one tuple per ring variable plus the sum node
    assert len(compiled.term_names) == 4
    # three domain gadgets (2 eqs each), one join, one equality
    assert len(compiled.system.equations) == 8
    assert set(compiled.ring_variable_names()) == {"x1", "x2", "x3"}


def test_compile_shares_repeated_subterms():
    edef = z_in_g_templates()
    xx = compile_system(edef, _ring(["x"], [(ADD(V("x"), V("x")), C(0))]))
    xy = compile_system(edef, _ring(["x", "y"], [(ADD(V("x"), V("y")), C(0))]))
    assert len(xy.system.variables) == len(xx.system.variables) + 2  # tuple + domain aux


def test_compile_deterministic_bytes():
    edef = z_in_g_templates()
    S = _ring(["x"], [(MUL(V("x"), V("x")), C(4))])
    a = json.dumps(compile_system(edef, S).system.to_jsonable(), sort_keys=True)
    b = json.dumps(compile_system(edef, S).system.to_jsonable(), sort_keys=True)
    assert a == b


def test_solve_group_commutator_value():
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((gen("x"),), (comm(gword(gen("a")), gword(gen("b"))),)),),
    )
    sols = bounded_solve_group(S, amb, 1)
    assert len(sols) == 1
    assert sols[0]["x"] == commutator(generator(2, 1), generator(2, 2))


def test_solve_group_centralizer_count():
    # [x, a] = 1 in rank 2: alpha_2 = 0, other coordinates free in the box
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((comm(gword(gen("x")), gword(gen("a"))),), ()),),
    )
    sols = bounded_solve_group(S, amb, 1)
    assert len(sols) == 9
    assert all(s["x"].alpha[1] == 0 for s in sols)


def test_solve_group_no_square_root_of_generator():
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((gen("x", 2),), (gen("a"),)),),
    )
    assert bounded_solve_group(S, amb, 2) == []


def test_solve_group_find_first():
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((comm(gword(gen("x")), gword(gen("a"))),), ()),),
    )
    sols = bounded_solve_group(S, amb, 1, find_all=False)
    assert len(sols) == 1


def test_solve_group_pinned_escapes_box():
    # pinned values are exempt from the box; free variables are not
    amb = FreeNilpotentAmbient(2)
    c10 = power(commutator(generator(2, 1), generator(2, 2)), 10)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((gen("x"),), (comm(gword(gen("a")), gword(gen("b")), 10),)),),
    )
    assert bounded_solve_group(S, amb, 1, pinned={"x": c10}) == [{"x": c10}]
    # without the pin the box rejects the only candidate
    assert bounded_solve_group(S, amb, 1) == []


def test_solve_group_eval_budget():
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x", "y"),
        ("a", "b"),
        (((comm(gword(gen("x")), gword(gen("y"))),), ()),),
    )
    with pytest.raises(SearchSpaceError):
        bounded_solve_group(S, amb, 2, eval_limit=5)


def test_solve_group_per_variable_boxes():
    amb = FreeNilpotentAmbient(2)
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((comm(gword(gen("x")), gword(gen("a"))),), ()),),
    )
    sols = bounded_solve_group(S, amb, {"x": 0})
    assert len(sols) == 1  # only the identity fits a zero box


def test_quotient_ambient_solution():
    np_ = normalize(parse_presentation("3 2\na1^2\n"))
    amb = QuotientAmbient(np_)
    # the ambient binds the distinguished constants to the c-small pair a2, a3
    S = GroupSystem(
        ("x",),
        ("a", "b"),
        (((gen("x"),), (comm(gword(gen("a")), gword(gen("b"))),)),),
    )
    sols = bounded_solve_group(S, amb, 1)
    assert len(sols) == 1
    assert sols[0]["x"] == commutator(generator(3, 2), generator(3, 3))


def test_verify_correspondence_known_reports():
    edef = z_in_g_templates()
    amb = FreeNilpotentAmbient(2)
    S = _ring(["x"], [(V("x"), C(0))])
    rep = verify_correspondence(S, edef, amb, 2, 4, eval_limit=10**7)
    assert rep.ok
    assert rep.ring_solutions == 1
    # completeness sweeps the group box, which is the wider of the two
    assert rep.grid_points == 9
    assert rep.solvable_points == 1

    S2 = _ring(["x"], [(MUL(V("x"), V("x")), C(2))])
    rep2 = verify_correspondence(S2, edef, amb, 3, 6, eval_limit=10**7)
    assert rep2.ok
    assert rep2.ring_solutions == 0
    assert rep2.solvable_points == 0

    data = rep.to_jsonable()
    assert data["ok"] and "missing_extensions" in data


def test_verify_correspondence_addition_counts():
    edef = z_in_g_templates()
    amb = FreeNilpotentAmbient(2)
    S = _ring(["x1", "x2", "x3"], [(ADD(V("x1"), V("x2")), V("x3"))])
    rep = verify_correspondence(S, edef, amb, 2, 3, eval_limit=10**7)
    assert rep.ok
    assert rep.ring_solutions == 19
    assert rep.grid_points == 343
    assert rep.solvable_points == 37


def test_odot_law_small_range():
    edef = z_in_g_templates()
    amb = FreeNilpotentAmbient(2)
    assert odot_law_failures(edef, amb, t_max=2, aux_bound=3, eval_limit=10**7) == []
