"""Typechecker, interpreter, partial evaluator, and text round-trips."""

from __future__ import annotations

import random

import pytest

from arcforge.dsl import (
    DSL_VERSION,
    FilterObjects,
    FoldOverlay,
    InputRef,
    Let,
    Lit,
    MapObjects,
    PredTerm,
    Prim,
    Ty,
    VarRef,
    free_vars,
    parse_program,
    partial_eval,
    render_program,
    run_program,
    typecheck,
)
from arcforge.errors import (
    DslTypeError,
    ParseError,
    UnboundVariable,
    UnknownPrimitive,
)
from arcforge.grid import Color, Grid
from arcforge.objects import Axis, Connectivity, Direction
from gridgen import random_grid


def conn_lit() -> Lit:
    return Lit(Connectivity.FOUR)


def mode_lit():
    from arcforge.objects import ModeKind

    return Lit(ModeKind.SAME_COLOR)


def find_objs(term=None) -> Prim:
    return Prim("find_objects", (term or InputRef(), conn_lit(), mode_lit()))


def test_typecheck_examples():
    assert typecheck(InputRef()) is Ty.GRID
    assert typecheck(Prim("rotate", (InputRef(), Lit(1)))) is Ty.GRID
    with pytest.raises(DslTypeError):
        typecheck(Prim("rotate", (Lit(3), InputRef())))
    with pytest.raises(UnknownPrimitive):
        typecheck(Prim("explode", (InputRef(),)))
    with pytest.raises(DslTypeError):
        typecheck(Prim("rotate", (InputRef(),)))  # arity


def test_identity_program():
    g = Grid.from_rows([[1, 2], [3, 4]])
    assert run_program(InputRef(), g) == g
    assert render_program(InputRef()) == "(input)"


def test_eval_rotate_example():
    g = Grid.from_rows([[1, 2]])
    out = run_program(Prim("rotate", (InputRef(), Lit(2))), g)
    assert out.to_lists() == [[2, 1]]


def test_eval_recolor_largest_with_free_variable():
    # Repaint the largest object with the color bound to C.
    p = Prim(
        "paint",
        (
            InputRef(),
            Prim("only", (Prim("filter_objects", (find_objs(), PredTerm("size_largest", ()))),)),
            VarRef("C"),
        ),
    )
    g = Grid.from_rows([
        [1, 1, 0],
        [1, 0, 0],
        [0, 0, 2],
    ])
    expected = [
        [4, 4, 0],
        [4, 0, 0],
        [0, 0, 2],
    ]
    assert free_vars(p) == {"C"}
    assert run_program(p, g, {"C": 4}).to_lists() == expected
    with pytest.raises(UnboundVariable):
        run_program(p, g)


def test_free_vars_binding_rules():
    assert free_vars(InputRef()) == frozenset()
    assert free_vars(VarRef("C")) == {"C"}
    assert free_vars(Let("x", Lit(1), VarRef("x"))) == frozenset()
    assert free_vars(Let("x", VarRef("y"), VarRef("x"))) == {"y"}
    m = MapObjects("o", find_objs(), Prim("recolor_object", (VarRef("o"), VarRef("c"))))
    assert free_vars(m) == {"c"}


def test_partial_eval_substitutes_and_closes():
    p = Prim("rotate", (InputRef(), VarRef("k")))
    q = partial_eval(p, {"k": 1})
    assert free_vars(q) == frozenset()
    assert q == Prim("rotate", (InputRef(), Lit(1)))
    with pytest.raises(UnboundVariable):
        partial_eval(p, {})


def test_partial_eval_folds_constants():
    # (if (eq 2 2) c3 c4) does not depend on the input: folds to a literal.
    p = Prim("if", (Prim("eq", (Lit(2), Lit(2))), Lit(Color(3)), Lit(Color(4))))
    q = partial_eval(p, {})
    assert q == Lit(Color(3))
    # A term touching the input must not fold.
    p2 = Prim("grid_height", (InputRef(),))
    assert partial_eval(p2, {}) == p2


def test_partial_eval_soundness_on_random_programs():
    rng = random.Random(7)
    rotated = Prim("rotate", (InputRef(), VarRef("k")))
    programs = [
        Prim("recolor_map", (rotated, Lit(Color(1)), VarRef("c"), Lit(Color(2)), VarRef("c"))),
        FoldOverlay(
            MapObjects(
                "o",
                find_objs(Prim("gravity", (InputRef(), VarRef("d")))),
                Prim("recolor_object", (VarRef("o"), VarRef("c"))),
            ),
            Prim(
                "canvas",
                (Prim("grid_height", (InputRef(),)), Prim("grid_width", (InputRef(),)), Lit(Color(0))),
            ),
        ),
    ]
    envs = [
        {"k": 1, "c": Color(4), "d": Direction.TOP},
        {"k": 2, "c": Color(7), "d": Direction.LEFT},
        {"k": 3, "c": Color(9), "d": Direction.BOTTOM},
    ]
    checked = 0
    for p in programs:
        for env in envs:
            inlined = partial_eval(p, env)
            assert free_vars(inlined) == frozenset()
            for _ in range(20):
                g = random_grid(rng, max_side=6)
                assert run_program(inlined, g) == run_program(p, g, env)
                checked += 1
    assert checked == 120


def test_map_filter_fold_forms():
    g = Grid.from_rows([
        [1, 0, 2, 2],
        [0, 0, 0, 0],
        [3, 3, 3, 0],
    ])
    # Recolor every object to grey, then flatten back onto a blank canvas.
    p = FoldOverlay(
        MapObjects("o", find_objs(), Prim("recolor_object", (VarRef("o"), Lit(Color(5))))),
        Prim("canvas", (Prim("grid_height", (InputRef(),)), Prim("grid_width", (InputRef(),)), Lit(Color(0)))),
    )
    out = run_program(p, g)
    assert out.to_lists() == [
        [5, 0, 5, 5],
        [0, 0, 0, 0],
        [5, 5, 5, 0],
    ]
    # Keep only size-3 objects.
    q = FoldOverlay(
        FilterObjects("o", find_objs(), Prim("eq", (Prim("obj_area", (VarRef("o"),)), Lit(3)))),
        Prim("canvas", (Prim("grid_height", (InputRef(),)), Prim("grid_width", (InputRef(),)), Lit(Color(0)))),
    )
    assert typecheck(q) is Ty.GRID
    out2 = run_program(q, g)
    assert out2.to_lists() == [
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [3, 3, 3, 0],
    ]


def test_let_scoping_and_shadowing():
    p = Let("x", Lit(2), Let("x", Lit(3), Prim("rotate", (InputRef(), VarRef("x")))))
    g = Grid.from_rows([[1, 2]])
    assert run_program(p, g).to_lists() == [[2], [1]]  # inner binding wins


def test_count_and_scalars():
    g = Grid.from_rows([[1, 0, 2], [0, 0, 0], [3, 0, 0]])
    n = Prim("count_objects", (find_objs(),))
    p = Prim("canvas", (n, n, Lit(Color(6))))
    out = run_program(p, g)
    assert out.to_lists() == [[6, 6, 6]] * 3


def test_if_requires_bool_and_is_lazy():
    with pytest.raises(DslTypeError):
        typecheck(Prim("if", (Lit(1), InputRef(), InputRef())))
    # The untaken branch would crash (only() on empty); laziness avoids it.
    g = Grid.filled(2, 2, 0)
    p = Prim(
        "if",
        (
            Prim("eq", (Lit(1), Lit(1))),
            InputRef(),
            Prim("crop_to_bbox", (InputRef(), Prim("only", (find_objs(),)))),
        ),
    )
    assert run_program(p, g) == g


def test_if_branch_types_must_agree():
    with pytest.raises(DslTypeError):
        typecheck(Prim("if", (Prim("eq", (Lit(1), Lit(1))), InputRef(), Lit(3))))


def test_render_parse_roundtrip_on_handwritten_programs():
    programs = [
        InputRef(),
        Prim("rotate", (InputRef(), Lit(1))),
        Prim("reflect", (InputRef(), Lit(Axis.VERTICAL))),
        Prim("gravity", (InputRef(), Lit(Direction.BOTTOM))),
        Let("os", find_objs(), Prim("count_objects", (VarRef("os"),))),
        FoldOverlay(
            FilterObjects("o", find_objs(), Prim("eq", (Prim("obj_area", (VarRef("o"),)), Lit(2)))),
            InputRef(),
        ),
        MapObjects("o", find_objs(), Prim("translate", (VarRef("o"), Lit(1), Lit(0)))),
        Prim("recolor_map", (InputRef(), Lit(Color(1)), Lit(Color(2)), Lit(Color(3)), Lit(Color(4)))),
        Prim("crop_to_bbox", (InputRef(), Prim("only", (find_objs(),)))),
    ]
    for p in programs:
        text = render_program(p)
        assert parse_program(text) == p


def test_sort_key_atoms_roundtrip():
    from arcforge.objects import SortKey

    p = Prim(
        "stack",
        (
            Prim("canvas", (Lit(4), Lit(4), Lit(Color(0)))),
            Prim("sort_objects_by", (find_objs(), Lit(SortKey.SIZE), Lit(False))),
            Lit(Direction.TOP),
            Lit(Direction.LEFT),
        ),
    )
    text = render_program(p)
    assert "by_size" in text and "false" in text
    assert parse_program(text) == p
    assert typecheck(p) is Ty.GRID


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_program("(rotate (input)")  # unbalanced
    with pytest.raises(ParseError):
        parse_program("")
    with pytest.raises(ParseError):
        parse_program("(input) (input)")  # trailing content
    with pytest.raises(ParseError):
        parse_program("(let input (input) (input))")  # reserved binder
    err = None
    try:
        parse_program("(rotate (input) ???)")
    except ParseError as e:
        err = e
    assert err is not None and err.line == 1 and err.col > 1


def test_parse_unknown_head_fails_typecheck_not_parse():
    p = parse_program("(zap (input))")
    assert isinstance(p, Prim)
    with pytest.raises(UnknownPrimitive):
        typecheck(p)


def test_render_wraps_long_programs_deterministically():
    from arcforge.objects import SortKey

    p = Prim(
        "stack",
        (
            Prim("canvas", (Prim("grid_height", (InputRef(),)), Prim("grid_width", (InputRef(),)), Lit(Color(0)))),
            Prim("sort_objects_by", (find_objs(), Lit(SortKey.SIZE), Lit(False))),
            Lit(Direction.BOTTOM),
            Lit(Direction.RIGHT),
        ),
    )
    text = render_program(p)
    assert all(len(line) <= 78 for line in text.splitlines())
    assert render_program(parse_program(text)) == text


def test_dsl_version_is_semver():
    parts = DSL_VERSION.split(".")
    assert len(parts) == 3 and all(x.isdigit() for x in parts)
