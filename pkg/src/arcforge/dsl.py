"""A small total language for grid transformations.

Programs are first-order terms over grids, objects, and scalars. Every
latent rule a generator applies is expressed here, and the inlined form
of that rule (all task variables substituted, constants folded) is what
gets exported next to a sample as its replayable witness.

Text form is parenthesized prefix notation:

    (paint (input) (only (filter_objects (find_objects (input) four same_color) size_largest)) c4)

Scalar literals: integers, colors c0..c9, true/false, edge names
top/bottom/left/right, axes horizontal/vertical, connectivities
four/eight, extraction modes same_color/any_foreground, and sort keys
by_size/by_color/by_row/by_col. Anything else is a variable reference.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Union

from .errors import (
    DegenerateResult,
    DslTypeError,
    ParseError,
    UnboundVariable,
    UnknownPrimitive,
)
from .grid import Color, Grid
from .objects import (
    Axis,
    BboxDims,
    ColorEquals,
    Connectivity,
    Direction,
    ExtractionMode,
    GridObject,
    GridObjects,
    ModeKind,
    ObjectPredicate,
    SizeEquals,
    SizeLargest,
    SizeSmallest,
    SortKey,
    crop_to_bbox,
    filter_objects,
    find_connected_objects,
    gravity,
    make_canvas,
    overlay,
    paint,
    recolor_map,
    recolor_object,
    reflect,
    rotate,
    sort_objects_by,
    stack,
    translate,
)

DSL_VERSION = "1.0.0"


class Ty(Enum):
    GRID = "Grid"
    OBJ = "Object"
    OBJS = "Objects"
    INT = "Int"
    COLOR = "Color"
    BOOL = "Bool"
    DIR = "Direction"
    AXIS = "Axis"
    CONN = "Connectivity"
    MODE = "Mode"
    KEY = "SortKey"
    PRED = "Predicate"


SCALAR_TYPES = {Ty.INT, Ty.COLOR, Ty.BOOL, Ty.DIR, Ty.AXIS, Ty.CONN, Ty.MODE, Ty.KEY}

Scalar = Union[int, Color, bool, Direction, Axis, Connectivity, ModeKind, SortKey]


def literal_type(v: Scalar) -> Ty:
    if isinstance(v, bool):
        return Ty.BOOL
    if isinstance(v, Color):
        return Ty.COLOR
    if isinstance(v, int):
        return Ty.INT
    if isinstance(v, Direction):
        return Ty.DIR
    if isinstance(v, Axis):
        return Ty.AXIS
    if isinstance(v, Connectivity):
        return Ty.CONN
    if isinstance(v, ModeKind):
        return Ty.MODE
    if isinstance(v, SortKey):
        return Ty.KEY
    raise DslTypeError(f"{v!r} has no literal type")


# --- terms --------------------------------------------------------------------

@dataclass(frozen=True)
class InputRef:
    """The episode's input grid."""


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Lit:
    value: Scalar


@dataclass(frozen=True)
class Prim:
    op: str
    args: tuple["Term", ...]


@dataclass(frozen=True)
class PredTerm:
    """Fixed object predicate used as a filter_objects argument."""

    kind: str  # size_equals | size_largest | size_smallest | color_equals | bbox_dims
    args: tuple["Term", ...] = ()


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class MapObjects:
    binder: str
    source: "Term"
    body: "Term"


@dataclass(frozen=True)
class FilterObjects:
    binder: str
    source: "Term"
    predicate: "Term"


@dataclass(frozen=True)
class FoldOverlay:
    objects: "Term"
    canvas: "Term"


Term = Union[InputRef, VarRef, Lit, Prim, PredTerm, Let, MapObjects, FilterObjects, FoldOverlay]


# --- primitive table ----------------------------------------------------------

@dataclass(frozen=True)
class PrimSpec:
    params: tuple[Ty, ...]
    result: Ty
    fn: Callable


def _only(objs: GridObjects) -> GridObject:
    if len(objs) != 1:
        raise DegenerateResult(f"expected exactly one object, found {len(objs)}")
    return objs[0]


PRIMITIVES: dict[str, PrimSpec] = {
    "find_objects": PrimSpec(
        (Ty.GRID, Ty.CONN, Ty.MODE),
        Ty.OBJS,
        lambda g, conn, mk: find_connected_objects(g, conn, ExtractionMode(mk)),
    ),
    "translate": PrimSpec((Ty.OBJ, Ty.INT, Ty.INT), Ty.OBJ, translate),
    "rotate": PrimSpec((Ty.GRID, Ty.INT), Ty.GRID, rotate),
    "reflect": PrimSpec((Ty.GRID, Ty.AXIS), Ty.GRID, reflect),
    "crop_to_bbox": PrimSpec((Ty.GRID, Ty.OBJ), Ty.GRID, crop_to_bbox),
    "paint": PrimSpec((Ty.GRID, Ty.OBJ, Ty.COLOR), Ty.GRID, paint),
    "overlay": PrimSpec((Ty.GRID, Ty.OBJ), Ty.GRID, overlay),
    "recolor_object": PrimSpec((Ty.OBJ, Ty.COLOR), Ty.OBJ, recolor_object),
    "only": PrimSpec((Ty.OBJS,), Ty.OBJ, _only),
    "filter_objects": PrimSpec((Ty.OBJS, Ty.PRED), Ty.OBJS, filter_objects),
    "sort_objects_by": PrimSpec((Ty.OBJS, Ty.KEY, Ty.BOOL), Ty.OBJS, sort_objects_by),
    "canvas": PrimSpec((Ty.INT, Ty.INT, Ty.COLOR), Ty.GRID, make_canvas),
    "gravity": PrimSpec((Ty.GRID, Ty.DIR), Ty.GRID, gravity),
    "stack": PrimSpec((Ty.GRID, Ty.OBJS, Ty.DIR, Ty.DIR), Ty.GRID, stack),
    "recolor_map": PrimSpec((Ty.GRID, Ty.COLOR, Ty.COLOR), Ty.GRID, None),  # variadic
    "count_objects": PrimSpec((Ty.OBJS,), Ty.INT, lambda os: len(os)),
    "obj_area": PrimSpec((Ty.OBJ,), Ty.INT, lambda o: o.size),
    "grid_height": PrimSpec((Ty.GRID,), Ty.INT, lambda g: g.height),
    "grid_width": PrimSpec((Ty.GRID,), Ty.INT, lambda g: g.width),
    "eq": PrimSpec((Ty.INT, Ty.INT), Ty.BOOL, lambda a, b: a == b),
    "if": PrimSpec((Ty.BOOL,), None, None),  # polymorphic, handled specially
}

_PRED_PARAMS: dict[str, tuple[Ty, ...]] = {
    "size_equals": (Ty.INT,),
    "size_largest": (),
    "size_smallest": (),
    "color_equals": (Ty.COLOR,),
    "bbox_dims": (Ty.INT, Ty.INT),
}


# --- free variables -----------------------------------------------------------

def free_vars(p: Term) -> frozenset[str]:
    """Names of unbound variable references in the program."""

    def walk(t: Term, bound: frozenset[str]) -> frozenset[str]:
        if isinstance(t, VarRef):
            return frozenset() if t.name in bound else frozenset({t.name})
        if isinstance(t, (InputRef, Lit)):
            return frozenset()
        if isinstance(t, (Prim, PredTerm)):
            out: frozenset[str] = frozenset()
            for a in t.args:
                out |= walk(a, bound)
            return out
        if isinstance(t, Let):
            return walk(t.bound, bound) | walk(t.body, bound | {t.name})
        if isinstance(t, MapObjects):
            return walk(t.source, bound) | walk(t.body, bound | {t.binder})
        if isinstance(t, FilterObjects):
            return walk(t.source, bound) | walk(t.predicate, bound | {t.binder})
        if isinstance(t, FoldOverlay):
            return walk(t.objects, bound) | walk(t.canvas, bound)
        raise TypeError(f"not a term: {t!r}")

    return walk(p, frozenset())


# --- type checking ------------------------------------------------------------

def typecheck(p: Term, var_types: Mapping[str, Ty] | None = None) -> Ty:
    """Assign a type to every term or raise.

    Free variables take their type from context: the first position a
    variable appears in fixes it, and later conflicting uses fail. A
    complete program must have root type Grid, which callers assert
    separately when they require it.
    """
    inferred: dict[str, Ty] = dict(var_types or {})

    def expect(got: Ty, want: Ty | None, where: str) -> Ty:
        if want is not None and got is not want:
            raise DslTypeError(f"{where}: expected {want.value}, got {got.value}")
        return got

    def check(t: Term, want: Ty | None, scope: Mapping[str, Ty]) -> Ty:
        if isinstance(t, InputRef):
            return expect(Ty.GRID, want, "(input)")
        if isinstance(t, Lit):
            return expect(literal_type(t.value), want, f"literal {t.value!r}")
        if isinstance(t, VarRef):
            if t.name in scope:
                return expect(scope[t.name], want, t.name)
            if t.name in inferred:
                return expect(inferred[t.name], want, t.name)
            if want is None:
                raise DslTypeError(f"cannot infer type of free variable '{t.name}'")
            if want is Ty.PRED:
                raise DslTypeError("a predicate cannot be a variable")
            inferred[t.name] = want
            return want
        if isinstance(t, PredTerm):
            params = _PRED_PARAMS.get(t.kind)
            if params is None:
                raise UnknownPrimitive(f"unknown predicate '{t.kind}'")
            if len(t.args) != len(params):
                raise DslTypeError(
                    f"predicate {t.kind} takes {len(params)} args, got {len(t.args)}"
                )
            for a, pt in zip(t.args, params):
                check(a, pt, scope)
            return expect(Ty.PRED, want, t.kind)
        if isinstance(t, Prim):
            spec = PRIMITIVES.get(t.op)
            if spec is None:
                raise UnknownPrimitive(f"unknown operation '{t.op}'")
            if t.op == "if":
                if len(t.args) != 3:
                    raise DslTypeError(f"if takes 3 args, got {len(t.args)}")
                check(t.args[0], Ty.BOOL, scope)
                t1 = check(t.args[1], want, scope)
                check(t.args[2], t1, scope)
                return t1
            if t.op == "recolor_map":
                if len(t.args) < 3 or len(t.args) % 2 == 0:
                    raise DslTypeError("recolor_map takes a grid and color pairs")
                check(t.args[0], Ty.GRID, scope)
                for a in t.args[1:]:
                    check(a, Ty.COLOR, scope)
                return expect(Ty.GRID, want, t.op)
            if len(t.args) != len(spec.params):
                raise DslTypeError(
                    f"{t.op} takes {len(spec.params)} args, got {len(t.args)}"
                )
            for a, pt in zip(t.args, spec.params):
                if pt is Ty.PRED and not isinstance(a, PredTerm):
                    raise DslTypeError(f"{t.op}: predicate argument must be a predicate form")
                check(a, pt, scope)
            return expect(spec.result, want, t.op)
        if isinstance(t, Let):
            _check_binder(t.name)
            tb = check(t.bound, None, scope)
            return check(t.body, want, {**scope, t.name: tb})
        if isinstance(t, MapObjects):
            _check_binder(t.binder)
            check(t.source, Ty.OBJS, scope)
            check(t.body, Ty.OBJ, {**scope, t.binder: Ty.OBJ})
            return expect(Ty.OBJS, want, "map_objects")
        if isinstance(t, FilterObjects):
            _check_binder(t.binder)
            check(t.source, Ty.OBJS, scope)
            check(t.predicate, Ty.BOOL, {**scope, t.binder: Ty.OBJ})
            return expect(Ty.OBJS, want, "filter_where")
        if isinstance(t, FoldOverlay):
            check(t.objects, Ty.OBJS, scope)
            check(t.canvas, Ty.GRID, scope)
            return expect(Ty.GRID, want, "fold_overlay")
        raise TypeError(f"not a term: {t!r}")

    return check(p, None, {})


def _check_binder(name: str) -> None:
    if not _IDENT_RE.fullmatch(name) or name in RESERVED:
        raise DslTypeError(f"invalid binder name '{name}'")


# --- evaluation ---------------------------------------------------------------

def eval_term(p: Term, grid: Grid | None, env: Mapping[str, object] | None = None):
    """Run a typechecked program against an input grid.

    env supplies values for free variables. Scalar conditions choose
    branches lazily, so the untaken branch of an `if` is never run.
    """

    def ev(t: Term, scope: Mapping[str, object]):
        if isinstance(t, InputRef):
            if grid is None:
                raise UnboundVariable("program reads the input grid but none was given")
            return grid
        if isinstance(t, Lit):
            return t.value
        if isinstance(t, VarRef):
            if t.name in scope:
                return scope[t.name]
            raise UnboundVariable(f"variable '{t.name}' has no binding")
        if isinstance(t, PredTerm):
            vals = [ev(a, scope) for a in t.args]
            return _build_predicate(t.kind, vals)
        if isinstance(t, Prim):
            if t.op == "if":
                cond = ev(t.args[0], scope)
                return ev(t.args[1] if cond else t.args[2], scope)
            if t.op == "recolor_map":
                g = ev(t.args[0], scope)
                colors = [int(ev(a, scope)) for a in t.args[1:]]
                mapping = dict(zip(colors[0::2], colors[1::2]))
                return recolor_map(g, mapping)
            spec = PRIMITIVES.get(t.op)
            if spec is None:
                raise UnknownPrimitive(f"unknown operation '{t.op}'")
            return spec.fn(*(ev(a, scope) for a in t.args))
        if isinstance(t, Let):
            v = ev(t.bound, scope)
            return ev(t.body, {**scope, t.name: v})
        if isinstance(t, MapObjects):
            objs = ev(t.source, scope)
            mapped = []
            for o in objs:
                v = ev(t.body, {**scope, t.binder: o})
                if not isinstance(v, GridObject):
                    raise DslTypeError("map_objects body must produce an object")
                mapped.append(v)
            return GridObjects(items=tuple(mapped))
        if isinstance(t, FilterObjects):
            objs = ev(t.source, scope)
            kept = []
            for o in objs:
                v = ev(t.predicate, {**scope, t.binder: o})
                if not isinstance(v, bool):
                    raise DslTypeError("filter_where predicate must produce a boolean")
                if v:
                    kept.append(o)
            return GridObjects(items=tuple(kept))
        if isinstance(t, FoldOverlay):
            objs = ev(t.objects, scope)
            out = ev(t.canvas, scope)
            for o in objs:
                out = overlay(out, o)
            return out
        raise TypeError(f"not a term: {t!r}")

    return ev(p, dict(env or {}))


def _build_predicate(kind: str, vals: list) -> ObjectPredicate:
    if kind == "size_equals":
        return SizeEquals(int(vals[0]))
    if kind == "size_largest":
        return SizeLargest()
    if kind == "size_smallest":
        return SizeSmallest()
    if kind == "color_equals":
        return ColorEquals(int(vals[0]))
    if kind == "bbox_dims":
        return BboxDims(int(vals[0]), int(vals[1]))
    raise UnknownPrimitive(f"unknown predicate '{kind}'")


def run_program(p: Term, grid: Grid, env: Mapping[str, object] | None = None) -> Grid:
    """Evaluate and require a grid result."""
    out = eval_term(p, grid, env)
    if not isinstance(out, Grid):
        raise DslTypeError(f"program produced {type(out).__name__}, expected a grid")
    return out


# --- partial evaluation -------------------------------------------------------

def partial_eval(p: Term, env: Mapping[str, Scalar]) -> Term:
    """Inline every free variable and fold input-independent scalars.

    The result is closed: running it needs only the input grid, and it
    computes exactly what the original computed under env.
    """
    missing = free_vars(p) - set(env)
    if missing:
        raise UnboundVariable(f"env does not bind: {sorted(missing)}")
    for name in free_vars(p):
        literal_type(env[name])  # raises if the value has no literal form

    def subst(t: Term, bound: frozenset[str]) -> Term:
        if isinstance(t, VarRef) and t.name not in bound and t.name in env:
            return Lit(env[t.name])
        if isinstance(t, (InputRef, Lit, VarRef)):
            return t
        if isinstance(t, Prim):
            return Prim(t.op, tuple(subst(a, bound) for a in t.args))
        if isinstance(t, PredTerm):
            return PredTerm(t.kind, tuple(subst(a, bound) for a in t.args))
        if isinstance(t, Let):
            return Let(t.name, subst(t.bound, bound), subst(t.body, bound | {t.name}))
        if isinstance(t, MapObjects):
            return MapObjects(t.binder, subst(t.source, bound), subst(t.body, bound | {t.binder}))
        if isinstance(t, FilterObjects):
            return FilterObjects(
                t.binder, subst(t.source, bound), subst(t.predicate, bound | {t.binder})
            )
        if isinstance(t, FoldOverlay):
            return FoldOverlay(subst(t.objects, bound), subst(t.canvas, bound))
        raise TypeError(f"not a term: {t!r}")

    return _fold(subst(p, frozenset()))


def _fold(t: Term) -> Term:
    if isinstance(t, (InputRef, Lit, VarRef)):
        return t
    if isinstance(t, PredTerm):
        return PredTerm(t.kind, tuple(_fold(a) for a in t.args))
    if isinstance(t, Prim):
        args = tuple(_fold(a) for a in t.args)
        if t.op == "if" and isinstance(args[0], Lit):
            return args[1] if args[0].value else args[2]
        spec = PRIMITIVES.get(t.op)
        if (
            spec is not None
            and spec.result in SCALAR_TYPES
            and all(isinstance(a, Lit) for a in args)
        ):
            return Lit(eval_term(Prim(t.op, args), None, {}))
        return Prim(t.op, args)
    if isinstance(t, Let):
        bound = _fold(t.bound)
        if isinstance(bound, Lit):
            return _fold(_replace_var(t.body, t.name, bound))
        return Let(t.name, bound, _fold(t.body))
    if isinstance(t, MapObjects):
        return MapObjects(t.binder, _fold(t.source), _fold(t.body))
    if isinstance(t, FilterObjects):
        return FilterObjects(t.binder, _fold(t.source), _fold(t.predicate))
    if isinstance(t, FoldOverlay):
        return FoldOverlay(_fold(t.objects), _fold(t.canvas))
    raise TypeError(f"not a term: {t!r}")


def _replace_var(t: Term, name: str, replacement: Lit) -> Term:
    if isinstance(t, VarRef):
        return replacement if t.name == name else t
    if isinstance(t, (InputRef, Lit)):
        return t
    if isinstance(t, Prim):
        return Prim(t.op, tuple(_replace_var(a, name, replacement) for a in t.args))
    if isinstance(t, PredTerm):
        return PredTerm(t.kind, tuple(_replace_var(a, name, replacement) for a in t.args))
    if isinstance(t, Let):
        if t.name == name:
            return Let(t.name, _replace_var(t.bound, name, replacement), t.body)
        return Let(
            t.name, _replace_var(t.bound, name, replacement), _replace_var(t.body, name, replacement)
        )
    if isinstance(t, MapObjects):
        src = _replace_var(t.source, name, replacement)
        body = t.body if t.binder == name else _replace_var(t.body, name, replacement)
        return MapObjects(t.binder, src, body)
    if isinstance(t, FilterObjects):
        src = _replace_var(t.source, name, replacement)
        pred = t.predicate if t.binder == name else _replace_var(t.predicate, name, replacement)
        return FilterObjects(t.binder, src, pred)
    if isinstance(t, FoldOverlay):
        return FoldOverlay(
            _replace_var(t.objects, name, replacement), _replace_var(t.canvas, name, replacement)
        )
    raise TypeError(f"not a term: {t!r}")


# --- text form ----------------------------------------------------------------

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"-?[0-9]+")

_ATOMS: dict[str, Scalar] = {
    "true": True,
    "false": False,
    **{f"c{v}": Color(v) for v in range(10)},
    **{d.value: d for d in Direction},
    **{a.value: a for a in Axis},
    **{c.value: c for c in Connectivity},
    **{m.value: m for m in ModeKind},
    **{k.value: k for k in SortKey},
}

_FORM_HEADS = {"input", "let", "map_objects", "filter_where", "fold_overlay"}
RESERVED = frozenset(_ATOMS) | _FORM_HEADS | set(PRIMITIVES) | set(_PRED_PARAMS)


def _atom_text(v: Scalar) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Color):
        return f"c{int(v)}"
    if isinstance(v, int):
        return str(v)
    return v.value


_WRAP_WIDTH = 78


def render_program(p: Term) -> str:
    """Canonical text: compact while short, wrapped and indented past 78 columns."""
    return _render(p, 0)


def _compact(t: Term) -> str:
    if isinstance(t, InputRef):
        return "(input)"
    if isinstance(t, Lit):
        return _atom_text(t.value)
    if isinstance(t, VarRef):
        return t.name
    if isinstance(t, PredTerm):
        if not t.args:
            return t.kind
        return f"({t.kind} {' '.join(_compact(a) for a in t.args)})"
    if isinstance(t, Prim):
        if not t.args:
            return f"({t.op})"
        return f"({t.op} {' '.join(_compact(a) for a in t.args)})"
    if isinstance(t, Let):
        return f"(let {t.name} {_compact(t.bound)} {_compact(t.body)})"
    if isinstance(t, MapObjects):
        return f"(map_objects {t.binder} {_compact(t.source)} {_compact(t.body)})"
    if isinstance(t, FilterObjects):
        return f"(filter_where {t.binder} {_compact(t.source)} {_compact(t.predicate)})"
    if isinstance(t, FoldOverlay):
        return f"(fold_overlay {_compact(t.objects)} {_compact(t.canvas)})"
    raise TypeError(f"not a term: {t!r}")


def _render(t: Term, indent: int) -> str:
    flat = _compact(t)
    if indent + len(flat) <= _WRAP_WIDTH:
        return flat
    pad = " " * (indent + 2)
    if isinstance(t, (Prim, PredTerm)):
        head = t.op if isinstance(t, Prim) else t.kind
        parts = [_render(a, indent + 2) for a in t.args]
        return f"({head}\n" + "\n".join(pad + s for s in parts) + ")"
    if isinstance(t, Let):
        parts = [_render(t.bound, indent + 2), _render(t.body, indent + 2)]
        return f"(let {t.name}\n" + "\n".join(pad + s for s in parts) + ")"
    if isinstance(t, MapObjects):
        parts = [_render(t.source, indent + 2), _render(t.body, indent + 2)]
        return f"(map_objects {t.binder}\n" + "\n".join(pad + s for s in parts) + ")"
    if isinstance(t, FilterObjects):
        parts = [_render(t.source, indent + 2), _render(t.predicate, indent + 2)]
        return f"(filter_where {t.binder}\n" + "\n".join(pad + s for s in parts) + ")"
    if isinstance(t, FoldOverlay):
        parts = [_render(t.objects, indent + 2), _render(t.canvas, indent + 2)]
        return f"(fold_overlay\n" + "\n".join(pad + s for s in parts) + ")"
    return flat


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in "()":
            tokens.append(_Token(ch, line, col))
            col += 1
            i += 1
            continue
        j = i
        while j < len(text) and not text[j].isspace() and text[j] not in "()":
            j += 1
        tokens.append(_Token(text[i:j], line, col))
        col += j - i
        i = j
    return tokens


def parse_program(text: str) -> Term:
    """Parse canonical text back into a term tree."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty program", 1, 1)
    pos = 0

    def peek() -> _Token | None:
        return tokens[pos] if pos < len(tokens) else None

    def advance() -> _Token:
        nonlocal pos
        tok = peek()
        if tok is None:
            last = tokens[-1]
            raise ParseError("unexpected end of input", last.line, last.col)
        pos += 1
        return tok

    def parse_term() -> Term:
        tok = advance()
        if tok.text == ")":
            raise ParseError("unexpected ')'", tok.line, tok.col)
        if tok.text != "(":
            return _classify_atom(tok)
        head = advance()
        if head.text in ("(", ")"):
            raise ParseError("expected a form name", head.line, head.col)
        name = head.text
        args: list[Term] = []
        if name in ("let", "map_objects", "filter_where"):
            binder_tok = advance()
            if not _IDENT_RE.fullmatch(binder_tok.text) or binder_tok.text in RESERVED:
                raise ParseError(
                    f"invalid binder '{binder_tok.text}'", binder_tok.line, binder_tok.col
                )
            binder = binder_tok.text
        while True:
            nxt = peek()
            if nxt is None:
                raise ParseError("missing ')'", tok.line, tok.col)
            if nxt.text == ")":
                advance()
                break
            args.append(parse_term())
        if name == "input":
            if args:
                raise ParseError("(input) takes no arguments", tok.line, tok.col)
            return InputRef()
        if name == "let":
            if len(args) != 2:
                raise ParseError("let takes a binding and a body", tok.line, tok.col)
            return Let(binder, args[0], args[1])
        if name == "map_objects":
            if len(args) != 2:
                raise ParseError("map_objects takes a source and a body", tok.line, tok.col)
            return MapObjects(binder, args[0], args[1])
        if name == "filter_where":
            if len(args) != 2:
                raise ParseError("filter_where takes a source and a predicate", tok.line, tok.col)
            return FilterObjects(binder, args[0], args[1])
        if name == "fold_overlay":
            if len(args) != 2:
                raise ParseError("fold_overlay takes objects and a canvas", tok.line, tok.col)
            return FoldOverlay(args[0], args[1])
        if name in _PRED_PARAMS:
            return PredTerm(name, tuple(args))
        return Prim(name, tuple(args))

    def _classify_atom(tok: _Token) -> Term:
        if _INT_RE.fullmatch(tok.text):
            return Lit(int(tok.text))
        if tok.text in _ATOMS:
            return Lit(_ATOMS[tok.text])
        if tok.text in ("size_largest", "size_smallest"):
            return PredTerm(tok.text)
        if tok.text in RESERVED:
            raise ParseError(f"reserved word '{tok.text}' used as a value", tok.line, tok.col)
        if _IDENT_RE.fullmatch(tok.text):
            return VarRef(tok.text)
        raise ParseError(f"unrecognized token '{tok.text}'", tok.line, tok.col)

    term = parse_term()
    if pos != len(tokens):
        trailing = tokens[pos]
        raise ParseError("trailing input after program", trailing.line, trailing.col)
    return term
