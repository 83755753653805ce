"""The built-in task families.

Each family follows the same recipe: sample task variables that fix the
rule for a whole episode, build input grids with free nuisance
variation, and express the rule as a DSL program over the input. New
families should follow the shapes here; docs/authoring.md walks through
the steps.
"""

from __future__ import annotations

from .dsl import FoldOverlay, InputRef, Let, Lit, MapObjects, PredTerm, Prim, Term, VarRef
from .generator import (
    CoveragePredicate,
    CustomPredicate,
    DeclaredInvariant,
    Env,
    GeneratorDefinition,
    NoTestOnlyColors,
    NoTestOnlyObjectSizes,
    TestDistinctness,
    register,
)
from .grid import Color, Episode, Grid, color_histogram, grid_equal
from .objects import (
    Axis,
    Connectivity,
    Direction,
    GridObject,
    ModeKind,
    SAME_COLOR,
    SortKey,
    find_connected_objects,
    reflect,
)
from .sampling import (
    ExtentConstraint,
    PER_GRID_BUDGET,
    RngStream,
    place_non_overlapping,
    retry,
    synthesize_contiguous_object,
)

_NONZERO = tuple(Color(v) for v in range(1, 10))


def _distinct_color(rng: RngStream, taken: set[int]) -> Color:
    return rng.choice([c for c in _NONZERO if int(c) not in taken])


def _count_objects(g: Grid) -> int:
    return len(find_connected_objects(g, Connectivity.FOUR, SAME_COLOR))


def _find_objects_term() -> Term:
    return Prim("find_objects", (InputRef(), Lit(Connectivity.FOUR), Lit(ModeKind.SAME_COLOR)))


def _dims_preserved(e: Episode) -> bool:
    return all(
        p.input.height == p.output.height and p.input.width == p.output.width
        for p in e.all_pairs()
    )


def _object_count_conserved(e: Episode) -> bool:
    return all(_count_objects(p.input) == _count_objects(p.output) for p in e.all_pairs())


def _histogram_conserved(e: Episode) -> bool:
    return all(color_histogram(p.input) == color_histogram(p.output) for p in e.all_pairs())


# --- tgi.g1.stacked_segments ----------------------------------------------------

def _g1_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w, n = int(gridvars["height"]), int(gridvars["width"]), int(gridvars["n_segments"])
    # Rows at least two apart so segments never touch vertically.
    base_rows = sorted(rng.sample(range(h - (n - 1)), n))
    rows = [r + i for i, r in enumerate(base_rows)]
    lengths = rng.sample(range(2, w), n)
    trio = [taskvars["pal_a"], taskvars["pal_b"], taskvars["pal_c"]]
    colors = rng.sample(trio, n)
    cells = [[0] * w for _ in range(h)]
    for row, length, color in zip(rows, lengths, colors):
        start = rng.randint(0, w - length)
        for c in range(start, start + length):
            cells[row][c] = int(color)
    return Grid.from_rows(cells)


def _g1_transform(taskvars: Env) -> Term:
    segments = Prim(
        "sort_objects_by",
        (_find_objects_term(), Lit(SortKey.SIZE), Lit(False)),
    )
    blank = Prim(
        "canvas",
        (Prim("grid_height", (InputRef(),)), Prim("grid_width", (InputRef(),)), Lit(Color.BLACK)),
    )
    return Prim("stack", (blank, segments, VarRef("stack_edge"), VarRef("align_edge")))


STACKED_SEGMENTS = register(
    GeneratorDefinition(
        id="tgi.g1.stacked_segments",
        summary="Horizontal segments are sorted by length and piled against one edge.",
        taskvar_spec=(
            ("stack_edge", lambda r, _: r.choice((Direction.TOP, Direction.BOTTOM))),
            ("align_edge", lambda r, _: r.choice((Direction.LEFT, Direction.RIGHT))),
            ("pal_a", lambda r, tv: _distinct_color(r, set())),
            ("pal_b", lambda r, tv: _distinct_color(r, {int(tv["pal_a"])})),
            ("pal_c", lambda r, tv: _distinct_color(r, {int(tv["pal_a"]), int(tv["pal_b"])})),
        ),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(7, 14)),
            ("width", lambda r, _: r.randint(7, 14)),
            ("n_segments", lambda r, _: r.randint(2, 3)),
        ),
        input_builder=_g1_input,
        transform_builder=_g1_transform,
        input_template=(
            "Each input is a black grid scattered with horizontal one-cell-tall segments.",
            "Segments sit on separate rows and never touch each other.",
            "Within a grid the segment lengths all differ, and each segment uses one of "
            "the palette colors {pal_a:color_name}, {pal_b:color_name}, or {pal_c:color_name}.",
        ),
        transform_template=(
            "Collect the segments and order them by length, longest first.",
            "Pile the ordered segments flush against the {stack_edge} edge, one per row.",
            "Slide each segment to the {align_edge} so its end touches that side.",
            "Every other cell stays black.",
        ),
        constraints=(NoTestOnlyColors(),),
        declared_invariants=(
            DeclaredInvariant(
                "segment_count_conserved",
                _object_count_conserved,
                "Rearranging segments never creates or destroys one.",
            ),
            DeclaredInvariant(
                "dims_preserved", _dims_preserved, "Output grids match input dimensions."
            ),
        ),
    )
)


# --- tgi.g2.size_keyed_recolor ----------------------------------------------------

def _g2_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w, n = int(gridvars["height"]), int(gridvars["width"]), int(gridvars["n_squares"])
    base = int(taskvars["base"])
    squares = []
    for _ in range(n):
        side = rng.choice((3, 5))
        squares.append(
            GridObject.from_cells((r, c, base) for r in range(side) for c in range(side))
        )
    placed = place_non_overlapping(rng, (h, w), squares, min_gap=1)
    cells = [[0] * w for _ in range(h)]
    for o in placed:
        for r, c, v in o.sorted_cells():
            cells[r][c] = v
    return Grid.from_rows(cells)


def _g2_transform(taskvars: Env) -> Term:
    body = Prim(
        "if",
        (
            Prim("eq", (Prim("obj_area", (VarRef("o"),)), Lit(9))),
            Prim("recolor_object", (VarRef("o"), VarRef("small_fill"))),
            Prim("recolor_object", (VarRef("o"), VarRef("big_fill"))),
        ),
    )
    return Let(
        "os",
        _find_objects_term(),
        FoldOverlay(MapObjects("o", VarRef("os"), body), InputRef()),
    )


def _g2_has_square(grids, side: int) -> bool:
    for g in grids:
        for o in find_connected_objects(g, Connectivity.FOUR, SAME_COLOR):
            if o.height == side and o.width == side:
                return True
    return False


SIZE_KEYED_RECOLOR = register(
    GeneratorDefinition(
        id="tgi.g2.size_keyed_recolor",
        summary="Squares recolor by their size: 3x3 one way, 5x5 another.",
        taskvar_spec=(
            ("base", lambda r, _: _distinct_color(r, set())),
            ("small_fill", lambda r, tv: _distinct_color(r, {int(tv["base"])})),
            (
                "big_fill",
                lambda r, tv: _distinct_color(r, {int(tv["base"]), int(tv["small_fill"])}),
            ),
        ),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(18, 26)),
            ("width", lambda r, _: r.randint(18, 26)),
            ("n_squares", lambda r, _: r.randint(2, 5)),
        ),
        input_builder=_g2_input,
        transform_builder=_g2_transform,
        input_template=(
            "Each input contains several solid {base:color_name} squares on a black background.",
            "Every square is either 3x3 or 5x5, and squares never touch.",
        ),
        transform_template=(
            "Squares keep their positions but change color according to their size.",
            "Each 3x3 square turns {small_fill:color_name}.",
            "Each 5x5 square turns {big_fill:color_name}.",
        ),
        constraints=(
            CoveragePredicate(
                "train_has_both_square_sizes",
                lambda grids: _g2_has_square(grids, 3) and _g2_has_square(grids, 5),
            ),
            TestDistinctness("object_count", _count_objects),
        ),
        declared_invariants=(
            DeclaredInvariant(
                "object_count_conserved",
                _object_count_conserved,
                "Recoloring never merges or splits squares.",
            ),
            DeclaredInvariant(
                "dims_preserved", _dims_preserved, "Output grids match input dimensions."
            ),
        ),
    )
)


# --- tgi.g3.paired_recolor ---------------------------------------------------------

def _g3_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w = int(gridvars["height"]), int(gridvars["width"])
    rect_h, rect_w = int(gridvars["rect_height"]), int(gridvars["rect_width"])
    k = int(gridvars["color_count"])
    sources = [taskvars[f"s{i}"] for i in range(1, 5)]
    chosen = rng.sample(sources, k)
    spots = [(r, c) for r in range(rect_h) for c in range(rect_w)]
    order = rng.shuffle(spots)
    # First k cells take each chosen color once so all k always appear.
    assignment = {}
    for i, spot in enumerate(order):
        assignment[spot] = chosen[i] if i < k else rng.choice(chosen)
    top = rng.randint(0, h - rect_h)
    left = rng.randint(0, w - rect_w)
    cells = [[0] * w for _ in range(h)]
    for (r, c), color in assignment.items():
        cells[top + r][left + c] = int(color)
    return Grid.from_rows(cells)


def _g3_transform(taskvars: Env) -> Term:
    args: list[Term] = [InputRef()]
    for i in range(1, 5):
        args.append(VarRef(f"s{i}"))
        args.append(VarRef(f"t{i}"))
    return Prim("recolor_map", tuple(args))


def _g3_distinct_foreground_colors(g: Grid) -> int:
    return len({v for row in g.cells for v in row if v != 0})


def _g3_sample_taskvars() -> tuple:
    spec = []
    for i in range(1, 5):
        spec.append(
            (
                f"s{i}",
                lambda r, tv: _distinct_color(r, {int(v) for v in tv.values()}),
            )
        )
    for i in range(1, 5):
        spec.append(
            (
                f"t{i}",
                lambda r, tv: _distinct_color(r, {int(v) for v in tv.values()}),
            )
        )
    return tuple(spec)


PAIRED_RECOLOR = register(
    GeneratorDefinition(
        id="tgi.g3.paired_recolor",
        summary="A fixed color mapping recolors every cell; black stays put.",
        taskvar_spec=_g3_sample_taskvars(),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(6, 10)),
            ("width", lambda r, _: r.randint(6, 10)),
            ("rect_height", lambda r, _: r.randint(2, 3)),
            ("rect_width", lambda r, _: r.randint(2, 4)),
            ("color_count", lambda r, _: r.randint(2, 4)),
        ),
        input_builder=_g3_input,
        transform_builder=_g3_transform,
        input_template=(
            "Each input shows one small rectangle of mixed colors on a black background.",
            "Rectangle cells draw from the source colors {s1:color_name}, {s2:color_name}, "
            "{s3:color_name}, and {s4:color_name}.",
        ),
        transform_template=(
            "Recolor every cell through a fixed mapping; black cells stay black.",
            "{s1:color_name} becomes {t1:color_name}.",
            "{s2:color_name} becomes {t2:color_name}.",
            "{s3:color_name} becomes {t3:color_name}.",
            "{s4:color_name} becomes {t4:color_name}.",
        ),
        constraints=(
            NoTestOnlyColors(),
            TestDistinctness("distinct_foreground_colors", _g3_distinct_foreground_colors),
        ),
        declared_invariants=(
            DeclaredInvariant(
                "background_fixed",
                lambda e: all(
                    sum(v == 0 for row in p.input.cells for v in row)
                    == sum(v == 0 for row in p.output.cells for v in row)
                    for p in e.all_pairs()
                ),
                "The mapping never touches background cells.",
            ),
            DeclaredInvariant(
                "dims_preserved", _dims_preserved, "Output grids match input dimensions."
            ),
        ),
    )
)


# --- tgi.g4.gravity -------------------------------------------------------------

def _g4_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w, n = int(gridvars["height"]), int(gridvars["width"]), int(gridvars["n_cells"])
    spots = rng.sample([(r, c) for r in range(h) for c in range(w)], n)
    cells = [[0] * w for _ in range(h)]
    for r, c in spots:
        cells[r][c] = int(rng.choice(_NONZERO))
    return Grid.from_rows(cells)


def _g4_transform(taskvars: Env) -> Term:
    return Prim("gravity", (InputRef(), VarRef("fall_edge")))


GRAVITY = register(
    GeneratorDefinition(
        id="tgi.g4.gravity",
        summary="Loose cells slide to one edge, keeping their lane order.",
        taskvar_spec=(
            (
                "fall_edge",
                lambda r, _: r.choice(
                    (Direction.TOP, Direction.BOTTOM, Direction.LEFT, Direction.RIGHT)
                ),
            ),
        ),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(6, 12)),
            ("width", lambda r, _: r.randint(6, 12)),
            ("n_cells", lambda r, _: r.randint(5, 12)),
        ),
        input_builder=_g4_input,
        transform_builder=_g4_transform,
        input_template=(
            "Each input scatters single colored cells across an otherwise black grid.",
        ),
        transform_template=(
            "Every colored cell slides toward the {fall_edge} edge until it stacks.",
            "Cells in the same lane keep their order; no color changes.",
        ),
        constraints=(
            CustomPredicate(
                "some_train_pair_moves",
                lambda e: any(not grid_equal(p.input, p.output) for p in e.train),
            ),
        ),
        declared_invariants=(
            DeclaredInvariant(
                "histogram_conserved",
                _histogram_conserved,
                "Sliding rearranges cells without creating or destroying any.",
            ),
            DeclaredInvariant(
                "dims_preserved", _dims_preserved, "Output grids match input dimensions."
            ),
        ),
    )
)


# --- tgi.g5.recolor_largest -------------------------------------------------------

def _g5_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w, n = int(gridvars["height"]), int(gridvars["width"]), int(gridvars["n_blobs"])
    fill = int(taskvars["fill"])

    def draw_sizes(r: RngStream) -> list[int]:
        return [r.randint(3, 8) for _ in range(n)]

    sizes = retry(
        rng.derive("sizes"),
        draw_sizes,
        lambda ss: ss.count(max(ss)) == 1,
        PER_GRID_BUDGET,
    )
    blobs = []
    blob_rng = rng.derive("blobs")
    for i, size in enumerate(sizes):
        color = _distinct_color(blob_rng.derive("color", i), {fill})
        blobs.append(
            synthesize_contiguous_object(
                blob_rng.derive("shape", i),
                Connectivity.FOUR,
                ExtentConstraint(size, size, (4, 4)),
                int(color),
            )
        )
    placed = place_non_overlapping(rng.derive("place"), (h, w), blobs, min_gap=1)
    cells = [[0] * w for _ in range(h)]
    for o in placed:
        for r, c, v in o.sorted_cells():
            cells[r][c] = v
    return Grid.from_rows(cells)


def _g5_transform(taskvars: Env) -> Term:
    largest = Prim(
        "only",
        (Prim("filter_objects", (_find_objects_term(), PredTerm("size_largest"))),),
    )
    return Prim("paint", (InputRef(), largest, VarRef("fill")))


def _g5_exactly_largest_changes(e: Episode) -> bool:
    for p in e.all_pairs():
        objs = find_connected_objects(p.input, Connectivity.FOUR, SAME_COLOR)
        if not objs:
            return False
        largest = max(objs, key=lambda o: o.size)
        diff = {
            (r, c)
            for r in range(p.input.height)
            for c in range(p.input.width)
            if p.input.cells[r][c] != p.output.cells[r][c]
        }
        if diff != {(r, c) for r, c, _ in largest.cells}:
            return False
    return True


RECOLOR_LARGEST = register(
    GeneratorDefinition(
        id="tgi.g5.recolor_largest",
        summary="The strictly largest blob is repainted a fixed color.",
        taskvar_spec=(("fill", lambda r, _: _distinct_color(r, set())),),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(10, 16)),
            ("width", lambda r, _: r.randint(10, 16)),
            ("n_blobs", lambda r, _: r.randint(3, 4)),
        ),
        input_builder=_g5_input,
        transform_builder=_g5_transform,
        input_template=(
            "Each input contains a few connected blobs of different colors.",
            "Exactly one blob has strictly more cells than any other.",
        ),
        transform_template=(
            "Find the blob with the most cells.",
            "Repaint that blob {fill:color_name}; everything else is untouched.",
        ),
        constraints=(NoTestOnlyObjectSizes(),),
        declared_invariants=(
            DeclaredInvariant(
                "exactly_largest_changes",
                _g5_exactly_largest_changes,
                "The diff between input and output is exactly the largest blob.",
            ),
            DeclaredInvariant(
                "dims_preserved", _dims_preserved, "Output grids match input dimensions."
            ),
        ),
    )
)


# --- tgi.g6.symmetry ---------------------------------------------------------------

def _g6_input(rng: RngStream, taskvars: Env, gridvars: Env) -> Grid:
    h, w = int(gridvars["height"]), int(gridvars["width"])
    size = int(gridvars["blob_size"])
    axis = taskvars["mirror_axis"]
    half_h = h if axis is Axis.VERTICAL else h // 2
    half_w = w // 2 if axis is Axis.VERTICAL else w
    color = rng.choice([taskvars["pal_a"], taskvars["pal_b"], taskvars["pal_c"]])
    blob = synthesize_contiguous_object(
        rng.derive("shape"),
        Connectivity.FOUR,
        ExtentConstraint(min(size, half_h * half_w), min(size, half_h * half_w), (half_h, half_w)),
        int(color),
    )
    top = rng.randint(0, half_h - blob.height)
    left = rng.randint(0, half_w - blob.width)
    cells = [[0] * w for _ in range(h)]
    for r, c, v in blob.sorted_cells():
        cells[top + r][left + c] = v
    return Grid.from_rows(cells)


def _g6_transform(taskvars: Env) -> Term:
    mirrored = Prim("reflect", (InputRef(), VarRef("mirror_axis")))
    shape = Prim(
        "only",
        (Prim("find_objects", (mirrored, Lit(Connectivity.EIGHT), Lit(ModeKind.ANY_FOREGROUND))),),
    )
    return Prim("overlay", (InputRef(), shape))


def _g6_output_symmetric(e: Episode) -> bool:
    for p in e.all_pairs():
        out = p.output
        if not (
            grid_equal(reflect(out, Axis.VERTICAL), out)
            or grid_equal(reflect(out, Axis.HORIZONTAL), out)
        ):
            return False
    return True


SYMMETRY = register(
    GeneratorDefinition(
        id="tgi.g6.symmetry",
        summary="A shape confined to one half is completed into a mirror image.",
        taskvar_spec=(
            ("mirror_axis", lambda r, _: r.choice((Axis.HORIZONTAL, Axis.VERTICAL))),
            ("pal_a", lambda r, tv: _distinct_color(r, set())),
            ("pal_b", lambda r, tv: _distinct_color(r, {int(tv["pal_a"])})),
            ("pal_c", lambda r, tv: _distinct_color(r, {int(tv["pal_a"]), int(tv["pal_b"])})),
        ),
        gridvar_spec=(
            ("height", lambda r, _: r.randint(6, 12)),
            ("width", lambda r, _: r.randint(6, 12)),
            ("blob_size", lambda r, _: r.randint(4, 10)),
        ),
        input_builder=_g6_input,
        transform_builder=_g6_transform,
        input_template=(
            "Each input confines one colored shape to half of the grid; the rest is black.",
            "The shape uses one of {pal_a:color_name}, {pal_b:color_name}, or {pal_c:color_name}.",
        ),
        transform_template=(
            "Mirror the grid across its {mirror_axis} center line.",
            "Stamp the mirrored shape onto the input, so the output holds the shape "
            "and its reflection.",
        ),
        constraints=(NoTestOnlyColors(),),
        declared_invariants=(
            DeclaredInvariant(
                "output_symmetric",
                _g6_output_symmetric,
                "Completion makes the output equal to one of its own reflections.",
            ),
            DeclaredInvariant(
                "input_kept",
                lambda e: all(
                    all(
                        p.input.cells[r][c] == 0
                        or p.output.cells[r][c] == p.input.cells[r][c]
                        for r in range(p.input.height)
                        for c in range(p.input.width)
                    )
                    for p in e.all_pairs()
                ),
                "Every colored input cell survives into the output.",
            ),
        ),
    )
)


CATALOG = (
    STACKED_SEGMENTS,
    SIZE_KEYED_RECOLOR,
    PAIRED_RECOLOR,
    GRAVITY,
    RECOLOR_LARGEST,
    SYMMETRY,
)
