"""Finite groups of affine isometries of the flat torus R^n/Z^n, exactly.

An isometry is stored as an integer signed-permutation matrix plus a
rational translation reduced mod 1.  Everything in this module is exact:
fixed loci are solved through the integer Smith normal form, components
are canonicalized to a unique rational representative, and orbit /
stabilizer bookkeeping runs over the finite group table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .intlinalg import (
    hermite_row_basis,
    lattice_adapted_basis,
    mat_vec,
    smith_normal_form,
    unimodular_inverse,
)

Vector = tuple[Fraction, ...]

# Cap on basepoint canonicalization work (candidates = denominator^dim).
_CANON_CAP = 1 << 20

LOCAL_MODEL_PRODUCT = "S¹×(ℂ²/±1)"
LOCAL_MODEL_HALF_TURN = "(ℂ²/±1 × S¹)/ℤ₂"


def _mod1(x: Fraction) -> Fraction:
    return x % 1


def _is_signed_permutation(linear: tuple[tuple[int, ...], ...]) -> bool:
    n = len(linear)
    col_seen = [0] * n
    for row in linear:
        if len(row) != n:
            return False
        nonzero = [(j, v) for j, v in enumerate(row) if v != 0]
        if len(nonzero) != 1 or nonzero[0][1] not in (1, -1):
            return False
        col_seen[nonzero[0][0]] += 1
    return all(c == 1 for c in col_seen)


@dataclass(frozen=True)
class AffineIsometry:
    """x -> linear @ x + translation on the torus R^n/Z^n."""

    linear: tuple[tuple[int, ...], ...]
    translation: Vector

    def __post_init__(self):
        if not _is_signed_permutation(self.linear):
            raise ValueError("not a flat-torus isometry: linear part must be a signed permutation matrix")
        if len(self.translation) != len(self.linear):
            raise ValueError("dimension mismatch between linear part and translation")
        object.__setattr__(
            self, "translation", tuple(_mod1(Fraction(t)) for t in self.translation)
        )

    @property
    def dim(self) -> int:
        return len(self.linear)

    @staticmethod
    def identity(n: int) -> "AffineIsometry":
        eye = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        return AffineIsometry(eye, tuple(Fraction(0) for _ in range(n)))

    @staticmethod
    def from_diagonal(signs, translation) -> "AffineIsometry":
        n = len(signs)
        lin = tuple(tuple(signs[i] if i == j else 0 for j in range(n)) for i in range(n))
        return AffineIsometry(lin, tuple(Fraction(t) for t in translation))

    def is_identity(self) -> bool:
        n = self.dim
        return all(self.translation[i] == 0 for i in range(n)) and all(
            self.linear[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n)
        )

    def apply(self, point) -> Vector:
        """Evaluate at a rational point, reduced into [0,1)^n."""
        pt = [Fraction(x) for x in point]
        return tuple(
            _mod1(sum((Fraction(v) * pt[j] for j, v in enumerate(row)), self.translation[i]))
            for i, row in enumerate(self.linear)
        )

    def apply_linear(self, v: list[int]) -> list[int]:
        return mat_vec([list(r) for r in self.linear], list(v))

    def inverse(self) -> "AffineIsometry":
        n = self.dim
        lt = tuple(tuple(self.linear[j][i] for j in range(n)) for i in range(n))
        trans = tuple(
            -sum(lt[i][j] * self.translation[j] for j in range(n)) for i in range(n)
        )
        return AffineIsometry(lt, trans)


def compose(f: AffineIsometry, g: AffineIsometry) -> AffineIsometry:
    """The isometry x -> f(g(x))."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    n = f.dim
    lin = tuple(
        tuple(sum(f.linear[i][k] * g.linear[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )
    trans = tuple(
        sum(Fraction(f.linear[i][k]) * g.translation[k] for k in range(n)) + f.translation[i]
        for i in range(n)
    )
    return AffineIsometry(lin, trans)


class GroupClosureError(RuntimeError):
    pass


@dataclass
class GroupTable:
    """Closure of a generator list, with names and a product index table."""

    elements: list[AffineIsometry]
    names: list[str]
    product: list[list[int]]
    abelian: bool
    exponent: int

    def __post_init__(self):
        self._index = {el: i for i, el in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def index_of(self, el: AffineIsometry) -> int:
        return self._index[el]

    def inverse_index(self, i: int) -> int:
        return self.product[i].index(0)

    def subgroup_generated(self, indices) -> frozenset[int]:
        closed = {0}
        frontier = [0]
        gens = sorted(set(indices))
        while frontier:
            nxt = []
            for i in frontier:
                for g in gens:
                    p = self.product[i][g]
                    if p not in closed:
                        closed.add(p)
                        nxt.append(p)
            frontier = nxt
        return frozenset(closed)


def generate_group(
    generators: list[AffineIsometry],
    names: list[str] | None = None,
    max_order: int = 1024,
) -> GroupTable:
    """BFS closure of the generators under composition.

    Element 0 is the identity; generators follow in the declared order,
    then products by BFS level, which makes the ordering deterministic.
    """
    if not generators:
        raise ValueError("empty generator list")
    n = generators[0].dim
    if any(g.dim != n for g in generators):
        raise ValueError("dimension mismatch among generators")
    if names is None:
        names = [f"g{i+1}" for i in range(len(generators))]

    ident = AffineIsometry.identity(n)
    elements = [ident]
    elt_names = ["e"]
    index = {ident: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g, gname in zip(generators, names):
                p = compose(elements[i], g)
                if p not in index:
                    if len(elements) >= max_order:
                        raise GroupClosureError(
                            f"group closure exceeded the cap of {max_order} elements"
                        )
                    index[p] = len(elements)
                    elements.append(p)
                    elt_names.append(gname if i == 0 else elt_names[i] + "*" + gname)
                    nxt.append(index[p])
        frontier = nxt

    order = len(elements)
    product = [[index[compose(a, b)] for b in elements] for a in elements]
    abelian = all(
        product[i][j] == product[j][i] for i in range(order) for j in range(i + 1, order)
    )
    exponent = 1
    for i in range(order):
        k, j = 1, i
        while j != 0:
            j = product[j][i]
            k += 1
        exponent = lcm(exponent, k)
    return GroupTable(elements, elt_names, product, abelian, exponent)


@dataclass(frozen=True)
class FixedComponent:
    """One connected component of a fixed-point set: an affine subtorus.

    basepoint is the canonical representative: reduced into [0,1)^n and
    lexicographically smallest among the rational points of the component
    sharing its denominator.  directions is the canonical (Hermite) basis
    of the saturated integer direction lattice.
    """

    basepoint: Vector
    directions: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.directions)

    @property
    def key(self):
        return (self.basepoint, self.directions)

    def denominator(self) -> int:
        return lcm(1, *(x.denominator for x in self.basepoint))


def _canonical_basepoint(point: Vector, directions: list[list[int]]) -> Vector:
    """Lexicographic minimum of the component's rational points mod 1.

    The component is rewritten in lattice-adapted unimodular coordinates
    where its free directions come first; the constrained coordinates fix
    the intrinsic denominator q of the component, and the candidates
    enumerated are exactly the points whose coordinates have denominator
    dividing q.  The result therefore depends only on the component, not
    on which representative point was handed in.
    """
    point = tuple(_mod1(x) for x in point)
    if not directions:
        return point
    n = len(point)
    dim = len(directions)
    v0 = lattice_adapted_basis(directions)
    v0_inv = unimodular_inverse(v0)
    y = [sum(Fraction(v0_inv[i][j]) * point[j] for j in range(n)) for i in range(n)]
    tail = y[dim:]
    q = lcm(1, *(t.denominator for t in tail))
    if q**dim > _CANON_CAP:
        raise ValueError("basepoint canonicalization cap exceeded")
    best = None
    for ks in itertools.product(range(q), repeat=dim):
        yc = [Fraction(k, q) for k in ks] + tail
        cand = tuple(
            _mod1(sum(Fraction(v0[i][j]) * yc[j] for j in range(n))) for i in range(n)
        )
        if best is None or cand < best:
            best = cand
    return best


def _make_component(point, directions: list[list[int]]) -> FixedComponent:
    dirs = hermite_row_basis([list(d) for d in directions])
    base = _canonical_basepoint(tuple(Fraction(x) for x in point), dirs)
    return FixedComponent(base, tuple(tuple(r) for r in dirs))


def fixed_locus(f: AffineIsometry) -> list[FixedComponent]:
    """All connected components of {x : f(x) = x mod Z^n}, sorted.

    Solves (L - I) x = -t mod Z^n by Smith decomposition U (L-I) V = D:
    in y = V^{-1} x coordinates each constrained row gives finitely many
    rational values, each zero row either obstructs or frees a direction.
    """
    n = f.dim
    m = [[f.linear[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    d, u, v = smith_normal_form(m)
    c = [
        sum(Fraction(u[i][j]) * (-f.translation[j]) for j in range(n)) for i in range(n)
    ]
    choices: list[list[Fraction]] = []
    free_idx: list[int] = []
    for i in range(n):
        di = d[i][i]
        if di == 0:
            if c[i].denominator != 1:
                return []
            free_idx.append(i)
            choices.append([Fraction(0)])
        else:
            choices.append([_mod1(Fraction(c[i] + k, di)) for k in range(abs(di))])
    directions = [[v[r][i] for r in range(n)] for i in free_idx]
    components = []
    for combo in itertools.product(*choices):
        x = [sum(Fraction(v[r][i]) * combo[i] for i in range(n)) for r in range(n)]
        components.append(_make_component(x, directions))
    components.sort(key=lambda comp: comp.key)
    return components


def transform_component(g: AffineIsometry, comp: FixedComponent) -> FixedComponent:
    image_dirs = [g.apply_linear(list(dv)) for dv in comp.directions]
    return _make_component(g.apply(comp.basepoint), image_dirs)


def _fixes_pointwise(g: AffineIsometry, comp: FixedComponent) -> bool:
    for dv in comp.directions:
        if g.apply_linear(list(dv)) != list(dv):
            return False
    image = g.apply(comp.basepoint)
    return image == comp.basepoint


def _acts_as_translation(g: AffineIsometry, comp: FixedComponent) -> bool:
    """True when g maps the component to itself shifting along it."""
    for dv in comp.directions:
        if g.apply_linear(list(dv)) != list(dv):
            return False
    if transform_component(g, comp) != comp:
        return False
    return g.apply(comp.basepoint) != comp.basepoint


@dataclass
class CensusOrbit:
    representative: FixedComponent
    components: list[FixedComponent]
    setwise_stabilizer: list[int]
    pointwise_stabilizer: list[int]
    translation_elements: list[int]
    quotient_length_factor: Fraction
    local_model: str | None

    @property
    def size(self) -> int:
        return len(self.components)


@dataclass
class SingularCensus:
    components: list[FixedComponent]
    orbits: list[CensusOrbit]

    @property
    def total_components(self) -> int:
        return len(self.components)

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)


def singular_census(group: GroupTable, require_circles: bool = True) -> SingularCensus:
    """Union of all fixed components of non-identity elements, by orbit.

    Per orbit: setwise and pointwise stabilizers, the elements acting on
    the component by a nonzero internal translation, the induced length
    factor 1/[setwise:pointwise], and the combinatorial local model label
    (product type when no translation element exists, half-turn quotient
    type otherwise).
    """
    seen: dict = {}
    for i, el in enumerate(group.elements):
        if i == 0:
            continue
        for comp in fixed_locus(el):
            seen.setdefault(comp.key, comp)
    components = sorted(seen.values(), key=lambda comp: comp.key)
    if require_circles:
        bad = [c for c in components if c.dimension != 1]
        if bad:
            raise ValueError(
                "circles-only census requested but a fixed component has "
                f"dimension {bad[0].dimension}"
            )

    unassigned = {c.key: c for c in components}
    orbits = []
    while unassigned:
        start_key = min(unassigned)
        orbit_map = {start_key: unassigned[start_key]}
        frontier = [unassigned[start_key]]
        while frontier:
            nxt = []
            for comp in frontier:
                for el in group.elements:
                    image = transform_component(el, comp)
                    if image.key not in orbit_map:
                        orbit_map[image.key] = image
                        nxt.append(image)
            frontier = nxt
        for key in orbit_map:
            if key not in unassigned:
                raise AssertionError("orbit left the census component set")
            del unassigned[key]
        rep = orbit_map[min(orbit_map)]
        setwise = [
            i for i, el in enumerate(group.elements) if transform_component(el, rep) == rep
        ]
        pointwise = [i for i in setwise if _fixes_pointwise(group.elements[i], rep)]
        translations = [
            i
            for i in setwise
            if i not in pointwise and _acts_as_translation(group.elements[i], rep)
        ]
        factor = Fraction(len(pointwise), len(setwise))
        model = None
        if rep.dimension == 1:
            model = LOCAL_MODEL_HALF_TURN if translations else LOCAL_MODEL_PRODUCT
        orbits.append(
            CensusOrbit(
                representative=rep,
                components=sorted(orbit_map.values(), key=lambda comp: comp.key),
                setwise_stabilizer=setwise,
                pointwise_stabilizer=pointwise,
                translation_elements=translations,
                quotient_length_factor=factor,
                local_model=model,
            )
        )
    orbits.sort(key=lambda orb: orb.representative.key)
    return SingularCensus(components, orbits)


@dataclass
class Pi1Certificate:
    """Heuristic certificate for the loop-folding simple-connectivity argument.

    PASS means: every coordinate direction is reversed by some element
    with nonempty fixed locus, and the elements with nonempty fixed loci
    generate the whole group.  This certifies the two structural inputs
    of the folding argument; it is not a fundamental-group computation.
    """

    status: str
    direction_witnesses: dict[int, int | None]
    fixed_point_elements: list[int]
    generated_by_fixed: bool
    note: str = (
        "structural conditions for the loop-folding argument; "
        "heuristic PASS, not a computed fundamental group"
    )

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def pi1_certificate(group: GroupTable) -> Pi1Certificate:
    n = group.dim
    loci = {i: fixed_locus(el) for i, el in enumerate(group.elements)}
    fixed_elements = [i for i in range(group.order) if loci[i]]

    witnesses: dict[int, int | None] = {}
    for j in range(n):
        witnesses[j] = None
        for i in fixed_elements:
            el = group.elements[i]
            col = [el.linear[k][j] for k in range(n)]
            if col == [-1 if k == j else 0 for k in range(n)]:
                witnesses[j] = i
                break
    generated = group.subgroup_generated(fixed_elements) == frozenset(range(group.order))
    ok = generated and all(w is not None for w in witnesses.values())
    return Pi1Certificate(
        status="PASS" if ok else "FAIL",
        direction_witnesses=witnesses,
        fixed_point_elements=fixed_elements,
        generated_by_fixed=generated,
    )
