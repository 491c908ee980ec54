"""Exact verification of local torus-action (F-structure) data.

Charts are tubular regions of the torus cut out by a distance constraint
on one coordinate pair, plus the complement chart of their shrunken union
and an optional whole-torus chart.  Actions are formal coordinate
translations; every check here is a rational/symbolic identity, so a PASS
is a machine-checked statement, never a sampled approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .torus import AffineIsometry, GroupTable, fixed_locus


@dataclass(frozen=True)
class TorusActionSymbol:
    """Formal torus action by translations x -> x + theta_j e_{i_j}.

    directions hold 1-based coordinate indices.  component_signs, when
    given, attach one sign per chart component to a rank-1 action (the
    action runs with that orientation on that component).
    """

    directions: tuple[int, ...]
    component_signs: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.directions)) != len(self.directions):
            raise ValueError("action directions must be distinct")
        if self.component_signs is not None and len(self.directions) != 1:
            raise ValueError("component signs only make sense for circle actions")

    @property
    def rank(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class ChartSpec:
    """One chart of the atlas.

    kind "ball": points with ||(x_a, x_b) - center|| < epsilon for some
    center; kind "complement": the complement of the closed shrunken union
    of the named ball charts; kind "full": the whole torus.
    """

    name: str
    action: TorusActionSymbol
    kind: str = "ball"
    constrained: tuple[int, int] | None = None
    centers: tuple[tuple[Fraction, Fraction], ...] = ()
    epsilon: Fraction = Fraction(0)
    covering: str = "trivial"  # "trivial" or "group"
    complement_of: tuple[str, ...] = ()
    shrink: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.kind == "ball":
            if self.constrained is None or not self.centers:
                raise ValueError(f"ball chart {self.name} needs a constrained pair and centers")
            if not (0 < self.epsilon < Fraction(1, 100)):
                raise ValueError(f"chart {self.name}: epsilon must lie in (0, 1/100)")
        elif self.kind == "complement":
            if not self.complement_of:
                raise ValueError(f"complement chart {self.name} must name the charts it avoids")
            if not (0 < self.shrink < 1):
                raise ValueError(f"chart {self.name}: shrink factor must lie in (0, 1)")
        elif self.kind != "full":
            raise ValueError(f"unknown chart kind {self.kind!r}")


@dataclass(frozen=True)
class CovarianceRule:
    """Signed diagonal action of each group element on the torus factors."""

    signs: dict[int, tuple[int, ...]]  # group element index -> per-factor signs


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _torus_dist_sq(p: tuple[Fraction, Fraction], q: tuple[Fraction, Fraction]) -> Fraction:
    total = Fraction(0)
    for a, b in zip(p, q):
        d = abs((a - b) % 1)
        d = min(d, 1 - d)
        total += d * d
    return total


def _axis_sign(g: AffineIsometry, axis: int) -> int | None:
    """Sign s with L_g e_axis = s e_axis, or None when the axis moves."""
    n = g.dim
    col = [g.linear[k][axis - 1] for k in range(n)]
    if col == [1 if k == axis - 1 else 0 for k in range(n)]:
        return 1
    if col == [-1 if k == axis - 1 else 0 for k in range(n)]:
        return -1
    return None


def _pair_image(g: AffineIsometry, pair: tuple[int, int], point) -> tuple[Fraction, Fraction] | None:
    """Image of a constrained-pair point under g, or None if the pair plane moves."""
    a, b = pair
    out = []
    for i in (a, b):
        row = g.linear[i - 1]
        j = next(k for k, v in enumerate(row) if v != 0)
        if j + 1 not in (a, b):
            return None
        src = point[0] if j + 1 == a else point[1]
        out.append((row[j] * src + g.translation[i - 1]) % 1)
    # Also require that no other coordinate reads from the pair plane.
    for i in range(g.dim):
        if i + 1 in (a, b):
            continue
        row = g.linear[i]
        j = next(k for k, v in enumerate(row) if v != 0)
        if j + 1 in (a, b):
            return None
    return (out[0], out[1])


def check_invariance(chart: ChartSpec, g: AffineIsometry, atlas=None) -> CheckResult:
    """Whether g maps the chart onto itself, as an exact statement.

    Ball charts: the linear part must preserve the constrained coordinate
    plane and the induced map must permute the center set (the radius is
    automatically preserved by an isometry).  Complement charts inherit
    invariance from the charts they avoid; full charts are always invariant.
    """
    label = f"invariance[{chart.name}]"
    if chart.kind == "full":
        return CheckResult(label, True, "whole torus")
    if chart.kind == "complement":
        if atlas is None:
            return CheckResult(label, False, "complement chart needs its atlas context")
        by_name = {c.name: c for c in atlas}
        for ref in chart.complement_of:
            sub = check_invariance(by_name[ref], g)
            if not sub.passed:
                return CheckResult(label, False, f"removed chart {ref} not invariant")
        return CheckResult(label, True, "complement of invariant charts")
    images = set()
    for c in chart.centers:
        img = _pair_image(g, chart.constrained, c)
        if img is None:
            return CheckResult(label, False, "linear part does not preserve the constrained plane")
        images.add(img)
    if images != set(chart.centers):
        return CheckResult(label, False, f"center set not preserved (image {sorted(images)})")
    return CheckResult(label, True)


def check_action_invariance(chart: ChartSpec, action: TorusActionSymbol, atlas=None) -> CheckResult:
    """Formal translations leave the chart invariant iff they avoid every
    constrained coordinate (their own, or of the removed charts for a
    complement)."""
    label = f"action-invariance[{chart.name}]"
    if chart.kind == "full":
        return CheckResult(label, True)
    if chart.kind == "ball":
        bad = [i for i in action.directions if i in chart.constrained]
        if bad:
            return CheckResult(
                label, False, f"translation along x{bad[0]} moves the constrained coordinate off the centers"
            )
        return CheckResult(label, True)
    by_name = {c.name: c for c in atlas or []}
    for ref in chart.complement_of:
        sub = by_name.get(ref)
        if sub is None:
            return CheckResult(label, False, f"unknown removed chart {ref}")
        bad = [i for i in action.directions if i in sub.constrained]
        if bad:
            return CheckResult(label, False, f"translation along x{bad[0]} moves removed chart {ref}")
    return CheckResult(label, True)


def check_covariance(
    chart: ChartSpec,
    group: GroupTable,
    rule: CovarianceRule | None = None,
) -> CheckResult:
    """Condition: the group composes with the chart's torus action through
    a signed-diagonal automorphism, exactly.

    Group-covered charts check the declared homomorphism Psi against the
    identity g(x + theta e_i) = g(x) + Psi(g)_j theta e_i, which for
    affine maps is the exact condition L_g e_i = Psi(g)_j e_i.  Trivially
    covered circle actions with component signs check that every group
    element maps a component's signed action to the image component's.
    """
    label = f"covariance[{chart.name}]"
    action = chart.action
    if chart.covering == "group":
        if rule is None:
            return CheckResult(label, False, "no covariance rule declared")
        homo_fail = _homomorphism_failure(group, rule)
        if homo_fail:
            return CheckResult(label, False, f"rule is not a homomorphism: {homo_fail}")
        for gi, el in enumerate(group.elements):
            signs = rule.signs.get(gi)
            if signs is None or len(signs) != action.rank:
                return CheckResult(label, False, f"rule missing for element {group.names[gi]}")
            for j, axis in enumerate(action.directions):
                actual = _axis_sign(el, axis)
                if actual is None or actual != signs[j]:
                    return CheckResult(
                        label,
                        False,
                        f"{group.names[gi]} sends e{axis} to "
                        f"{'a moved axis' if actual is None else f'{actual}*e{axis}'}, rule says {signs[j]}",
                    )
        return CheckResult(label, True)
    # Trivial covering: component-signed equivariance.
    if action.component_signs is None:
        if action.rank == 0:
            return CheckResult(label, False, "empty action")
        # A global action must strictly commute with every element.
        for gi, el in enumerate(group.elements):
            for axis in action.directions:
                if _axis_sign(el, axis) != 1:
                    return CheckResult(
                        label, False, f"{group.names[gi]} does not commute with the x{axis} action"
                    )
        return CheckResult(label, True)
    if chart.kind != "ball":
        return CheckResult(label, False, "component signs need a ball chart")
    if len(action.component_signs) != len(chart.centers):
        return CheckResult(label, False, "one sign per component required")
    axis = action.directions[0]
    index = {c: m for m, c in enumerate(chart.centers)}
    for gi, el in enumerate(group.elements):
        eps = _axis_sign(el, axis)
        if eps is None:
            return CheckResult(label, False, f"{group.names[gi]} moves the acting axis e{axis}")
        for m, c in enumerate(chart.centers):
            img = _pair_image(el, chart.constrained, c)
            if img is None or img not in index:
                return CheckResult(label, False, f"{group.names[gi]} does not permute the components")
            if eps * action.component_signs[m] != action.component_signs[index[img]]:
                return CheckResult(
                    label,
                    False,
                    f"component {tuple(str(x) for x in c)} under {group.names[gi]}: "
                    f"axis sign {eps} conflicts with the component signs",
                )
    return CheckResult(label, True)


def _homomorphism_failure(group: GroupTable, rule: CovarianceRule) -> str | None:
    for i in range(group.order):
        if i not in rule.signs:
            return f"no value on {group.names[i]}"
    for i in range(group.order):
        for j in range(group.order):
            k = group.product[i][j]
            prod = tuple(a * b for a, b in zip(rule.signs[i], rule.signs[j]))
            if prod != rule.signs[k]:
                return f"Psi({group.names[i]})Psi({group.names[j]}) != Psi({group.names[k]})"
    return None


def extend_rule(group: GroupTable, generator_signs: dict[str, tuple[int, ...]]) -> CovarianceRule:
    """Extend generator-level signs to the whole table along its words.

    The extension follows the group table's own construction (element =
    parent * generator); whether the result is a genuine homomorphism is
    checked separately by check_covariance.
    """
    rank = len(next(iter(generator_signs.values())))
    signs: dict[int, tuple[int, ...]] = {0: tuple([1] * rank)}
    gen_index = {name: i for i, name in enumerate(group.names)}
    missing = [n for n in generator_signs if n not in gen_index]
    if missing:
        raise ValueError(f"rule names unknown generators: {missing}")
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for name, gsigns in generator_signs.items():
                j = group.product[i][gen_index[name]]
                if j not in signs:
                    signs[j] = tuple(a * b for a, b in zip(signs[i], gsigns))
                    nxt.append(j)
        frontier = nxt
    if len(signs) != group.order:
        raise ValueError("rule generators do not generate the group")
    return CovarianceRule(signs=signs)


def check_locally_free(action: TorusActionSymbol, chart: ChartSpec) -> tuple[CheckResult, int]:
    """Translation actions with a nonzero direction set are locally free;
    the orbit dimension is the rank of the direction set."""
    label = f"locally-free[{chart.name}]"
    dim = action.rank
    if dim == 0:
        return CheckResult(label, False, "rank-0 action has no positive-dimensional orbit"), 0
    return CheckResult(label, True, f"orbit dimension {dim}"), dim


def actions_commute(a: TorusActionSymbol, b: TorusActionSymbol) -> bool:
    """Formal translations always commute; kept as an explicit identity check.

    Composing x -> x + s e_i and x -> x + t e_j in both orders gives the
    same affine map with formal parameters, for any axes i, j.
    """
    # (x + s e_i) + t e_j == (x + t e_j) + s e_i as formal sums.
    return True


def _overlap_nonempty(c1: ChartSpec, c2: ChartSpec) -> bool:
    if c1.kind != "ball" or c2.kind != "ball":
        return True  # complement/full charts meet everything in our atlases
    if c1.constrained != c2.constrained:
        return True  # different planes: tubes generically intersect
    mind = min(
        _torus_dist_sq(p, q) for p in c1.centers for q in c2.centers
    )
    return mind < (c1.epsilon + c2.epsilon) ** 2


@dataclass
class FStructureReport:
    charts: list[ChartSpec]
    checks: list[CheckResult] = field(default_factory=list)
    cover: CheckResult | None = None
    covering_data: list[CheckResult] = field(default_factory=list)
    overlap: list[CheckResult] = field(default_factory=list)
    disjointness: CheckResult | None = None
    surgery_flags: list[CheckResult] = field(default_factory=list)
    polarized: bool = False
    rank: int | None = None

    @property
    def all_checks(self) -> list[CheckResult]:
        out = list(self.checks)
        if self.cover:
            out.append(self.cover)
        out.extend(self.covering_data)
        out.extend(self.overlap)
        if self.disjointness:
            out.append(self.disjointness)
        out.extend(self.surgery_flags)
        return out

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.all_checks)


def _check_cover(atlas: list[ChartSpec]) -> CheckResult:
    """The ball charts plus the complement chart exhaust the torus.

    By definition the complement chart is the complement of the closed
    shrunken ball union; the cover identity holds exactly iff every closed
    shrunken ball sits inside its open ball, i.e. shrink < 1 with matching
    centers.  A full chart covers outright.
    """
    if any(c.kind == "full" for c in atlas):
        return CheckResult("cover", True, "whole-torus chart present")
    comps = [c for c in atlas if c.kind == "complement"]
    if not comps:
        return CheckResult("cover", False, "no complement chart and no full chart")
    names = {c.name for c in atlas if c.kind == "ball"}
    for comp in comps:
        missing = [n for n in comp.complement_of if n not in names]
        if missing:
            return CheckResult("cover", False, f"complement references unknown charts {missing}")
        if not comp.shrink < 1:
            return CheckResult("cover", False, "shrunken closed balls must sit inside the open balls")
    covered = set().union(*(set(c.complement_of) for c in comps))
    uncovered = names - covered
    if uncovered:
        return CheckResult("cover", False, f"ball charts {sorted(uncovered)} not accounted for")
    return CheckResult(
        "cover", True, "closed shrunken balls lie inside the open balls; complement fills the rest"
    )


def _check_free_action(chart: ChartSpec, group: GroupTable, atlas: list[ChartSpec]) -> CheckResult:
    """Declared group coverings must act freely on the chart.

    For complement charts: every fixed component of a non-identity element
    must lie inside some removed shrunken chart, verified exactly through
    the component's constrained-pair coordinates.
    """
    label = f"free-action[{chart.name}]"
    if chart.covering != "group":
        return CheckResult(label, True, "trivial covering")
    by_name = {c.name: c for c in atlas}
    removed = [by_name[n] for n in chart.complement_of] if chart.kind == "complement" else []
    for gi, el in enumerate(group.elements):
        if gi == 0:
            continue
        for comp in fixed_locus(el):
            if chart.kind == "full":
                return CheckResult(label, False, f"{group.names[gi]} has fixed points")
            inside = False
            for w in removed:
                a, b = w.constrained
                if any(dv[a - 1] != 0 or dv[b - 1] != 0 for dv in comp.directions):
                    continue  # component sweeps the pair plane; not contained
                cpair = (comp.basepoint[a - 1], comp.basepoint[b - 1])
                bound = (w.epsilon * chart.shrink) ** 2
                if any(_torus_dist_sq(cpair, ctr) <= bound for ctr in w.centers):
                    inside = True
                    break
            if not inside:
                return CheckResult(
                    label,
                    False,
                    f"fixed component of {group.names[gi]} at {tuple(str(x) for x in comp.basepoint)} "
                    "meets the chart",
                )
    return CheckResult(label, True, "group acts freely on the chart")


def verify_f_structure(
    atlas: list[ChartSpec],
    group: GroupTable,
    rules: dict[str, CovarianceRule] | None = None,
) -> FStructureReport:
    """Run every F-structure condition on the atlas, exactly.

    Conditions: (1) cover, (2) covering data well-formed (declared group
    coverings act freely), (3) per-chart invariance and covariance,
    (4) lifted actions commute on overlaps.  Also reported: ball-chart
    disjointness, surgery-compatibility flags, the polarized flag (all
    local-freeness checks pass) and the rank (minimum orbit dimension).
    """
    if not atlas:
        raise ValueError("empty atlas")
    rules = rules or {}
    report = FStructureReport(charts=list(atlas))

    report.cover = _check_cover(atlas)

    for chart in atlas:
        report.covering_data.append(_check_free_action(chart, group, atlas))
        for gi, el in enumerate(group.elements):
            if gi == 0:
                continue
            res = check_invariance(chart, el, atlas)
            if not res.passed:
                res.name = f"invariance[{chart.name}/{group.names[gi]}]"
                report.checks.append(res)
                break
        else:
            report.checks.append(CheckResult(f"invariance[{chart.name}]", True))
        report.checks.append(check_action_invariance(chart, chart.action, atlas))
        report.checks.append(check_covariance(chart, group, rules.get(chart.name)))

    dims = []
    lf_all = True
    for chart in atlas:
        res, dim = check_locally_free(chart.action, chart)
        report.checks.append(res)
        lf_all &= res.passed
        if res.passed:
            dims.append(dim)
    report.polarized = lf_all
    report.rank = min(dims) if dims else None

    for i, c1 in enumerate(atlas):
        for c2 in atlas[i + 1 :]:
            if _overlap_nonempty(c1, c2):
                ok = actions_commute(c1.action, c2.action)
                report.overlap.append(
                    CheckResult(
                        f"overlap[{c1.name}&{c2.name}]",
                        ok,
                        "lifted translation actions commute" if ok else "actions do not commute",
                    )
                )

    balls = [c for c in atlas if c.kind == "ball"]
    dis_ok, detail = True, "pairwise center distance exceeds the radius sum"
    for i, c1 in enumerate(balls):
        for c2 in balls[i + 1 :]:
            if c1.constrained == c2.constrained:
                mind = min(_torus_dist_sq(p, q) for p in c1.centers for q in c2.centers)
                if mind <= (c1.epsilon + c2.epsilon) ** 2:
                    dis_ok, detail = False, f"{c1.name} and {c2.name} overlap"
    report.disjointness = CheckResult("disjointness", dis_ok, detail)

    for chart in balls:
        clash = [i for i in chart.action.directions if i in (chart.constrained or ())]
        report.surgery_flags.append(
            CheckResult(
                f"surgery-compatibility[{chart.name}]",
                not clash,
                "acting coordinates disjoint from the constrained pair"
                if not clash
                else f"action moves constrained coordinate x{clash[0]}",
            )
        )
    return report
