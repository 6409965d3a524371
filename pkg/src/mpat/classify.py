"""Decision procedures: semisaturation exponent, O(1)-extremal depth test,
and necessary conditions for minimally non-O(n^{d-1}) patterns."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import prod
from typing import Sequence

from .constructions import Family, as_family, identity_equivalents, j_family
from .containment import contains, contains_any
from .tensor import (
    FaceSpec,
    Tensor01,
    TensorError,
    alone_in_section,
    instantiate_face,
    is_k_orthogonal,
    layer_runs,
    project_pair,
    symmetry_images,
    template_faces,
)

log = logging.getLogger(__name__)


def _check_nonempty(fam: Family) -> None:
    for idx, p in enumerate(fam):
        if p.weight == 0:
            raise TensorError(f"pattern {idx} has no 1-entry")


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of one characterization property, truthy when it holds.

    ``witnesses`` holds ``(face, pattern index, entry)`` triples (``face`` is
    None for the lonely-entry property); ``failure`` names the first face
    for which no witness exists.
    """

    holds: bool
    witnesses: tuple = ()
    failure: FaceSpec | None = None

    def __bool__(self) -> bool:
        return self.holds


def _fixed_sets(d: int):
    dims = range(1, d + 1)
    for size in range(1, d + 1):
        for c in combinations(dims, size):
            yield frozenset(c)


def ssat_property_i(fam, k: int) -> PropertyCheck:
    """Face property at level k.

    For every face f of dimensionality in [k+1, d-1] of the 2x...x2 template,
    some member must have a 1-entry o on the counterpart face that is the only
    1 in every cross section (k+1)-orthogonal to the face and containing o.
    A section through o is fixed by its set of fixed dimensions alone.
    """
    fam = as_family(fam)
    _check_nonempty(fam)
    d = fam.d
    if not 0 <= k <= d - 1:
        raise TensorError(f"k must lie in [0, {d - 1}]")
    witnesses = []
    for dp in range(k + 1, d):
        for f in template_faces(d, dp):
            sections = [g for g in _fixed_sets(d) if is_k_orthogonal(g, f.fixed_dims, k + 1)]
            found = None
            for idx, p in enumerate(fam):
                face = instantiate_face(f, p.dims)
                for o in p.ones():
                    if face.contains(o) and all(alone_in_section(p, o, g) for g in sections):
                        found = (f, idx, o)
                        break
                if found:
                    break
            if found is None:
                return PropertyCheck(False, tuple(witnesses), f)
            witnesses.append(found)
    return PropertyCheck(True, tuple(witnesses))


def ssat_property_ii(fam, k: int) -> PropertyCheck:
    """Some member has a 1-entry alone in every (d-1-k)-dimensional section through it."""
    fam = as_family(fam)
    _check_nonempty(fam)
    d = fam.d
    if not 0 <= k <= d - 1:
        raise TensorError(f"k must lie in [0, {d - 1}]")
    sections = list(combinations(range(1, d + 1), k + 1))
    for idx, p in enumerate(fam):
        for o in p.ones():
            if all(alone_in_section(p, o, g) for g in sections):
                return PropertyCheck(True, ((None, idx, o),))
    return PropertyCheck(False)


@dataclass
class SsatClassification:
    exponent: int
    levels: dict = field(default_factory=dict)

    def failing(self) -> dict:
        """For each level below the exponent, the names of the failing properties."""
        out = {}
        for k, (pi, pii) in self.levels.items():
            if k < self.exponent:
                out[k] = [name for name, chk in (("i", pi), ("ii", pii)) if not chk]
        return out


def ssat_exponent(fam) -> SsatClassification:
    """Smallest k in [0, d-1] at which both characterization properties hold."""
    fam = as_family(fam)
    _check_nonempty(fam)
    levels = {}
    for k in range(fam.d):
        pi = ssat_property_i(fam, k)
        pii = ssat_property_ii(fam, k)
        levels[k] = (pi, pii)
        if pi and pii:
            return SsatClassification(k, levels)
    raise AssertionError("both properties hold at k = d-1 for non-empty patterns")


def ssat_bounded_single(p: Tensor01) -> bool:
    """Bounded-semisaturation test for a single pattern, on its own faces.

    (i) every proper face f has a 1-entry alone in its j-layer for each
    dimension j not fixed by f; (ii) some 1-entry is alone in all its layers.
    """
    if p.weight == 0:
        raise TensorError("pattern has no 1-entry")
    d = p.d
    for dp in range(1, d):
        for f in template_faces(d, dp):
            face = instantiate_face(f, p.dims)
            free = [j for j in range(1, d + 1) if j not in f.sides]
            if not any(
                face.contains(o) and all(alone_in_section(p, o, [j]) for j in free)
                for o in p.ones()
            ):
                return False
    return any(all(alone_in_section(p, o, [j]) for j in range(1, d + 1)) for o in p.ones())


# O(1) extremal semi-decision

BOUNDED = "bounded"
NOT_O1 = "not-o1-at-depth"
ABORTED = "aborted"


@dataclass
class O1Verdict:
    status: str
    n0: int | None = None
    bound: int | None = None
    witnesses: dict = field(default_factory=dict)
    reason: str = ""

    def __str__(self) -> str:
        if self.status == BOUNDED:
            return f"BoundedO1({self.n0}, {self.bound})"
        if self.status == NOT_O1:
            return f"NotO1AtDepth({self.n0})"
        return f"Aborted({self.reason})"


def o1_bound(n0: int, d: int) -> int:
    return (n0 - 1) ** (1 + 2 ** (d - 1))


def ex_o1_decide(fam, n0_max: int, guard: int | None = None) -> O1Verdict:
    """Look for a depth n0 at which every identity equivalent and every
    pairwise-related n0-point configuration contains a member.

    Such a depth bounds the extremal function by a constant.  At each failing
    depth the first avoider (identity equivalents first) is kept as a witness
    of an avoider with n0 ones.
    """
    fam = as_family(fam)
    if n0_max < 1:
        raise TensorError("n0_max must be at least 1")
    d = fam.d
    witnesses: dict[int, Tensor01] = {}
    for n0 in range(1, n0_max + 1):
        avoider = None
        for m in identity_equivalents(n0, d):
            if contains_any(m, fam) is None:
                avoider = m
                break
        if avoider is None:
            try:
                it = j_family(n0, d) if guard is None else j_family(n0, d, guard)
                for m in it:
                    if contains_any(m, fam) is None:
                        avoider = m
                        break
            except TensorError as exc:
                log.warning("depth %d aborted: %s", n0, exc)
                return O1Verdict(ABORTED, n0, None, witnesses, str(exc))
        if avoider is None:
            return O1Verdict(BOUNDED, n0, o1_bound(n0, d), witnesses)
        witnesses[n0] = avoider
    return O1Verdict(NOT_O1, n0_max, None, witnesses)


# minimally non-O(n^{d-1}) filters

ALTERNATION = Tensor01.from_nested([[1, 0, 1, 0], [0, 1, 0, 1]])


@dataclass
class FilterResult:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _is_small_all_ones(p: Tensor01) -> bool:
    return sorted(p.dims) == [1] * (p.d - 2) + [2, 2] and p.weight == p.size


def _has_empty_layer(p: Tensor01) -> bool:
    return any(layer_runs(p, i) for i in range(1, p.d + 1))


def minnonlin_filters(p: Tensor01) -> list[FilterResult]:
    """Necessary conditions for ``p`` to be minimally non-O(n^{d-1})."""
    if p.weight == 0:
        raise TensorError("pattern has no 1-entry")
    d = p.d
    out = []

    ks = sorted(p.dims)
    side_bound = 1 + 2 * sum(2 * k - 2 for k in ks[:-1])
    out.append(
        FilterResult(
            "longest-side",
            ks[-1] <= side_bound,
            f"longest side {ks[-1]}, bound {side_bound}",
        )
    )

    if _is_small_all_ones(p):
        out.append(FilterResult("weight", True, "all-ones 2x2 shape is exempt"))
    else:
        bounds = [p.dims[j] - 1 + prod(p.dims[:j] + p.dims[j + 1 :]) for j in range(d)]
        wb = min(bounds)
        out.append(
            FilterResult(
                "weight",
                p.weight <= wb,
                f"weight {p.weight}, bound {wb} (axis {bounds.index(wb) + 1})",
            )
        )

    images = list(dict.fromkeys(symmetry_images(ALTERNATION)))
    # the four alternating 1-entries themselves are allowed to be the whole pattern
    exempt = p.weight == 4 and not _has_empty_layer(p)
    hit = None
    if d >= 2:
        for i, j in combinations(range(1, d + 1), 2):
            proj = project_pair(p, i, j)
            for q in images:
                if contains(proj, q) is not None:
                    hit = (i, j, q)
                    break
            if hit:
                break
    if hit is None:
        out.append(FilterResult("alternation", True, "no projection contains the alternation"))
    elif exempt:
        out.append(
            FilterResult("alternation", True, f"pattern is exactly the alternation on dims {hit[:2]}")
        )
    else:
        out.append(
            FilterResult(
                "alternation",
                False,
                f"projection on dims {hit[0]},{hit[1]} contains {hit[2].to_nested()}",
            )
        )

    ends = []
    for i in range(1, d + 1):
        for start, length in layer_runs(p, i):
            if start == 1 or start + length - 1 == p.dims[i - 1]:
                ends.append((i, start))
    out.append(
        FilterResult(
            "end-layers",
            not ends,
            "no empty end layer" if not ends else f"empty end layers (dim, start): {ends}",
        )
    )
    return out


def minnonlin_count_bound(dims: Sequence[int]) -> int:
    """Upper bound on the number of minimally non-O(n^{d-1}) patterns whose
    first d-1 sides are ``dims``."""
    dims = tuple(dims)
    if not dims or any(k < 1 for k in dims):
        raise TensorError("side lengths must be positive")
    s = 1 + 2 * sum(2 * k - 2 for k in dims)
    q = prod(dims)
    return sum(((j + 1) ** q - j**q) * q ** (j - 1) for j in range(1, s + 1))


__all__ = [
    "ABORTED",
    "ALTERNATION",
    "BOUNDED",
    "NOT_O1",
    "FilterResult",
    "O1Verdict",
    "PropertyCheck",
    "SsatClassification",
    "ex_o1_decide",
    "minnonlin_count_bound",
    "minnonlin_filters",
    "o1_bound",
    "ssat_bounded_single",
    "ssat_exponent",
    "ssat_property_i",
    "ssat_property_ii",
]
