"""Consecutive collinear triples and the triple peeling."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .geometry import Configuration, GeometryError, Line, PointId, incident, sort_key_along
from .peeling import Peeler, peel_rounds

Triple = tuple[int, int, int]


class NotIncident(GeometryError):
    def __init__(self, point_id: int):
        super().__init__(f"point {point_id} is not on the line")
        self.point_id = point_id


@dataclass(frozen=True)
class TripleSystem:
    """Unordered id-triples over a ground set.

    Triples are stored sorted.  ``carriers`` optionally records, per
    triple, the id of the line (or point, for concurrent triples) that
    produced it.
    """

    ground: frozenset
    triples: tuple[Triple, ...]
    kind: str = "collinear"
    carriers: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "triples", tuple(tuple(sorted(t)) for t in self.triples))
        if self.kind not in ("collinear", "concurrent"):
            raise ValueError(f"unknown triple kind {self.kind!r}")
        seen = set()
        for t in self.triples:
            if len(set(t)) != 3:
                raise ValueError(f"triple {t} repeats an id")
            if not set(t) <= self.ground:
                raise ValueError(f"triple {t} leaves the ground set")
            if t in seen:
                raise ValueError(f"duplicate triple {t}")
            seen.add(t)
        if self.carriers is not None and len(self.carriers) != len(self.triples):
            raise ValueError("carriers must align with triples")

    def __len__(self):
        return len(self.triples)

    def restrict(self, keep: Iterable[int]) -> "TripleSystem":
        keep = frozenset(keep)
        idx = [k for k, t in enumerate(self.triples) if set(t) <= keep]
        carriers = tuple(self.carriers[k] for k in idx) if self.carriers is not None else None
        return TripleSystem(keep, tuple(self.triples[k] for k in idx), self.kind, carriers)

    def coverage(self) -> Counter:
        c = Counter({g: 0 for g in self.ground})
        for t in self.triples:
            c.update(t)
        return c

    def pair_multiplicity(self) -> Counter:
        c = Counter()
        for t in self.triples:
            c.update(combinations(t, 2))
        return c

    def max_pair_multiplicity(self) -> int:
        return max(self.pair_multiplicity().values(), default=0)

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind, "ground": sorted(self.ground), "triples": [list(t) for t in self.triples]}
        if self.carriers is not None:
            obj["carriers"] = list(self.carriers)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TripleSystem":
        triples = [tuple(t) for t in obj["triples"]]
        ground = obj.get("ground")
        if ground is None:
            ground = {i for t in triples for i in t}
        carriers = tuple(obj["carriers"]) if "carriers" in obj else None
        return cls(frozenset(ground), tuple(triples), obj.get("kind", "collinear"), carriers)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def sort_along_line(line: Line, points: Sequence[PointId], config: Configuration) -> list[PointId]:
    """Order points of ``line`` by position along its direction ``(-b, a)``."""
    for i in points:
        if not incident(config.points[i], line):
            raise NotIncident(i)
    return sorted(points, key=lambda i: sort_key_along(line, config.points[i]))


def line_orders(config: Configuration) -> list[list[PointId]]:
    """Incident points of every line, in order along the line."""
    return [sorted(ids, key=lambda i, l=l: sort_key_along(l, config.points[i]))
            for l, ids in zip(config.lines, config.incidences)]


def consecutive_triples(config: Configuration) -> TripleSystem:
    triples, carriers = [], []
    for j, order in enumerate(line_orders(config)):
        for k in range(len(order) - 2):
            triples.append(tuple(order[k:k + 3]))
            carriers.append(j)
    return TripleSystem(frozenset(range(config.n)), tuple(triples), "collinear", tuple(carriers))


def in_cell_triples(config: Configuration, cell_labels: Mapping[PointId, Hashable | None]) -> TripleSystem:
    """Consecutive triples whose three points share a cell label.

    A label of ``None`` marks a boundary point and never matches.  The
    windows are taken along the full point set, so a triple interrupted by
    a point of another cell (or the boundary) is lost.
    """
    missing = [i for i in range(config.n) if i not in cell_labels]
    if missing:
        raise ValueError(f"cell labels missing for points {missing[:10]}")
    full = consecutive_triples(config)
    keep = []
    for k, t in enumerate(full.triples):
        labels = {cell_labels[i] for i in t}
        if len(labels) == 1 and None not in labels:
            keep.append(k)
    return TripleSystem(full.ground, tuple(full.triples[k] for k in keep), "collinear",
                        tuple(full.carriers[k] for k in keep))


def triple_count_formula(config: Configuration) -> int:
    return sum(max(0, len(ids) - 2) for ids in config.incidences)


@dataclass
class TriplePeelReport:
    threshold: Fraction
    surviving: frozenset
    surviving_triples: TripleSystem
    rounds: int

    def to_json_obj(self) -> dict:
        return {
            "threshold": str(self.threshold),
            "surviving": sorted(self.surviving),
            "surviving_triples": self.surviving_triples.to_json_obj(),
            "rounds": self.rounds,
        }


def triple_peeler(points: Iterable[int], triples: TripleSystem, threshold) -> Peeler:
    threshold = Fraction(threshold)
    return Peeler(points, triples.triples, triples.triples, lambda e, c: c < threshold)


def triple_peel(points: Iterable[int], triples: TripleSystem, threshold) -> TriplePeelReport:
    """Drop points lying in fewer than ``threshold`` live triples, together
    with every triple containing them, until nothing changes."""
    points = frozenset(points)
    threshold = Fraction(threshold)
    peeler = triple_peeler(points, triples, threshold)
    rounds = peel_rounds(peeler)
    survivors = frozenset(peeler.alive)
    return TriplePeelReport(threshold, survivors, triples.restrict(survivors), rounds)
