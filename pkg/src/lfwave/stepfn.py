"""Piecewise-constant functions on the local field with exact cyclotomic values.

A step function is a finite list of (ball, value) cells with pairwise
disjoint balls and the implicit value 0 elsewhere.  Every function the
library handles is constant on the cells of a common refinement, so
"almost everywhere" statements are decided exactly at one representative
point per refinement cell.
"""

from __future__ import annotations

from .clopen import Ball, ClopenSet
from .cyclo import CycloScalar
from .gfq import ConfigMismatch, FieldConfig
from .lfield import FieldElement, split_integral


class StepFunction:
    __slots__ = ("config", "cells")

    def __init__(self, config: FieldConfig, cells, _canonical: bool = False):
        if _canonical:
            self.config = config
            self.cells = tuple(cells)
            return
        kept = []
        for ball, value in cells:
            if ball.config != config:
                raise ConfigMismatch("cell ball from a different configuration")
            if not value.is_zero():
                kept.append((ball, value))
        kept.sort(key=lambda cv: cv[0].sort_key())
        for i, (a, _) in enumerate(kept):
            for b, _ in kept[i + 1:]:
                if not a.is_disjoint(b):
                    raise ValueError(f"overlapping cells {a} and {b}")
        self.config = config
        self.cells = tuple(kept)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, config: FieldConfig) -> "StepFunction":
        return cls(config, (), _canonical=True)

    @classmethod
    def indicator(cls, support: ClopenSet, value: CycloScalar | None = None) -> "StepFunction":
        cfg = support.config
        if value is None:
            value = CycloScalar.rational(cfg.p, cfg.q, 1)
        return cls(cfg, [(b, value) for b in support.balls])

    def one_value(self) -> CycloScalar:
        return CycloScalar.rational(self.config.p, self.config.q, 1)

    def zero_value(self) -> CycloScalar:
        return CycloScalar.zero(self.config.p, self.config.q)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, x: FieldElement) -> CycloScalar:
        for ball, value in self.cells:
            if ball.contains_point(x):
                return value
        return self.zero_value()

    def support(self) -> ClopenSet:
        return ClopenSet(self.config, [b for b, _ in self.cells])

    # -- pointwise algebra -------------------------------------------------------

    def scalar_mul(self, s: CycloScalar) -> "StepFunction":
        return StepFunction(self.config, [(b, s * v) for b, v in self.cells])

    def conj(self) -> "StepFunction":
        return StepFunction(
            self.config, [(b, v.conj()) for b, v in self.cells], _canonical=True
        )

    def precompose(self, j: int = 0, shift: FieldElement | None = None) -> "StepFunction":
        """The function  xi -> f(p**-j * (xi + shift)).

        Cell preimages are balls again: B maps to p**j * B - shift.
        """
        out = []
        for ball, value in self.cells:
            nb = ball.scale_by(j)
            if shift is not None:
                nb = nb.translate(-shift)
            out.append((nb, value))
        return StepFunction(self.config, out)

    def __eq__(self, other):
        if not isinstance(other, StepFunction) or self.config != other.config:
            return NotImplemented
        mesh = common_refinement(self.config, [self, other])
        return all(
            self.evaluate(cell.center) == other.evaluate(cell.center) for cell in mesh
        )

    def __hash__(self):
        raise TypeError("step functions compare by refinement; not hashable")

    def __repr__(self):
        if not self.cells:
            return "step{}"
        return "step{" + ", ".join(f"({b!r}, {v!r})" for b, v in self.cells) + "}"


def common_refinement(config, fns, extras=()):
    """A pairwise-disjoint ball mesh on which every input function is constant
    and which covers every input support and extra set.

    Returns the mesh as a list of balls; cell representatives are centers.
    """
    pool = []
    for f in fns:
        pool.extend(b for b, _ in f.cells)
    for s in extras:
        pool.extend(s.balls)
    universe = ClopenSet(config, pool)

    def cells(ball, relevant):
        if all(b.contains_ball(ball) for b in relevant):
            yield ball
            return
        for child in ball.children():
            sub = [b for b in relevant if not child.is_disjoint(b)]
            if sub:
                yield from cells(child, sub)

    mesh = []
    for region in universe.balls:
        relevant = [b for b in pool if not region.is_disjoint(b)]
        mesh.extend(cells(region, relevant))
    mesh.sort(key=Ball.sort_key)
    return mesh


def periodized_weight(f: StepFunction) -> StepFunction:
    """Sum of |f|**2 over all integral translates, folded onto the ring of
    integers.  The fold is finite because the support is bounded; the result
    is integral periodic by construction."""
    cfg = f.config
    folded = []
    for ball, value in f.cells:
        sq = value.abs_sq().reduce_grade()
        for piece in ball.split_to(max(ball.scale, 0)):
            _, rem = split_integral(piece.center)
            folded.append((Ball(cfg, rem, piece.scale), sq))
    if not folded:
        return StepFunction.zero(cfg)
    pieces = [StepFunction(cfg, [cell], _canonical=True) for cell in folded]
    mesh = common_refinement(cfg, pieces)
    cells = []
    for cell in mesh:
        total = CycloScalar.zero(cfg.p, cfg.q)
        for ball, sq in folded:
            if ball.contains_point(cell.center):
                total = total + sq
        if not total.is_zero():
            cells.append((cell, total))
    return StepFunction(cfg, cells, _canonical=True)
