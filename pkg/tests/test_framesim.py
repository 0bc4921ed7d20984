"""Finite frequency-window oracle: affine coefficients, exact Parseval
residuals (cross-checked against direct coefficient enumeration), direct-sum
residuals, Gram entries, and the batched mesh-delta path."""

import random
from fractions import Fraction

import pytest

from lfwave.clopen import Ball, ClopenSet, fractional_ideal, integers, shell, units
from lfwave.construct import shannon_family, shell_tuple
from lfwave.cyclo import CycloScalar
from lfwave.framesim import (
    FiniteModel,
    WindowEscape,
    affine_coef,
    gram_entry,
    mesh_delta_residuals,
    parseval_residual,
    super_parseval_residual,
    truncation_spot_check,
)
from lfwave.gfq import FieldConfig
from lfwave.lfield import FieldElement, coset_rep
from lfwave.stepfn import StepFunction, common_refinement

CFG2 = FieldConfig(2, 1)
CFG3 = FieldConfig(3, 1)


def rat(cfg, x, grade=0):
    return CycloScalar.rational(cfg.p, cfg.q, x, grade)


def ind(W, value=None):
    return StepFunction.indicator(W) if value is None else \
        StepFunction.indicator(W, value)


def shannon_spectra(cfg):
    return [ind(W) for W in shannon_family(cfg)]


def shell_bounds(f):
    vals = [b.center.valuation() for b, _ in f.cells if not b.contains_zero()]
    return min(vals), max(vals)


def energy_by_enumeration(cfg, f, psis):
    """Direct finite (j, k) enumeration; valid when f carries no cell at
    zero, so only finitely many dilation levels meet the support of f."""
    flo, fhi = shell_bounds(f)
    total = CycloScalar.zero(cfg.p, cfg.q)
    for psi in psis:
        pa, pb = shell_bounds(psi)
        for j in range(pa - fhi, pb - flo + 1):
            mesh = common_refinement(cfg, [f, psi.precompose(-j)])
            sigma = max(b.scale for b in mesh)
            for k in range(cfg.q ** max(j + sigma, 0)):
                c = affine_coef(f, psi, j, k)
                total = total + c.abs_sq().reduce_grade()
    return total


def test_affine_coef_examples():
    psi = ind(integers(CFG2).translate(coset_rep(CFG2, 1)))
    assert affine_coef(psi, psi, 0, 0) == rat(CFG2, 1)
    assert affine_coef(psi, psi, 0, 1).is_zero()
    # disjoint supports: every coefficient at j = 0 vanishes
    f = ind(integers(CFG2))
    for k in range(4):
        assert affine_coef(f, psi, 0, k).is_zero()


def test_affine_coef_against_riemann_sum_oracle():
    # brute-force the defining integral on a fine common mesh, evaluating
    # the character at cell centers (it is constant on fine enough cells)
    cfg = CFG2
    psi = ind(units(cfg))
    f = StepFunction(cfg, [
        (Ball(cfg, FieldElement.one(cfg), 2), rat(cfg, Fraction(1, 2))),
        (Ball(cfg, coset_rep(cfg, 1), 1), CycloScalar.zeta_pow(2, 2, 1)),
    ])
    from lfwave.lfield import character
    for j in (-1, 0, 1):
        for k in range(6):
            psi_j = psi.precompose(-j)
            y = coset_rep(cfg, k).scale_exponents(j)
            fine = max(4, -min(y.valuation(), 0) + 1) if y else 4
            total = CycloScalar.zero(cfg.p, cfg.q)
            for cell in common_refinement(cfg, [f, psi_j]):
                for a in cell.split_to(fine):
                    v = f.evaluate(a.center) * psi_j.evaluate(a.center).conj()
                    if v.is_zero():
                        continue
                    total = total + v * character(y, a.center) * \
                        rat(cfg, a.measure())
            assert affine_coef(f, psi, j, k) == total.q_half_shift(-j)


def test_parseval_residual_shannon_examples():
    model = FiniteModel(CFG2, 3, 3)
    psis = shannon_spectra(CFG2)
    res, bounds = parseval_residual(model, psis, ind(integers(CFG2)))
    assert res.is_zero()
    assert any("j_tail" in key for key in bounds)
    res, _ = parseval_residual(model, psis, ind(shell(CFG2, 1)))
    assert res.is_zero()
    model3 = FiniteModel(CFG3, 2, 2)
    res, _ = parseval_residual(model3, shannon_spectra(CFG3),
                               ind(units(CFG3), CycloScalar.zeta_pow(3, 3, 1)))
    assert res.is_zero()


def test_parseval_residual_detects_deficient_family():
    # halving the analyzing spectrum quarters the energy:
    # residual = 1/2 - (1/4) * (1/2) = 3/8
    model = FiniteModel(CFG2, 3, 3)
    half = [ind(units(CFG2), rat(CFG2, Fraction(1, 2)))]
    res, _ = parseval_residual(model, half, ind(units(CFG2)))
    assert res == rat(CFG2, Fraction(3, 8))


def test_collapsed_ksum_matches_direct_enumeration():
    rng = random.Random(41)
    model = FiniteModel(CFG2, 2, 2)
    psis = shannon_spectra(CFG2)
    window_off_zero = fractional_ideal(CFG2, -2).subtract(
        fractional_ideal(CFG2, 2))
    for trial in range(12):
        f = model.random_step(rng, n_cells=4)
        # drop any zero-charged cell so the enumeration oracle is finite
        f = StepFunction(CFG2, [(b, v) for b, v in f.cells
                                if not b.contains_zero()])
        if not f.cells:
            continue
        res, _ = parseval_residual(model, psis, f)
        norm = CycloScalar.zero(2, 2)
        for b, v in f.cells:
            norm = norm + v.abs_sq().reduce_grade() * rat(CFG2, b.measure())
        assert norm - energy_by_enumeration(CFG2, f, psis) == res
        assert res.is_zero()  # the family is Parseval
        assert window_off_zero.contains_set(f.support())


def test_nonparseval_residuals_match_enumeration_too():
    model = FiniteModel(CFG2, 2, 2)
    psis = [ind(shell(CFG2, 1), rat(CFG2, Fraction(1, 2)))]
    f = ind(units(CFG2))
    res, _ = parseval_residual(model, psis, f)
    norm = rat(CFG2, Fraction(1, 2))
    assert res == norm - energy_by_enumeration(CFG2, f, psis)
    assert res.is_rational() and res.as_fraction() == Fraction(3, 8)


def test_residuals_are_rational():
    rng = random.Random(42)
    model = FiniteModel(CFG3, 2, 2)
    psis = shannon_spectra(CFG3)
    for _ in range(10):
        f = model.random_step(rng, n_cells=3)
        res, _ = parseval_residual(model, psis, f)
        assert res.is_rational()


def test_window_escape():
    model = FiniteModel(CFG2, 1, 1)
    with pytest.raises(WindowEscape):
        parseval_residual(model, shannon_spectra(CFG2),
                          ind(fractional_ideal(CFG2, -2)))
    with pytest.raises(WindowEscape):
        # test functions must live on the model mesh
        parseval_residual(model, shannon_spectra(CFG2), ind(shell(CFG2, 2)))
    # analyzing spectra only need window support, not mesh alignment:
    # the scale-3 cells of this spectrum are finer than the scale-1 mesh
    res, _ = parseval_residual(model, [ind(shell(CFG2, 2))],
                               ind(fractional_ideal(CFG2, 1)))
    assert res.is_zero()
    with pytest.raises(ValueError):
        parseval_residual(model, [ind(integers(CFG2))], ind(units(CFG2)))


def test_gram_entries():
    etas = shannon_spectra(CFG2)
    for a in ((0, 0), (1, 0), (-1, 2), (0, 3)):
        for b in ((0, 0), (1, 0), (-1, 2), (0, 3)):
            got = gram_entry(etas, a, b)
            if a == b:
                assert got.reduce_grade() == rat(CFG2, 1)
            else:
                assert got.is_zero()
    # direct-sum tuple: diagonal is the summed measure, off-diagonal zero
    tup = [ind(W) for W in shell_tuple(CFG2, 2)]
    assert gram_entry(tup, (0, 0), (0, 0)) == rat(CFG2, Fraction(3, 8))
    # u(1) translation acts trivially this deep inside the integers, so the
    # off-diagonal entry is again the summed measure: Parseval, never
    # orthonormal
    assert gram_entry(tup, (0, 0), (0, 1)) == rat(CFG2, Fraction(3, 8))
    # dilation offsets separate the slot supports
    assert gram_entry(tup, (0, 0), (1, 0)).is_zero()


def test_super_parseval_residual():
    for cfg in (CFG2, CFG3):
        # the deepest slot (p^3 O*) needs scale-4 mesh cells
        model = FiniteModel(cfg, 3, 4)
        for n in (2, 3):
            etas = [ind(W) for W in shell_tuple(cfg, n)]
            fs = [ind(W) for W in shell_tuple(cfg, n)]
            assert super_parseval_residual(model, etas, fs).is_zero()
            # per-slot mesh deltas, one activated slot at a time
            atom = next(iter(model.atoms()))
            delta = ind(ClopenSet.from_ball(atom))
            zero_fn = StepFunction(cfg, [])
            for i in range(n):
                fs = [delta if j == i else zero_fn for j in range(n)]
                assert super_parseval_residual(model, etas, fs).is_zero()
    with pytest.raises(ValueError):
        super_parseval_residual(FiniteModel(CFG2, 1, 1),
                                [ind(units(CFG2))], [])


def test_super_residual_matches_single_slot_case():
    model = FiniteModel(CFG2, 2, 2)
    rng = random.Random(43)
    psis = [ind(shell(CFG2, 1))]
    for _ in range(5):
        f = model.random_step(rng, n_cells=3)
        res, _ = parseval_residual(model, psis, f)
        assert super_parseval_residual(model, psis, [f]) == res


def test_mesh_delta_residuals_match_general_path():
    model = FiniteModel(CFG2, 2, 2)
    for psis in (shannon_spectra(CFG2), [ind(shell(CFG2, 1))],
                 [ind(units(CFG2), rat(CFG2, Fraction(1, 2)))]):
        batched = mesh_delta_residuals(model, psis)
        assert len(batched) == 2 ** 4
        for atom, res in batched:
            delta = ind(ClopenSet.from_ball(atom))
            direct, _ = parseval_residual(model, psis, delta)
            assert res == direct


def test_truncation_spot_check():
    model = FiniteModel(CFG2, 2, 2)
    f = ind(units(CFG2))
    assert truncation_spot_check(model, shannon_spectra(CFG2), f)
    assert truncation_spot_check(model, [ind(shell(CFG2, 2))], f, samples=5)
