"""Group structure, loop actions, Fourier constraints, classification."""

from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from unchained.errors import UnsupportedCase
from unchained.ngon import LoopPath
from unchained.spectrum import lyapunov_cylinder
from unchained.symmetry import (GroupSpec, apply_element, compose,
                                dense_choreography_params, element_order,
                                enumerate_elements, find_isomorphism,
                                fourier_constraints, identity_element,
                                invariance_defect, inverse, is_invariant,
                                is_simple_choreography, make_element,
                                structure_report)


def cycle_bruteforce(spec):
    """Choreography oracle: some group element with trivial isometry part
    (no rotation, no flip, forward time) permutes bodies in one N-cycle."""
    n = spec.n_bodies
    return any(
        g.xi == 1 and g.beta == 0 and g.alpha == 0 and gcd(g.delta, n) == 1
        for g in enumerate_elements(spec))


def curve_bruteforce(spec, amplitude=0.35):
    """Choreography oracle: every body's sampled curve is a time shift of
    body 0's curve on the model cylinder loop."""
    loop = lyapunov_cylinder(spec.n_bodies, spec.k, spec.eta, spec.r,
                             spec.s, amplitude)
    pos = loop.positions
    m = loop.n_samples
    for j in range(1, spec.n_bodies):
        deviations = [np.abs(pos[:, j] - np.roll(pos[:, 0], -d, axis=0)).max()
                      for d in range(m)]
        if min(deviations) > 1e-8:
            return False
    return True


def spec_battery(n_max=6, r_range=(-4, 5), s_max=3):
    specs = []
    for n in range(3, n_max + 1):
        for k in range(1, n // 2 + 1):
            for eta in ((1,) if 2 * k == n else (-1, 1)):
                for s in range(1, s_max + 1):
                    for r in range(*r_range):
                        if gcd(r, s) == 1:
                            specs.append(GroupSpec(n, k, eta, r, s))
    return specs


def test_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec(5, 3, -1, 1, 1)
    with pytest.raises(ValueError):
        GroupSpec(5, 2, 0, 1, 1)
    with pytest.raises(ValueError):
        GroupSpec(5, 2, -1, 2, 4)
    # eta is immaterial for the antisymmetric mode and normalizes to +1
    assert GroupSpec(4, 2, -1, 1, 1) == GroupSpec(4, 2, 1, 1, 1)


def test_group_order():
    assert len(enumerate_elements(GroupSpec(3, 1, -1, 2, 1))) == 12
    assert len(enumerate_elements(GroupSpec(4, 2, 1, 3, 2))) == 32
    for spec in (GroupSpec(5, 2, -1, 1, 1), GroupSpec(6, 2, 1, 5, 3)):
        assert len(enumerate_elements(spec)) == 4 * spec.n_bodies * spec.s


def test_identity_present():
    spec = GroupSpec(5, 2, -1, 2, 1)
    e = identity_element(spec)
    assert e.theta == 0 and e.delta == 0 and e.beta == 0 and e.xi == 1
    assert e.alpha == 0
    assert e in enumerate_elements(spec)


def test_defining_congruences_exact():
    for spec in (GroupSpec(5, 2, -1, 2, 1), GroupSpec(4, 1, 1, 3, 2),
                 GroupSpec(6, 3, 1, 1, 3)):
        n, k, eta = spec.n_bodies, spec.k, spec.eta
        for g in enumerate_elements(spec):
            assert (g.theta - Fraction(g.beta, 2)
                    - Fraction(k * eta * g.delta, n)) % 1 == 0
            assert (Fraction(spec.r, spec.s) * g.theta
                    - Fraction(g.delta, n) - g.alpha) % 1 == 0


def test_group_axioms():
    spec = GroupSpec(3, 1, -1, 2, 1)
    elements = enumerate_elements(spec)
    table = set(elements)
    assert len(table) == 12
    for g in elements:
        assert compose(spec, g, inverse(spec, g)) == identity_element(spec)
        for h in elements:
            gh = compose(spec, g, h)
            assert gh in table
            for f in elements:
                left = compose(spec, f, gh)
                right = compose(spec, compose(spec, f, g), h)
                assert left == right


def test_group_closure_larger():
    rng = np.random.default_rng(7)
    for spec in (GroupSpec(6, 2, -1, 1, 2), GroupSpec(8, 3, 1, 2, 3)):
        elements = enumerate_elements(spec)
        table = set(elements)
        assert len(table) == 4 * spec.n_bodies * spec.s
        pick = rng.choice(len(elements), size=(60, 2))
        for i, j in pick:
            assert compose(spec, elements[i], elements[j]) in table


def test_structure_report_dihedral_for_unit_s():
    rep5 = structure_report(GroupSpec(5, 1, -1, 4, 1))
    assert rep5.order == 20 and rep5.h_order == 10
    assert rep5.is_dihedral_times_z2
    rep3 = structure_report(GroupSpec(3, 1, -1, 2, 1))
    assert rep3.order == 12
    assert rep3.is_dihedral_times_z2
    rep4 = structure_report(GroupSpec(4, 2, 1, 1, 1))
    assert rep4.order == 16
    assert rep4.is_dihedral_times_z2


def test_structure_report_s2():
    rep = structure_report(GroupSpec(4, 2, 1, 3, 2))
    assert rep.order == 32 and rep.h_order == 16
    assert not rep.is_dihedral_times_z2


def test_k_subgroup_cyclicity():
    # gcd(N k', gcd(k, s)) = 1 guarantees a cyclic kernel of order N s
    assert structure_report(GroupSpec(5, 2, -1, 1, 4)).k_cyclic_order == 20
    assert structure_report(GroupSpec(5, 1, -1, 2, 1)).k_cyclic_order == 5
    assert structure_report(GroupSpec(7, 3, 1, 1, 3)).k_cyclic_order == 21
    # (4, 2, s=2): kernel is Z/4 x Z/2, not cyclic
    assert structure_report(GroupSpec(4, 2, 1, 3, 2)).k_cyclic_order is None


def test_element_orders_divide_group_order():
    spec = GroupSpec(5, 2, -1, 2, 1)
    for g in enumerate_elements(spec):
        assert (4 * spec.n_bodies * spec.s) % element_order(spec, g) == 0


def test_apply_identity_returns_same_loop():
    spec = GroupSpec(5, 2, -1, 2, 1)
    loop = lyapunov_cylinder(5, 2, -1, 2, 1, 0.2)
    out = apply_element(identity_element(spec), spec, loop)
    np.testing.assert_allclose(out.positions, loop.positions, atol=1e-14)


def test_apply_rejects_wrong_body_count():
    spec = GroupSpec(5, 2, -1, 2, 1)
    loop = lyapunov_cylinder(4, 1, -1, 2, 1, 0.2)
    with pytest.raises(ValueError):
        apply_element(identity_element(spec), spec, loop)


@pytest.mark.parametrize("spec", [
    GroupSpec(3, 1, -1, 2, 1),
    GroupSpec(4, 2, 1, 1, 1),
    GroupSpec(4, 1, -1, 3, 2),
    GroupSpec(5, 2, -1, 2, 1),
    GroupSpec(6, 2, 1, 5, 3),
])
def test_cylinder_stabilized_by_its_group(spec):
    loop = lyapunov_cylinder(spec.n_bodies, spec.k, spec.eta, spec.r,
                             spec.s, 0.3)
    assert invariance_defect(loop, spec) < 1e-10


def test_cylinder_not_invariant_under_other_mode():
    loop = lyapunov_cylinder(5, 2, -1, 2, 1, 0.3)
    assert not is_invariant(loop, GroupSpec(5, 1, -1, 2, 1), tol=1e-6)


def test_equilibrium_invariant_for_matching_frame():
    # zero amplitude leaves only the horizontal n-gon rotation, which
    # carries the symmetry of every vertical mode in the same frame;
    # normalized loops (period s) make the cross-mode comparison legal
    r, s, n = 2, 1, 5
    j = np.arange(n)

    def gon(t):
        ang = 2.0 * np.pi * (j / n + r * t / s)
        return np.stack([np.cos(ang), np.sin(ang), np.zeros(n)], axis=-1)

    loop = LoopPath.from_function(gon, float(s), 2 * n * s * 16)
    for k, eta in [(1, -1), (1, 1), (2, -1), (2, 1)]:
        assert invariance_defect(loop, GroupSpec(n, k, eta, r, s)) < 1e-10


def test_italian_symmetry_for_odd_r_s():
    spec = GroupSpec(5, 1, -1, 1, 1)
    rng = np.random.default_rng(3)
    loop = fourier_constraints(spec).random_loop(rng, amplitude=0.2)
    m = loop.n_samples
    assert m % 2 == 0
    half = np.roll(loop.positions, -m // 2, axis=0)
    np.testing.assert_allclose(half, -loop.positions, atol=1e-10)


def test_mirror_symmetry_at_time_zero():
    spec = GroupSpec(5, 2, -1, 2, 1)
    rng = np.random.default_rng(4)
    loop = fourier_constraints(spec).random_loop(rng, amplitude=0.2)
    x0 = loop.positions[0]
    n = spec.n_bodies
    mirrored = x0[(-np.arange(n)) % n]
    np.testing.assert_allclose(x0[:, 0], mirrored[:, 0], atol=1e-10)
    np.testing.assert_allclose(x0[:, 1], -mirrored[:, 1], atol=1e-10)
    np.testing.assert_allclose(x0[:, 2], mirrored[:, 2], atol=1e-10)


def test_marchal_constraints_three_bodies():
    fc = fourier_constraints(GroupSpec(3, 1, -1, 2, 1))
    for l in range(-12, 13):
        expected = l % 2 == 0 and l % 3 != 0
        assert fc.allowed_horizontal(l) == expected
    for l in range(-12, 13):
        expected = l > 0 and l % 2 == 1 and l % 3 != 0
        assert fc.allowed_vertical(l) == expected


def test_equilibrium_harmonic_always_allowed():
    for spec in (GroupSpec(5, 2, -1, 2, 1), GroupSpec(4, 2, 1, 3, 2),
                 GroupSpec(6, 1, 1, 1, 3)):
        fc = fourier_constraints(spec)
        u = fc.horizontal_phase(spec.r)
        np.testing.assert_allclose(
            u, np.exp(2j * np.pi * np.arange(spec.n_bodies) / spec.n_bodies),
            atol=1e-14)


def test_projector_idempotent():
    spec = GroupSpec(5, 2, -1, 2, 1)
    fc = fourier_constraints(spec)
    rng = np.random.default_rng(11)
    loop = LoopPath(rng.standard_normal((40, 5, 3)), 1.0)
    once = fc.project(loop)
    twice = fc.project(once)
    np.testing.assert_allclose(twice.positions, once.positions, atol=1e-12)


def test_projected_random_loop_is_invariant():
    for spec in (GroupSpec(5, 2, -1, 2, 1), GroupSpec(4, 1, -1, 3, 2)):
        fc = fourier_constraints(spec)
        rng = np.random.default_rng(12)
        m = 2 * spec.n_bodies * spec.s * 8
        loop = LoopPath(rng.standard_normal((m, spec.n_bodies, 3)),
                        float(spec.s))
        assert invariance_defect(fc.project(loop), spec) < 1e-10


def test_random_invariant_loop_passes_strict_tolerance():
    for seed, spec in [(1, GroupSpec(3, 1, -1, 2, 1)),
                       (2, GroupSpec(5, 2, -1, 2, 1)),
                       (3, GroupSpec(4, 2, 1, 3, 2))]:
        fc = fourier_constraints(spec)
        loop = fc.random_loop(np.random.default_rng(seed), amplitude=0.3)
        assert invariance_defect(loop, spec) < 1e-12


def test_projection_agrees_with_invariance():
    spec = GroupSpec(4, 1, -1, 1, 1)
    fc = fourier_constraints(spec)
    rng = np.random.default_rng(5)
    for trial in range(25):
        invariant = fc.random_loop(rng, amplitude=0.25)
        assert is_invariant(invariant, spec)
        noisy = LoopPath(
            invariant.positions + 0.05 * rng.standard_normal(
                invariant.positions.shape),
            invariant.period)
        moved = fc.project(noisy)
        assert not is_invariant(noisy, spec)
        assert np.abs(moved.positions - noisy.positions).max() > 1e-4


def test_simple_choreography_worked_examples():
    assert is_simple_choreography(GroupSpec(3, 1, -1, 2, 1))
    assert is_simple_choreography(GroupSpec(4, 2, 1, 3, 2))
    assert not is_simple_choreography(GroupSpec(4, 2, 1, 1, 1))


def test_choreography_matches_cycle_bruteforce():
    for spec in spec_battery(n_max=6, r_range=(-4, 5), s_max=3):
        assert is_simple_choreography(spec) == cycle_bruteforce(spec), spec


def test_choreography_matches_curve_bruteforce():
    for spec in spec_battery(n_max=5, r_range=(-2, 4), s_max=2):
        assert is_simple_choreography(spec) == curve_bruteforce(spec), spec


def test_dense_choreography_params():
    pairs = dense_choreography_params(3, 1, -1, 1)
    assert (2, 1) in pairs
    assert all(s == 1 and (1 + r) % 3 == 0 for r, s in pairs)
    deep = dense_choreography_params(3, 1, -1, 8)
    assert all(gcd(r, s) == 1 for r, s in deep)
    assert all(is_simple_choreography(GroupSpec(3, 1, -1, r, s))
               for r, s in deep)
    ratios_shallow = sorted(r / s for r, s in pairs)
    ratios_deep = sorted(r / s for r, s in deep)
    assert max(np.diff(ratios_deep)) < max(np.diff(ratios_shallow))


def test_isomorphism_worked_examples():
    perm = find_isomorphism(GroupSpec(5, 1, -1, 4, 1),
                            GroupSpec(5, 2, -1, 2, 1))
    np.testing.assert_array_equal(perm, (-2 * np.arange(5)) % 5)
    perm = find_isomorphism(GroupSpec(4, 1, -1, 3, 1),
                            GroupSpec(4, 1, 1, 1, 1))
    np.testing.assert_array_equal(perm, (-np.arange(4)) % 4)
    assert find_isomorphism(GroupSpec(4, 1, 1, 1, 1),
                            GroupSpec(4, 2, 1, 1, 1)) is None
    perm = find_isomorphism(GroupSpec(5, 2, 1, 3, 1),
                            GroupSpec(5, 1, 1, 1, 1))
    np.testing.assert_array_equal(perm, (2 * np.arange(5)) % 5)


def test_isomorphism_requires_unit_s():
    with pytest.raises(UnsupportedCase):
        find_isomorphism(GroupSpec(4, 2, 1, 3, 2), GroupSpec(4, 1, 1, 1, 1))


def test_isomorphism_rejects_mismatched_bodies():
    with pytest.raises(ValueError):
        find_isomorphism(GroupSpec(4, 1, 1, 1, 1), GroupSpec(5, 1, 1, 1, 1))


def test_isomorphism_transports_invariance():
    cases = [
        (GroupSpec(5, 1, -1, 4, 1), GroupSpec(5, 2, -1, 2, 1)),
        (GroupSpec(4, 1, -1, 3, 1), GroupSpec(4, 1, 1, 1, 1)),
        (GroupSpec(5, 2, 1, 3, 1), GroupSpec(5, 1, 1, 1, 1)),
    ]
    rng = np.random.default_rng(21)
    for spec, spec2 in cases:
        perm = find_isomorphism(spec, spec2)
        assert perm is not None
        source = fourier_constraints(spec2).random_loop(rng, amplitude=0.3)
        assert invariance_defect(source, spec2) < 1e-10
        relabeled = LoopPath(source.positions[:, perm, :], source.period)
        assert invariance_defect(relabeled, spec) < 1e-10


def test_make_element_rejects_bad_xi():
    with pytest.raises(ValueError):
        make_element(GroupSpec(5, 2, -1, 2, 1), 0, 0, 0, 2)
