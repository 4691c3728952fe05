"""Symmetry groups of the vertical two-frequency families.

A family with vertical mode (k, eta) observed in the frame where the
n-gon advances r turns per s vertical oscillations has a finite
stabilizer of order 4 N s acting on loops by time shift/reversal, body
relabelling, horizontal rotation/reflection and vertical flip.  Elements
are quadruples (theta, delta, beta, xi) subject to the congruence
theta = beta/2 + k eta delta / N (mod 1); the horizontal rotation angle
alpha = (r/s) theta - delta / N (mod 1) is derived.

Time shifts theta are exact rationals with denominator dividing 2 N s,
so congruences and the group law are tested exactly; floats appear only
when a loop is transformed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np

from .errors import UnsupportedCase
from .ngon import LoopPath
from .spectrum import vertical_spectrum

__all__ = [
    "GroupSpec",
    "GroupElement",
    "StructureReport",
    "FourierConstraints",
    "make_element",
    "identity_element",
    "enumerate_elements",
    "compose",
    "inverse",
    "element_order",
    "structure_report",
    "apply_element",
    "invariance_defect",
    "is_invariant",
    "fourier_constraints",
    "is_simple_choreography",
    "dense_choreography_params",
    "find_isomorphism",
]

INVARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class GroupSpec:
    """Parameters (N, k, eta, r, s) naming a stabilizer group."""

    n_bodies: int
    k: int
    eta: int
    r: int
    s: int = 1

    def __post_init__(self):
        n = self.n_bodies
        if n < 3:
            raise ValueError("need at least 3 bodies")
        if not 1 <= self.k <= n // 2:
            raise ValueError(f"mode index k={self.k} outside 1..{n // 2}")
        if self.eta not in (-1, 1):
            raise ValueError(f"eta must be +-1, got {self.eta}")
        if self.s < 1:
            raise ValueError("s must be a positive integer")
        if gcd(self.r, self.s) != 1:
            raise ValueError(f"r/s must be reduced, got {self.r}/{self.s}")
        if 2 * self.k == n and self.eta == -1:
            # for the antisymmetric mode the sign of eta is immaterial;
            # fix +1 so equal specs compare equal
            object.__setattr__(self, "eta", 1)


@dataclass(frozen=True)
class GroupElement:
    """(theta, delta, beta, xi) with theta in R/sZ stored exactly."""

    theta: Fraction
    delta: int
    beta: int
    xi: int
    alpha: Fraction

    def __str__(self):
        return (f"(theta={self.theta}, delta={self.delta}, "
                f"beta={self.beta}, xi={self.xi:+d}, alpha={self.alpha})")


def _alpha_of(spec: GroupSpec, theta: Fraction, delta: int) -> Fraction:
    return (Fraction(spec.r, spec.s) * theta - Fraction(delta, spec.n_bodies)) % 1


def make_element(spec: GroupSpec, delta: int, beta: int, lift: int = 0,
                 xi: int = 1) -> GroupElement:
    """Element with given (delta, beta, xi) and integer time-shift lift."""
    if xi not in (-1, 1):
        raise ValueError("xi must be +-1")
    n = spec.n_bodies
    delta %= n
    beta %= 2
    base = (Fraction(beta, 2) + Fraction(spec.k * spec.eta * delta, n)) % 1
    theta = (base + lift) % spec.s
    return GroupElement(theta, delta, beta, xi, _alpha_of(spec, theta, delta))


def identity_element(spec: GroupSpec) -> GroupElement:
    return make_element(spec, 0, 0, 0, 1)


def enumerate_elements(spec: GroupSpec) -> list[GroupElement]:
    """All 4 N s elements of the stabilizer."""
    return [
        make_element(spec, delta, beta, lift, xi)
        for delta, beta, lift, xi in product(
            range(spec.n_bodies), range(2), range(spec.s), (1, -1))
    ]


def compose(spec: GroupSpec, g2: GroupElement, g1: GroupElement) -> GroupElement:
    """Product g2 g1 (apply g1 first)."""
    theta = (g2.theta + g2.xi * g1.theta) % spec.s
    delta = (g2.delta + g2.xi * g1.delta) % spec.n_bodies
    beta = (g2.beta + g1.beta) % 2
    xi = g2.xi * g1.xi
    return GroupElement(theta, delta, beta, xi, _alpha_of(spec, theta, delta))


def inverse(spec: GroupSpec, g: GroupElement) -> GroupElement:
    theta = (-g.xi * g.theta) % spec.s
    delta = (-g.xi * g.delta) % spec.n_bodies
    return GroupElement(theta, delta, g.beta, g.xi,
                        _alpha_of(spec, theta, delta))


def element_order(spec: GroupSpec, g: GroupElement) -> int:
    e = identity_element(spec)
    acc, order = g, 1
    while acc != e:
        acc = compose(spec, g, acc)
        order += 1
        if order > 4 * spec.n_bodies * spec.s:
            raise RuntimeError("order exceeded group order; law is broken")
    return order


@dataclass(frozen=True)
class StructureReport:
    """Structural facts about a stabilizer group."""

    order: int
    h_order: int
    is_dihedral_times_z2: bool
    k_cyclic_order: int | None


def _is_dihedral_times_z2(spec: GroupSpec, elements: list[GroupElement]) -> bool:
    """Search for a D_N x Z/2 presentation on the multiplication table.

    Needs a of order N, b of order 2 with b a b = a^{-1}, and a central
    order-2 element c with <a, b> and <c> intersecting trivially and
    a^i b^j c^l exhausting the group.
    """
    n = spec.n_bodies
    e = identity_element(spec)
    if len(elements) != 4 * n:
        return False
    orders = {g: element_order(spec, g) for g in elements}
    central = [g for g in elements
               if all(compose(spec, g, h) == compose(spec, h, g)
                      for h in elements)]
    for a in (g for g in elements if orders[g] == n):
        powers = [e]
        for _ in range(n - 1):
            powers.append(compose(spec, a, powers[-1]))
        a_inv = inverse(spec, a)
        for b in (g for g in elements if orders[g] == 2 and g not in powers):
            if compose(spec, b, compose(spec, a, b)) != a_inv:
                continue
            dihedral = set(powers) | {compose(spec, p, b) for p in powers}
            if len(dihedral) != 2 * n:
                continue
            for c in central:
                if orders[c] == 2 and c not in dihedral:
                    full = dihedral | {compose(spec, d, c) for d in dihedral}
                    if len(full) == 4 * n:
                        return True
    return False


def _k_subgroup_cyclic_order(spec: GroupSpec) -> int | None:
    """Order of the kernel K = {(theta, delta), beta = 0} if cyclic."""
    n, s = spec.n_bodies, spec.s
    target = n * s
    best = 0
    for delta in range(n):
        for lift in range(s):
            g = make_element(spec, delta, 0, lift, 1)
            # additive order of (theta, delta) in R/sZ x Z/NZ
            th = g.theta
            p_theta = (s * th.denominator) // gcd(th.numerator, s * th.denominator)
            p_delta = n // gcd(delta, n) if delta else 1
            order = p_theta * p_delta // gcd(p_theta, p_delta)
            best = max(best, order)
    return target if best == target else None


def structure_report(spec: GroupSpec) -> StructureReport:
    elements = enumerate_elements(spec)
    h_order = sum(1 for g in elements if g.xi == 1)
    return StructureReport(
        order=len(elements),
        h_order=h_order,
        is_dihedral_times_z2=_is_dihedral_times_z2(spec, elements),
        k_cyclic_order=_k_subgroup_cyclic_order(spec),
    )


def _check_loop(spec: GroupSpec, loop: LoopPath) -> None:
    if loop.n_bodies != spec.n_bodies:
        raise ValueError(
            f"loop has {loop.n_bodies} bodies, spec expects {spec.n_bodies}")


def apply_element(g: GroupElement, spec: GroupSpec, loop: LoopPath) -> LoopPath:
    """Transformed loop (gx)_j(t) = rho x_{xi(j+delta)}(xi(t - theta)).

    rho rotates the horizontal plane by 2 pi alpha (conjugating first
    when xi = -1) and flips the vertical by (-1)^beta.  theta is read in
    units where the loop period is s, i.e. it shifts time by theta/s of
    the loop's own period; shifts that are exact multiples of the
    sampling step reduce to index rolls.
    """
    _check_loop(spec, loop)
    m = loop.n_samples
    n = spec.n_bodies
    pos = loop.positions

    shift = g.theta * m / spec.s
    if shift.denominator == 1:
        idx = (g.xi * (np.arange(m) - int(shift))) % m
        shifted = pos[idx]
    else:
        t = g.xi * (loop.times - float(g.theta) / spec.s * loop.period)
        shifted = loop.evaluate(t % loop.period)

    src = (g.xi * (np.arange(n) + g.delta)) % n
    shifted = shifted[:, src, :]

    h = shifted[:, :, 0] + 1j * shifted[:, :, 1]
    if g.xi == -1:
        h = np.conj(h)
    h = h * np.exp(2j * np.pi * float(g.alpha))
    out = np.empty_like(shifted)
    out[:, :, 0] = h.real
    out[:, :, 1] = h.imag
    out[:, :, 2] = (1 - 2 * g.beta) * shifted[:, :, 2]
    return LoopPath(out, loop.period, loop.masses.copy())


def invariance_defect(loop: LoopPath, spec: GroupSpec) -> float:
    """Sup-norm deviation of g x from x over the whole group."""
    worst = 0.0
    for g in enumerate_elements(spec):
        moved = apply_element(g, spec, loop)
        worst = max(worst, float(np.abs(moved.positions - loop.positions).max()))
    return worst


def is_invariant(loop: LoopPath, spec: GroupSpec, tol: float = INVARIANCE_TOL) -> bool:
    return invariance_defect(loop, spec) <= tol


@dataclass(frozen=True)
class FourierConstraints:
    """Fourier-side description of the invariant loops of a group.

    With loops expanded as x_j(t) = sum_l a_l^j e^{2 pi i l t / s}
    (horizontal, complex) and z_j(t) = sum_l b_l^j e^{2 pi i l t / s}
    (vertical), invariance forces every coefficient onto a one-real-
    dimensional line or to zero:

      a_l^j = e^{-2 pi i (2 p k eta - 1) j / N} a^0,  l = r - 2 p s,
              allowed iff 2 p k eta - 1 != 0 (mod N), a^0 real;
      b_l^j = e^{ 2 pi i k eta (l/s) j / N} b^0,      l = (2q+1) s,
              allowed iff (l/s) k eta != 0 (mod N),   b^0 real,

    plus b_{-l} = conj(b_l) from reality of z.
    """

    spec: GroupSpec

    def horizontal_phase(self, l: int) -> np.ndarray | None:
        """Per-body phase vector of harmonic l, or None if forbidden."""
        sp = self.spec
        n = sp.n_bodies
        if (sp.r - l) % (2 * sp.s):
            return None
        p = (sp.r - l) // (2 * sp.s)
        factor = 2 * p * sp.k * sp.eta - 1
        if factor % n == 0:
            return None
        j = np.arange(n)
        return np.exp(-2j * np.pi * factor * j / n)

    def vertical_phase(self, l: int) -> np.ndarray | None:
        """Per-body phase vector of vertical harmonic l > 0, or None."""
        sp = self.spec
        n = sp.n_bodies
        if l <= 0 or l % sp.s:
            return None
        mult = l // sp.s
        if mult % 2 == 0 or (mult * sp.k * sp.eta) % n == 0:
            return None
        j = np.arange(n)
        return np.exp(2j * np.pi * sp.k * sp.eta * mult * j / n)

    def allowed_horizontal(self, l: int) -> bool:
        return self.horizontal_phase(l) is not None

    def allowed_vertical(self, l: int) -> bool:
        return self.vertical_phase(l) is not None

    def project(self, loop: LoopPath) -> LoopPath:
        """Orthogonal projection of a loop onto the invariant subspace."""
        _check_loop(self.spec, loop)
        n = self.spec.n_bodies
        m = loop.n_samples
        pos = loop.positions

        hhat = np.fft.fft(pos[:, :, 0] + 1j * pos[:, :, 1], axis=0)
        for f in range(m):
            l = f if f <= m // 2 else f - m
            if m % 2 == 0 and f == m // 2:
                hhat[f] = 0.0  # ambiguous Nyquist bin; sample finer
                continue
            u = self.horizontal_phase(l)
            if u is None:
                hhat[f] = 0.0
            else:
                hhat[f] = ((np.conj(u) @ hhat[f]).real / n) * u
        h = np.fft.ifft(hhat, axis=0)

        zhat = np.fft.fft(pos[:, :, 2], axis=0)
        zhat[0] = 0.0
        if m % 2 == 0:
            zhat[m // 2] = 0.0
        for f in range(1, (m - 1) // 2 + 1):
            w = self.vertical_phase(f)
            if w is None:
                zhat[f] = 0.0
                zhat[m - f] = 0.0
            else:
                coef = (np.conj(w) @ zhat[f]).real / n
                zhat[f] = coef * w
                zhat[m - f] = np.conj(coef * w)
        z = np.fft.ifft(zhat, axis=0)

        out = np.empty_like(pos)
        out[:, :, 0] = h.real
        out[:, :, 1] = h.imag
        out[:, :, 2] = z.real
        return LoopPath(out, loop.period, loop.masses.copy())

    def random_loop(self, rng: np.random.Generator, amplitude: float = 0.1,
                    n_periods_span: int = 3, n_samples: int | None = None,
                    include_equilibrium: bool = True) -> LoopPath:
        """Invariant loop with random coefficients on allowed harmonics.

        Period is normalized to s.  Horizontal harmonics r - 2 p s for
        |p| <= n_periods_span and vertical harmonics (2q+1) s for
        q < n_periods_span are populated where allowed.
        """
        sp = self.spec
        n, s = sp.n_bodies, sp.s
        block = 2 * n * s
        if n_samples is None:
            need = 2 * (abs(sp.r) + 2 * n_periods_span * s + 2)
            n_samples = block * max(2, int(np.ceil(need / block)))
        t = np.arange(n_samples) / n_samples * s
        h = np.zeros((n_samples, n), dtype=complex)
        z = np.zeros((n_samples, n))
        for p in range(-n_periods_span, n_periods_span + 1):
            l = sp.r - 2 * p * s
            u = self.horizontal_phase(l)
            if u is None:
                continue
            base = 1.0 if (p == 0 and include_equilibrium) else 0.0
            coef = base + amplitude * rng.standard_normal()
            h += coef * np.exp(2j * np.pi * l * t[:, None] / s) * u[None, :]
        for q in range(n_periods_span):
            l = (2 * q + 1) * s
            w = self.vertical_phase(l)
            if w is None:
                continue
            coef = amplitude * rng.standard_normal()
            term = coef * np.exp(2j * np.pi * l * t[:, None] / s) * w[None, :]
            z += 2.0 * term.real
        pos = np.stack([h.real, h.imag, z], axis=-1)
        return LoopPath(pos, float(s))


def fourier_constraints(spec: GroupSpec) -> FourierConstraints:
    return FourierConstraints(spec)


def is_simple_choreography(spec: GroupSpec) -> bool:
    """True iff all bodies share one curve with equal time shifts.

    Criterion: s - k eta r = 0 (mod N); equivalently some group element
    with trivial isometry part advances the body index by a generator
    of Z/NZ.
    """
    return (spec.s - spec.k * spec.eta * spec.r) % spec.n_bodies == 0


def dense_choreography_params(n: int, k: int, eta: int, max_denominator: int,
                              ratio_bound: float | None = None) -> list[tuple[int, int]]:
    """Coprime (r, s) with s <= max_denominator making (N,k,eta) choreographic.

    Returns pairs with |r/s| <= ratio_bound (default N), sorted by r/s;
    their density in the window grows with max_denominator.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    if ratio_bound is None:
        ratio_bound = float(n)
    found = []
    for s in range(1, max_denominator + 1):
        r_max = int(np.floor(ratio_bound * s))
        for r in range(-r_max, r_max + 1):
            if gcd(r, s) != 1:
                continue
            if (s - k * eta * r) % n == 0:
                found.append((r, s))
    return sorted(found, key=lambda rs: Fraction(rs[0], rs[1]))


def find_isomorphism(spec: GroupSpec, spec2: GroupSpec) -> np.ndarray | None:
    """Body relabelling transporting spec2-invariant loops to spec-invariant.

    For s = s' = 1 the actions coincide up to S(j) = (1 - 2 p k eta) j
    mod N iff r - r' = 2p and -k eta + k' eta' - 2 p k eta k' eta' = 0
    (mod N).  Returns the permutation as an index array, or None.
    """
    if spec.s != 1 or spec2.s != 1:
        raise UnsupportedCase("relabelling criterion requires s = s' = 1")
    if spec.n_bodies != spec2.n_bodies:
        raise ValueError("specs act on different body counts")
    n = spec.n_bodies
    if (spec.r - spec2.r) % 2:
        return None
    p = (spec.r - spec2.r) // 2
    ke, ke2 = spec.k * spec.eta, spec2.k * spec2.eta
    if (-ke + ke2 - 2 * p * ke * ke2) % n:
        return None
    return (1 - 2 * p * ke) * np.arange(n) % n
