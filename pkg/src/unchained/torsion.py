"""Second-order expansion of the vertical Lyapunov families.

Units normalize the bifurcating vertical frequency to 2 pi, so the
n-gon rotates at w_hat = 2 pi omega_1/omega_k and has circumradius
A0 = (omega_1,unit / w_hat)^(2/3).  With epsilon the first vertical
harmonic of body 0, the family expands as

  h_j = e^{i(w_hat + gamma eps^2) t} [ (A0 + alpha eps^2) zeta^j
        + eps^2 (A2 e^{2 pi i(-2t + j[1]/N)}
        + Am2 e^{2 pi i(2t + j[-1]/N)}) ] + O(eps^4),
  z_j = eps cos 2 pi(t + k eta j/N)
        + C3 eps^3 cos 6 pi(t + k eta j/N) + O(eps^5),

with j[p] = -(2 p k eta - 1) j mod N.  Matching the equations of
motion at second order gives an affine system for the unknowns
(alpha, A2, Am2, C3, gamma): the constant and e^{+-4 pi i t} parts of
the horizontal equation at body 0 plus the e^{2 pi i t} and
e^{6 pi i t} parts of the vertical one.  Harmonics whose symmetry
phase sums to zero over the bodies are excluded from the ansatz (and
their equations vanish identically).

The torsion gamma is the leading frame-frequency shift
varpi_tilde = gamma eps^2 + O(eps^4); it depends only on (N, k, eta),
not on the resonance r/s selecting the co-rotating frame.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import DegenerateSystem
from .ngon import LoopPath
from .spectrum import vertical_spectrum
from .symmetry import GroupSpec

TWO_PI = 2.0 * np.pi

# affine coefficient layout: constant term + the five unknowns
_CONST, _ALPHA, _A2, _AM2, _C3, _GAMMA = range(6)
_NAMES = ("alpha", "A2", "Am2", "C3", "gamma")


@dataclass(frozen=True)
class AppendixGeometry:
    """Pairwise geometry of the reference n-gon used by the expansion.

    r_vec[j, l] = zeta^j - zeta^l = rho e^{i 4 pi theta}; A = A0 rho;
    B[j, l] = sin^2(pi k eta (j-l)/N) / A[j, l]; Theta[p][j, l] =
    theta[j, l] - theta[j[p], l[p]]; jp_map[p][j] = -(2 p k eta - 1) j
    mod N.  theta and Theta are set to zero on pairs whose difference
    vector vanishes (the accompanying amplitude rho vanishes there).
    """

    n_bodies: int
    A0: float
    r_vec: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    A: np.ndarray
    B: np.ndarray
    Theta: Dict[int, np.ndarray]
    jp_map: Dict[int, np.ndarray]


@dataclass(frozen=True)
class ExpansionResult:
    """Leading coefficients of the family; excluded harmonics are None."""

    spec: GroupSpec
    A0: float
    w_hat: float
    alpha: float
    A2: Optional[float]
    Am2: Optional[float]
    C3: Optional[float]
    gamma: float


def _frequencies(n: int, k: int) -> Tuple[float, float]:
    spm = vertical_spectrum(n)
    w_hat = TWO_PI * spm.omega1 / spm.omega(k)
    a0 = (spm.omega1 / w_hat) ** (2.0 / 3.0)
    return w_hat, a0


def appendix_geometry(spec: GroupSpec) -> AppendixGeometry:
    n, ke = spec.n_bodies, spec.k * spec.eta
    _, a0 = _frequencies(n, spec.k)
    j = np.arange(n)
    zeta = np.exp(2j * np.pi * j / n)
    r_vec = zeta[:, None] - zeta[None, :]
    rho = np.abs(r_vec)
    theta = np.where(rho > 0, np.angle(r_vec) / (2.0 * TWO_PI), 0.0)
    a = a0 * rho
    b = np.zeros((n, n))
    off = rho > 0
    b[off] = np.sin(np.pi * ke * (j[:, None] - j[None, :])[off] / n) ** 2
    b[off] /= a[off]
    jp_map, big_theta = {}, {}
    for p in (1, -1):
        perm = (-(2 * p * ke - 1) * j) % n
        jp_map[p] = perm
        mapped = theta[np.ix_(perm, perm)]
        rho_mapped = rho[np.ix_(perm, perm)]
        big_theta[p] = np.where(rho_mapped > 0, theta - mapped, 0.0)
    return AppendixGeometry(n_bodies=n, A0=a0, r_vec=r_vec, rho=rho,
                            theta=theta, A=a, B=b, Theta=big_theta,
                            jp_map=jp_map)


def excluded_harmonics(spec: GroupSpec) -> Dict[str, bool]:
    """Which expansion coefficients the symmetry kills (mod-N rules)."""
    n, ke = spec.n_bodies, spec.k * spec.eta
    return {
        "A2": (2 * ke - 1) % n == 0,
        "Am2": (-2 * ke - 1) % n == 0,
        "C3": (3 * ke) % n == 0,
    }


def _hadd(table, m, vec):
    if m in table:
        table[m] = table[m] + vec
    else:
        table[m] = vec.copy()


def _hconv(affine, known):
    """Product of an affine harmonic table with a known one."""
    out = {}
    for m, vec in affine.items():
        for q, c in known.items():
            _hadd(out, m + q, c * vec)
    return out


def _unit(idx, value=1.0):
    v = np.zeros(6, dtype=complex)
    v[idx] = value
    return v


@dataclass(frozen=True)
class AffineSystem:
    """Real rows of the second-order matching equations, matrix @ w = rhs."""

    spec: GroupSpec
    matrix: np.ndarray
    rhs: np.ndarray
    unknowns: Tuple[str, ...]
    row_labels: Tuple[str, ...]


def build_equations(spec: GroupSpec) -> AffineSystem:
    """Assemble the affine system in (alpha, A2, Am2, C3, gamma).

    Rows: constant and e^{+-4 pi i t} Fourier parts of the horizontal
    equation at body 0 (complex, but with real coefficients thanks to
    the l -> -l symmetry of the sums) and the e^{2 pi i t}, e^{6 pi i t}
    parts of the vertical equation.  Excluded unknowns are dropped;
    their columns are identically zero.
    """
    n, ke = spec.n_bodies, spec.k * spec.eta
    w_hat, a0 = _frequencies(n, spec.k)
    excl = excluded_harmonics(spec)
    keep_p = {1: not excl["A2"], -1: not excl["Am2"]}
    idx_p = {1: _A2, -1: _AM2}

    ls = np.arange(1, n)
    zl = np.exp(2j * np.pi * ls / n)
    r0l = 1.0 - zl
    rho = np.abs(r0l)
    a_l = a0 * rho
    b_l = np.sin(np.pi * ke * ls / n) ** 2 / a_l
    lp = {p: (-(2 * p * ke - 1) * ls) % n for p in (1, -1)}
    # z_l - z_0 = -2 eps sin(2 pi(t + ke l/(2n))) sin(pi ke l/n) + ...
    u_l = -2.0 * np.sin(np.pi * ke * ls / n)
    v_l = -2.0 * np.sin(3.0 * np.pi * ke * ls / n)
    # vertical phase of the pair (0, l): sin 2 pi (t + ke l / (2n))
    phase1 = np.exp(1j * np.pi * ke * ls / n)
    phase3 = phase1 ** 3

    # horizontal equation, frequencies in units of e^{2 pi i t}
    horiz = {}
    _hadd(horiz, 0, _unit(_GAMMA, -2.0 * a0 * w_hat)
          + _unit(_ALPHA, -w_hat ** 2))
    for p in (1, -1):
        if keep_p[p]:
            d_p = -w_hat ** 2 + 4.0 * TWO_PI * p * w_hat - 4.0 * TWO_PI ** 2
            _hadd(horiz, -2 * p, _unit(idx_p[p], d_p))

    # the per-pair second-order factor G_l(t) of |x_l - x_0|^{-3}
    g_tables = []
    for i, l in enumerate(ls):
        g = {}
        # chord inner product weights alpha by rho_l, pair by pair
        _hadd(g, 0, _unit(_ALPHA, rho[i]) + _unit(_CONST, b_l[i]))
        cosphase = np.exp(2j * np.pi * ke * l / n)
        _hadd(g, 2, _unit(_CONST, -0.5 * b_l[i] * cosphase))
        _hadd(g, -2, _unit(_CONST, -0.5 * b_l[i] * np.conj(cosphase)))
        for p in (1, -1):
            if not keep_p[p]:
                continue
            z_pl = (r0l[i] / rho[i]) * np.conj(1.0 - np.exp(
                2j * np.pi * lp[p][i] / n))
            _hadd(g, 2 * p, _unit(idx_p[p], 0.5 * z_pl))
            _hadd(g, -2 * p, _unit(idx_p[p], 0.5 * np.conj(z_pl)))
        g_tables.append(g)

        # direct attraction terms of the horizontal equation
        c3 = a_l[i] ** -3
        _hadd(horiz, 0, _unit(_ALPHA, -c3 * (zl[i] - 1.0)))
        for p in (1, -1):
            if keep_p[p]:
                _hadd(horiz, -2 * p, _unit(
                    idx_p[p],
                    -c3 * (np.exp(2j * np.pi * lp[p][i] / n) - 1.0)))
        # second-order expansion of |x|^{-3} against the leading chord
        factor = 3.0 * a0 * a_l[i] ** -4 * (zl[i] - 1.0)
        for m, vec in g.items():
            _hadd(horiz, m, factor * vec)

    # vertical equation: e^{2 pi i t} and e^{6 pi i t} parts
    vert = {}
    _hadd(vert, 3, _unit(_C3, -0.5 * (3.0 * TWO_PI) ** 2))
    _hadd(vert, -3, _unit(_C3, -0.5 * (3.0 * TWO_PI) ** 2))
    for i, l in enumerate(ls):
        sin1 = {1: phase1[i] / 2j, -1: -np.conj(phase1[i]) / 2j}
        sin3 = {3: phase3[i] / 2j, -3: -np.conj(phase3[i]) / 2j}
        c3 = a_l[i] ** -3
        if not excl["C3"]:
            for m, c in sin3.items():
                _hadd(vert, m, _unit(_C3, -c3 * v_l[i] * c))
        shaped = _hconv(g_tables[i], sin1)
        for m, vec in shaped.items():
            _hadd(vert, m, 3.0 * a_l[i] ** -4 * u_l[i] * vec)

    unknown_idx = [_ALPHA]
    names = ["alpha"]
    for name, idx in (("A2", _A2), ("Am2", _AM2), ("C3", _C3)):
        if not excl[name]:
            unknown_idx.append(idx)
            names.append(name)
    unknown_idx.append(_GAMMA)
    names.append("gamma")

    rows, rhs, labels = [], [], []
    for m, tag in ((0, "U"), (2, "V"), (-2, "W")):
        vec = horiz.get(m, np.zeros(6, dtype=complex))
        for part, pname in ((np.real, "re"), (np.imag, "im")):
            rows.append(part(vec[unknown_idx]))
            rhs.append(-part(vec[_CONST]))
            labels.append(f"{tag}.{pname}")
    for m, tag in ((1, "X"), (3, "Y")):
        vec = vert.get(m, np.zeros(6, dtype=complex))
        for part, pname in ((np.real, "re"), (np.imag, "im")):
            rows.append(part(vec[unknown_idx]))
            rhs.append(-part(vec[_CONST]))
            labels.append(f"{tag}.{pname}")
    return AffineSystem(spec=spec, matrix=np.array(rows),
                        rhs=np.array(rhs), unknowns=tuple(names),
                        row_labels=tuple(labels))


def torsion_gamma(spec: GroupSpec) -> ExpansionResult:
    """Solve the matching system; gamma is the torsion of the family."""
    system = build_equations(spec)
    m, b = system.matrix, system.rhs
    scale = max(np.abs(m).max(), np.abs(b).max(), 1.0)
    if np.linalg.matrix_rank(m, tol=1e-9 * scale) < len(system.unknowns):
        raise DegenerateSystem(
            f"torsion system is singular for {spec}")
    w, *_ = np.linalg.lstsq(m, b, rcond=None)
    residual = np.abs(m @ w - b).max()
    if residual > 1e-8 * scale:
        raise DegenerateSystem(
            f"torsion system inconsistent for {spec} (residual {residual})")
    values = dict(zip(system.unknowns, w))
    w_hat, a0 = _frequencies(spec.n_bodies, spec.k)
    return ExpansionResult(
        spec=spec, A0=a0, w_hat=w_hat,
        alpha=float(values["alpha"]),
        A2=float(values["A2"]) if "A2" in values else None,
        Am2=float(values["Am2"]) if "Am2" in values else None,
        C3=float(values["C3"]) if "C3" in values else None,
        gamma=float(values["gamma"]),
    )


def reconstruct_loop(result: ExpansionResult, epsilon: float,
                     n_samples: int = 256) -> Tuple[LoopPath, float]:
    """Loop of the O(eps^3) expansion in its co-rotating frame.

    Returns (loop, varpi): the frame rotates at varpi = w_hat
    + gamma eps^2 - 2 pi r/s, making the truncated solution s-periodic
    with Newton residual O(eps^4).
    """
    spec = result.spec
    n, ke = spec.n_bodies, spec.k * spec.eta
    jj = np.arange(n)
    zeta_j = np.exp(2j * np.pi * jj / n)
    jp1 = (-(2 * ke - 1) * jj) % n
    jm1 = ((2 * ke + 1) * jj) % n
    a2 = result.A2 or 0.0
    am2 = result.Am2 or 0.0
    c3 = result.C3 or 0.0
    period = float(spec.s)
    m = n_samples
    t = np.arange(m) * (period / m)
    carrier = np.exp(2j * np.pi * (spec.r / spec.s) * t)[:, None]
    h = carrier * (
        (result.A0 + result.alpha * epsilon ** 2) * zeta_j[None, :]
        + epsilon ** 2 * (
            a2 * np.exp(2j * np.pi * (-2.0 * t[:, None] + jp1[None, :] / n))
            + am2 * np.exp(2j * np.pi * (2.0 * t[:, None] + jm1[None, :] / n))))
    z = (epsilon * np.cos(TWO_PI * (t[:, None] + ke * jj[None, :] / n))
         + c3 * epsilon ** 3 * np.cos(
             3.0 * TWO_PI * (t[:, None] + ke * jj[None, :] / n)))
    pos = np.stack([h.real, h.imag, z], axis=2)
    varpi = result.w_hat + result.gamma * epsilon ** 2 \
        - TWO_PI * spec.r / spec.s
    return LoopPath(pos, period), varpi


def verify_against_continuation(spec: GroupSpec, gamma: float,
                                n_steps: int = 12) -> float:
    """Relative gap between gamma and the finite-difference slope of the
    frame frequency against eps^2 along the numerically continued family."""
    from .continuation import continue_family

    family = continue_family(spec, n_steps=n_steps)
    eps = np.array([rec.amplitude for rec in family.records])
    varpi = np.array([rec.varpi for rec in family.records])
    varpi0 = family.varpi_onset
    ok = eps > 0
    slopes = (varpi[ok] - varpi0) / eps[ok] ** 2
    gamma_fd = slopes[np.argsort(eps[ok])[:3]].mean()
    if gamma == 0.0:
        return abs(gamma_fd)
    return abs(gamma_fd - gamma) / abs(gamma)
