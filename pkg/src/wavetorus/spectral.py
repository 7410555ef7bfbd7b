"""Fields as truncated Fourier lattices on the space-time torus.

A real field on Q = [0, pi) x [0, 2pi) is stored through complex
coefficients u_hat(j, k) against the modes e^{i(2jx + kt)}, truncated to
the diamond 2|j| + |k| <= M.  Realness is the Hermitian symmetry
u_hat(-j, -k) = conj(u_hat(j, k)).  The wave symbol 4j^2 - k^2 vanishes on
the two resonant lines k = +-2j; those modes form the kernel N, and the
rest splits into Eplus (|k| > 2|j|) and Eminus (|k| < 2|j|).

Normalization: u(x, t) = sum u_hat(j, k) e^{i(2jx + kt)} with
u_hat(j, k) = (1/|Q|) int_Q u e^{-i(2jx + kt)}, |Q| = 2 pi^2, so the
coefficient l2 norm satisfies Parseval with no extra factors.

All operations are pure: fields are treated as immutable values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import GridTooCoarse, NotHermitian, NotInKernel

Q_AREA = 2.0 * np.pi**2  # |Q| = pi * 2pi

DOMAIN_LABEL = "x:[0,pi],t:[0,2pi]"
NORMALIZATION_LABEL = "unit-modes"


class SubspaceTag(Enum):
    N = "N"
    EPLUS = "Eplus"
    EMINUS = "Eminus"
    EPERP = "Eperp"
    ALL = "All"


class ModeIndex(NamedTuple):
    j: int
    k: int


def resonant(j: int, k: int) -> bool:
    """True on the kernel lines k = +-2j (includes (0, 0))."""
    return k == 2 * j or k == -2 * j


def wave_symbol(j: int, k: int) -> int:
    """Symbol of dtt - dxx on e^{i(2jx + kt)}: 4j^2 - k^2."""
    return 4 * j * j - k * k


def mode_weight(j: int, k: int) -> int:
    """l1 lattice weight 2|j| + |k| used for truncation and dyadic blocks."""
    return 2 * abs(j) + abs(k)


@lru_cache(maxsize=None)
def lattice(M: int):
    """Cached index arrays for the truncation diamond 2|j| + |k| <= M.

    Returns an object with 2-D integer arrays J, K of shape
    (2*(M//2) + 1, 2M + 1) indexed by [j + jmax, k + M], plus boolean masks
    and the weight/symbol arrays on that rectangle.
    """
    if M < 0:
        raise ValueError("truncation must be nonnegative")
    jmax = M // 2
    J = np.arange(-jmax, jmax + 1)[:, None]
    K = np.arange(-M, M + 1)[None, :]
    W = 2 * np.abs(J) + np.abs(K)
    S = 4 * J * J - K * K
    mask = W <= M
    res = (S == 0) & mask

    class _Lattice:
        pass

    lat = _Lattice()
    lat.M = M
    lat.jmax = jmax
    lat.shape = (2 * jmax + 1, 2 * M + 1)
    lat.J = np.broadcast_to(J, lat.shape)
    lat.K = np.broadcast_to(K, lat.shape)
    lat.weight = np.broadcast_to(W, lat.shape)
    lat.symbol = np.broadcast_to(S, lat.shape)
    lat.mask = mask
    lat.resonant = res
    lat.nonresonant = mask & ~res
    # representative half lattice: k > 0, or k = 0 and j > 0 (excludes (0,0))
    lat.half = mask & ((lat.K > 0) | ((lat.K == 0) & (lat.J > 0)))
    return lat


def _tag_mask(M: int, tag: SubspaceTag) -> np.ndarray:
    lat = lattice(M)
    tag = SubspaceTag(tag)
    if tag is SubspaceTag.ALL:
        return lat.mask
    if tag is SubspaceTag.N:
        return lat.resonant
    if tag is SubspaceTag.EPERP:
        return lat.nonresonant
    if tag is SubspaceTag.EPLUS:
        return lat.mask & (np.abs(lat.K) > 2 * np.abs(lat.J))
    if tag is SubspaceTag.EMINUS:
        return lat.mask & (np.abs(lat.K) < 2 * np.abs(lat.J))
    raise ValueError(f"unknown tag {tag!r}")


@dataclass(frozen=True)
class SpectralField:
    """Coefficients u_hat(j, k) on the diamond 2|j| + |k| <= M.

    ``coeffs`` has shape (2*(M//2) + 1, 2M + 1), indexed [j + M//2, k + M].
    Entries off the diamond are kept identically zero.  Fields are value-like;
    treat ``coeffs`` as read-only.
    """

    M: int
    coeffs: np.ndarray

    def __post_init__(self):
        lat = lattice(self.M)
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != lat.shape:
            raise ValueError(f"coeffs shape {c.shape} != lattice shape {lat.shape}")
        c = np.where(lat.mask, c, 0.0 + 0.0j)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, M: int) -> "SpectralField":
        return cls(M, np.zeros(lattice(M).shape, dtype=np.complex128))

    @classmethod
    def from_modes(cls, M: int, modes, hermitian: bool = True) -> "SpectralField":
        """Build a field from ``{(j, k): amplitude}`` entries.

        With ``hermitian=True`` each entry also sets the conjugate at
        (-j, -k), so a single entry per conjugate pair yields a real field.
        """
        lat = lattice(M)
        c = np.zeros(lat.shape, dtype=np.complex128)
        items = modes.items() if hasattr(modes, "items") else modes
        for (j, k), a in items:
            if mode_weight(j, k) > M:
                raise ValueError(f"mode ({j},{k}) outside diamond of size {M}")
            c[j + lat.jmax, k + M] += a
            if hermitian and (j, k) != (0, 0):
                c[-j + lat.jmax, -k + M] += np.conj(a)
        return cls(M, c)

    def get(self, j: int, k: int) -> complex:
        lat = lattice(self.M)
        if abs(j) > lat.jmax or abs(k) > self.M:
            return 0.0 + 0.0j
        return complex(self.coeffs[j + lat.jmax, k + self.M])

    def l2(self) -> float:
        """Coefficient l2 norm (sqrt of sum of |u_hat|^2)."""
        return float(np.linalg.norm(self.coeffs))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        flipped = np.conj(self.coeffs[::-1, ::-1])
        scale = max(np.max(np.abs(self.coeffs)), 1e-300)
        return bool(np.max(np.abs(self.coeffs - flipped)) <= tol * scale)

    # -- value-style arithmetic (fields unified to the larger diamond) ------

    def __add__(self, other):
        a, b = _unify(self, other)
        return SpectralField(a.M, a.coeffs + b.coeffs)

    def __sub__(self, other):
        a, b = _unify(self, other)
        return SpectralField(a.M, a.coeffs - b.coeffs)

    def __neg__(self):
        return SpectralField(self.M, -self.coeffs)

    def __mul__(self, c):
        return SpectralField(self.M, self.coeffs * complex(c))

    __rmul__ = __mul__


def _unify(a: SpectralField, b: SpectralField):
    if a.M == b.M:
        return a, b
    M = max(a.M, b.M)
    return embed(a, M), embed(b, M)


def coeff_norm(u: SpectralField) -> float:
    return u.l2()


def coeff_inner(u: SpectralField, v: SpectralField) -> complex:
    """Coefficient inner product sum u_hat conj(v_hat) (complex in general)."""
    a, b = _unify(u, v)
    return complex(np.vdot(b.coeffs, a.coeffs))  # vdot conjugates first arg


@dataclass(frozen=True)
class GridField:
    """Real samples on the uniform grid x_a = a pi/nx, t_b = 2 pi b/nt."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("grid values must be 2-D (nx, nt)")
        object.__setattr__(self, "values", v)

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def nt(self) -> int:
        return self.values.shape[1]

    def x(self) -> np.ndarray:
        return np.pi * np.arange(self.nx) / self.nx

    def t(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.nt) / self.nt


def min_grid(M: int) -> int:
    """Smallest admissible grid side for truncation M (Nyquist with margin)."""
    return 2 * M + 2


def default_grid(M: int, oversample: int = 4) -> int:
    """Grid side at the given oversampling factor over Nyquist."""
    return oversample * min_grid(M)


def analyze(g: GridField, M: int) -> SpectralField:
    """Coefficients of the trigonometric interpolant, restricted to the diamond.

    Exact (to roundoff) whenever ``g`` samples a trigonometric polynomial of
    bandwidth <= M in the lattice weight.
    """
    nx, nt = g.values.shape
    if nx < min_grid(M) or nt < min_grid(M):
        raise GridTooCoarse(f"grid {nx}x{nt} < {min_grid(M)} for M={M}")
    lat = lattice(M)
    F = np.fft.fft2(g.values) / (nx * nt)
    c = F[lat.J % nx, lat.K % nt]
    return SpectralField(M, np.where(lat.mask, c, 0.0))


def synthesize_values(u: SpectralField, nx: int, nt: int) -> np.ndarray:
    """Complex grid samples of the (possibly non-Hermitian) field."""
    if nx < min_grid(u.M) or nt < min_grid(u.M):
        raise GridTooCoarse(f"grid {nx}x{nt} < {min_grid(u.M)} for M={u.M}")
    lat = lattice(u.M)
    A = np.zeros((nx, nt), dtype=np.complex128)
    rows = (lat.J % nx)[lat.mask]
    cols = (lat.K % nt)[lat.mask]
    A[rows, cols] = u.coeffs[lat.mask]
    return np.fft.ifft2(A) * (nx * nt)


def synthesize(u: SpectralField, nx: int | None = None, nt: int | None = None) -> GridField:
    """Real grid samples; raises NotHermitian if the field is not real-valued."""
    if nx is None:
        nx = min_grid(u.M)
    if nt is None:
        nt = min_grid(u.M)
    vals = synthesize_values(u, nx, nt)
    scale = u.l2()
    if np.max(np.abs(vals.imag)) > 1e-12 * max(scale, 1e-300):
        raise NotHermitian("imaginary residue exceeds 1e-12 of coefficient norm")
    return GridField(vals.real)


def grid_max_abs(u: SpectralField, oversample: int = 4) -> float:
    """Grid maximum of |u| at the given oversampling (lower bound on the sup)."""
    n = default_grid(u.M, oversample)
    return float(np.max(np.abs(synthesize_values(u, n, n))))


def project(u: SpectralField, tag: SubspaceTag) -> SpectralField:
    """Zero all coefficients outside the tagged mode set."""
    return SpectralField(u.M, np.where(_tag_mask(u.M, tag), u.coeffs, 0.0))


def truncate(u: SpectralField, M_new: int) -> SpectralField:
    """Keep modes with 2|j| + |k| <= M_new.  Identity when M_new >= M."""
    if M_new >= u.M:
        return u
    lat_old = lattice(u.M)
    lat_new = lattice(M_new)
    jm_o, jm_n = lat_old.jmax, lat_new.jmax
    window = u.coeffs[jm_o - jm_n:jm_o + jm_n + 1, u.M - M_new:u.M + M_new + 1]
    return SpectralField(M_new, window)


def embed(u: SpectralField, M_new: int) -> SpectralField:
    """Re-index into a larger diamond (coefficients unchanged)."""
    if M_new < u.M:
        raise ValueError("embed target must be >= current truncation")
    if M_new == u.M:
        return u
    lat_old = lattice(u.M)
    lat_new = lattice(M_new)
    c = np.zeros(lat_new.shape, dtype=np.complex128)
    jm_o, jm_n = lat_old.jmax, lat_new.jmax
    c[jm_n - jm_o:jm_n + jm_o + 1, M_new - u.M:M_new + u.M + 1] = u.coeffs
    return SpectralField(M_new, c)


def time_translate(u: SpectralField, theta: float) -> SpectralField:
    """u(x, t) -> u(x, t + theta): multiply u_hat(j, k) by e^{i k theta}."""
    lat = lattice(u.M)
    return SpectralField(u.M, u.coeffs * np.exp(1j * theta * lat.K))


@dataclass(frozen=True)
class PeriodicProfile:
    """pi-periodic function of one variable, p(y) = sum_j c_j e^{2ijy}.

    ``coeffs`` is centered: index j + jmax holds c_j.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("profile coefficients must be 1-D with odd length")
        object.__setattr__(self, "coeffs", c)

    @property
    def jmax(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        js = np.arange(-self.jmax, self.jmax + 1)
        vals = np.exp(2j * y[..., None] * js) @ self.coeffs
        return vals.real if self.is_real() else vals

    def is_real(self, tol: float = 1e-12) -> bool:
        flipped = np.conj(self.coeffs[::-1])
        scale = max(np.max(np.abs(self.coeffs)), 1e-300)
        return bool(np.max(np.abs(self.coeffs - flipped)) <= tol * scale)


def kernel_decompose(v: SpectralField, tol: float = 1e-12):
    """Split a kernel field into travelling profiles: v = p1(x+t) + p2(x-t).

    Modes (j, 2j) feed p1, modes (j, -2j) feed p2; the constant mode is
    split equally between the two profiles.
    """
    lat = lattice(v.M)
    off = np.where(lat.nonresonant, v.coeffs, 0.0)
    off_mass = float(np.linalg.norm(off))
    total = max(v.l2(), 1e-300)
    if off_mass > tol * total:
        raise NotInKernel(f"relative off-kernel mass {off_mass / total:.3e} > {tol:g}")
    jmax = lat.jmax
    c1 = np.zeros(2 * jmax + 1, dtype=np.complex128)
    c2 = np.zeros(2 * jmax + 1, dtype=np.complex128)
    for j in range(-jmax, jmax + 1):
        if j == 0:
            c1[jmax] = c2[jmax] = v.get(0, 0) / 2.0
        else:
            c1[j + jmax] = v.get(j, 2 * j)
            c2[j + jmax] = v.get(j, -2 * j)
    return PeriodicProfile(c1), PeriodicProfile(c2)


def kernel_field(p1: PeriodicProfile, p2: PeriodicProfile, M: int) -> SpectralField:
    """Inverse of kernel_decompose: the field p1(x+t) + p2(x-t) on the diamond."""
    modes = {}
    for j in range(-p1.jmax, p1.jmax + 1):
        c = p1.coeffs[j + p1.jmax]
        if c != 0 and mode_weight(j, 2 * j) <= M:
            modes[(j, 2 * j)] = modes.get((j, 2 * j), 0.0) + c
    for j in range(-p2.jmax, p2.jmax + 1):
        c = p2.coeffs[j + p2.jmax]
        if c != 0 and mode_weight(j, -2 * j) <= M:
            modes[(j, -2 * j)] = modes.get((j, -2 * j), 0.0) + c
    return SpectralField.from_modes(M, modes, hermitian=False)


def random_field(seed, M: int, tag: SubspaceTag = SubspaceTag.ALL,
                 decay: float = 0.0) -> SpectralField:
    """Deterministic random real field supported on ``tag``.

    Magnitudes follow |u_hat(j, k)| = e^{-decay (2|j| + |k|)} exactly; phases
    are uniform.  ``seed`` may be an int or a tuple of ints.
    """
    if decay < 0:
        raise ValueError("decay must be >= 0")
    lat = lattice(M)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=lat.shape)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    envelope = np.exp(-decay * lat.weight)
    c = np.where(lat.half, envelope * np.exp(1j * phases), 0.0)
    c = c + np.conj(c[::-1, ::-1])
    c[lat.jmax, M] = sign * envelope[lat.jmax, M]
    c = np.where(_tag_mask(M, tag), c, 0.0)
    return SpectralField(M, c)


# -- field file format ------------------------------------------------------


def field_to_dict(u: SpectralField) -> dict:
    """Half-lattice JSON form: entries with k > 0 or (k = 0 and j >= 0)."""
    if not u.is_hermitian():
        raise NotHermitian("field file format stores real fields only")
    lat = lattice(u.M)
    keep = lat.mask & ((lat.K > 0) | ((lat.K == 0) & (lat.J >= 0)))
    entries = []
    for j, k in zip(lat.J[keep], lat.K[keep]):
        a = u.get(int(j), int(k))
        if a != 0:
            entries.append({"j": int(j), "k": int(k), "re": float(a.real), "im": float(a.imag)})
    return {
        "M": u.M,
        "domain": DOMAIN_LABEL,
        "normalization": NORMALIZATION_LABEL,
        "coeffs": entries,
    }


def field_from_dict(d: dict) -> SpectralField:
    if d.get("domain") != DOMAIN_LABEL:
        raise ValueError(f"unexpected domain {d.get('domain')!r}")
    if d.get("normalization") != NORMALIZATION_LABEL:
        raise ValueError(f"unexpected normalization {d.get('normalization')!r}")
    M = int(d["M"])
    modes = {}
    for e in d["coeffs"]:
        j, k = int(e["j"]), int(e["k"])
        if not (k > 0 or (k == 0 and j >= 0)):
            raise ValueError(f"entry ({j},{k}) is not in the stored half lattice")
        modes[(j, k)] = complex(float(e["re"]), float(e["im"]))
    return SpectralField.from_modes(M, modes, hermitian=True)


def write_field(u: SpectralField, path) -> None:
    with open(path, "w") as fh:
        json.dump(field_to_dict(u), fh, sort_keys=True)


def read_field(path) -> SpectralField:
    with open(path) as fh:
        return field_from_dict(json.load(fh))
