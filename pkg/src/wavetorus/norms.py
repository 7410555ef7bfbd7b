"""Norms and dyadic machinery on lattice fields.

Covers the energy norm E, its fractional scale E^s, two Sobolev weight
conventions, grid L^p norms, coefficient l^q norms, dyadic annuli in the
lattice weight 2|j| + |k|, the block (Holder-Zygmund) estimator for the
C^gamma norm, and sign-quadrant splits.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInEperp
from .spectral import (
    Q_AREA,
    SpectralField,
    default_grid,
    lattice,
    synthesize_values,
    truncate,
)


def norm_E(u: SpectralField) -> float:
    """Energy norm: (|Q|/4)|k^2 - 4j^2| off resonance, 4j^2 on it, 1 at (0,0)."""
    lat = lattice(u.M)
    a2 = np.abs(u.coeffs) ** 2
    off = np.sum(np.abs(lat.symbol)[lat.nonresonant] * a2[lat.nonresonant]) * (Q_AREA / 4.0)
    res = np.sum((4 * lat.J * lat.J)[lat.resonant] * a2[lat.resonant])
    const = a2[lat.jmax, u.M]
    return float(np.sqrt(off + res + const))


def _resonant_fraction(u: SpectralField) -> float:
    lat = lattice(u.M)
    res = float(np.linalg.norm(u.coeffs[lat.resonant]))
    return res / max(u.l2(), 1e-300)


def norm_Es(u: SpectralField, s: float) -> float:
    """Fractional energy norm (sum |u_hat|^2 |k^2 - 4j^2|^s)^(1/2), 0 < s <= 1.

    Defined off the kernel only; raises NotInEperp when the field carries
    more than 1e-12 relative mass on the resonant lines.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError("s must lie in (0, 1]")
    if _resonant_fraction(u) > 1e-12:
        raise NotInEperp("field has resonant mass; E^s is defined off the kernel")
    lat = lattice(u.M)
    a2 = np.abs(u.coeffs[lat.nonresonant]) ** 2
    w = np.abs(lat.symbol[lat.nonresonant]).astype(np.float64) ** s
    return float(np.sqrt(np.sum(w * a2)))


def sobolev_norm(u: SpectralField, s: float, convention: str = "aniso") -> float:
    """Weighted coefficient norm (sum w^s |u_hat|^2)^(1/2).

    convention "aniso":  w = 4j^2 + k^2;   convention "ell1": w = (2|j| + |k|)^2.
    The (0, 0) mode gets weight 1 in both conventions.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    lat = lattice(u.M)
    if convention == "aniso":
        w = (4 * lat.J * lat.J + lat.K * lat.K).astype(np.float64)
    elif convention == "ell1":
        w = (lat.weight.astype(np.float64)) ** 2
    else:
        raise ValueError(f"unknown convention {convention!r}")
    w = w.copy()
    w[lat.jmax, u.M] = 1.0
    a2 = np.abs(u.coeffs) ** 2
    return float(np.sqrt(np.sum((w[lat.mask] ** s) * a2[lat.mask])))


def norm_Lp(u: SpectralField, p: float, oversample: int = 4) -> float:
    """(int_Q |u|^p)^(1/p) by trapezoid quadrature on an oversampled grid."""
    if p < 1:
        raise ValueError("p must be >= 1")
    n = default_grid(u.M, oversample)
    vals = np.abs(synthesize_values(u, n, n))
    cell = (np.pi / n) * (2.0 * np.pi / n)
    return float((np.sum(vals**p) * cell) ** (1.0 / p))


def norm_lq(u: SpectralField, q: float) -> float:
    """Coefficient norm (sum |u_hat|^q)^(1/q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    a = np.abs(u.coeffs[lattice(u.M).mask])
    return float(np.sum(a**q) ** (1.0 / q))


def block_index(w: int) -> int:
    """Dyadic block of lattice weight w: block 0 holds w <= 2, block m holds
    2*2^(m-1) < w <= 2*2^m."""
    if w <= 2:
        return 0
    return int(w - 1).bit_length() - 1


@dataclass(frozen=True)
class DyadicDecomposition:
    """Disjoint dyadic annuli that sum back to the original field."""

    blocks: tuple  # ((m, SpectralField), ...)

    def field(self, m: int) -> SpectralField:
        for i, f in self.blocks:
            if i == m:
                return f
        raise KeyError(m)

    def total(self) -> SpectralField:
        acc = self.blocks[0][1]
        for _, f in self.blocks[1:]:
            acc = acc + f
        return acc


def dyadic_blocks(u: SpectralField) -> DyadicDecomposition:
    lat = lattice(u.M)
    m_top = block_index(max(u.M, 1))
    out = []
    for m in range(m_top + 1):
        hi = 2 * 2**m
        lo = -1 if m == 0 else 2 * 2 ** (m - 1)  # block 0 keeps weight 0 too
        sel = lat.mask & (lat.weight > lo) & (lat.weight <= hi)
        out.append((m, SpectralField(u.M, np.where(sel, u.coeffs, 0.0))))
    return DyadicDecomposition(tuple(out))


def holder_estimate(u: SpectralField, gamma: float, oversample: int = 4) -> float:
    """Block proxy for the C^gamma norm: max_m 2^(gamma m) * sup |Delta_m u|.

    Block suprema are grid maxima at the given oversampling, so the result
    is a lower bound on the true sup with spectral-accuracy gap.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    best = 0.0
    for m, f in dyadic_blocks(u).blocks:
        if not np.any(f.coeffs):
            continue
        Mb = min(2 * 2**m, u.M)
        n = default_grid(Mb, oversample)
        sup = float(np.max(np.abs(synthesize_values(truncate(f, Mb), n, n))))
        best = max(best, 2.0 ** (gamma * m) * sup)
    return best


def quadrant_split(u: SpectralField):
    """Sign-quadrant split (u++, u+-, u-+, u--) by (sign j, sign k).

    Quadrants partition the lattice: j >= 0 vs j < 0 and k >= 0 vs k < 0.
    The pieces are genuinely complex (Hermitian symmetry intentionally broken)
    but their disjoint supports make coefficient-space identities exact.
    """
    lat = lattice(u.M)
    jp, kp = lat.J >= 0, lat.K >= 0
    quads = []
    for sel in (jp & kp, jp & ~kp, ~jp & kp, ~jp & ~kp):
        quads.append(SpectralField(u.M, np.where(sel, u.coeffs, 0.0)))
    return tuple(quads)


@dataclass(frozen=True)
class NormReport:
    name: str
    value: float
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("norm value must be >= 0")

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "params": dict(self.parameters)}


def write_norm_reports_json(reports, path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in reports], fh, sort_keys=True, indent=1)


def write_norm_reports_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value", "params"])
        for r in reports:
            w.writerow([r.name, repr(r.value), json.dumps(r.parameters, sort_keys=True)])
