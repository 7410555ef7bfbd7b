import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavetorus import (
    NotInEperp,
    Q_AREA,
    SpectralField,
    SubspaceTag,
    block_index,
    dyadic_blocks,
    holder_estimate,
    lattice,
    norm_E,
    norm_Es,
    norm_Lp,
    norm_lq,
    quadrant_split,
    random_field,
    sobolev_norm,
)

seeds = st.integers(0, 2**31 - 1)


# -- energy norms -------------------------------------------------------------


def test_norm_E_hand_values():
    u = SpectralField.from_modes(8, {(1, 3): 0.5})  # cos(2x + 3t)
    assert norm_E(u) ** 2 == pytest.approx(5.0 * np.pi**2 / 4.0, rel=1e-13)
    const = SpectralField.from_modes(2, {(0, 0): 1.0})
    assert norm_E(const) == pytest.approx(1.0)
    res = SpectralField.from_modes(8, {(1, 2): 0.5})  # resonant cos(2x + 2t)
    assert norm_E(res) ** 2 == pytest.approx(2.0, rel=1e-13)


def test_norm_Es_hand_values():
    u = SpectralField.from_modes(8, {(1, 3): 0.5})
    assert norm_Es(u, 1.0) == pytest.approx(np.sqrt(5.0 * 0.5), rel=1e-13)
    m01 = SpectralField.from_modes(2, {(0, 1): 0.5})
    for s in (0.2, 0.7, 1.0):
        assert norm_Es(m01, s) == pytest.approx(m01.l2(), rel=1e-13)


def test_norm_Es_rejects_kernel_mass():
    v = SpectralField.from_modes(4, {(1, 2): 1.0})
    with pytest.raises(NotInEperp):
        norm_Es(v, 0.5)


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_norm_Es_monotone_in_s(seed, s1, s2):
    # integer off-resonant modes have |4j^2 - k^2| >= 1, so weights in s
    # are monotone for every admissible field
    s1, s2 = min(s1, s2), max(s1, s2)
    u = random_field(seed, 12, SubspaceTag.EPERP, 0.1)
    assert norm_Es(u, s1) <= norm_Es(u, s2) * (1 + 1e-12)


def test_sobolev_hand_value_and_s0():
    u = SpectralField.from_modes(2, {(0, 1): 0.5})  # cos t
    assert sobolev_norm(u, 1.0, "aniso") == pytest.approx(np.sqrt(0.5), rel=1e-13)
    w = random_field(5, 10, SubspaceTag.ALL, 0.2)
    for conv in ("aniso", "ell1"):
        assert sobolev_norm(w, 0.0, conv) == pytest.approx(w.l2(), rel=1e-13)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_sobolev_convention_equivalence(seed):
    # per-mode: 4j^2 + k^2 <= (2|j| + |k|)^2 <= 2 (4j^2 + k^2)
    lat = lattice(16)
    aniso = (4 * lat.J**2 + lat.K**2)[lat.mask & (lat.weight > 0)]
    ell1 = (lat.weight**2)[lat.mask & (lat.weight > 0)]
    assert np.all(aniso <= ell1) and np.all(ell1 <= 2 * aniso)
    u = random_field(seed, 16, SubspaceTag.ALL, 0.1)
    ratio = sobolev_norm(u, 1.0, "aniso") / sobolev_norm(u, 1.0, "ell1")
    assert 0.5 <= ratio <= 2.0


# -- integral and sequence norms ----------------------------------------------


def test_norm_Lp_constant():
    c = SpectralField.from_modes(2, {(0, 0): -2.0})
    for p in (1.0, 2.0, 3.5):
        assert norm_Lp(c, p) == pytest.approx(2.0 * Q_AREA ** (1.0 / p), rel=1e-12)


def test_norm_Lp_cosine_symbolic_oracle():
    # int_Q cos^2 t = pi * pi  (symbolic:  int_0^pi dx * int_0^2pi cos^2 t dt)
    u = SpectralField.from_modes(2, {(0, 1): 0.5})
    assert norm_Lp(u, 2.0) == pytest.approx(np.pi, rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_norm_Lp_parseval_at_p2(seed):
    u = random_field(seed, 12, SubspaceTag.ALL, 0.3)
    assert norm_Lp(u, 2.0) == pytest.approx(np.sqrt(Q_AREA) * u.l2(), rel=1e-10)


def test_norm_lq_examples():
    one = SpectralField.from_modes(4, {(1, 1): 1.0}, hermitian=False)
    for q in (1.0, 2.0, 7.0):
        assert norm_lq(one, q) == pytest.approx(1.0)
    two = SpectralField.from_modes(4, {(1, 1): 1.0, (0, 1): 1.0}, hermitian=False)
    assert norm_lq(two, 1.0) == pytest.approx(2.0)
    assert norm_lq(two, 2.0) == pytest.approx(np.sqrt(2.0))


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(1.0, 4.0), st.floats(1.0, 4.0))
def test_norm_lq_monotone(seed, q1, q2):
    q1, q2 = min(q1, q2), max(q1, q2)
    u = random_field(seed, 10, SubspaceTag.ALL, 0.3)
    assert norm_lq(u, q2) <= norm_lq(u, q1) * (1 + 1e-12)


# -- dyadic blocks and the Holder proxy ----------------------------------------


def test_block_index_membership():
    assert block_index(0) == 0 and block_index(2) == 0
    assert block_index(3) == 1 and block_index(4) == 1
    assert block_index(5) == 2 and block_index(8) == 2 and block_index(9) == 3


def test_dyadic_blocks_examples():
    u = SpectralField.from_modes(4, {(1, 0): 0.5})  # cos 2x, weight 2
    dec = dyadic_blocks(u)
    assert (dec.field(0) - u).l2() == 0.0
    v = SpectralField.from_modes(4, {(0, 3): 0.5})  # cos 3t, weight 3
    dec = dyadic_blocks(v)
    assert (dec.field(1) - v).l2() == 0.0
    assert dec.field(0).l2() == 0.0


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_dyadic_partition_exact(seed):
    u = random_field(seed, 20, SubspaceTag.ALL, 0.0)
    dec = dyadic_blocks(u)
    assert (dec.total() - u).l2() == 0.0
    supports = [np.abs(f.coeffs) > 0 for _, f in dec.blocks]
    overlap = sum(s.astype(int) for s in supports)
    assert np.max(overlap) <= 1


def test_holder_estimate_single_blocks():
    v = SpectralField.from_modes(4, {(0, 3): 0.5})  # block 1
    assert holder_estimate(v, 0.5) == pytest.approx(np.sqrt(2.0), rel=1e-12)
    w = SpectralField.from_modes(4, {(1, 0): 0.5})  # block 0
    for gamma in (0.1, 0.5, 0.9):
        assert holder_estimate(w, gamma) == pytest.approx(1.0, rel=1e-12)


def test_holder_estimate_lacunary():
    gamma = 0.5
    modes = {}
    for m in range(1, 6):
        k = 3 * 2 ** (m - 1)
        modes[(0, k)] = 2.0 ** (-gamma * m) / 2.0
    u = SpectralField.from_modes(48, modes)
    assert holder_estimate(u, gamma) == pytest.approx(1.0, rel=0.01)


def test_holder_homogeneity_exact_for_pow2_scalars():
    u = random_field(31, 16, SubspaceTag.ALL, 0.2)
    for gamma in (0.3, 0.7):
        base = holder_estimate(u, gamma)
        for c in (2.0, 0.5, -4.0):
            assert holder_estimate(c * u, gamma) == abs(c) * base


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_holder_monotone_in_gamma(seed, g1, g2):
    g1, g2 = min(g1, g2), max(g1, g2)
    u = random_field(seed, 12, SubspaceTag.ALL, 0.1)
    assert holder_estimate(u, g1) <= holder_estimate(u, g2) + 1e-15


# -- quadrants -----------------------------------------------------------------


def test_quadrant_split_complex_probe():
    u = SpectralField.from_modes(4, {(1, 1): 1.0}, hermitian=False)  # e^{i(2x+t)}
    pp, pm, mp, mm = quadrant_split(u)
    assert (pp - u).l2() == 0.0
    assert pm.l2() == 0.0 and mp.l2() == 0.0 and mm.l2() == 0.0


def test_quadrant_split_real_cosine():
    u = SpectralField.from_modes(4, {(1, 1): 0.5})  # cos(2x + t)
    pp, pm, mp, mm = quadrant_split(u)
    assert pp.get(1, 1) == pytest.approx(0.5)
    assert mm.get(-1, -1) == pytest.approx(0.5)
    assert pm.l2() == 0.0 and mp.l2() == 0.0


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_quadrant_parseval_exact(seed):
    u = random_field(seed, 14, SubspaceTag.ALL, 0.0)
    quads = quadrant_split(u)
    assert (quads[0] + quads[1] + quads[2] + quads[3] - u).l2() == 0.0
    assert sum(q.l2() ** 2 for q in quads) == pytest.approx(u.l2() ** 2, rel=1e-14)
