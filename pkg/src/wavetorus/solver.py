"""Penalized Galerkin systems on the truncated lattice.

Unknown u = w + v splits into the off-kernel part w and the kernel part v.
The residual of the penalized system is, in coefficient space,

    off kernel:  (4j^2 - k^2) w_hat - sigma f_hat(x, u) - forcing_hat
    on kernel:   beta (-k^2 - 1) v_hat - sigma f_hat(x, u) - forcing_hat

i.e. box w = sigma P_perp f and beta (v_tt - v) = sigma P_N f, plus an
optional bandlimited forcing used by the manufactured-solution harness.
f(x, u) is evaluated pseudospectrally on a padded grid (dealiasing factor
at least s + 1 over the truncation) and truncated back to the lattice.

The functional whose gradient under the area-weighted pairing
<A, phi> = |Q| sum A_hat conj(phi_hat) equals this residual is

    I(u) = kappa/2 (||w+||_E^2 - ||w-||_E^2)
           - beta/2 (||v||_L2^2 + ||v_t||_L2^2) - sigma int_Q F(x, u)
           - int_Q forcing u,            with kappa = -4.

kappa = -4 is forced by the E-norm scaling |Q|/4: it is the unique constant
making gradient and residual agree identically, for either sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse.linalg

from .errors import NoConvergence, SingularJacobian, StallAt
from .norms import norm_E, sobolev_norm
from .spectral import (
    Q_AREA,
    GridField,
    SpectralField,
    SubspaceTag,
    analyze,
    embed,
    grid_max_abs,
    lattice,
    project,
    synthesize,
    synthesize_values,
)

KAPPA = -4.0

DENSE_LIMIT = 4400  # real unknowns; M = 64 has 4161


@dataclass(frozen=True)
class PenalizedProblem:
    M: int
    beta: float
    nl: object
    sigma: int = 1
    forcing: SpectralField | None = None
    oversample: int = 4

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("penalty beta must be > 0")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        if self.forcing is not None and self.forcing.M != self.M:
            raise ValueError("forcing must be bandlimited to the problem truncation")


@dataclass(frozen=True)
class SolutionState:
    u: SpectralField
    residual_norm: float
    I_value: float
    newton_iters: int
    residual_history: tuple = ()
    converged: bool = True


def _grid_side(p: PenalizedProblem) -> int:
    s = float(getattr(p.nl, "s", 3.0))
    deg = 0
    for part in ("a", "b"):
        poly = getattr(p.nl, part, None)
        deg = max(deg, getattr(poly, "degree", 0))
    factor = max(int(np.ceil(s)) + 1, p.oversample)
    n = factor * (p.M + 1) + 2 * deg + 2
    return max(n, 4 * p.M + 6)  # Jacobian needs analyze(..., 2M)


def _f_hat(p: PenalizedProblem, u: SpectralField, order: int = 0) -> SpectralField:
    n = _grid_side(p)
    g = synthesize(u, n, n)
    vals = p.nl.values(g.x(), g.values, order)
    return analyze(GridField(vals), p.M if order == 0 else 2 * p.M)


def residual(p: PenalizedProblem, u: SpectralField) -> SpectralField:
    """Spectral residual of the penalized system at u (bandlimited to M)."""
    if u.M != p.M:
        raise ValueError("field truncation must match the problem")
    lat = lattice(p.M)
    fh = _f_hat(p, u, 0)
    sym = np.where(lat.nonresonant, lat.symbol,
                   p.beta * (-(lat.K.astype(np.float64) ** 2) - 1.0))
    Rc = np.where(lat.mask, sym * u.coeffs, 0.0) - p.sigma * fh.coeffs
    if p.forcing is not None:
        Rc = Rc - p.forcing.coeffs
    return SpectralField(p.M, Rc)


def pair(a: SpectralField, b: SpectralField) -> float:
    """Area-weighted pairing <a, b> = |Q| Re sum a_hat conj(b_hat) = int_Q a b."""
    if a.M != b.M:
        a, b = (embed(a, max(a.M, b.M)), embed(b, max(a.M, b.M)))
    return Q_AREA * float(np.real(np.vdot(b.coeffs, a.coeffs)))


def functional_I(p: PenalizedProblem, u: SpectralField) -> float:
    """Penalized functional whose gradient is the residual (see module docstring)."""
    if u.M != p.M:
        raise ValueError("field truncation must match the problem")
    lat = lattice(p.M)
    wp = project(u, SubspaceTag.EPLUS)
    wm = project(u, SubspaceTag.EMINUS)
    v = project(u, SubspaceTag.N)
    t1 = 0.5 * (norm_E(wp) ** 2 - norm_E(wm) ** 2)
    v2 = Q_AREA * float(np.sum(np.abs(v.coeffs) ** 2))
    vt2 = Q_AREA * float(np.sum((lat.K**2) * np.abs(v.coeffs) ** 2))
    n = _grid_side(p)
    g = synthesize(u, n, n)
    Fv = p.nl.potential_values(g.x(), g.values)
    intF = float(np.sum(Fv)) * (np.pi / n) * (2.0 * np.pi / n)
    out = KAPPA * t1 - 0.5 * p.beta * (v2 + vt2) - p.sigma * intF
    if p.forcing is not None:
        out -= pair(p.forcing, u)
    return out


# -- real parametrization of Hermitian fields --------------------------------


@lru_cache(maxsize=None)
def _packing(M: int):
    lat = lattice(M)
    rows, cols = np.nonzero(lat.mask)
    pos = -np.ones(lat.shape, dtype=np.int64)
    pos[rows, cols] = np.arange(rows.size)
    hr, hc = np.nonzero(lat.half)
    h_idx = pos[hr, hc]
    m_idx = pos[2 * lat.jmax - hr, 2 * M - hc]
    z_idx = pos[lat.jmax, M]

    class _Packing:
        pass

    pk = _Packing()
    pk.n_modes = rows.size
    pk.n_half = hr.size
    pk.n_real = 1 + 2 * hr.size
    pk.mode_rows, pk.mode_cols = rows, cols
    pk.half_rows, pk.half_cols = hr, hc
    pk.h_idx, pk.m_idx, pk.z_idx = h_idx, m_idx, z_idx
    pk.jmax = lat.jmax
    return pk


def pack(u: SpectralField) -> np.ndarray:
    pk = _packing(u.M)
    h = u.coeffs[pk.half_rows, pk.half_cols]
    return np.concatenate(([u.coeffs[pk.jmax, u.M].real], h.real, h.imag))


def unpack(vec: np.ndarray, M: int) -> SpectralField:
    pk = _packing(M)
    c = np.zeros(lattice(M).shape, dtype=np.complex128)
    c[pk.jmax, M] = vec[0]
    h = vec[1:1 + pk.n_half] + 1j * vec[1 + pk.n_half:]
    c[pk.half_rows, pk.half_cols] = h
    c[2 * pk.jmax - pk.half_rows, 2 * M - pk.half_cols] = np.conj(h)
    return SpectralField(M, c)


def _symbol_diag(p: PenalizedProblem) -> np.ndarray:
    """Diagonal (symbol/penalty) part of the Jacobian at the diamond modes."""
    lat = lattice(p.M)
    pk = _packing(p.M)
    sym = np.where(lat.nonresonant, lat.symbol.astype(np.float64),
                   p.beta * (-(lat.K.astype(np.float64) ** 2) - 1.0))
    return sym[pk.mode_rows, pk.mode_cols]


def _dense_jacobian(p: PenalizedProblem, u: SpectralField) -> np.ndarray:
    """d(residual)/du as a real matrix over the packed coordinates."""
    pk = _packing(p.M)
    gh = _f_hat(p, u, 1)  # multiplication symbol f_u(x, u), bandwidth 2M
    big = lattice(2 * p.M)
    jj = lattice(p.M).J[pk.mode_rows, pk.mode_cols]
    kk = lattice(p.M).K[pk.mode_rows, pk.mode_cols]
    dj = jj[:, None] - jj[None, :]
    dk = kk[:, None] - kk[None, :]
    A = -p.sigma * gh.coeffs[dj + big.jmax, dk + 2 * p.M]
    A[np.arange(pk.n_modes), np.arange(pk.n_modes)] += _symbol_diag(p)
    D = np.empty((pk.n_modes, pk.n_real), dtype=np.complex128)
    D[:, 0] = A[:, pk.z_idx]
    D[:, 1:1 + pk.n_half] = A[:, pk.h_idx] + A[:, pk.m_idx]
    D[:, 1 + pk.n_half:] = 1j * (A[:, pk.h_idx] - A[:, pk.m_idx])
    J = np.empty((pk.n_real, pk.n_real), dtype=np.float64)
    J[0, :] = D[pk.z_idx, :].real
    J[1:1 + pk.n_half, :] = D[pk.h_idx, :].real
    J[1 + pk.n_half:, :] = D[pk.h_idx, :].imag
    return J


def time_derivative(u: SpectralField) -> SpectralField:
    """Spectral d/dt: multiply u_hat(j, k) by ik."""
    return SpectralField(u.M, u.coeffs * (1j * lattice(u.M).K))


def _linear_solver(p: PenalizedProblem, u: SpectralField, dense_limit: int,
                   anchor: np.ndarray | None = None):
    """Return a solve(rhs_vec) closure for the Jacobian at u.

    Dense LU with factor reuse below ``dense_limit`` real unknowns, otherwise
    preconditioned lgmres with the diagonal symbol as preconditioner.

    With ``anchor`` (a packed direction), the system is bordered with the
    phase condition <anchor, delta> = 0: autonomous problems have the exact
    null vector d/dt u at any time-dependent solution, and the bordered
    solve removes it while staying an LU factorization.
    """
    pk = _packing(p.M)
    if pk.n_real <= dense_limit:
        J = _dense_jacobian(p, u)
        if anchor is not None:
            Ja = np.zeros((pk.n_real + 1, pk.n_real + 1))
            Ja[:-1, :-1] = J
            Ja[:-1, -1] = anchor
            Ja[-1, :-1] = anchor
            J = Ja
        try:
            lu = scipy.linalg.lu_factor(J)
        except scipy.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(lu[0])):
            raise SingularJacobian("non-finite factorization")

        def regularized(mu):
            # Levenberg fallback: damp only the field block, not the border
            Jm = J.copy()
            idx = np.arange(pk.n_real)
            Jm[idx, idx] += mu
            lum = scipy.linalg.lu_factor(Jm)
            return lambda rhs_n: scipy.linalg.lu_solve(
                lum, np.append(rhs_n, 0.0) if anchor is not None else rhs_n
            )[:pk.n_real]

        if anchor is None:
            return (lambda rhs: scipy.linalg.lu_solve(lu, rhs)), True, regularized

        def solve_bordered(rhs):
            out = scipy.linalg.lu_solve(lu, np.append(rhs, 0.0))
            return out[:-1]

        return solve_bordered, True, regularized

    n = _grid_side(p)
    g = synthesize(u, n, n)
    fu_vals = p.nl.values(g.x(), g.values, 1)
    lat = lattice(p.M)
    sym = np.where(lat.nonresonant, lat.symbol.astype(np.float64),
                   p.beta * (-(lat.K.astype(np.float64) ** 2) - 1.0))

    def apply_lin(vec):
        d = unpack(vec, p.M)
        dv = synthesize_values(d, n, n).real
        prod = analyze(GridField(fu_vals * dv), p.M)
        out = SpectralField(p.M, sym * d.coeffs - p.sigma * prod.coeffs)
        return pack(out)

    # exact Jacobi diagonal: every convolution row carries the mean of f_u
    fu_mean = float(np.mean(fu_vals))
    diag = _symbol_diag(p) - p.sigma * fu_mean
    dpk = np.concatenate(([diag[pk.z_idx]], diag[pk.h_idx], diag[pk.h_idx]))
    dpk = np.where(np.abs(dpk) < 1e-12, 1.0, dpk)
    if anchor is not None:
        def matvec(z):
            return np.append(apply_lin(z[:-1]) + z[-1] * anchor, anchor @ z[:-1])

        def premat(z):
            return np.append(z[:-1] / dpk, z[-1])

        dim = pk.n_real + 1
    else:
        matvec, premat, dim = apply_lin, (lambda z: z / dpk), pk.n_real
    op = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=matvec)
    pre = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=premat)

    def solve(rhs):
        b = np.append(rhs, 0.0) if anchor is not None else rhs
        try:
            sol, info = scipy.sparse.linalg.lgmres(op, b, M=pre, rtol=1e-9,
                                                   atol=0.0, inner_m=50,
                                                   maxiter=600)
        except TypeError:  # older scipy spells rtol as tol
            sol, info = scipy.sparse.linalg.lgmres(op, b, M=pre, tol=1e-9,
                                                   atol=0.0, inner_m=50,
                                                   maxiter=600)
        if info != 0:
            raise SingularJacobian(f"iterative linear solve failed (info={info})")
        return sol[:-1] if anchor is not None else sol

    return solve, False, None


def newton_solve(p: PenalizedProblem, seed_u: SpectralField, tol: float = 1e-10,
                 max_iter: int = 40, line_search: bool = True,
                 dense_limit: int = DENSE_LIMIT) -> SolutionState:
    """Damped Newton on the packed real system.

    The damping uses the affine-covariant (natural monotonicity) test
    ||J^{-1} R(u + lam d)|| <= (1 - lam/2) ||d||, reusing the factorization,
    and also accepts plain residual decrease; near a root the full step
    passes both and the iteration is quadratic.

    For unforced (time-autonomous) problems the Jacobian is exactly singular
    at every genuinely time-dependent solution, with null vector d/dt u; the
    step is then computed from the phase-anchored bordered system with the
    current iterate's time derivative as anchor.

    Raises NoConvergence (carrying the best iterate) after ``max_iter``
    accepted steps or a failed line search; SingularJacobian when the linear
    solve breaks down.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if seed_u.M != p.M:
        raise ValueError("seed truncation must match the problem")
    u = seed_u
    R = residual(p, u)
    rnorm = R.l2()
    history = [rnorm]
    iters = 0
    while rnorm > tol:
        if iters >= max_iter:
            best = SolutionState(u, rnorm, functional_I(p, u), iters,
                                 tuple(history), False)
            raise NoConvergence(f"no convergence after {max_iter} iterations", best)
        anchor = None
        if p.forcing is None:
            t_vec = pack(time_derivative(u))
            t_norm = np.linalg.norm(t_vec)
            if t_norm > 1e-9 * max(u.l2(), 1.0):
                anchor = t_vec / t_norm
        solve, cheap_resolve, regularized = _linear_solver(p, u, dense_limit, anchor)
        delta = solve(-pack(R))
        ndelta = np.linalg.norm(delta)
        step = unpack(delta, p.M)
        lam = 1.0
        accepted = False
        while lam >= 2.0**-16:
            u_try = u + lam * step
            R_try = residual(p, u_try)
            r_try = R_try.l2()
            natural = cheap_resolve and np.isfinite(r_try) and (
                np.linalg.norm(solve(pack(R_try))) <= (1.0 - 0.5 * lam) * ndelta)
            if natural or r_try <= (1.0 - 1e-4 * lam) * rnorm or not line_search:
                u, R, rnorm = u_try, R_try, r_try
                accepted = True
                break
            lam *= 0.5
        if not accepted and regularized is not None:
            # Levenberg ladder: escape merit plateaus near folds
            for mu in (1e-4, 1e-2, 1.0, 1e2, 1e4):
                try:
                    delta = regularized(mu)(-pack(R))
                except scipy.linalg.LinAlgError:
                    continue
                step = unpack(delta, p.M)
                lam = 1.0
                while lam >= 2.0**-8:
                    u_try = u + lam * step
                    R_try = residual(p, u_try)
                    r_try = R_try.l2()
                    if r_try <= (1.0 - 1e-4 * lam) * rnorm:
                        u, R, rnorm = u_try, R_try, r_try
                        accepted = True
                        break
                    lam *= 0.5
                if accepted:
                    break
        iters += 1
        history.append(rnorm)
        if not accepted:
            best = SolutionState(u, rnorm, functional_I(p, u), iters,
                                 tuple(history), False)
            raise NoConvergence("line search stalled", best)
    return SolutionState(u, rnorm, functional_I(p, u), iters, tuple(history), True)


# -- continuation in the penalty --------------------------------------------


@dataclass(frozen=True)
class BetaSchedule:
    start: float
    factor: float
    floor: float

    def __post_init__(self):
        if not (self.start > self.floor > 0.0):
            raise ValueError("schedule requires start > floor > 0")
        if not (0.0 < self.factor < 1.0):
            raise ValueError("schedule must decrease: factor must lie in (0, 1)")

    def betas(self):
        out = [self.start]
        while out[-1] * self.factor >= self.floor * (1.0 - 1e-12):
            out.append(out[-1] * self.factor)
        if out[-1] > self.floor * (1.0 + 1e-12):
            out.append(self.floor)
        return out


@dataclass(frozen=True)
class ContinuationRow:
    beta: float
    residual_norm: float
    I_value: float
    newton_iters: int
    v_c0: float
    v_t_l2: float
    v_tt_l2: float
    w_h1: float
    w_h2: float
    u: SpectralField = field(repr=False, default=None)


CSV_COLUMNS = ("beta", "residual_norm", "I_value", "newton_iters",
               "v_c0", "v_t_l2", "v_tt_l2", "w_h1", "w_h2")


@dataclass
class ContinuationTrace:
    rows: list

    def column(self, name: str):
        return [getattr(r, name) for r in self.rows]

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in self.rows:
                w.writerow([repr(getattr(r, c)) for c in CSV_COLUMNS])


def monitored_quantities(u: SpectralField, oversample: int = 4) -> dict:
    """A priori quantities of the kernel/off-kernel split of a solution."""
    lat = lattice(u.M)
    v = project(u, SubspaceTag.N)
    w = project(u, SubspaceTag.EPERP)
    k2 = (lat.K.astype(np.float64) ** 2)
    av2 = np.abs(v.coeffs) ** 2
    return {
        "v_c0": grid_max_abs(v, oversample),
        "v_t_l2": float(np.sqrt(Q_AREA * np.sum(k2 * av2))),
        "v_tt_l2": float(np.sqrt(Q_AREA * np.sum(k2**2 * av2))),
        "v_ttt_l2": float(np.sqrt(Q_AREA * np.sum(k2**3 * av2))),
        "w_h1": sobolev_norm(w, 1.0, "aniso"),
        "w_h2": sobolev_norm(w, 2.0, "aniso"),
    }


def continuation_beta(p0: PenalizedProblem, schedule: BetaSchedule,
                      seed_u: SpectralField, tol: float = 1e-10,
                      max_iter: int = 40) -> ContinuationTrace:
    """Warm-started solve along a decreasing penalty schedule.

    On failure raises StallAt wrapping the Newton error and carrying the
    partial trace accumulated so far.
    """
    trace = ContinuationTrace([])
    u = seed_u
    for beta in schedule.betas():
        p = replace(p0, beta=beta)
        try:
            sol = newton_solve(p, u, tol=tol, max_iter=max_iter)
        except (NoConvergence, SingularJacobian) as exc:
            raise StallAt(beta, exc, trace) from exc
        u = sol.u
        q = monitored_quantities(u, p0.oversample)
        trace.rows.append(ContinuationRow(
            beta=beta, residual_norm=sol.residual_norm, I_value=sol.I_value,
            newton_iters=sol.newton_iters, v_c0=q["v_c0"], v_t_l2=q["v_t_l2"],
            v_tt_l2=q["v_tt_l2"], w_h1=q["w_h1"], w_h2=q["w_h2"], u=u))
    return trace


# -- multiplicity search ------------------------------------------------------


def max_time_correlation(u1: SpectralField, u2: SpectralField,
                         n_grid: int = 4096):
    """max over theta of <u1(., . + theta), u2> / (||u1|| ||u2||), with argmax.

    The correlation is a trig polynomial in theta (coefficients from the
    k-axis transform), scanned on a dense grid and refined by 1-D search.
    """
    n1, n2 = u1.l2(), u2.l2()
    if n1 < 1e-15 and n2 < 1e-15:
        return 1.0, 0.0
    if n1 < 1e-15 or n2 < 1e-15:
        return 0.0, 0.0
    if u1.M != u2.M:
        M = max(u1.M, u2.M)
        u1, u2 = embed(u1, M), embed(u2, M)
    ck = np.sum(u1.coeffs * np.conj(u2.coeffs), axis=0)  # index k + M
    ks = np.arange(-u1.M, u1.M + 1)

    def corr(theta):
        return float(np.real(np.sum(ck * np.exp(1j * ks * theta)))) / (n1 * n2)

    thetas = 2.0 * np.pi * np.arange(n_grid) / n_grid
    vals = np.real(np.exp(1j * np.outer(thetas, ks)) @ ck) / (n1 * n2)
    i0 = int(np.argmax(vals))
    dt = 2.0 * np.pi / n_grid
    res = scipy.optimize.minimize_scalar(
        lambda th: -corr(th), bounds=(thetas[i0] - 2 * dt, thetas[i0] + 2 * dt),
        method="bounded", options={"xatol": 1e-13})
    if -res.fun >= vals[i0]:
        return float(-res.fun), float(res.x % (2.0 * np.pi))
    return float(vals[i0]), float(thetas[i0])


def _seed_fields(p: PenalizedProblem, n_seeds: int, master_seed: int):
    """Deterministic seed ladder: zero, random fields of growing amplitude,
    and concentrated high-temporal-frequency (Eplus) directions."""
    from .spectral import random_field

    seeds = []
    for i in range(n_seeds):
        if i == 0:
            seeds.append(SpectralField.zeros(p.M))
            continue
        amp = 0.3 * 1.15**i
        if i % 2 == 1:
            rf = random_field((master_seed, 101, i), p.M, SubspaceTag.ALL, 0.3)
        else:
            level = min(2 + (i // 2) * 2, p.M)
            rf = embed(random_field((master_seed, 202, i), level,
                                    SubspaceTag.EPLUS, 0.0), p.M)
        seeds.append(amp * rf)
    return seeds


def dedup_solutions(found, dedup_threshold: float = 0.99):
    """Keep one representative per time-translation class (first found wins)."""
    distinct = []
    for sol in found:
        dup = False
        for rep in distinct:
            c, _ = max_time_correlation(sol.u, rep.u)
            if c > dedup_threshold:
                dup = True
                break
        if not dup:
            distinct.append(sol)
    return distinct


def multi_seed_search(p: PenalizedProblem, n_seeds: int,
                      dedup_threshold: float = 0.99, master_seed: int = 0,
                      tol: float = 1e-10, max_iter: int = 60):
    """Newton from a deterministic seed ladder, deduplicated modulo time
    translation, sorted by functional value."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    found = []
    for seed_u in _seed_fields(p, n_seeds, master_seed):
        try:
            sol = newton_solve(p, seed_u, tol=tol, max_iter=max_iter)
        except (NoConvergence, SingularJacobian):
            continue
        found.append(sol)
    distinct = dedup_solutions(found, dedup_threshold)
    distinct.sort(key=lambda s: s.I_value)
    return distinct


def critical_identity_gap(p: PenalizedProblem, u: SpectralField) -> float:
    """|I(u) - sigma int (u f / 2 - F) + (1/2) int forcing u|.

    The kernel-penalty quadratic terms cancel exactly against I'(u) u / 2,
    so at a critical point the functional equals the right-hand side and the
    gap vanishes (up to the residual norm scale).
    """
    I = functional_I(p, u)
    n = _grid_side(p)
    g = synthesize(u, n, n)
    x, U = g.x(), g.values
    fv = p.nl.values(x, U, 0)
    Fv = p.nl.potential_values(x, U)
    cell = (np.pi / n) * (2.0 * np.pi / n)
    rhs = p.sigma * float(np.sum(0.5 * U * fv - Fv)) * cell
    if p.forcing is not None:
        rhs -= 0.5 * pair(p.forcing, u)
    return abs(I - rhs)


# -- linking diagnostics ------------------------------------------------------


def _subspace_pack(M: int, sel_mask):
    lat = lattice(M)
    hsel = lat.half & sel_mask
    hr, hc = np.nonzero(hsel)
    return hr, hc


def _sub_to_field(vec, M, hr, hc):
    nh = hr.size
    c = np.zeros(lattice(M).shape, dtype=np.complex128)
    h = vec[:nh] + 1j * vec[nh:]
    c[hr, hc] = h
    c[2 * lattice(M).jmax - hr, 2 * M - hc] = np.conj(h)
    return SpectralField(M, c)


def linking_report(p: PenalizedProblem, l_values, rho_values=(0.25, 0.5, 1.0, 2.0),
                   n_starts: int = 5, n_sphere: int = 64, master_seed: int = 0,
                   maxiter: int = 500) -> dict:
    """Per-level diagnostics of the linking geometry.

    For each l: M(l) = max of the functional over the finite subspace of
    temporally dominated modes with lattice weight <= l (multi-start ascent;
    the growth of F makes the functional proper on the subspace), and the
    sampled infimum of the functional over energy-norm spheres orthogonal to
    the previous level.  Reports whether M(l) is nondecreasing.
    """
    lat = lattice(p.M)
    eplus = lat.mask & (np.abs(lat.K) > 2 * np.abs(lat.J))
    rows = []
    for l in l_values:
        if l > p.M:
            raise ValueError(f"level l={l} exceeds truncation M={p.M}")
        sel = eplus & (lat.weight <= l)
        hr, hc = _subspace_pack(p.M, sel)
        dim = 2 * hr.size

        def neg_I(vec, hr=hr, hc=hc):
            u = _sub_to_field(vec, p.M, hr, hc)
            R = residual(p, u)
            gsel = R.coeffs[hr, hc]
            grad = 2.0 * Q_AREA * np.concatenate((gsel.real, gsel.imag))
            return -functional_I(p, u), -grad

        best_val = -np.inf
        for s_idx in range(n_starts):
            if s_idx == 0:
                x0 = np.zeros(dim)
            else:
                rng = np.random.default_rng((master_seed, 303, l, s_idx))
                x0 = rng.standard_normal(dim) * (0.3 * 2.0 ** (s_idx - 1))
            res = scipy.optimize.minimize(neg_I, x0, jac=True, method="L-BFGS-B",
                                          options={"maxiter": maxiter})
            best_val = max(best_val, -float(res.fun))
        tail = eplus & (lat.weight > l - 1)
        tr, tc = _subspace_pack(p.M, tail)
        rng = np.random.default_rng((master_seed, 404, l))
        sphere = {}
        for rho in rho_values:
            worst = np.inf
            for _ in range(n_sphere):
                d = rng.standard_normal(2 * tr.size)
                u = _sub_to_field(d, p.M, tr, tc)
                nE = norm_E(u)
                if nE == 0.0:
                    continue
                worst = min(worst, functional_I(p, (rho / nE) * u))
            sphere[rho] = worst
        rows.append({"l": int(l), "dim": int(dim), "max_I": best_val,
                     "sphere_inf": sphere})
    maxima = [r["max_I"] for r in rows]
    nondecreasing = all(maxima[i + 1] >= maxima[i] - 1e-9 for i in range(len(maxima) - 1))
    return {"rows": rows, "max_nondecreasing": bool(nondecreasing)}
