"""Dual active-set solver for the least-distance subproblem.

The subproblem is  min sum(rho^2)  s.t.  N rho >= 1  over the rows collected
so far.  Because the Hessian is (twice) the identity and the rows are
nonnegative, the nonnegativity of rho never needs to be enforced explicitly:
stationarity 2*rho = N^T lambda with lambda >= 0 keeps rho >= 0.

The implementation follows the dual method of Goldfarb and Idnani: start
from the unconstrained minimum, repeatedly pick a violated constraint and
take mixed primal/dual steps, dropping active constraints whose multipliers
hit zero.  The Cholesky factor of the active Gram matrix is updated
incrementally (append by triangular solve, drop by Givens rotations); any
update failure falls back to a from-scratch dense solve of the active KKT
system.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NumericalError
from .trees import ROLE_DENSITY, EdgeVector

_DEP_TOL = 1e-10      # relative linear-dependence threshold for new rows
_DUAL_TOL = 1e-13     # multipliers below this count as zero for step ratios


class DualActiveSetLDP:
    """Incremental least-distance QP over rows `n_i . x >= 1`."""

    def __init__(self, dim: int, tol: float = 1e-12):
        self.dim = dim
        self.tol = tol
        self.x = np.zeros(dim)
        self._ids: list[np.ndarray] = []       # nonzero positions per row
        self._w: list[np.ndarray | None] = []  # weights, None means all ones
        self._norm2: list[float] = []
        self.active: list[int] = []
        self.alpha = np.zeros(0)
        self._gram = np.zeros((0, 0))
        self._chol = np.zeros((0, 0))
        # stacked id matrix for the common case of equal-length indicator rows
        self._stack: np.ndarray | None = np.zeros((0, 0), dtype=np.int32)

    # -- row management ------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self._ids)

    def add_row(self, vector=None, ids=None) -> int:
        """Register a constraint row; returns its index.  Does not optimize."""
        if ids is not None:
            ids = np.sort(np.asarray(ids, dtype=np.int32))
            w = None
            norm2 = float(len(ids))
        else:
            vec = np.asarray(vector, dtype=float)
            if vec.shape != (self.dim,):
                raise ValueError(f"row must have length {self.dim}")
            nz = np.flatnonzero(vec)
            ids = nz.astype(np.int32)
            vals = vec[nz]
            w = None if np.all(vals == 1.0) else vals.copy()
            norm2 = float(vals @ vals)
        if norm2 <= 0.0:
            raise ValueError("constraint row must be nonzero")
        idx = len(self._ids)
        self._ids.append(ids)
        self._w.append(w)
        self._norm2.append(norm2)
        self._update_stack(ids, w)
        return idx

    def _update_stack(self, ids, w) -> None:
        if self._stack is None:
            return
        if w is not None:
            self._stack = None
            return
        if self._stack.shape[0] == 0:
            self._stack = ids.reshape(1, -1).copy()
        elif self._stack.shape[1] == len(ids):
            self._stack = np.vstack([self._stack, ids])
        else:
            self._stack = None

    def row_value(self, i: int, x: np.ndarray | None = None) -> float:
        x = self.x if x is None else x
        w = self._w[i]
        picked = x[self._ids[i]]
        return float(picked.sum() if w is None else picked @ w)

    def all_values(self) -> np.ndarray:
        """Costs of every registered row under the current x."""
        if self.n_rows == 0:
            return np.zeros(0)
        if self._stack is not None and self._stack.shape[0] == self.n_rows:
            return self.x[self._stack].sum(axis=1)
        return np.array([self.row_value(i) for i in range(self.n_rows)])

    def energy(self) -> float:
        return float(self.x @ self.x)

    # -- linear algebra helpers ------------------------------------------------

    def _row_dense(self, p: int) -> np.ndarray:
        vec = np.zeros(self.dim)
        w = self._w[p]
        vec[self._ids[p]] = 1.0 if w is None else w
        return vec

    def _dots_with_active(self, p: int) -> np.ndarray:
        """Inner products of row p with every active row."""
        if not self.active:
            return np.zeros(0)
        if self._stack is not None and self._w[p] is None:
            mask = np.zeros(self.dim, dtype=bool)
            mask[self._ids[p]] = True
            return mask[self._stack[self.active]].sum(axis=1).astype(float)
        vec = self._row_dense(p)
        return np.array([self.row_value(i, vec) for i in self.active])

    def _combine_active(self, coeff: np.ndarray) -> np.ndarray:
        """Return sum_i coeff[i] * active_row_i as a dense vector."""
        out = np.zeros(self.dim)
        if not self.active or coeff.size == 0:
            return out
        if self._stack is not None:
            rows = self._stack[self.active]
            np.add.at(out, rows.ravel(), np.repeat(coeff, rows.shape[1]))
            return out
        for i, c in zip(self.active, coeff):
            w = self._w[i]
            out[self._ids[i]] += c if w is None else c * w
        return out

    def _gram_solve(self, rhs: np.ndarray) -> np.ndarray:
        y = solve_triangular(self._chol, rhs, lower=True)
        return solve_triangular(self._chol.T, y, lower=False)

    def _chol_append(self, c: np.ndarray, gpp: float) -> None:
        a = len(self.active)
        grown = np.zeros((a + 1, a + 1))
        grown[:a, :a] = self._gram
        grown[a, :a] = c
        grown[:a, a] = c
        grown[a, a] = gpp
        self._gram = grown
        if a == 0:
            self._chol = np.array([[np.sqrt(gpp)]])
            return
        w = solve_triangular(self._chol, c, lower=True)
        d2 = gpp - float(w @ w)
        if d2 <= _DEP_TOL * gpp:
            raise NumericalError("active Gram update lost positive definiteness")
        lower = np.zeros((a + 1, a + 1))
        lower[:a, :a] = self._chol
        lower[a, :a] = w
        lower[a, a] = np.sqrt(d2)
        self._chol = lower

    def _chol_drop(self, j: int) -> None:
        self._gram = np.delete(np.delete(self._gram, j, axis=0), j, axis=1)
        mat = np.delete(self._chol, j, axis=0)
        a1 = mat.shape[0]
        for col in range(j, a1):
            x, y = mat[col, col], mat[col, col + 1]
            r = float(np.hypot(x, y))
            if r == 0.0:
                continue
            cth, sth = x / r, y / r
            tmp = cth * mat[col:, col] + sth * mat[col:, col + 1]
            mat[col:, col + 1] = -sth * mat[col:, col] + cth * mat[col:, col + 1]
            mat[col:, col] = tmp
            if mat[col, col] < 0:
                mat[col:, col] *= -1.0
        self._chol = np.ascontiguousarray(mat[:, :a1])

    def _rebuild(self) -> None:
        """From-scratch dense solve of the active KKT system (fallback path)."""
        while True:
            a = len(self.active)
            gram = np.zeros((a, a))
            dense = [self._row_dense(p) for p in self.active]
            for i in range(a):
                gram[i, i] = self._norm2[self.active[i]]
                for j in range(i + 1, a):
                    gram[i, j] = gram[j, i] = float(dense[i] @ dense[j])
            try:
                chol = np.linalg.cholesky(gram)
            except np.linalg.LinAlgError:
                coeffs, *_ = np.linalg.lstsq(gram, np.ones(a), rcond=None)
                self.active.pop(int(np.argmin(coeffs)))
                continue
            y = solve_triangular(chol, np.ones(a), lower=True)
            alpha = solve_triangular(chol.T, y, lower=False)
            if a and alpha.min() < 0.0:
                self.active.pop(int(np.argmin(alpha)))
                continue
            self._gram = gram
            self._chol = chol
            self.alpha = alpha
            self.x = self._combine_active(alpha)
            return

    # -- the dual method -------------------------------------------------------

    def process(self, p: int) -> bool:
        """Drive constraint p to satisfaction, keeping the active set optimal.

        Returns True if the primal iterate moved.
        """
        moved = False
        lam_acc = 0.0
        guard = 0
        while True:
            guard += 1
            if guard > 4 * (self.n_rows + self.dim) + 16:
                raise NumericalError("active-set inner loop failed to terminate")
            slack = self.row_value(p) - 1.0
            if slack >= -self.tol:
                if lam_acc > 0.0 and p not in self.active:
                    # p went tight exactly when a blocking constraint dropped
                    # (tied step lengths); it still carries multiplier mass and
                    # must join the active set to preserve stationarity.
                    try:
                        self._chol_append(self._dots_with_active(p), self._norm2[p])
                        self.active.append(p)
                        self.alpha = np.append(self.alpha, lam_acc)
                    except NumericalError:
                        self.active.append(p)
                        self._rebuild()
                return moved
            c = self._dots_with_active(p)
            if self.active:
                try:
                    r = self._gram_solve(c)
                except Exception:
                    self._rebuild()
                    continue
                z_norm2 = self._norm2[p] - float(c @ r)
            else:
                r = np.zeros(0)
                z_norm2 = self._norm2[p]
            independent = z_norm2 > _DEP_TOL * self._norm2[p]

            t2 = (-slack) / z_norm2 if independent else np.inf
            t1 = np.inf
            drop_j = -1
            for j, rj in enumerate(r):
                if rj > _DUAL_TOL:
                    ratio = self.alpha[j] / rj
                    if ratio < t1:
                        t1 = ratio
                        drop_j = j
            t = min(t1, t2)
            if not np.isfinite(t):
                raise NumericalError("no feasible step; subproblem appears infeasible")

            if independent:
                z = self._row_dense(p) - self._combine_active(r)
                self.x += t * z
                moved = True
            if r.size:
                self.alpha = self.alpha - t * r
            lam_acc += t

            if independent and t2 <= t1:
                try:
                    self._chol_append(c, self._norm2[p])
                    self.active.append(p)
                    self.alpha = np.append(self.alpha, lam_acc)
                except NumericalError:
                    self.active.append(p)
                    self._rebuild()
                return True
            # partial or dual step: drop the blocking constraint and iterate
            self.active.pop(drop_j)
            self.alpha = np.delete(self.alpha, drop_j)
            self._chol_drop(drop_j)

    def resolve_all(self, violation_tol: float | None = None) -> float:
        """Re-optimize until every registered row is satisfied.

        Returns the worst final violation (clamped at zero).
        """
        tol = violation_tol if violation_tol is not None else 10.0 * self.tol
        passes = 0
        while True:
            passes += 1
            if passes > 50 + 10 * self.n_rows:
                raise NumericalError("subproblem re-optimization cycled")
            vals = self.all_values()
            if vals.size == 0:
                return 0.0
            worst = int(np.argmin(vals))
            violation = 1.0 - float(vals[worst])
            if violation <= tol:
                return max(violation, 0.0)
            self.process(worst)

    def multipliers(self) -> np.ndarray:
        """Stationarity multipliers for 2*rho = N^T lam, one per registered row."""
        lam = np.zeros(self.n_rows)
        for j, p in enumerate(self.active):
            lam[p] = 2.0 * max(float(self.alpha[j]), 0.0)
        return lam


def qp_subproblem(rows, dim: int | None = None) -> tuple[EdgeVector, np.ndarray]:
    """Solve min sum(rho^2) s.t. each row . rho >= 1; returns (rho, lambda).

    `rows` is a sequence of usage vectors (or a 2-D array).  The returned
    multipliers satisfy 2*rho = N^T lambda with lambda >= 0 and complementary
    slackness to the subproblem tolerance.
    """
    mat = np.asarray(rows, dtype=float)
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise ValueError("need a nonempty 2-D collection of usage rows")
    k, m = mat.shape
    if dim is not None and dim != m:
        raise ValueError(f"rows have length {m}, expected {dim}")
    ldp = DualActiveSetLDP(m)
    for i in range(k):
        ldp.add_row(vector=mat[i])
    ldp.resolve_all()
    return EdgeVector(ldp.x, ROLE_DENSITY), ldp.multipliers()
