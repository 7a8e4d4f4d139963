"""Second-order cone programs over real-lifted complex variables.

A program maximizes a linear objective subject to SOC blocks
``||A x + b||_2 <= c^T x + d`` and linear equalities ``E x = f``. Complex
precoder coefficients ``w`` are lifted to ``x = [Re w; Im w]``. The solve is
delegated to the Clarabel interior-point solver.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


class InfeasibleProgramError(RuntimeError):
    """The solver returned a certificate of primal infeasibility."""

    def __init__(self, message: str, violated: tuple = ()):
        super().__init__(message)
        self.violated = violated


class SolverFailure(RuntimeError):
    """The solver stopped without a solution or an infeasibility certificate."""


def lift(M) -> sp.csr_matrix:
    """Real matrix mapping ``[Re w; Im w]`` to ``[Re(M w); Im(M w)]``."""
    M = sp.csr_matrix(M)
    re, im = M.real, M.imag
    return sp.bmat([[re, -im], [im, re]], format="csr")


def lift_vector(w) -> np.ndarray:
    w = np.asarray(w).reshape(-1)
    return np.concatenate([w.real, w.imag])


def unlift(x: np.ndarray) -> np.ndarray:
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]


def real_part_row(c) -> np.ndarray:
    """Row ``r`` with ``r @ lift_vector(w) == Re(c @ w)``."""
    c = np.asarray(c).reshape(-1)
    return np.concatenate([c.real, -c.imag])


def imag_part_row(c) -> np.ndarray:
    c = np.asarray(c).reshape(-1)
    return np.concatenate([c.imag, c.real])


@dataclass
class SocBlock:
    """``||A x + b||_2 <= c @ x + d``."""

    A: sp.spmatrix
    b: np.ndarray
    c: np.ndarray
    d: float = 0.0
    name: str = ""

    def __post_init__(self):
        self.A = sp.csr_matrix(self.A)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        if self.A.shape[0] + 1 < 2 or self.A.shape[0] != self.b.shape[0]:
            raise ValueError("cone block must have dimension >= 2 and consistent b")

    @property
    def dim(self) -> int:
        return self.A.shape[0] + 1

    def residual(self, x: np.ndarray) -> float:
        """Positive when violated."""
        return float(np.linalg.norm(self.A @ x + self.b) - (self.c @ x + self.d))


@dataclass
class ConicProgram:
    objective: np.ndarray
    cones: list = field(default_factory=list)
    eq_A: sp.spmatrix | None = None
    eq_b: np.ndarray | None = None
    offset: float = 0.0

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective must be finite")
        for cone in self.cones:
            if cone.A.shape[1] != self.n:
                raise ValueError(f"cone {cone.name!r} has {cone.A.shape[1]} columns, expected {self.n}")

    @property
    def n(self) -> int:
        return self.objective.shape[0]

    def value(self, x: np.ndarray) -> float:
        return float(self.objective @ x + self.offset)

    def max_residual(self, x: np.ndarray) -> float:
        r = [c.residual(x) for c in self.cones]
        if self.eq_A is not None and self.eq_A.shape[0]:
            r.append(float(np.abs(self.eq_A @ x - self.eq_b).max()))
        return max(r, default=0.0)


@dataclass
class ConicSolution:
    x: np.ndarray
    objective: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float


def _settings(tol: float, max_iter: int):
    s = clarabel.DefaultSettings()
    s.verbose = False
    s.tol_feas = tol
    s.tol_gap_abs = tol
    s.tol_gap_rel = tol
    s.max_iter = max_iter
    return s


def solve_conic(program: ConicProgram, tol: float = 1e-9, max_iter: int = 200) -> ConicSolution:
    """Solve ``program`` to KKT accuracy ``tol``.

    Raises :class:`InfeasibleProgramError` on a primal infeasibility
    certificate (carrying the names of the cones the certificate touches) and
    :class:`SolverFailure` on anything else short of a solution.
    """
    n = program.n
    rows, rhs, cones, spans = [], [], [], []
    if program.eq_A is not None and program.eq_A.shape[0]:
        rows.append(sp.csr_matrix(program.eq_A))
        rhs.append(np.asarray(program.eq_b, dtype=float))
        cones.append(clarabel.ZeroConeT(program.eq_A.shape[0]))
        spans.append(("equality", program.eq_A.shape[0]))
    for cone in program.cones:
        rows.append(sp.vstack([sp.csr_matrix(-cone.c.reshape(1, -1)), -cone.A]))
        rhs.append(np.concatenate([[cone.d], cone.b]))
        cones.append(clarabel.SecondOrderConeT(cone.dim))
        spans.append((cone.name, cone.dim))
    if not rows:
        raise ValueError("program has no constraints")
    A = sp.vstack(rows, format="csc")
    b = np.concatenate(rhs)
    P = sp.csc_matrix((n, n))
    solver = clarabel.DefaultSolver(P, -program.objective, A, b, cones, _settings(tol, max_iter))
    sol = solver.solve()
    status = str(sol.status)
    if status in ("PrimalInfeasible", "AlmostPrimalInfeasible"):
        z = np.asarray(sol.z)
        scale = np.abs(z).max() if z.size else 0.0
        violated, pos = [], 0
        for name, dim in spans:
            if scale > 0 and np.abs(z[pos:pos + dim]).max() > 1e-6 * scale:
                violated.append(name)
            pos += dim
        raise InfeasibleProgramError(f"conic program infeasible ({status})", tuple(violated))
    if status not in ("Solved", "AlmostSolved"):
        raise SolverFailure(f"conic solver stopped with status {status}")
    if status == "AlmostSolved":
        log.warning("conic solver reached reduced accuracy only")
    x = np.asarray(sol.x)
    return ConicSolution(x, program.value(x), status, int(sol.iterations), float(sol.r_prim), float(sol.r_dual))
