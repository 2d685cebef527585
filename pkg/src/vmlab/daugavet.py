"""Operator norms on the discretized scalar L1 and Daugavet-equation defects.

The unit ball of the discretized L1(mu) has extreme points +-chi_i/mu_i, so
the norm of any operator with that domain is the maximum of the codomain
norms of its weighted columns.  On top of that column formula the module
measures

  * the Daugavet defect  ||Id|| + ||T|| - ||Id + T||  (zero iff the Daugavet
    equation holds for T),
  * the center defect    ||G|| + ||T|| - ||G + T||,
  * the identity between the operator norm of a combined integration map
    I_m + lambda I_m1 on L1(mu) and the sup over dual extreme points of the
    sup-norm of the combined derivative densities,
  * an empirical gap bound for approximating an operator by a finite sum:
    whenever ||G + T|| >= C + ||T|| over a family, any sum T_hat from that
    family keeps ||G - T_hat|| >= C.

The canonical measure pair (indicator measure, rank-one measure mu(A) * g)
realizes the same function space twice with integration maps of a completely
different nature; both representations are isometric to the scalar L1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NotNormalized
from .measure_core import MeasureSpace, SimpleFunction, l1_mu_norm, same_space
from .normed_space import L1, NormSpec, dual_extreme_points, norm_rows, same_norm
from .rng import SplitMix64
from .vector_measure import VectorMeasure, indicator_measure, rank_one_measure, same_setting

_COLUMN_CHUNK = 512


def _frozen_matrix(a) -> np.ndarray:
    """Read-only float matrix; already-frozen float arrays pass through uncopied."""
    if isinstance(a, np.ndarray) and a.dtype == np.float64 and not a.flags.writeable:
        return a
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense operator from the discretized L1(mu) into a normed value space.

    Writeable input arrays are copied; arrays already marked read-only are
    adopted as-is (the internal builders freeze what they own, so operator
    algebra at large n never duplicates the entries).
    """

    entries: np.ndarray  # (codomain.dim, domain.n)
    domain: MeasureSpace
    codomain: NormSpec

    def __post_init__(self):
        e = _frozen_matrix(self.entries)
        if e.shape != (self.codomain.dim, self.domain.n):
            raise ValueError(
                f"entries must be {self.codomain.dim} x {self.domain.n}, got {e.shape}"
            )
        object.__setattr__(self, "entries", e)

    def apply(self, f: SimpleFunction) -> np.ndarray:
        return self.entries @ f.coeffs


def _same_shape(a: OperatorMatrix, b: OperatorMatrix) -> bool:
    return same_space(a.domain, b.domain) and same_norm(a.codomain, b.codomain)


def identity_operator(space: MeasureSpace) -> OperatorMatrix:
    entries = np.eye(space.n)
    entries.setflags(write=False)
    return OperatorMatrix(entries, space, NormSpec.l1_of_mu(space))


def integration_operator(m: VectorMeasure) -> OperatorMatrix:
    """The matrix of f |-> sum_i f_i m_i with columns the atom vectors."""
    return OperatorMatrix(m.atoms.T, m.space, m.X)


def rank_one_operator(space: MeasureSpace, g, h) -> OperatorMatrix:
    """f |-> (sum_i h_i f_i mu_i) * g on the discretized L1(mu)."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    entries = np.outer(g, h * space.weights)
    entries.setflags(write=False)
    return OperatorMatrix(entries, space, NormSpec.l1_of_mu(space))


def combine_operators(a: OperatorMatrix, lam: float, b: OperatorMatrix) -> OperatorMatrix:
    if not _same_shape(a, b):
        raise ValueError("operators have different domains or codomains")
    entries = a.entries + b.entries if lam == 1.0 else a.entries + lam * b.entries
    entries.setflags(write=False)
    return OperatorMatrix(entries, a.domain, a.codomain)


@dataclass(frozen=True)
class OpNormResult:
    """Operator norm with the attaining (smallest-index) scaled column."""

    value: float
    witness_column: int


def opnorm_from_l1(S: OperatorMatrix) -> OpNormResult:
    """max_i || S (chi_i / mu_i) ||, the exact norm off the L1(mu) ball."""
    n = S.domain.n
    mu = S.domain.weights
    best_value = -np.inf
    best_column = 0
    for start in range(0, n, _COLUMN_CHUNK):
        stop = min(start + _COLUMN_CHUNK, n)
        vals = norm_rows(S.codomain, S.entries[:, start:stop].T) / mu[start:stop]
        i = int(np.argmax(vals))
        if vals[i] > best_value:
            best_value = float(vals[i])
            best_column = start + i
    return OpNormResult(best_value, best_column)


@dataclass(frozen=True)
class DefectReport:
    """Norms of two operators and their sum; defect zero means equality in the triangle."""

    norm_G: float
    norm_T: float
    norm_sum: float

    def __post_init__(self):
        if self.defect < -1e-10:
            raise ValueError("triangle inequality violated; norms are inconsistent")

    @property
    def defect(self) -> float:
        return self.norm_G + self.norm_T - self.norm_sum


def _require_l1_endomorphism(T: OperatorMatrix):
    ok = (
        T.codomain.kind == L1
        and T.codomain.dim == T.domain.n
        and np.array_equal(T.codomain.scale, T.domain.weights)
    )
    if not ok:
        raise ValueError("operator must map the discretized L1(mu) to itself")


def daugavet_defect(T: OperatorMatrix) -> DefectReport:
    """||Id|| + ||T|| - ||Id + T|| with every norm computed, none assumed."""
    _require_l1_endomorphism(T)
    ident = identity_operator(T.domain)
    return center_defect(ident, T)


def center_defect(G: OperatorMatrix, T: OperatorMatrix) -> DefectReport:
    """||G|| + ||T|| - ||G + T||; zero iff G and T add their norms."""
    if not _same_shape(G, T):
        raise ValueError("operators have different domains or codomains")
    norm_g = opnorm_from_l1(G).value
    norm_t = opnorm_from_l1(T).value
    norm_sum = opnorm_from_l1(combine_operators(G, 1.0, T)).value
    return DefectReport(norm_g, norm_t, norm_sum)


@dataclass(frozen=True)
class DensityIdentityReport:
    """Two evaluations of || I_m + lambda I_m1 || that must agree.

    ``operator_side`` is the column formula on L1(mu); ``density_side`` is
    the sup over dual extreme points of the sup-norm of the combined
    derivative densities; ``atom_side`` is the common closed form
    max_i || m_i + lambda m1_i || / mu_i obtained by exchanging the suprema.
    """

    operator_side: float
    density_side: float
    atom_side: float

    @property
    def gap(self) -> float:
        return abs(self.operator_side - self.density_side)


def density_norm_identity(
    m: VectorMeasure, m1: VectorMeasure, lam: float
) -> DensityIdentityReport:
    """Check that the combined operator norm equals the density-side supremum."""
    if not same_setting(m, m1):
        raise ValueError("measures live on different spaces or value spaces")
    combined = combine_operators(integration_operator(m), lam, integration_operator(m1))
    operator_side = opnorm_from_l1(combined).value

    mu = m.space.weights
    pts = dual_extreme_points(m.X)  # NotPolyhedral for L2-type value norms
    densities = np.abs((m.atoms + lam * m1.atoms) @ pts.T) / mu[:, None]
    density_side = float(np.max(densities))

    atom_side = float(np.max(norm_rows(m.X, m.atoms + lam * m1.atoms) / mu))
    return DensityIdentityReport(operator_side, density_side, atom_side)


@dataclass(frozen=True)
class SeriesGapReport:
    """Measured distance ||G - sum(parts)|| against the empirical center constant."""

    gap_norm: float
    c_estimate: float


def _sampled_rank_ones(space: MeasureSpace, samples: int, seed: int) -> list[OperatorMatrix]:
    gen = SplitMix64(seed)
    out = []
    for _ in range(samples):
        g = np.array(gen.normals(space.n))
        h = np.array(gen.normals(space.n))
        g /= l1_mu_norm(SimpleFunction(space, g))
        h /= float(np.max(np.abs(h)))
        out.append(rank_one_operator(space, g, h))
    return out


def series_approximation_gap(
    G: OperatorMatrix,
    parts: Sequence[OperatorMatrix],
    family: Optional[Sequence[OperatorMatrix]] = None,
    samples: int = 64,
    seed: int = 0,
) -> SeriesGapReport:
    """Distance from G to the sum of the parts, with the center constant estimated.

    ``c_estimate`` is the minimum of ||G + T|| - ||T|| over the parts and the
    comparison family (by default ``samples`` seeded random rank-one
    operators of unit norm).  When that minimum is a true lower bound C over
    the span, no sum from the family can approach G closer than C; at finite
    n the bound only holds approximately, so both numbers are reported and
    nothing is asserted.
    """
    for T in parts:
        if not _same_shape(G, T):
            raise ValueError("operators have different domains or codomains")
    if family is None:
        family = _sampled_rank_ones(G.domain, samples, seed)
    total = np.zeros_like(G.entries)
    for T in parts:
        total = total + T.entries
    residual = G.entries - total
    residual.setflags(write=False)
    gap_norm = opnorm_from_l1(OperatorMatrix(residual, G.domain, G.codomain)).value
    candidates = list(parts) + list(family)
    c_estimate = np.inf
    for T in candidates:
        value = (
            opnorm_from_l1(combine_operators(G, 1.0, T)).value
            - opnorm_from_l1(T).value
        )
        c_estimate = min(c_estimate, value)
    return SeriesGapReport(gap_norm, float(c_estimate))


def canonical_pair(space: MeasureSpace, g: SimpleFunction, tol: float = 1e-10):
    """The indicator measure and the rank-one measure mu(A) * g, g of unit L1(mu) norm.

    Both represent the discretized scalar L1 isometrically; their integration
    maps are the identity and a rank-one map.
    """
    if not same_space(space, g.space):
        raise ValueError("density lives on a different space")
    gnorm = l1_mu_norm(g)
    if abs(gnorm - 1.0) > tol:
        raise NotNormalized(f"the rank-one density must have unit L1(mu) norm, got {gnorm}")
    return indicator_measure(space), rank_one_measure(space, g.coeffs)
