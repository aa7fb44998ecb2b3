"""Central eigenvalues, atom masses and the entropy dimension.

A scalar lambda is a central eigenvalue of a square matrix P over the free
skew field when P - lambda*1 fails to be full.  For an affine pencil the
candidates are confined to the eigenvalues of the constant coefficient, and
a full homogeneous part rules out any central eigenvalue at all.  Each
candidate is certified by an actual rank decision on the shifted matrix, so
a certified atom carries the exact mass (N - rho)/N and the certified
spectrum yields the entropy dimension 1 - sum((N - rho)^2)/N^2.

For a general polynomial matrix the candidates are read off atom clusters in
the empirical spectral distribution of one evaluated sample, snapped to
nearby Gaussian rationals where possible and certified the same way.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    Inconclusive,
    InputError,
    InvariantViolation,
    MethodDisagreement,
    NoConsensus,
    NonSquareError,
)
from .ncpoly import LinearPencil, NcMatrix
from .ncrank import (
    _scaling_verdict,
    linearize_matrix,
    ncrank,
    rank_by_substitution,
)
from .randmat import DEFAULT_POLICY, TolerancePolicy, sample
from .scalars import GaussianRational, snap_to_gaussian_rational

LambdaLike = Union[GaussianRational, complex, int, Fraction]


@dataclass
class SpectralAtom:
    lam: object  # GaussianRational when certified exactly, else complex
    rho: int
    mass: Fraction
    certified: bool
    exact: bool

    def lam_text(self) -> str:
        if isinstance(self.lam, GaussianRational):
            return str(self.lam)
        z = complex(self.lam)
        return f"{z.real:.12g}{z.imag:+.12g}i"


@dataclass
class SpectrumReport:
    size: int
    atoms: List[SpectralAtom] = field(default_factory=list)
    uncertified: List[dict] = field(default_factory=list)
    dimension: Optional[Fraction] = None
    source: str = "constant-term"
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "source": self.source,
            "atoms": [
                {
                    "lambda": a.lam_text(),
                    "rho": a.rho,
                    "mass": str(a.mass),
                    "mass_float": float(a.mass),
                    "certified": a.certified,
                    "exact": a.exact,
                }
                for a in self.atoms
            ],
            "uncertified": self.uncertified,
            "entropy_dimension": None if self.dimension is None else str(self.dimension),
            "entropy_dimension_float": None
            if self.dimension is None
            else float(self.dimension),
            "diagnostics": self.diagnostics,
        }


def _dimension_from_atoms(size: int, atoms: Sequence[SpectralAtom]) -> Fraction:
    total = sum((size - a.rho) ** 2 for a in atoms)
    return 1 - Fraction(total, size * size)


def _rho_of_shift(
    matrix: NcMatrix,
    lam,
    seed: int,
    policy: TolerancePolicy,
    dims=None,
    trials: int = 2,
) -> Tuple[Optional[int], bool]:
    """Rank of matrix - lam*1, cross-checked.

    Exact shifts go through the full orchestrated rank.  Numeric shifts run
    the substitution engine with a spectral shift and the scaling engine on
    numerically shifted coefficients.  Returns (rho, certified); rho is None
    when nothing could be decided.
    """
    n = matrix.rows
    if isinstance(lam, (int, Fraction, GaussianRational)):
        shifted = matrix.shift(GaussianRational.coerce(lam))
        try:
            result = ncrank(shifted, dims=dims, trials=trials, seed=seed, policy=policy)
        except (NoConsensus, Inconclusive):
            return None, False
        return result.rho, True
    # numeric shift
    lam = complex(lam)
    try:
        sub = rank_by_substitution(
            matrix, dims=dims, trials=trials, seed=seed, policy=policy, shift=lam
        )
    except NoConsensus:
        return None, False
    if matrix.has_star():
        return sub.rho, True
    if matrix.degree <= 1:
        pencil = matrix.to_pencil()
        numeric = pencil.numeric_coeffs()
        shifted0 = numeric[0] - lam * np.eye(n)
        hom = numeric[1:] + [shifted0]
        hom_size = n
    else:
        pencil, border = linearize_matrix(matrix)
        numeric = pencil.numeric_coeffs()
        shifted0 = numeric[0].copy()
        shifted0[:n, :n] -= lam * np.eye(n)
        hom = numeric[1:] + [shifted0]
        hom_size = pencil.rows
    try:
        cert = _scaling_verdict(hom, hom_size, None, policy, seed)
    except Inconclusive:
        return sub.rho, True
    scaling_full = cert.verdict == "full"
    if scaling_full != (sub.rho == n):
        raise MethodDisagreement(
            f"shifted rank: substitution says rho={sub.rho} of {n}, "
            f"scaling says {cert.verdict}"
        )
    return sub.rho, True


def central_eigs_pencil(
    pencil: LinearPencil,
    seed: int = 0,
    policy: TolerancePolicy = DEFAULT_POLICY,
    dims=None,
    trials: int = 2,
) -> SpectrumReport:
    """Central eigenvalues of an affine pencil.

    Candidates are the eigenvalues of the constant coefficient; a certified
    full homogeneous part short-circuits to the empty spectrum.
    """
    if not pencil.is_square():
        raise NonSquareError("central eigenvalues need a square pencil")
    if pencil.star_letters:
        raise InputError("pencil spectra are defined over the plain alphabet")
    n = pencil.rows
    report = SpectrumReport(size=n, source="constant-term")
    hom = pencil.homogeneous_part()
    if not hom.is_zero():
        hom_rank = ncrank(hom.to_matrix(), seed=seed + 1, policy=policy)
        report.diagnostics["homogeneous_rho"] = hom_rank.rho
        if hom_rank.rho == n:
            report.dimension = Fraction(1)
            return report
    a0 = np.array(
        [[complex(x) for x in row] for row in pencil.coeffs[0]], dtype=complex
    )
    candidates = _cluster_points(np.linalg.eigvals(a0), tol=1e-8 * max(1.0, float(np.linalg.norm(a0))))
    _certify_candidates(report, pencil.to_matrix(), candidates, seed, policy, dims, trials)
    _finalize(report)
    return report


def central_eigs_polymatrix(
    matrix: NcMatrix,
    d: int = 500,
    seed: int = 0,
    kind: str = "gue",
    policy: TolerancePolicy = DEFAULT_POLICY,
    certify: bool = True,
    window_factor: float = 4.0,
    count_factor: float = 0.6,
) -> SpectrumReport:
    """Central eigenvalues of a polynomial matrix from one spectral sample.

    Atom candidates are windows of width window_factor/sqrt(d) holding at
    least count_factor*d/N eigenvalues.  With certification on, each
    candidate must pass a rank decision on the shifted matrix.
    """
    if not matrix.is_square():
        raise NonSquareError("central eigenvalues need a square matrix")
    n = matrix.rows
    model = sample(kind, d, matrix.n_vars, seed)
    value = matrix.evaluate(model)
    scale = float(np.linalg.norm(value))
    normal_gap = float(
        np.linalg.norm(value @ value.conj().T - value.conj().T @ value)
    )
    if scale > 0 and normal_gap > 1e-8 * scale * scale:
        warnings.warn(
            "evaluated matrix is far from normal; atom detection is unreliable",
            stacklevel=2,
        )
    hermitian = scale == 0.0 or float(
        np.linalg.norm(value - value.conj().T)
    ) <= 1e-10 * scale
    window = window_factor / math.sqrt(d)
    min_count = count_factor * d / n
    if hermitian:
        eigs = np.linalg.eigvalsh((value + value.conj().T) / 2)
        raw = _real_atom_clusters(eigs, window, min_count)
        candidates = [complex(x) for x in raw]
    else:
        eigs = np.linalg.eigvals(value)
        candidates = _complex_atom_clusters(eigs, window, min_count)
    report = SpectrumReport(size=n, source="numeric-detection")
    report.diagnostics.update(
        {
            "d": d,
            "kind": kind,
            "window": window,
            "min_count": min_count,
            "hermitian": hermitian,
            "candidates": [[z.real, z.imag] for z in candidates],
        }
    )
    if certify:
        _certify_candidates(report, matrix, candidates, seed, policy, None, 2)
    else:
        for z in candidates:
            report.uncertified.append(
                {"lambda": [z.real, z.imag], "reason": "certification disabled"}
            )
    _finalize(report)
    return report


def _certify_candidates(report, matrix, candidates, seed, policy, dims, trials):
    n = matrix.rows
    for k, z in enumerate(candidates):
        snapped = snap_to_gaussian_rational(complex(z))
        rho = None
        certified = False
        exact = False
        if snapped is not None:
            rho, certified = _rho_of_shift(
                matrix, snapped, seed + 100 + 7 * k, policy, dims, trials
            )
            exact = rho is not None
        if rho is None or rho == n:
            # retry at the raw numeric location before discarding
            rho_num, cert_num = _rho_of_shift(
                matrix, complex(z), seed + 500 + 7 * k, policy, dims, trials
            )
            if rho_num is not None and rho_num < n:
                rho, certified, exact, snapped = rho_num, cert_num, False, None
            elif rho is None:
                report.uncertified.append(
                    {"lambda": [complex(z).real, complex(z).imag], "reason": "no consensus"}
                )
                continue
        if rho == n:
            continue  # numeric cluster was not an actual atom
        lam = snapped if exact and snapped is not None else complex(z)
        if not certified:
            report.uncertified.append(
                {
                    "lambda": [complex(z).real, complex(z).imag],
                    "rho_hat": rho,
                    "reason": "engines could not both confirm",
                }
            )
            continue
        report.atoms.append(
            SpectralAtom(lam, rho, Fraction(n - rho, n), certified, exact)
        )


def _finalize(report: SpectrumReport):
    n = report.size
    if len(report.atoms) > n:
        raise InvariantViolation(
            f"{len(report.atoms)} certified central eigenvalues on a size {n} matrix"
        )
    total_mass = sum(a.mass for a in report.atoms)
    if total_mass > 1:
        raise InvariantViolation(f"atom masses sum to {total_mass} > 1")
    if not report.uncertified:
        report.dimension = _dimension_from_atoms(n, report.atoms)


def _cluster_points(points: np.ndarray, tol: float) -> List[complex]:
    out: List[complex] = []
    counts: List[int] = []
    for z in sorted(points, key=lambda w: (w.real, w.imag)):
        if out and abs(z - out[-1]) <= tol:
            counts[-1] += 1
            out[-1] += (z - out[-1]) / counts[-1]
        else:
            out.append(complex(z))
            counts.append(1)
    return out


def _real_atom_clusters(sorted_eigs: np.ndarray, window: float, min_count: float):
    """Sliding window scan over a sorted real spectrum."""
    xs = np.asarray(sorted_eigs, dtype=float)
    m = len(xs)
    marked = []
    j = 0
    for i in range(m):
        if j < i:
            j = i
        while j + 1 < m and xs[j + 1] - xs[i] <= window:
            j += 1
        if j - i + 1 >= min_count:
            marked.append((xs[i], xs[j]))
    if not marked:
        return []
    merged = [list(marked[0])]
    for lo, hi in marked[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    centers = []
    for lo, hi in merged:
        inside = xs[(xs >= lo) & (xs <= hi)]
        centers.append(float(np.median(inside)))
    return centers


def _complex_atom_clusters(eigs: np.ndarray, window: float, min_count: float):
    """Cell-count clustering in the complex plane."""
    cells: dict = {}
    for z in eigs:
        key = (round(z.real / window), round(z.imag / window))
        cells.setdefault(key, []).append(z)
    centers = []
    for bucket in cells.values():
        if len(bucket) >= min_count:
            centers.append(complex(np.mean(bucket)))
    return centers


def atom_masses(
    matrix: NcMatrix,
    lambdas: Sequence[LambdaLike],
    seed: int = 0,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> List[Fraction]:
    """Exact masses (N - rho(P - lambda))/N for exact shift values."""
    if not matrix.is_square():
        raise NonSquareError("atom masses need a square matrix")
    n = matrix.rows
    out = []
    for k, lam in enumerate(lambdas):
        if not isinstance(lam, (int, Fraction, GaussianRational)):
            raise InputError("atom_masses needs exact Gaussian rational points")
        rho, certified = _rho_of_shift(matrix, lam, seed + 31 * k, policy)
        if rho is None:
            raise Inconclusive(f"rank at shift {lam} reached no consensus")
        out.append(Fraction(n - rho, n))
    return out


def entropy_dimension(
    matrix: NcMatrix,
    seed: int = 0,
    d: int = 500,
    kind: str = "gue",
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> Fraction:
    """1 - sum((N - rho)^2)/N^2 over the certified central eigenvalues."""
    if matrix.degree <= 1 and not matrix.has_star():
        report = central_eigs_pencil(matrix.to_pencil(), seed=seed, policy=policy)
    else:
        report = central_eigs_polymatrix(
            matrix, d=d, seed=seed, kind=kind, policy=policy
        )
    if report.uncertified:
        raise Inconclusive(
            "uncertified atom candidates remain", {"uncertified": report.uncertified}
        )
    assert report.dimension is not None
    return report.dimension


def flatness_constants(pencil: LinearPencil) -> dict:
    """Best constants with c1 tr(b) <= L(b) <= c2 tr(b) on a PSD basis.

    Informational only: the probe set is the standard rank-one basis, not all
    of the positive cone.
    """
    from .ncrank import quantum_op_apply

    if not pencil.is_square():
        raise NonSquareError("flatness runs on square pencils")
    n = pencil.rows
    probes = []
    for j in range(n):
        e = np.zeros((n, 1), dtype=complex)
        e[j] = 1.0
        probes.append(e @ e.conj().T)
    for j in range(n):
        for k in range(j + 1, n):
            for phase in (1.0, 1j):
                e = np.zeros((n, 1), dtype=complex)
                e[j] = 1.0
                e[k] = phase
                probes.append(e @ e.conj().T / 2.0)
    c1 = math.inf
    c2 = 0.0
    for b in probes:
        lb = quantum_op_apply(pencil, b)
        eigs = np.linalg.eigvalsh((lb + lb.conj().T) / 2)
        tr = float(np.trace(b).real)
        c1 = min(c1, float(eigs[0]) / tr)
        c2 = max(c2, float(eigs[-1]) / tr)
    return {"c1": c1, "c2": c2, "probes": len(probes), "flat": c1 > 0}
