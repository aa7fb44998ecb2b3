"""Random matrix models and numeric rank machinery.

Conventions: a GUE sample is Hermitian with entry variance 1/d so the
empirical spectral distribution converges to the semicircle on [-2, 2]; a
Haar unitary comes from the QR factorization of a complex Gaussian matrix
with the phases of the R diagonal absorbed; a Ginibre sample has independent
complex Gaussian entries of variance 1/d.  All sampling goes through
``numpy.random.default_rng``, so one seed reproduces one model exactly.

Numeric rank uses a relative singular value threshold together with a gap
report, so that callers can tell a clean rank decision from a murky one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError
from .ncpoly import Letter

KINDS = ("gue", "haar", "ginibre", "custom")


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds for numeric rank decisions.

    An evaluated matrix of size m keeps singular values above
    ``rank_factor * m * sigma_max``; a decision is trusted only when the last
    kept value exceeds the first dropped one by ``gap_min``.
    """

    rank_factor: float = 1e-11
    gap_min: float = 1e3

    def threshold(self, size: int, sigma_max: float) -> float:
        return self.rank_factor * size * sigma_max


DEFAULT_POLICY = TolerancePolicy()


@dataclass(frozen=True)
class MatrixModel:
    """A concrete tuple of d x d matrices standing in for x1..xn."""

    kind: str
    d: int
    matrices: Tuple[np.ndarray, ...]
    seed: Optional[int] = None

    @property
    def n_vars(self) -> int:
        return len(self.matrices)

    def letter_value(self, letter: Letter) -> np.ndarray:
        m = self.matrices[letter.index - 1]
        return m.conj().T if letter.star else m

    def adjoint_tuple(self) -> "MatrixModel":
        return MatrixModel(
            self.kind,
            self.d,
            tuple(m.conj().T for m in self.matrices),
            self.seed,
        )


def sample(kind: str, d: int, n_vars: int, seed: int) -> MatrixModel:
    """Draw a model of the given kind, deterministically in the seed."""
    if kind not in ("gue", "haar", "ginibre"):
        raise InputError(f"unknown model kind {kind!r}")
    if d < 1 or n_vars < 0:
        raise InputError("need d >= 1 and n_vars >= 0")
    rng = np.random.default_rng(seed)
    mats = tuple(_sample_one(kind, d, rng) for _ in range(n_vars))
    return MatrixModel(kind, d, mats, seed)


def custom_model(matrices: Sequence[np.ndarray]) -> MatrixModel:
    mats = tuple(np.asarray(m, dtype=complex) for m in matrices)
    if not mats:
        raise InputError("custom model needs at least one matrix")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise InputError("custom model matrices must share a square shape")
    return MatrixModel("custom", d, mats, None)


def _sample_one(kind: str, d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    if kind == "gue":
        return (g + g.conj().T) / (2.0 * math.sqrt(d))
    if kind == "ginibre":
        return g / math.sqrt(2.0 * d)
    # haar: QR with phase correction
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


@dataclass(frozen=True)
class RankReport:
    """Outcome of one thresholded SVD rank computation."""

    rank: int
    size: int
    sigma_max: float
    threshold: float
    last_kept: float
    first_dropped: float
    gap: float
    clean: bool

    @property
    def kernel_dim(self) -> int:
        """Nullity read off the same decomposition (columns minus rank)."""
        return self.size - self.rank


def empirical_rank(
    matrix: np.ndarray, policy: TolerancePolicy = DEFAULT_POLICY
) -> RankReport:
    """Numeric rank with an explicit gap report.

    The kernel dimension in the report refers to the right kernel, so
    rank + kernel_dim equals the column count exactly.
    """
    m = np.asarray(matrix, dtype=complex)
    sigmas = np.linalg.svd(m, compute_uv=False)
    size = max(m.shape)
    sigma_max = float(sigmas[0]) if len(sigmas) else 0.0
    if sigma_max == 0.0:
        return RankReport(0, m.shape[1], 0.0, 0.0, 0.0, 0.0, math.inf, True)
    thr = policy.threshold(size, sigma_max)
    rank = int(np.count_nonzero(sigmas > thr))
    last_kept = float(sigmas[rank - 1]) if rank > 0 else 0.0
    first_dropped = float(sigmas[rank]) if rank < len(sigmas) else 0.0
    if rank == len(sigmas) or first_dropped == 0.0:
        gap = math.inf
    else:
        gap = last_kept / first_dropped
    clean = gap >= policy.gap_min
    return RankReport(
        rank, m.shape[1], sigma_max, thr, last_kept, first_dropped, gap, clean
    )


@dataclass
class ESD:
    """Empirical spectral distribution of one evaluated matrix."""

    eigenvalues: np.ndarray
    d: int
    block_size: int
    hermitian: bool
    kind: str
    seed: Optional[int]

    def mass_near(self, center: complex, halfwidth: float) -> float:
        """Fraction of eigenvalues within halfwidth of center."""
        return float(
            np.count_nonzero(np.abs(self.eigenvalues - center) <= halfwidth)
        ) / len(self.eigenvalues)

    def histogram(self, bins: int = 100) -> dict:
        if not self.hermitian:
            raise InputError("histogram export needs a real spectrum")
        counts, edges = np.histogram(self.eigenvalues.real, bins=bins, density=True)
        return {
            "bins": bins,
            "edges": [float(x) for x in edges],
            "density": [float(x) for x in counts],
        }

    def write_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im"])
            for z in self.eigenvalues:
                writer.writerow([f"{z.real:.17g}", f"{z.imag:.17g}"])


HERMITIAN_REL_TOL = 1e-10


def esd(poly_matrix, model: MatrixModel) -> ESD:
    """Eigenvalues of the evaluated matrix, Hermitian-aware."""
    value = poly_matrix.evaluate(model)
    scale = np.linalg.norm(value)
    herm = (
        scale == 0.0
        or np.linalg.norm(value - value.conj().T) <= HERMITIAN_REL_TOL * scale
    )
    if herm:
        eigs = np.linalg.eigvalsh((value + value.conj().T) / 2).astype(complex)
    else:
        eigs = np.linalg.eigvals(value)
    return ESD(
        eigenvalues=eigs,
        d=model.d,
        block_size=poly_matrix.rows,
        hermitian=herm,
        kind=model.kind,
        seed=model.seed,
    )


def rank_convergence(
    poly_matrix,
    dims: Sequence[int],
    seed: int = 0,
    kind: str = "gue",
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> List[dict]:
    """Normalized rank rank/d along a ladder of dimensions."""
    rows = []
    for i, d in enumerate(dims):
        model = sample(kind, d, poly_matrix.n_vars, seed + i)
        report = empirical_rank(poly_matrix.evaluate(model), policy)
        rows.append(
            {
                "d": d,
                "rank": report.rank,
                "rank_over_d": report.rank / d,
                "gap": report.gap,
                "seed": seed + i,
            }
        )
    return rows


def atiyah_integrality_scan(
    poly_matrices: Sequence,
    d: int,
    seed: int = 0,
    kind: str = "gue",
    policy: TolerancePolicy = DEFAULT_POLICY,
    flag_distance: float = 0.02,
) -> dict:
    """Check how close normalized ranks sit to integers.

    Each input matrix is evaluated at its own derived seed; the report rows
    carry rank/d, the distance to the nearest integer, and a flag when the
    distance exceeds ``flag_distance``.
    """
    rows = []
    for i, pm in enumerate(poly_matrices):
        model = sample(kind, d, pm.n_vars, seed + i)
        report = empirical_rank(pm.evaluate(model), policy)
        ratio = report.rank / d
        nearest = round(ratio)
        distance = abs(ratio - nearest)
        rows.append(
            {
                "index": i,
                "size": pm.rows,
                "rank": report.rank,
                "rank_over_d": ratio,
                "nearest_int": nearest,
                "distance": distance,
                "flagged": distance > flag_distance,
                "seed": seed + i,
            }
        )
    return {
        "kind": kind,
        "d": d,
        "flag_distance": flag_distance,
        "rows": rows,
        "any_flagged": any(r["flagged"] for r in rows),
    }


def semicircle_cdf(x: float) -> float:
    """Distribution function of the semicircle law on [-2, 2]."""
    if x <= -2:
        return 0.0
    if x >= 2:
        return 1.0
    return 0.5 + x * math.sqrt(4 - x * x) / (4 * math.pi) + math.asin(x / 2) / math.pi


def ks_to_semicircle(eigenvalues: np.ndarray) -> float:
    """Kolmogorov distance between an empirical spectrum and the semicircle."""
    xs = np.sort(np.real(eigenvalues))
    n = len(xs)
    dist = 0.0
    for i, x in enumerate(xs):
        f = semicircle_cdf(float(x))
        dist = max(dist, abs((i + 1) / n - f), abs(i / n - f))
    return dist
