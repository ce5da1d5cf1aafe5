"""Phase-only correlation between the two group frames.

The displacement between the lower and upper halves comes from the inverse
transform of the unit-magnitude cross spectrum: a pure translation leaves a
single sharp peak whose position is the integer shift and whose 5x5
neighborhood carries the fractional part. Phase normalization makes the
measurement insensitive to overall brightness and to the smooth envelope of
the blobs; only the displacement survives.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import LowConfidenceError, NumericalIntegrityError
from .separation import SplitFrames

log = logging.getLogger(__name__)

# Spectrum and PocSurface are plain ndarrays (complex128 / float64).
Spectrum = np.ndarray
PocSurface = np.ndarray

DEFAULT_EPS = 1e-12
DEFAULT_MIN_PEAK = 0.05
IMAG_RESIDUE_TOL = 1e-9
CENTROID_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class PocConfig:
    """Correlation settings.

    pad_pow2 pads both frames per axis to the next power of two at least
    twice the axis size. Doubling keeps every displacement the frames can
    physically contain inside the unambiguous (-dim/2, dim/2] window of the
    cyclic correlation; plain size-preserving transforms would alias large
    shifts to the opposite sign.
    """

    eps: float = DEFAULT_EPS
    min_peak: float = DEFAULT_MIN_PEAK
    pad_pow2: bool = True


@dataclass(frozen=True)
class PocResult:
    """One displacement measurement.

    peak_int is the raw argmax (row, col) on the correlation surface;
    offset_sub and displacement are (x, y) ordered, displacement already
    unwrapped and refined. w_px is the Euclidean norm of displacement.
    """

    peak_int: tuple[int, int]
    peak_value: float
    offset_sub: tuple[float, float]
    displacement: tuple[float, float]
    w_px: float
    degenerate: bool = False


def dft2(frame) -> Spectrum:
    """Forward 2D DFT of a count frame or array, as complex128."""
    counts = getattr(frame, "counts", frame)
    return np.fft.fft2(np.asarray(counts, dtype=np.float64))


def idft2(spectrum: Spectrum) -> np.ndarray:
    """Inverse 2D DFT with the 1/(MN) normalization."""
    return np.fft.ifft2(spectrum)


def cross_power(f1: Spectrum, f2: Spectrum, eps: float = DEFAULT_EPS) -> Spectrum:
    """Unit-magnitude cross spectrum f1 * conj(f2) / max(|f1 * conj(f2)|, eps).

    Bins whose product magnitude falls below eps are scaled down instead of
    normalized, so empty bins contribute nothing rather than noise.
    """
    if f1.shape != f2.shape:
        raise ValueError(f"spectra shapes differ: {f1.shape} vs {f2.shape}")
    prod = f1 * np.conj(f2)
    return prod / np.maximum(np.abs(prod), eps)


def poc_surface(j: Spectrum) -> PocSurface:
    """Real correlation surface, the inverse DFT of the cross spectrum.

    The inverse of a conjugate-symmetric spectrum is real; any imaginary
    residue beyond tolerance means the inputs were not a valid spectrum
    pair and is reported rather than silently discarded.
    """
    g = np.fft.ifft2(j)
    if g.size:
        residue = float(np.max(np.abs(g.imag)))
        if residue > IMAG_RESIDUE_TOL:
            raise NumericalIntegrityError(
                f"correlation surface imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_TOL:.0e}"
            )
    return g.real


def unwrap_index(i: int, dim: int) -> int:
    """Map a cyclic surface index to a signed shift in (-dim/2, dim/2]."""
    return i - dim if i > dim / 2 else i


def refine_subpixel(surface: PocSurface, peak_int: tuple[int, int]) -> tuple[float, float, bool]:
    """Fractional peak offset (dx, dy) from the 5x5 neighborhood.

    Neighbors wrap circularly. Negative surface values are clamped to zero,
    then each axis gets an independent centroid under the separable weight
    w(k) = sin(k)/k (w(0) = 1) for k in -2..2. A vanishing weighted mass
    yields (0, 0) with the degenerate flag set.
    """
    h, w = surface.shape
    rows = (np.arange(-2, 3) + peak_int[0]) % h
    cols = (np.arange(-2, 3) + peak_int[1]) % w
    nbhd = surface[np.ix_(rows, cols)]
    nbhd = np.clip(nbhd, 0.0, None)

    k = np.arange(-2, 3, dtype=np.float64)
    wk = np.ones(5)
    nz = k != 0
    wk[nz] = np.sin(k[nz]) / k[nz]
    weight = np.outer(wk, wk)

    mass = nbhd * weight
    denom = float(mass.sum())
    if denom <= CENTROID_DENOM_FLOOR:
        return 0.0, 0.0, True
    dy = float((mass * k[:, None]).sum() / denom)
    dx = float((mass * k[None, :]).sum() / denom)
    if abs(dx) > 0.5 or abs(dy) > 0.5:
        # Routine on smeared peaks (the centroid leans toward a neighbor
        # bin); the integer + fractional sum stays continuous, so this is
        # diagnostic only.
        log.debug("subpixel offset (%.3f, %.3f) outside the nominal half-pixel range", dx, dy)
    return dx, dy, False


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _padded_pair(ref: np.ndarray, mov: np.ndarray, pad_pow2: bool) -> tuple[np.ndarray, np.ndarray]:
    if ref.shape != mov.shape:
        raise ValueError(f"frame shapes differ: {ref.shape} vs {mov.shape}")
    if not pad_pow2:
        return np.asarray(ref, dtype=np.float64), np.asarray(mov, dtype=np.float64)
    h, w = ref.shape
    hp, wp = _next_pow2(2 * h), _next_pow2(2 * w)
    ref_p = np.zeros((hp, wp))
    mov_p = np.zeros((hp, wp))
    ref_p[:h, :w] = ref
    mov_p[:h, :w] = mov
    return ref_p, mov_p


def measure_displacement(split: SplitFrames, cfg: PocConfig = PocConfig()) -> PocResult:
    """Displacement of the lower group relative to the upper group.

    Positive y means the lower group sits below the upper group (and
    positive x to its right). Raises LowConfidenceError when the peak falls
    under cfg.min_peak.
    """
    ref, mov = _padded_pair(split.upper.counts, split.lower.counts, cfg.pad_pow2)
    j = cross_power(dft2(mov), dft2(ref), cfg.eps)
    g = poc_surface(j)

    peak = np.unravel_index(int(np.argmax(g)), g.shape)
    peak_value = float(g[peak])
    if peak_value < cfg.min_peak:
        raise LowConfidenceError(
            f"correlation peak {peak_value:.4f} below confidence floor {cfg.min_peak:g}"
        )
    dy_int = unwrap_index(int(peak[0]), g.shape[0])
    dx_int = unwrap_index(int(peak[1]), g.shape[1])
    dx_sub, dy_sub, degenerate = refine_subpixel(g, (int(peak[0]), int(peak[1])))
    displacement = (dx_int + dx_sub, dy_int + dy_sub)
    return PocResult(
        peak_int=(int(peak[0]), int(peak[1])),
        peak_value=peak_value,
        offset_sub=(dx_sub, dy_sub),
        displacement=displacement,
        w_px=float(np.hypot(*displacement)),
        degenerate=degenerate,
    )


def dump_surface_csv(surface: PocSurface, path) -> None:
    """Debug dump of a correlation surface."""
    np.savetxt(path, surface, fmt="%.9e", delimiter=",")
