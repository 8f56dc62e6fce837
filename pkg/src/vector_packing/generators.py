"""Instance constructors: adversarial sequences with witnesses and seeded random instances."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .core import ConeParams, Packing, Vec2, as_rational, validate_packing
from .scaled import ScaledMode, ScaledParams, is_short
from .schemas import InstanceFile, WitnessFile

__all__ = [
    "GeneratedInstance",
    "anyfit_lower_bound_instance",
    "even_k_tightness",
    "odd_k_adversary",
    "random_cone_instance",
    "random_box_instance",
    "random_long_vector_bin",
    "make_rng",
]

logger = logging.getLogger(__name__)

RationalLike = Union[Fraction, int, str]

# Resolution of the rational grids random instances are drawn from.
GRID = 1000


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the same seed always yields the same stream."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class GeneratedInstance:
    sigma: list[Vec2]
    witness: Packing | None = None
    expected: dict[str, int] = field(default_factory=dict)
    notes: str = ""
    cone_t: Fraction | None = None

    def __post_init__(self):
        if self.witness is not None and not validate_packing(self.witness, self.sigma):
            raise ValueError(f"Witness does not pack the instance: {self.notes}")

    def to_instance_file(self) -> InstanceFile:
        return InstanceFile.from_vectors(self.sigma, self.cone_t)

    def to_witness_file(self) -> WitnessFile | None:
        return None if self.witness is None else WitnessFile.from_packing(self.witness)


def anyfit_lower_bound_instance(
    N: int,
    eps: RationalLike = Fraction(1, 1000),
    delta: RationalLike = Fraction(1, 1000),
) -> GeneratedInstance:
    """A prefix of N vectors (0, 1/2) followed by three classes of flat vectors.

    Any AnyFit strategy pairs the prefix vectors into N/2 bins that are full
    in y, so no later vector can join them. The suffix classes
    1/7 + eps, 1/3 + eps and 1/2 + eps then cost FirstFit N/6 + N/2 + N bins,
    while one bin per prefix vector holds one vector of each class.
    A suffix with a larger FirstFit ratio plugs into the same prefix.
    """
    eps, delta = as_rational(eps), as_rational(delta)
    if N <= 0 or N % 6:
        raise ValueError(f"N must be a positive multiple of 6, got {N}")
    if eps <= 0 or 6 * (Fraction(1, 7) + eps) > 1:
        raise ValueError(f"eps must satisfy 0 < eps and 6(1/7 + eps) <= 1, got {eps}")
    if Fraction(1, 7) + Fraction(1, 3) + Fraction(1, 2) + 3 * eps > 1:
        raise ValueError(f"eps must satisfy 1/7 + 1/3 + 1/2 + 3 eps <= 1, got {eps}")
    p_min = Fraction(1, 7) + eps
    if not 0 < delta < p_min / 2:
        raise ValueError(f"delta must lie in (0, {p_min / 2}), got {delta}")
    if 3 * delta + Fraction(1, 2) > 1:
        raise ValueError(f"delta must satisfy 3 delta + 1/2 <= 1, got {delta}")

    prefix = Vec2(Fraction(0), Fraction(1, 2))
    classes = [Vec2(base + eps, delta) for base in (Fraction(1, 7), Fraction(1, 3), Fraction(1, 2))]
    sigma = [prefix] * N + [v for v in classes for _ in range(N)]
    witness = Packing.from_groups([prefix, *classes] for _ in range(N))

    expected = N // 2 + N // 6 + N // 2 + N
    logger.info("AnyFit lower-bound instance: %d vectors, witness %d bins", len(sigma), N)
    return GeneratedInstance(
        sigma=sigma,
        witness=witness,
        expected={"FirstFit": expected, "BestFit": expected},
        notes=f"anyfit N={N} eps={eps} delta={delta}",
    )


def even_k_tightness(
    s: int,
    k: int = 100,
    eps: RationalLike = Fraction(1, 1000),
) -> GeneratedInstance:
    """s copies each of (1/2 - 2eps, eps), (1/2 + eps, eps) and (eps, 1 - 2eps).

    s bins hold them unscaled; after k-scaling the first two classes no longer
    share a bin and ceil(5s/2) bins are needed.
    """
    ScaledParams(k, ScaledMode.DESK)
    eps = as_rational(eps)
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if not 0 < eps < Fraction(1, 3 * k):
        raise ValueError(f"eps must lie in (0, 1/(3k)) = (0, 1/{3 * k}), got {eps}")

    classes = [
        Vec2(Fraction(1, 2) - 2 * eps, eps),
        Vec2(Fraction(1, 2) + eps, eps),
        Vec2(eps, 1 - 2 * eps),
    ]
    if any(is_short(v, k) for v in classes):
        raise ValueError(f"k={k} is too small: some class would be short")

    sigma = [v for v in classes for _ in range(s)]
    scaled_opt = math.ceil(Fraction(5 * s, 2))
    return GeneratedInstance(
        sigma=sigma,
        witness=Packing.from_groups(list(classes) for _ in range(s)),
        expected={"scaled_opt": scaled_opt, "A_k": scaled_opt},
        notes=f"even-k tightness s={s} k={k} eps={eps}",
    )


def odd_k_adversary(
    s: int,
    k: int = 99,
    eps: RationalLike = Fraction(1, 1000),
) -> GeneratedInstance:
    """2s copies of (1/2 - eps, eps) and s copies of (2eps, 1 - 2eps) for odd k.

    No two scaled vectors share a bin, so the scaled optimum is 3s against
    s bins for the unscaled vectors.
    """
    params = ScaledParams(k, ScaledMode.DIAGNOSTIC)
    if params.k % 2 == 0:
        raise ValueError(f"This instance needs an odd k, got {k}")
    eps = as_rational(eps)
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if not 0 < eps < Fraction(1, 3 * k):
        raise ValueError(f"eps must lie in (0, 1/(3k)) = (0, 1/{3 * k}), got {eps}")

    wide = Vec2(Fraction(1, 2) - eps, eps)
    tall = Vec2(2 * eps, 1 - 2 * eps)
    if is_short(wide, k) or is_short(tall, k):
        raise ValueError(f"k={k} is too small: some class would be short")

    return GeneratedInstance(
        sigma=[wide] * (2 * s) + [tall] * s,
        witness=Packing.from_groups([wide, wide, tall] for _ in range(s)),
        expected={"scaled_opt": 3 * s},
        notes=f"odd-k adversary s={s} k={k} eps={eps}",
    )


def random_cone_instance(
    n: int,
    t: RationalLike,
    seed: int,
    l1_range: tuple[RationalLike, RationalLike] = (0, 2),
) -> GeneratedInstance:
    """n random in-cone vectors.

    The slope ``y / x`` is drawn uniformly from the grid ``t + (1/t - t) * m / GRID``,
    ``m = 0..GRID``, and the L1 norm from a grid over ``(lo, hi]``; norms that
    would leave the unit square are clamped to its edge.
    """
    cone = ConeParams(as_rational(t))
    lo, hi = (as_rational(bound) for bound in l1_range)
    if not 0 <= lo < hi <= 2:
        raise ValueError(f"l1_range must satisfy 0 <= lo < hi <= 2, got ({lo}, {hi})")

    rng = make_rng(seed)
    sigma = []
    for slope_step, norm_step in rng.integers([0, 1], [GRID + 1, GRID + 1], size=(n, 2)):
        slope = cone.t + (1 / cone.t - cone.t) * Fraction(int(slope_step), GRID)
        norm = lo + (hi - lo) * Fraction(int(norm_step), GRID)
        norm = min(norm, (1 + slope) / max(1, slope))
        sigma.append(Vec2(norm / (1 + slope), norm * slope / (1 + slope)))

    logger.info("Random cone instance: n=%d t=%s seed=%d", n, cone.t, seed)
    return GeneratedInstance(sigma=sigma, notes=f"random cone n={n} t={cone.t} seed={seed}", cone_t=cone.t)


def random_box_instance(n: int, seed: int, denominator: int = 100) -> GeneratedInstance:
    """n unrestricted vectors with coordinates on the grid ``1/denominator``."""
    if denominator <= 0:
        raise ValueError(f"denominator must be positive, got {denominator}")
    rng = make_rng(seed)
    sigma = [
        Vec2(Fraction(int(x), denominator), Fraction(int(y), denominator))
        for x, y in rng.integers(0, denominator + 1, size=(n, 2))
    ]
    return GeneratedInstance(sigma=sigma, notes=f"random box n={n} seed={seed} grid=1/{denominator}")


def random_long_vector_bin(k: int, seed: int, max_vectors: int = 5) -> list[Vec2]:
    """A feasible bin of long vectors on the grid ``1/(20k)``.

    Vectors are added while some coordinate has more than ``40/k`` room left,
    each with one coordinate above the short threshold.
    """
    denominator = 20 * k
    threshold = 800  # 40/k on this grid
    rng = make_rng(seed)
    target = int(rng.integers(1, max_vectors + 1))

    room = [denominator, denominator]
    vectors: list[Vec2] = []
    while len(vectors) < target:
        axes = [axis for axis in (0, 1) if room[axis] > threshold]
        if not axes:
            break
        axis = axes[int(rng.integers(0, len(axes)))]
        other = 1 - axis
        coords = [0, 0]
        coords[axis] = int(rng.integers(threshold + 1, room[axis] + 1))
        coords[other] = int(rng.integers(0, room[other] + 1))
        room[0] -= coords[0]
        room[1] -= coords[1]
        vectors.append(Vec2(Fraction(coords[0], denominator), Fraction(coords[1], denominator)))
    return vectors
