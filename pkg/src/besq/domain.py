"""Parameters, particle configurations and the exact classification rules.

Nothing in this module is random. Ranks use exact comparisons with zero:
the classification statements are about the start point as given, not
about simulated floats.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Particle count ``p`` and drift dimension ``alpha`` (any real)."""

    p: int
    alpha: float

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be an integer >= 1, got {self.p!r}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))


def particle_config(x, p: int | None = None) -> np.ndarray:
    """Validate an ordered start point and return it as a float array."""
    x = np.array(x, dtype=float, ndmin=1).ravel()
    if p is not None and x.shape[0] != p:
        raise ValueError(f"x0 length {x.shape[0]} != p {p}")
    if not np.all(np.isfinite(x)):
        raise ValueError("particle positions must be finite")
    if np.any(np.diff(x) < 0):
        raise ValueError("particle positions must be weakly increasing")
    return x


def eligible_integer(alpha: float, p: int) -> int | None:
    """``alpha`` as an int if it lies in ``{0, 1, ..., p - 2}``, else None."""
    if float(alpha).is_integer() and 0 <= alpha <= p - 2:
        return int(alpha)
    return None


def n_star(p: int, alpha: int) -> int:
    """The integer ``n*`` with ``2 n*`` in ``{p + alpha, p + alpha + 1}``.

    Defined only for ``alpha`` in ``{0, ..., p - 2}``.

    >>> n_star(4, 2), n_star(5, 0), n_star(2, 0)
    (3, 3, 1)
    """
    a = eligible_integer(alpha, p)
    if a is None:
        raise ValueError(f"n* needs alpha in {{0, ..., p-2}}; got alpha={alpha}, p={p}")
    return (p + a + 1) // 2


def ranks(x) -> tuple[int, int, int]:
    """Counts of strictly positive, strictly negative and nonzero entries."""
    x = np.asarray(x, dtype=float)
    rk_plus = int(np.count_nonzero(x > 0))
    rk_minus = int(np.count_nonzero(x < 0))
    return rk_plus, rk_minus, rk_plus + rk_minus


def reflect(alpha: float, x) -> tuple[float, np.ndarray]:
    """Map ``(alpha, x)`` to ``(-alpha, (-x_p, ..., -x_1))``.

    Multiplying the system by -1 and reordering gives another instance of
    the same system with opposite dimension.
    """
    x = np.asarray(x, dtype=float)
    return -alpha, -x[::-1]


def classify_strong_uniqueness(params: SystemParams, x) -> bool:
    """Whether the system has a unique strong solution from ``x``.

    True iff ``|alpha|`` is not in ``{0, ..., p-2}``, or it is and
    ``rk+(x) > n*`` or ``rk-(x) > p - n*``. Negative integer ``alpha`` is
    classified through the reflected instance.
    """
    x = particle_config(x, params.p)
    alpha = params.alpha
    if eligible_integer(abs(alpha), params.p) is None:
        return True
    if alpha < 0:
        alpha, x = reflect(alpha, x)
    ns = n_star(params.p, alpha)
    rk_plus, rk_minus, _ = ranks(x)
    return rk_plus > ns or rk_minus > params.p - ns


def classify_nonnegative_solution(params: SystemParams, x) -> bool:
    """Whether a unique strong non-negative solution starts from ``x``.

    Requires ``x_1 >= 0``. True iff ``alpha >= p - 1``, or ``alpha`` is in
    ``{0, ..., p-2}`` and ``rk(x) <= alpha``.
    """
    x = particle_config(x, params.p)
    if x[0] < 0:
        raise ValueError("non-negative solutions need x_1 >= 0")
    if params.alpha >= params.p - 1:
        return True
    a = eligible_integer(params.alpha, params.p)
    return a is not None and ranks(x)[2] <= a


def structure_prediction(params: SystemParams) -> tuple[int, np.ndarray, np.ndarray]:
    """Which particles of the non-colliding system hit zero or go negative.

    For a non-negative start and ``alpha < p + 1``, with
    ``n = ceil((p + 1 - alpha) / 2)``: particle ``i`` (1-based) hits zero
    iff ``i <= n`` and enters the negative half-line iff ``i <= n - 1``.
    """
    p, alpha = params.p, params.alpha
    if alpha >= p + 1:
        raise ValueError(f"structure prediction needs alpha < p + 1 = {p + 1}, got {alpha}")
    n = math.ceil((p + 1 - alpha) / 2)
    i = np.arange(1, p + 1)
    hits_zero = p + 3 - alpha > 2 * i
    goes_negative = p + 1 - alpha > 2 * i
    return n, hits_zero, goes_negative


@dataclass
class ClassificationReport:
    """Everything the exact rules say about ``(p, alpha, x)``.

    Fields that a rule does not define for the given input are None.
    """

    p: int
    alpha: float
    x: list[float]
    n_star: int | None
    rk_plus: int
    rk_minus: int
    rk: int
    unique_strong: bool
    nonneg_exists: bool
    structure_n: int | None
    hits_zero: list[bool] | None
    goes_negative: list[bool] | None
    reflected: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def classify(params: SystemParams, x) -> ClassificationReport:
    """Build a :class:`ClassificationReport` for one start point."""
    x = particle_config(x, params.p)
    p, alpha = params.p, params.alpha
    rk_plus, rk_minus, rk = ranks(x)
    notes = []

    reflected = False
    ns = None
    a = eligible_integer(abs(alpha), p)
    if a is not None:
        ns = n_star(p, a)
        if alpha < 0:
            reflected = True
            notes.append(
                "negative integer alpha: uniqueness decided on the reflected "
                "instance (-alpha, -x reversed); n_star refers to that instance"
            )

    if x[0] >= 0:
        nonneg = classify_nonnegative_solution(params, x)
    else:
        nonneg = False
        notes.append("x_1 < 0: no non-negative solution can start here")

    structure_n = hits = neg = None
    if alpha < p + 1 and x[0] >= 0:
        structure_n, h, g = structure_prediction(params)
        hits, neg = [bool(v) for v in h], [bool(v) for v in g]
    else:
        notes.append("hitting structure only predicted for x_1 >= 0 and alpha < p + 1")

    return ClassificationReport(
        p=p,
        alpha=alpha,
        x=[float(v) for v in x],
        n_star=ns,
        rk_plus=rk_plus,
        rk_minus=rk_minus,
        rk=rk,
        unique_strong=classify_strong_uniqueness(params, x),
        nonneg_exists=nonneg,
        structure_n=structure_n,
        hits_zero=hits,
        goes_negative=neg,
        reflected=reflected,
        notes=notes,
    )
