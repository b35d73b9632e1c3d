"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`DyadicError`.
Errors that carry geometric evidence (an offending pair, triple, level or
point) expose it as attributes so callers can build machine-readable reports.
"""


class DyadicError(Exception):
    """Base class for all package errors."""


# -- metric ingestion -------------------------------------------------------

class MetricViolation(DyadicError, ValueError):
    """A raw matrix failed one of the metric axioms.

    ``indices`` holds the offending index tuple, ``kind`` the axiom name.
    """

    kind = "metric"

    def __init__(self, *indices):
        self.indices = tuple(int(i) for i in indices)
        super().__init__(f"{self.kind} at {self.indices}")

    def to_dict(self):
        return {"kind": self.kind, "indices": list(self.indices)}


class Asymmetric(MetricViolation):
    kind = "asymmetric"


class NegativeOrNaN(MetricViolation):
    kind = "negative_or_nan"


class NonzeroDiagonal(MetricViolation):
    kind = "nonzero_diagonal"


class ZeroOffDiagonal(MetricViolation):
    kind = "zero_off_diagonal"


class TriangleViolation(MetricViolation):
    """``dist[i, k] > dist[i, j] + dist[j, k]`` for ``indices == (i, j, k)``."""

    kind = "triangle"


class MalformedInput(DyadicError, ValueError):
    """Input is not a square, finite, two-dimensional matrix."""


# -- parameters -------------------------------------------------------------

class InvalidParams(DyadicError, ValueError):
    pass


class EmptySubset(DyadicError, ValueError):
    pass


# -- constructions ----------------------------------------------------------

class CoveringFailure(DyadicError):
    """A plain net failed to cover a point; cannot happen for maximal nets."""

    def __init__(self, k, x):
        self.k, self.x = int(k), int(x)
        super().__init__(f"point {x} not covered at level {k}")


class SideCoveringFailure(DyadicError):
    """Side-restricted covering failed: ``x`` in side ``side`` has no
    same-side center within the covering radius at level ``k``.

    This means the side is not d-plump with the parameters used.
    """

    def __init__(self, k, x, side):
        self.k = int(k)
        self.x = None if x is None else int(x)
        self.side = side
        super().__init__(f"side {side!r} not covered at level {k} (point {x})")

    def to_dict(self):
        return {"error": type(self).__name__, "k": self.k, "x": self.x, "side": self.side}


class EmptyEligibleSet(SideCoveringFailure):
    """No point of ``side`` is deep enough to host a center at the
    constrained generation, so that side cannot be covered at all."""

    def __init__(self, k, side):
        super().__init__(k, None, side)


class OrphanChild(DyadicError):
    def __init__(self, k, beta):
        self.k, self.beta = int(k), int(beta)
        super().__init__(f"no admissible parent for ({k}, {beta})")


class HypothesisViolated(DyadicError, ValueError):
    """The net parameters violate ``12 * C0 * delta <= c0``."""


class IncompleteLeaves(DyadicError, ValueError):
    """The finest level does not contain every point as a center."""


class NoFeasibleB0(DyadicError):
    def __init__(self, constraint, detail=None):
        self.constraint = constraint
        self.detail = detail
        super().__init__(f"no feasible b0: {constraint}")
