"""Exception types shared across the package."""


class ScrewposeError(Exception):
    """Base class for all package-specific errors."""


class DegenerateAxis(ScrewposeError):
    """Rotation too close to identity for a well-defined rotation axis."""


class ZeroTranslation(ScrewposeError):
    """Translation is (numerically) zero where a direction is required."""


class AllCheiralityFailed(ScrewposeError):
    """No decomposition candidate places every point in front of both views."""


class RankDeficient(ScrewposeError):
    """A constraint matrix has lower numerical rank than its construction assumes."""


class DegenerateInput(ScrewposeError):
    """Input configuration outside the generic regime a solver requires."""


class NoRealSolutions(ScrewposeError):
    """The solver's univariate polynomial has no real roots."""


class NullVectorAmbiguous(ScrewposeError):
    """A null vector is not unique (matrix rank lower than expected)."""


class ZeroScrewDirection(ScrewposeError):
    """The translation is orthogonal to the rotation axis; scale is unobservable."""


class ZeroScrewDelta(ScrewposeError):
    """A zero screw translation cannot fix the translation scale."""


class NotEnoughPoints(ScrewposeError):
    """Fewer correspondences than the sample size requires."""


class NoModelFound(ScrewposeError):
    """Robust estimation finished without a hypothesis above the support floor."""


class EmptySolutionSet(ScrewposeError):
    """An accuracy metric was asked to score an empty solution list."""
