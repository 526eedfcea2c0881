"""Exception and warning types raised by walkcross operations."""


class WalkcrossError(Exception):
    """Base class for all errors raised by this package."""


# -- lattice domains ---------------------------------------------------------

class Empty(WalkcrossError):
    """Domain construction was given no points."""


class NotConnected(WalkcrossError):
    """Point set is not connected under nearest-neighbour adjacency."""


class NotSimplyConnected(WalkcrossError):
    """Complement of the point set is disconnected (the set has a hole)."""


class OriginMissing(WalkcrossError):
    """Operation requires the origin to belong to the domain."""


# -- potential kernel --------------------------------------------------------

class ZeroPoint(WalkcrossError):
    """Operation is undefined at the origin."""


# -- linear solves / discrete kernels ----------------------------------------

class SolveFailure(WalkcrossError):
    """Linear solve did not reach the required residual."""


class PointOutsideDomain(WalkcrossError):
    """Requested point is not in the solve's index set."""


class NotBoundary(WalkcrossError):
    """Point is not an outer boundary point of the domain."""


class SamePoint(WalkcrossError):
    """Two distinct points were required."""


class DuplicatePoint(WalkcrossError):
    """Point list contains repeats."""


class MissingNeighbor(WalkcrossError):
    """Field does not cover all four neighbours of the requested point."""


# -- closed-form continuum kernels -------------------------------------------

class CoincidentPoints(WalkcrossError):
    """Kernel arguments coincide."""


class OutsideDisk(WalkcrossError):
    """Argument is not inside the unit disk."""


class CoincidentAngles(WalkcrossError):
    """Boundary angles coincide modulo 2*pi."""


class NonPositiveLength(WalkcrossError):
    """Rectangle length must be positive."""


class OutOfRange(WalkcrossError):
    """Argument lies outside the kernel's admissible range."""


class BadParameter(WalkcrossError):
    """Transformation parameter outside its admissible range."""


class BadOrdering(WalkcrossError):
    """Boundary points do not follow the required counterclockwise order."""


class BadOrderingWarning(UserWarning):
    """Counterclockwise ordering violated; value still well defined."""


# -- determinants and experiments --------------------------------------------

class ZeroDiagonal(WalkcrossError):
    """Conditional determinant needs strictly positive diagonal entries."""


class AngularGapTooSmall(WalkcrossError):
    """Selected boundary points violate the angular-gap precondition."""


# -- walks --------------------------------------------------------------------

class EmptyPath(WalkcrossError):
    """Walk path must contain at least one site."""


class IsolatedBoundaryPoint(WalkcrossError):
    """Start point is not a boundary point with a neighbour inside the domain."""
