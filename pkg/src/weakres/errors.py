"""Exception hierarchy for weakres.

All library-specific failures derive from :class:`WeakresError` so callers
(and the CLI) can distinguish numeric/model failures from programming errors.
"""


class WeakresError(Exception):
    """Base class for all weakres errors."""


class CapacityError(WeakresError):
    """A requested matrix dimension exceeds the supported budget."""


class ExpmBudgetError(WeakresError):
    """The scaled matrix norm exceeds the exponential's scaling budget."""


class DegenerateError(WeakresError):
    """An input is degenerate (zero matrix, empty scan, ...)."""


class ParallelFieldsError(WeakresError):
    """The interaction axis is parallel to the free axis: the commutator
    construction is not needed (commutative case) and has no solution."""


class DimensionMismatchError(WeakresError):
    """Operands live in incompatible Hilbert spaces."""


class OrthogonalSelectionError(WeakresError):
    """Pre- and post-selected states are (numerically) orthogonal, so the
    weak value diverges beyond what is representable."""

    def __init__(self, message, overlap_mag=0.0):
        super().__init__(message)
        self.overlap_mag = overlap_mag


class BranchCutError(WeakresError):
    """The transition amplitude winds around zero inside a finite-difference
    stencil; the complex logarithm is ambiguous."""


class PostSelectionAnnihilatedError(WeakresError):
    """Post-selection removed (numerically) all amplitude from the probe."""


class ZeroVarianceError(WeakresError):
    """The probe pointer has no variance; shift readout is impossible."""


class ZeroProbabilityError(WeakresError):
    """The reference transition probability vanishes (resonance point); the
    normalized susceptibility is undefined there."""


class ScanError(WeakresError):
    """A coupling scan is malformed (not symmetric, too few points, ...)."""


class NoPeakError(WeakresError):
    """A resonance curve has no usable interior peak."""


class MultiPeakError(WeakresError):
    """A resonance curve shows side lobes above half maximum; the window
    must be narrowed before a half width can be read off."""


class ConfigError(WeakresError):
    """A run configuration is inconsistent or incomplete."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
