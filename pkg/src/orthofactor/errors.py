"""Exception hierarchy shared by all orthofactor modules."""


class OrthoError(Exception):
    """Base class for every domain error raised by this package."""


# ring / matrix layer

class NonUnit(OrthoError):
    """Inversion of an element that is not a unit."""


class DescriptorMismatch(OrthoError):
    """Operands belong to different rings."""


class DimensionMismatch(OrthoError):
    """Matrix or vector dimensions are incompatible."""


class NonUnitDeterminant(OrthoError):
    """Matrix inversion requires the determinant to be a unit."""


# quadratic space layer

class NotIsotropic(OrthoError):
    """Vector fails q(u) = 0."""


class NotOrthogonalPair(OrthoError):
    """Vectors fail the pairing condition <u, v> = 0."""


class NotUnimodular(OrthoError):
    """Vector coordinates do not generate the unit ideal."""


class UnsupportedRing(OrthoError):
    """Operation restricted to a smaller class of rings."""


class NoSolution(OrthoError):
    """A linear solve that must succeed under the preconditions failed."""


class SearchExhausted(OrthoError):
    """An exhaustive search over a finite space found no candidate."""


# generator layer

class BadIndices(OrthoError):
    """Generator indices violate the family's constraints."""


class NotAlternating(OrthoError):
    """Matrix is not alternating (A^T = -A with zero diagonal)."""


class DetNotOne(OrthoError):
    """Matrix has unit determinant different from 1."""


# factorization layer

class InternalInconsistency(OrthoError):
    """A self-verified factorization failed to reproduce its target."""


class ConventionMismatch(OrthoError):
    """A pinned index/sign convention failed verification."""


class UnsupportedShape(OrthoError):
    """Input vector shape outside what the factorization handles."""


class UnsupportedToken(OrthoError):
    """Token family not accepted by this transformation."""


class FormMismatch(OrthoError):
    """Congruence relation between two Gram matrices does not hold."""


# closure oracle

class CapExceeded(OrthoError):
    """Breadth-first closure grew past the configured cap."""
