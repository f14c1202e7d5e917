class InputError(ValueError):
    """The user's data is malformed or is not affine-symplectic."""


class InternalError(AssertionError):
    """An identity that must hold for every valid input failed.

    Raised only when a proved identity (derived equations, curvature
    formula, Ricci-flatness, ...) is contradicted, which means a bug here.
    """
