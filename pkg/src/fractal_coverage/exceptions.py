"""Exception and warning types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (CLI exit code 1)."""


class DriveTestParseError(InputError):
    """A drive-test row failed validation.

    ``row`` is the 1-based line number in the file (the header is line 1)
    and ``field`` the offending column name, when one applies.
    """

    def __init__(self, message, row=None, field=None):
        self.row = row
        self.field = field
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class DegenerateSeriesError(ValueError):
    """The data cannot support the requested estimate (CLI exit code 2)."""


class UnfittableSectorError(DegenerateSeriesError):
    """One or more sectors lack the samples needed for a path-loss fit."""

    def __init__(self, sectors, detail=""):
        self.sectors = sorted(int(k) for k in sectors)
        msg = f"unfittable sectors: {self.sectors}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class BoundaryInsideReferenceWarning(UserWarning):
    """The power threshold is at or above the reference power minus shadowing."""


class ExtrapolationWarning(UserWarning):
    """A boundary distance lies far beyond the measured samples of its sector."""


class ShortSeriesWarning(UserWarning):
    """Estimation was forced on a series shorter than the comfortable minimum."""
