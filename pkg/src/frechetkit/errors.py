"""Shared exception types."""


class FrechetError(Exception):
    pass


class DegenerateCurveError(FrechetError):
    """Distance computation requested on a curve that collapses to a point."""


class NotReachableError(FrechetError):
    """Graph search target is unreachable from the start node."""


class CurveParseError(FrechetError):
    """A curve file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
