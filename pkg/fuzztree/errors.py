"""
Exception hierarchy for fuzztree
"""


class FuzzTreeError(Exception):
    """Base class of every error raised by the library"""


class ShapeError(FuzzTreeError, ValueError):
    """Invalid fuzzy shape parameters or cut count"""


class GridMismatchError(FuzzTreeError, ValueError):
    """Fuzzy numbers on different alpha grids were combined"""


class NestednessError(FuzzTreeError, ValueError):
    """Alpha-cuts are not nested or an interval is inverted"""


class ArityError(FuzzTreeError, ValueError):
    """Argument count does not match the function or direction list"""


class ProbabilityRangeError(FuzzTreeError, ValueError):
    """A probability lies outside [0, 1]"""


class InvalidFaultTreeError(FuzzTreeError, ValueError):
    """Fault tree violates a structural rule"""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = '; '.join(d.message for d in self.diagnostics[:5])
        more = len(self.diagnostics) - 5
        if more > 0:
            lines += f' (+{more} more)'
        super().__init__(f"invalid fault tree: {lines}")


class NotTreeStructuredError(FuzzTreeError, ValueError):
    """Bottom-up evaluation requested on a DAG-structured fault tree"""


class SizeLimitError(FuzzTreeError):
    """A brute-force cap or a BDD node budget was exceeded"""


class ParseError(FuzzTreeError, ValueError):
    """Lexical, syntactic or semantic error in a fault tree file"""

    def __init__(self, message: str, line: int = None, column: int = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ConfigError(FuzzTreeError, ValueError):
    """Invalid configuration value"""


class DimensionError(FuzzTreeError, ValueError):
    """Vector length does not match the number of basic events"""


class NotABasicEventError(FuzzTreeError, ValueError):
    """A node id that must name a basic event names a gate or nothing"""
