"""Exception hierarchy shared by every rd_ivm module.

Each error carries the process exit code the CLI reports for it: 1 for bad
input or a failed validation, 2 for a broken internal invariant.
"""

from typing import Any, Optional, Sequence, Tuple


class RDError(Exception):
    """Base class for all rd_ivm errors"""

    exit_code = 1


class RDSyntaxError(RDError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class NormalizationError(RDError):
    pass


class SafetyError(RDError):
    def __init__(self, symbol: str, disjunct: int, variable: int):
        self.symbol = symbol
        self.disjunct = disjunct
        self.variable = variable
        super().__init__(
            f"unsafe clause for '{symbol}': head variable V{variable} "
            f"does not occur in disjunct {disjunct}"
        )


class StratificationError(RDError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__(
            "program is not stratifiable, dependency cycle: "
            + " -> ".join(self.cycle + self.cycle[:1])
        )


class DeltaOverlapError(RDError):
    def __init__(self, symbol: str, tag: Any, edge: Tuple[str, str]):
        self.symbol = symbol
        self.tag = tag
        self.edge = edge
        super().__init__(
            f"update adds and deletes {edge[0]} -> {edge[1]} "
            f"for ({symbol}, {getattr(tag, 'value', tag)})"
        )


class InputFormatError(RDError):
    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class UpdateError(RDError):
    pass


class UnboundVariableError(RDError):
    exit_code = 2


class EnumerationBudgetError(RDError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"grounding enumeration needs {required} candidates, budget is {budget}"
        )


class HypothesisViolation(RDError):
    exit_code = 2

    def __init__(self, hypothesis: str, detail: str):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(f"{hypothesis} violated: {detail}")


class BenchmarkMismatch(RDError):
    exit_code = 2
