from typing import Optional


class SimulatorError(Exception):
    """Base class for every error raised by the simulator."""


class InputError(SimulatorError, ValueError):
    """The caller supplied data that violates a documented precondition."""


class NumericalError(SimulatorError, ArithmeticError):
    """A computation produced a result that breaks a numerical guarantee."""


class NonSquareError(InputError):
    pass


class NegativeEntryError(InputError):
    pass


class ZeroColumnError(InputError):
    pass


class NotStochasticError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class ShapeMismatchError(InputError):
    pass


class IndexOutOfRangeError(InputError):
    pass


class NotPerfectSquareError(InputError):
    pass


class ZeroNormError(InputError):
    pass


class EmptyPipelineError(InputError):
    pass


class HeterogeneousBatchError(InputError):
    pass


class WeightsNotNormalizedError(InputError):
    pass


class NotOrthonormalError(InputError):
    pass


class BatchSizeError(InputError):
    pass


class CapExceededError(InputError):
    pass


class InsufficientSizesError(InputError):
    pass


class FileFormatError(InputError):
    pass


class PipelineSyntaxError(InputError):
    """
    Malformed pipeline text. `offset` is the byte offset in the UTF-8 encoded
    input where parsing failed.
    """

    def __init__(self, message: str, offset: int, text: Optional[str] = None):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} (at byte {offset})")


class NotNormalizedError(NumericalError):
    pass


class StochasticityError(NumericalError):
    pass


class NoConvergenceError(NumericalError):
    pass
