"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map
failures without a lookup table: 2 missing input, 3 invalid parameter,
4 signal contract violation, 1 anything else.
"""


class SrEnhanceError(Exception):
    exit_code = 1


class NotFound(SrEnhanceError, FileNotFoundError):
    exit_code = 2


class InvalidParameter(SrEnhanceError, ValueError):
    exit_code = 3


class SignalContractError(SrEnhanceError, ValueError):
    exit_code = 4


# audio-io
class UnsupportedFormat(SrEnhanceError, ValueError):
    pass


class CorruptHeader(SrEnhanceError, ValueError):
    pass


class SampleRateMismatch(InvalidParameter):
    pass


class NoiseTooShort(SignalContractError):
    pass


class SilentInput(SignalContractError):
    pass


# stft
class InvalidLength(InvalidParameter):
    pass


class SignalTooShort(SignalContractError):
    pass


class ColaViolation(InvalidParameter):
    pass


class IndexOutOfRange(SrEnhanceError, IndexError):
    pass


# classifier
class NegativeMagnitude(InvalidParameter):
    pass


class ZeroNoiseEstimate(SignalContractError):
    pass


class BinCountMismatch(InvalidParameter):
    pass


# tracker
class EmptyInit(SignalContractError):
    pass


class UninitializedState(SrEnhanceError, RuntimeError):
    pass


# metrics
class LengthMismatch(SignalContractError):
    pass


class AllFramesSilent(SignalContractError):
    pass


class SingularAutocorrelation(SignalContractError):
    pass


# viz
class EmptyMatrix(SignalContractError):
    pass
