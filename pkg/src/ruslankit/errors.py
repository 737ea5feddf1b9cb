"""Exception vocabulary shared across the toolkit.

The CLI maps `RuslanKitError` subclasses to exit code 3 (data error); the
HTTP service maps them to 4xx responses.
"""


class RuslanKitError(Exception):
    """Base class for all toolkit errors."""


# --- text normalization ---

class OutOfRange(RuslanKitError):
    """Number magnitude beyond the supported wording range."""


class InvalidDate(RuslanKitError):
    """Day/month/year do not form a real calendar date."""


class BadLexicon(RuslanKitError):
    """Acronym lexicon file violates the format or content rules."""


class BadCharset(RuslanKitError):
    """Charset definition violates the 78-symbol contract."""


# --- phonemics ---

class NotNormalized(RuslanKitError):
    """Transcription input contains out-of-charset symbols."""


class EmptyCorpus(RuslanKitError):
    """Operation requires at least one non-empty utterance."""


# --- audio ---

class UnsupportedFormat(RuslanKitError):
    """WAV file is not mono 16-bit PCM."""


class CorruptFile(RuslanKitError):
    """File cannot be parsed as its declared format."""


class OutOfRangeSample(RuslanKitError):
    """Sample amplitude outside [-1, 1]; clipping is never silent."""


class EmptyAfterTrim(RuslanKitError):
    """The whole signal fell below the silence threshold."""


class DegenerateSignal(RuslanKitError):
    """Noise power is exactly zero; SNR undefined."""


# --- features ---

class SignalTooShort(RuslanKitError):
    """Signal shorter than one analysis window without centering."""


class InvalidConfig(RuslanKitError):
    """Analysis configuration violates its invariants."""


class InvalidBandRange(RuslanKitError):
    """Mel band frequency range is out of order or above Nyquist."""


class ShapeMismatch(RuslanKitError):
    """Operands do not have identical shapes."""


class NegativeLoss(RuslanKitError):
    """Loss terms must be nonnegative."""


# --- vocoder ---

class NegativeMagnitude(RuslanKitError):
    """Magnitude spectrogram entries must be >= 0."""


class ZeroTarget(RuslanKitError):
    """Spectral convergence undefined for an all-zero target."""


# --- corpus ---

class MalformedLine(RuslanKitError):
    """Manifest line does not parse as `id|path|text`."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateId(RuslanKitError):
    """Utterance id appears more than once in a manifest."""


class MissingAudio(RuslanKitError):
    """Manifest references an audio file that does not exist."""


class UnknownSymbol(RuslanKitError):
    """Text contains a symbol outside the charset."""


class IndexOutOfRange(RuslanKitError):
    """Integer id outside [0, charset size)."""


# --- neural primitives ---

class NonFiniteInput(RuslanKitError):
    """Input tensor contains NaN or infinity."""


class EmptyMemory(RuslanKitError):
    """Attention memory must contain at least one row."""


class UnknownOp(RuslanKitError):
    """Gradient check requested for an unregistered operation."""


# --- MOS service ---

class PoolInvalid(RuslanKitError):
    """Sample pool violates the survey composition contract."""


class UnknownSample(RuslanKitError):
    """Rating refers to a sample id not present in the pool."""


class ScoreOutOfRange(RuslanKitError):
    """MOS score must be an integer in 1..5."""
