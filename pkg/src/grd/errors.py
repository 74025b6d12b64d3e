"""Exception types shared across the toolkit."""


class GrdError(Exception):
    """Base class for all toolkit errors."""


class AudioFormatError(GrdError):
    """A WAV file is structurally malformed (bad header, truncated chunk)."""


class UnsupportedAudioError(GrdError):
    """A WAV file uses an encoding this toolkit does not decode."""


class FeatureFileError(GrdError):
    """A feature or model file fails magic/version/length validation."""


class ProtocolError(GrdError):
    """A trial protocol file cannot be parsed."""


class ConfigError(GrdError):
    """A pipeline configuration file is invalid."""
