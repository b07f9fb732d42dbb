"""Exception hierarchy shared across the package."""


class OpseqError(Exception):
    """Base class for all package errors."""


class ConfigError(OpseqError):
    """Invalid configuration value: bad dimension, unknown option, malformed spec file."""


class DimensionError(OpseqError):
    """Array shapes inconsistent with the declared model dimensions."""


class DataError(OpseqError):
    """Input data violates a pipeline contract."""


class EmptyFileError(DataError):
    """Disassembly text contained no instruction lines."""


class UnknownOpcodeError(DataError):
    """Mnemonic not present in a closed vocabulary."""


class DegenerateTableError(DataError):
    """Result table cannot be standardized because all losses are equal."""


class EmptyConditionError(DataError):
    """Conditioning assignment matches no rows."""


class SupportExhaustedError(DataError):
    """No factor level meets the minimum support under the current conditioning."""


class ChecksumError(DataError):
    """Results file row failed checksum verification."""


class TrainingDivergedError(OpseqError):
    """Non-finite values encountered during training."""
