"""Exception hierarchy shared across the engine.

DataError subclasses map to CLI exit code 2, TransportError to 3.
"""


class RolecraftError(Exception):
    pass


class DataError(RolecraftError):
    """Bad input data or configuration."""


class FrameIngestError(DataError):
    pass


class CorpusParseError(DataError):
    pass


class ConfigError(DataError):
    pass


class ContractError(RolecraftError):
    """A cross-module contract was violated (lengths, alignment, invalid distributions)."""


class RoleUndefinedForSense(RolecraftError, LookupError):
    """A core role has no description under the chosen sense; callers must handle."""


class TransportError(RolecraftError):
    """External scorer is unreachable, died, or timed out."""


class ProtocolError(TransportError):
    """External scorer answered, but the payload violates protocol v1."""
