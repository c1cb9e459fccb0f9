"""External scorer process for the rolecraft wire protocol.

A small transformer encoder with three heads (sense, role presence, BIO
tagging) served over newline JSON, plus fine-tuning on the query datasets
exported by `rolecraft dump-queries`.
"""

from bridge.config import BridgeConfig
from bridge.errors import BridgeError

__all__ = ["BridgeConfig", "BridgeError"]
__version__ = "0.1.0"
