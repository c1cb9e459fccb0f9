"""Error type for the bridge. Kept flat: every failure the CLI reports is
either a usage problem (argparse) or a BridgeError."""


class BridgeError(Exception):
    """Bad config, unreadable data or checkpoint, or an unservable request."""
