from .demo import demo_identities, handle_demo_handshake
from .keysize import handle_keysize_table
from .misc import handle_version
from .run import handle_run

__all__ = [
    "demo_identities",
    "handle_demo_handshake",
    "handle_keysize_table",
    "handle_run",
    "handle_version",
]
