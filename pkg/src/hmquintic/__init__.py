"""Point-counting and modularity verification toolkit for the resolved
Horrocks-Mumford quintic threefold at y = (2:-1:0:0:-1)."""

__version__ = "0.1.0"
