from .commands import cli
