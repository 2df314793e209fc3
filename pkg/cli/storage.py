"""
Output file handling.
"""
import logging
import os
from typing import Union

from geometry.errors import OutputError

logger = logging.getLogger(__name__)


def write_output(path: str, data: Union[str, bytes]) -> str:
    """
    Write command output to a file, creating parent folders.

    Text is written as UTF-8 with LF line endings.

    Returns:
        Absolute path of the written file

    Raises:
        OutputError: the path cannot be created or written
    """
    target = os.path.realpath(path)
    try:
        folder = os.path.dirname(target)
        if folder and not os.path.exists(folder):
            os.makedirs(folder)
        if isinstance(data, bytes):
            with open(target, "wb") as handle:
                handle.write(data)
        else:
            with open(target, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(data)
    except OSError as e:
        logger.error(f"Cannot write {target}: {e}")
        raise OutputError(f"cannot write output file {path}: {e.strerror or e}")
    logger.info(f"Wrote {target}")
    return target
