import os
import tempfile
from pathlib import Path
from typing import Union


def write_atomically(path: Union[str, Path], payload: Union[str, bytes]) -> Path:
    """Write a file by writing a sibling temporary file and renaming it.

    Args:
        path: Destination file.
        payload: Text or bytes to write.

    Returns:
        Path: The destination path.

    Raises:
        OSError: If the directory cannot be written.
    """
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(payload, bytes) else "w"

    fd, tmp_name = tempfile.mkstemp(
        dir=destination.parent, prefix=f".{destination.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(payload)
        os.replace(tmp_name, destination)
    except BaseException:
        tmp_path = Path(tmp_name)
        if tmp_path.exists():
            tmp_path.unlink()
        raise

    return destination
