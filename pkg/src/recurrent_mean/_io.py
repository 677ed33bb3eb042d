import os
import tempfile

import numpy as np


def format_time(x) -> str:
    """Shortest positional decimal that round-trips to the same double."""
    return np.format_float_positional(float(x), unique=True, trim="-")


def format_decimal(x) -> str:
    """Estimate columns: 12 significant digits."""
    return format(float(x), ".12g")


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
