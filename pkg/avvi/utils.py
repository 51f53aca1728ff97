import json
import logging
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional

from joblib import Parallel, delayed

from avvi.config import AVVI_THREADS

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)

RATSTR_PATTERN = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def to_rational(value: Any) -> Fraction:

    if isinstance(value, bool):
        raise TypeError(f"Booleans are not rationals: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not RATSTR_PATTERN.match(value):
            raise ValueError(f"Not a rational literal: {value!r}")
        text = value.replace(" ", "")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ValueError(f"Zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"Cannot convert {type(value).__name__} to an exact rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def convert_rationals(obj):

    if isinstance(obj, Fraction):
        return format_rational(obj)
    elif isinstance(obj, dict):
        return {str(key): convert_rationals(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [convert_rationals(item) for item in obj]
    elif isinstance(obj, (set, frozenset)):
        return [convert_rationals(item) for item in sorted(obj)]
    elif hasattr(obj, "to_dict"):
        return convert_rationals(obj.to_dict())
    else:
        return obj


def canonical_json(obj) -> str:
    return json.dumps(convert_rationals(obj), sort_keys=True, separators=(",", ":")) + "\n"


def atomic_write_text(path, text: str) -> Path:

    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent or "."))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.info(f"Wrote {path}")
    return path


def parallel_map(func: Callable, items: Iterable, n_jobs: Optional[int] = None) -> List[Any]:

    items = list(items)
    n_jobs = min(n_jobs or AVVI_THREADS, max(len(items), 1))
    if n_jobs <= 1:
        return [func(item) for item in items]
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(func)(item) for item in items)
