import csv
import io
import math

import orjson

from twrc.helper.exceptions import DomainError

SCHEMA_VERSION = 1


def json_dumps(data):
    """Fast JSON serialization using orjson."""
    return orjson.dumps(data, option=orjson.OPT_SERIALIZE_NUMPY).decode('utf-8')


def json_loads(data):
    """Fast JSON deserialization using orjson."""
    return orjson.loads(data)


def versioned(document: dict) -> dict:
    return {"schema": SCHEMA_VERSION, **document}


def csv_dumps(header, rows) -> str:
    """CSV text with a header row; floats use repr so reruns are byte-identical."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def parse_float(text, name="value") -> float:
    try:
        value = float(str(text).strip())
    except ValueError:
        raise DomainError(f"{name}: not a number: {text!r}")
    if math.isnan(value):
        raise DomainError(f"{name}: NaN is not allowed")
    return value


def parse_float_list(text, name="list") -> list:
    parts = [p for p in str(text).split(",") if p.strip()]
    if not parts:
        raise DomainError(f"{name}: empty list")
    return [parse_float(p, name) for p in parts]


def parse_tuple(text, name="tuple") -> tuple:
    values = parse_float_list(text, name)
    if len(values) != 4:
        raise DomainError(f"{name}: expected 4 comma-separated rates, got {len(values)}")
    return tuple(values)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def parse_power_range(text, name="power range") -> tuple:
    values = parse_float_list(text, name)
    if len(values) != 2:
        raise DomainError(f"{name}: expected low,high, got {len(values)} value(s)")
    return tuple(values)


def parse_seed(text, name="seed") -> int:
    try:
        seed = int(str(text).strip())
    except ValueError:
        raise DomainError(f"{name}: not an integer: {text!r}")
    if seed < 0:
        raise DomainError(f"{name}: must be >= 0, got {seed}")
    return seed
