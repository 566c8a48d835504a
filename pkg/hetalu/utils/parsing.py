import re
from typing import Dict, Optional, Tuple

from hetalu.models.system import POWER_LEVELS

PIN_OPERAND = re.compile(r'^[A-Za-z][A-Za-z0-9]*=(?:0[xX])?([0-9a-fA-F]+)$')
HEX_DIGITS = re.compile(r'^[0-9a-fA-F]+$')
CONFIG_TOKEN = re.compile(r'^([a-z-]+(?::\d+)?)(?:@(\d+))?$')


def parse_operand(token: str) -> int:
    """Parse a canonical operand: 0x-prefixed hex or plain decimal."""
    if token.lower().startswith("0x"):
        if not HEX_DIGITS.match(token[2:]):
            raise ValueError(f"not a hex number: {token!r}")
        return int(token[2:], 16)
    if not token.isdigit():
        raise ValueError(f"not a hex or decimal number: {token!r}")
    return int(token, 10)


def parse_pin_operand(token: str) -> int:
    """Parse a pin-style operand: <reg>=<hexval>."""
    match = PIN_OPERAND.match(token)
    if not match:
        raise ValueError(f"not a <reg>=<hexval> operand: {token!r}")
    return int(match.group(1), 16)


def parse_distribution(text: str) -> Dict[int, float]:
    """Parse 'bucket:weight,...' into a bucket -> weight map."""
    distribution = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        bucket, sep, weight = item.partition(":")
        if not sep:
            raise ValueError(f"distribution entry {item!r} is not bucket:weight")
        try:
            bucket_bits, value = int(bucket), float(weight)
        except ValueError:
            raise ValueError(f"distribution entry {item!r} is not bucket:weight")
        if bucket_bits in distribution:
            raise ValueError(f"bucket {bucket_bits} listed twice")
        distribution[bucket_bits] = value
    if not distribution:
        raise ValueError("empty distribution")
    return distribution


def parse_config_token(token: str) -> Tuple[str, Optional[int]]:
    """Split 'policy[@power_level]' as used by compare --configs."""
    match = CONFIG_TOKEN.match(token.strip())
    if not match:
        raise ValueError(f"config {token!r} is not <policy>[@<power_level>]")
    level = int(match.group(2)) if match.group(2) else None
    if level is not None and level not in POWER_LEVELS:
        raise ValueError(f"power level in {token!r} must be one of {POWER_LEVELS}")
    return match.group(1), level
