"""
Configuration utility functions.
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import tomli
from dotenv import load_dotenv
from pydantic import ValidationError

from models.errors import ConfigurationError
from models.schemas import ScenarioConfig, strip_value_error

_FIELD_PREFIX = re.compile(r"^([A-Za-z_][\w\[\]\.]*): (.*)$", re.DOTALL)
_TOML_POSITION = re.compile(r"line (\d+)")
_SECTION_HEADER = re.compile(r"^\s*\[(\[)?\s*([\w\-]+)\s*\]?\]\s*(#.*)?$")


def load_settings(env_file: Optional[str] = None) -> Dict[str, Any]:
    """Load runtime settings from environment variables (and a .env file)."""

    if env_file:
        load_dotenv(env_file)
    else:
        load_dotenv()

    return {
        "log_level": os.getenv("OWSIM_LOG_LEVEL", "INFO"),
        "log_file": os.getenv("OWSIM_LOG_FILE"),
        "output_dir": os.getenv("OWSIM_OUTPUT_DIR", "results"),
        "jobs": int(os.getenv("OWSIM_JOBS", "1")),
        "max_bits": int(os.getenv("OWSIM_MAX_BITS", "10000000")),
        "min_errors": int(os.getenv("OWSIM_MIN_ERRORS", "200")),
    }


def _read_toml(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "rb") as f:
        return tomli.load(f)


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Parse and validate a scenario file; raises ConfigurationError with every diagnostic."""
    problems = validate_config(path)
    if problems:
        raise ConfigurationError("\n".join(problems))
    return ScenarioConfig.model_validate(_read_toml(path))


def validate_config(path: Union[str, Path]) -> List[str]:
    """Return every violation in a scenario file as '<path>:<line>: <field>: <message>'."""

    text = Path(path).read_text(encoding="utf-8")
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        match = _TOML_POSITION.search(str(e))
        line = int(match.group(1)) if match else 1
        return [f"{path}:{line}: toml: {e}"]

    try:
        ScenarioConfig.model_validate(data)
    except ValidationError as e:
        lines = text.splitlines()
        problems = []
        for error in e.errors():
            loc, message = _split_location(error["loc"], strip_value_error(error["msg"]))
            problems.append(f"{path}:{_locate(lines, loc)}: {_format_location(loc)}: {message}")
        return problems
    return []


def _split_location(loc: Sequence[Union[str, int]], message: str):
    """Move a 'field: message' prefix raised by a model validator into the location."""
    loc = list(loc)
    match = _FIELD_PREFIX.match(message)
    if match:
        for part in re.split(r"[\.\[\]]+", match.group(1)):
            if part:
                loc.append(int(part) if part.isdigit() else part)
        message = match.group(2)
    return loc, message


def _format_location(loc: Sequence[Union[str, int]]) -> str:
    text = ""
    for part in loc:
        text += f"[{part}]" if isinstance(part, int) else (f".{part}" if text else str(part))
    return text or "scenario"


def _locate(lines: List[str], loc: Sequence[Union[str, int]]) -> int:
    """1-based line of the offending key, else of its section header, else 1."""
    if not loc:
        return 1
    section = str(loc[0])
    index = loc[1] if len(loc) > 1 and isinstance(loc[1], int) else None
    keys = [str(part) for part in loc[1:] if not isinstance(part, int)]

    header_line = None
    occurrence = -1
    current = None
    for number, raw in enumerate(lines, start=1):
        header = _SECTION_HEADER.match(raw)
        if header:
            current = header.group(2)
            if current == section:
                occurrence += 1
                if index is None or occurrence == index:
                    header_line = number
                    continue
            if header_line is not None:
                break
            continue
        if header_line is not None and current == section and keys:
            if re.match(rf"^\s*{re.escape(keys[0])}\s*=", raw):
                return number
    return header_line or 1


DEFAULT_SCENARIO = """\
# Scenario file for the optical OFDM / OFDM-IM simulator.
# See configs/schema.md for every key.

[scenario]
name = "se-ee"            # se-sweep | se-ee | ber-curve | selftest
seed = 0
output = "results"
jobs = 1

[modem]
scheme = "HYBRID-ACO"     # DCO | ACO | DCO-IM | ACO-IM | HYBRID-ACO | HYBRID-DCO
n = 32
l = 4
m1 = 4
m2 = 4
kappa = "auto"
alpha = [0, 4, 8, 12, 16]
data_rate_bps = 500e6

[channel]
kind = "los"              # los | ceiling-bounce
rms_delay_spread_s = 10e-9

[simulation]
target_ber = 1e-3
ebn0_db = [0.0, 4.0, 8.0, 12.0, 16.0, 20.0]

[[baseline]]
scheme = "ACO-IM"
m1 = 256
kappa = 8
"""


def create_default_config(config_path: str = "configs/default.toml") -> bool:
    """Create a default scenario file."""

    try:
        Path(config_path).parent.mkdir(parents=True, exist_ok=True)
        Path(config_path).write_text(DEFAULT_SCENARIO, encoding="utf-8")
        return True
    except OSError as e:
        print(f"Error creating config file: {e}")
        return False
