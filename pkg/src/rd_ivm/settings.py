import os
import logging
from typing import Any, Dict, List, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

from .errors import InputFormatError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_ENV_VAR = "RD_IVM_LOG"

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config")


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging from RD_IVM_LOG (a local .env file is honoured)"""
    load_dotenv()
    level_name = (level or os.getenv(LOG_ENV_VAR) or "WARNING").upper()
    numeric_level = logging.getLevelName(level_name)
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    logging.basicConfig(
        level=numeric_level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler()],
        force=True,
    )
    if level_name != logging.getLevelName(numeric_level):
        logger.warning(f"Unknown log level {level_name!r} in {LOG_ENV_VAR}, using WARNING")


class EngineSettings(BaseModel):
    """Runtime switches of the maintenance engine and the satisfaction oracle."""

    debug_hypotheses: bool = False
    enum_budget: int = Field(default=10**7, ge=1)
    incremental_closure: bool = False
    mask_orientation: Literal["base_first", "full_first"] = "base_first"


def find_config(filename: str) -> str:
    """Locate a packaged YAML file, falling back to a few working-directory paths"""
    config_path = os.path.join(CONFIG_DIR, filename)
    if os.path.exists(config_path):
        return config_path

    alternate_paths = [
        os.path.join("src", "rd_ivm", "config", filename),
        os.path.join("rd_ivm", "config", filename),
        os.path.join("config", filename),
        filename,
    ]
    for path in alternate_paths:
        if os.path.exists(path):
            return path
    return config_path


def load_yaml(path: str) -> Dict[str, Any]:
    logger.debug(f"Loading config from: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise InputFormatError(f"cannot read config: {e.strerror}", path)
    except yaml.YAMLError as e:
        raise InputFormatError(f"invalid YAML: {e}", path)
    if data is not None and not isinstance(data, dict):
        raise InputFormatError("expected a mapping at the top level", path)
    return data or {}


def load_engine_settings(path: Optional[str] = None, **overrides: Any) -> EngineSettings:
    """Read engine.yaml (or `path`) and apply non-None keyword overrides on top."""
    data = load_yaml(path or find_config("engine.yaml"))
    values = dict(data.get("engine", data))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return EngineSettings(**values)


def preset_names(data: Dict[str, Any]) -> List[str]:
    return sorted((data.get("presets") or {}).keys())
