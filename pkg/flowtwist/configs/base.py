import logging
import os
import threading
from pathlib import Path
from typing import Any, ClassVar, Dict, Literal, Optional

import yaml
from pydantic import AliasChoices, Field, field_validator
from pydantic import model_validator
from pydantic_settings import BaseSettings as PydanticBaseSettings, SettingsConfigDict

from flowtwist.models.types.constants import DEFAULT_MAX_LEN, DEFAULT_WITNESS_CAP
from flowtwist.models.types.enums import EngineKind, Orientation

GeneratorCType = Literal["c", "c_broken"]

logger = logging.getLogger(__name__)


class CustomBaseConfig(PydanticBaseSettings):
    """
    自定义配置基类：
    1. 支持从 YAML 文件加载配置（目录下所有 yaml 按文件名合并）
    2. 环境变量可覆盖文件中的配置项
    优先级：环境变量 > 配置文件 > 类默认值
    """

    # 配置类静态字段（需子类覆盖）
    config_key: ClassVar[Optional[str]] = None
    config_dir: ClassVar[str] = "configs"
    _config_cache: ClassVar[Dict[Path, dict]] = {}
    _cache_lock: ClassVar[threading.Lock] = threading.Lock()  # 线程安全锁

    @classmethod
    def get_project_root(cls) -> Path:
        """
        获取项目根目录
        优先级：PROJECT_ROOT环境变量 > 工作目录(CWD)
        """
        env_root = os.getenv("PROJECT_ROOT")
        if env_root:
            root_path = Path(env_root).resolve()
            if root_path.is_dir():
                logger.debug(f"通过环境变量获取项目根: {root_path}")
                return root_path
            raise NotADirectoryError(f"PROJECT_ROOT={env_root} 不是有效目录")
        return Path(os.getcwd()).resolve()

    @classmethod
    def get_config_dir(cls) -> Path:
        """配置目录：FLOWTWIST_CONFIG_DIR 环境变量 > <项目根>/configs"""
        env_dir = os.getenv("FLOWTWIST_CONFIG_DIR")
        if env_dir:
            return Path(env_dir).resolve()
        return (cls.get_project_root() / cls.config_dir).resolve()

    @classmethod
    def clear_cache(cls) -> None:
        with cls._cache_lock:
            cls._config_cache.clear()

    @staticmethod
    def merge_yaml(base_yaml: dict, config_yaml: dict) -> dict:
        merged = base_yaml.copy()
        for key, value in config_yaml.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = CustomBaseConfig.merge_yaml(merged[key], value)
            else:
                merged[key] = value
        return merged

    @model_validator(mode="before")
    @classmethod
    def load_configs_from_dir(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        try:
            config_dir = cls.get_config_dir()

            # 线程安全的缓存加载
            with cls._cache_lock:
                if config_dir not in cls._config_cache:
                    cls._config_cache[config_dir] = cls._load_and_merge_configs(config_dir)
                file_config = cls._config_cache[config_dir]

            config_key = cls.config_key or cls.__name__.lower()
            config_section = file_config.get(config_key, {}) or {}

            # 合并优先级：环境变量/显式参数(values) > 配置文件(config_section)
            return cls.merge_yaml(config_section, dict(values))
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"加载配置失败: {e}", exc_info=True)
            return values

    @classmethod
    def _load_and_merge_configs(cls, config_dir: Path) -> dict:
        """加载并合并目录下所有YAML配置文件"""
        merged: dict = {}
        if not config_dir.exists():
            logger.warning(f"配置目录不存在，使用默认值: {config_dir}")
            return merged
        if not config_dir.is_dir():
            logger.warning(f"指定路径不是目录: {config_dir}")
            return merged

        # 按文件名排序加载（保证加载顺序）
        config_files = sorted([f for f in config_dir.iterdir() if f.suffix in (".yaml", ".yml")], key=lambda x: x.name)
        for config_file in config_files:
            try:
                with open(config_file, "r", encoding="utf-8") as f:
                    file_config = yaml.safe_load(f) or {}
                merged = cls.merge_yaml(merged, file_config)
                logger.debug(f"成功加载配置文件: {config_file}")
            except yaml.YAMLError as e:
                logger.warning(f"解析YAML文件失败 {config_file}: {e}")
            except PermissionError as e:
                logger.warning(f"无权限读取配置文件 {config_file}: {e}")
        return merged

    model_config = SettingsConfigDict(
        extra="ignore",
        env_prefix="FLOWTWIST_",
        env_nested_delimiter="__",  # 双下划线表示嵌套字段，例如 FLOWTWIST_VERIFY__MAX_LEN
        case_sensitive=False,
    )


class VerifyConfig(CustomBaseConfig):
    config_key = "verify"
    max_len: int = Field(DEFAULT_MAX_LEN, ge=1, le=16)
    engine: EngineKind = Field(EngineKind.RULE_TABLE)
    witness_cap: int = Field(DEFAULT_WITNESS_CAP, ge=1)
    threads: int = Field(1, ge=1, validation_alias=AliasChoices("FLOWTWIST_THREADS", "FLOWTWIST_VERIFY__THREADS"))
    generator_c: GeneratorCType = Field("c")

    model_config = SettingsConfigDict(env_prefix="FLOWTWIST_VERIFY__", populate_by_name=True)


class RenderConfig(CustomBaseConfig):
    config_key = "render"
    glyph_scale: int = Field(40, gt=0, le=1000)
    row_height: int = Field(24, gt=0, le=1000)
    orientation: Orientation = Field(Orientation.ROWS)
    show_discontinuities: bool = Field(True)

    model_config = SettingsConfigDict(env_prefix="FLOWTWIST_RENDER__")


class LoggingConfig(CustomBaseConfig):
    config_key = "logging"
    path: Optional[str] = Field(None, min_length=1)
    level: str = Field("WARNING")
    format: str = Field("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    interval: int = Field(1, gt=0)
    backup_count: int = Field(7, gt=0)

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        allowed = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in allowed:
            raise ValueError(f"日志级别仅支持 {allowed}，当前值: {v}")
        return v.upper()

    model_config = SettingsConfigDict(env_prefix="FLOWTWIST_LOGGING__")


class BaseConfig:
    """
    BaseConfig 聚合校验、绘图与日志三个配置段，命令行通过它统一读取配置。
    """

    def __init__(self) -> None:
        self.project_root: Path = CustomBaseConfig.get_project_root()

        # 关系校验：最大词长、引擎、见证上限、并行度、c 生成元替换
        self.verify = VerifyConfig()

        # 绘图：字形比例、行高、方向、是否画灰色断点
        self.render = RenderConfig()

        # 日志：级别、格式、可选的轮转文件
        self.logging = LoggingConfig()
