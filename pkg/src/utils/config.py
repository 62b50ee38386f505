"""
設定とロギングのユーティリティ
"""
import logging
import os
from dataclasses import dataclass

from dotenv import find_dotenv, load_dotenv

DEFAULT_BUDGET = 10**7
DEFAULT_WORKERS = 1
DEFAULT_LOG_LEVEL = "WARNING"

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class Settings:
    """
    実行時設定

    コマンドラインフラグが常に優先され、ここでの値は既定値として使われる。
    """
    budget: int = DEFAULT_BUDGET
    workers: int = DEFAULT_WORKERS
    log_level: str = DEFAULT_LOG_LEVEL


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("環境変数 %s=%r は整数ではありません。既定値 %d を使用します。", name, raw, default)
        return default
    return value if value > 0 else default


def load_settings() -> Settings:
    """
    .env と環境変数から設定を読み込む

    Returns:
        Settings: 読み込んだ設定（未設定の項目は既定値）
    """
    # 環境変数の読み込み
    load_dotenv(find_dotenv(usecwd=True))

    return Settings(
        budget=_int_from_env("ZSP_BUDGET", DEFAULT_BUDGET),
        workers=_int_from_env("ZSP_WORKERS", DEFAULT_WORKERS),
        log_level=os.getenv("ZSP_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper(),
    )


def configure_logging(level: str = DEFAULT_LOG_LEVEL) -> None:
    """
    ルートロガーに stderr ハンドラを一つだけ設定する

    Args:
        level: ログレベル名（DEBUG, INFO, WARNING など）
    """
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
