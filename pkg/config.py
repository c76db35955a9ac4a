#!/usr/bin/env python3
"""
equispec 설정
============
허용 오차 기본값, 차수 제한, 환경 변수 처리
"""

import logging
import os
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from errors import InvalidParams

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"

# 허용 오차 계수 (행렬 크기에 곱해서 절대 오차로 사용)
CLUSTER_FACTOR = 1e-6
RANK_FACTOR = 1e-10
EQUITABLE_FACTOR = 1e-8
SYMMETRY_FACTOR = 1e-12

# LAPACK geev/syevd 내부 QR 반복 한도와 같은 의미 (n당 sweep 수)
QR_SWEEPS_PER_ORDER = 100

CHAR_POLY_MAX_ORDER = 16
ENUMERATION_MAX_ORDER = 10

DEFAULT_MAX_SPLITS = 2
MAX_SPLITS_LIMIT = 3

SIGNIFICANT_DIGITS = 12

SEED_ENV_VAR = "EQUISPEC_SEED"
LOG_LEVEL_ENV_VAR = "EQUISPEC_LOG_LEVEL"


def infinity_norm(m: np.ndarray) -> float:
    """최대 절대 행합 ‖M‖∞"""
    if m.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(m), axis=1)))


class Tolerances(BaseModel):
    """
    분석 허용 오차 묶음

    운영 시 중요사항:
    - None 또는 0은 "모듈 기본값 사용"을 의미
    - 값이 주어지면 절대 오차로 그대로 사용 (행렬 크기와 무관)
    - frozen 모델이라 여러 스레드에서 공유해도 안전
    """

    model_config = ConfigDict(frozen=True)

    equitable: Optional[float] = Field(default=None, ge=0.0)
    cluster: Optional[float] = Field(default=None, ge=0.0)
    rank: Optional[float] = Field(default=None, ge=0.0)

    def equitable_for(self, m: np.ndarray) -> float:
        if self.equitable:
            return float(self.equitable)
        return EQUITABLE_FACTOR * max(1.0, infinity_norm(m))

    def cluster_for(self, spectral_radius: float) -> float:
        if self.cluster:
            return float(self.cluster)
        return CLUSTER_FACTOR * max(1.0, spectral_radius)

    def rank_for(self, largest_singular_value: float) -> float:
        if self.rank:
            return float(self.rank)
        return RANK_FACTOR * max(1.0, largest_singular_value)


DEFAULT_TOLERANCES = Tolerances()


def make_tolerances(
    equitable: Optional[float] = None, cluster: Optional[float] = None, rank: Optional[float] = None
) -> Tolerances:
    """Tolerances 생성, 음수 값은 InvalidParams"""
    try:
        return Tolerances(equitable=equitable, cluster=cluster, rank=rank)
    except ValidationError as e:
        raise InvalidParams(f"허용 오차는 0 이상이어야 함: {e.errors()[0]['msg']}") from e


def reserved_seed() -> Optional[int]:
    """
    EQUISPEC_SEED 환경 변수 읽기

    운영 시 중요사항:
    - 예약된 변수: 현재 결정적 경로에서는 사용하지 않음
    - 정수가 아니면 경고만 남기고 None 반환
    """
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"{SEED_ENV_VAR} 값이 정수가 아님: {raw!r}")
        return None


def log_level_from_env(default: int) -> int:
    raw = os.environ.get(LOG_LEVEL_ENV_VAR)
    if not raw:
        return default
    level = logging.getLevelName(raw.strip().upper())
    return level if isinstance(level, int) else default
