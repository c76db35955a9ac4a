"""공용 픽스처: 기준 예제 행렬, 난수 생성기, 입력 파일 작성 도우미"""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from partitions import Partition


@pytest.fixture
def counterexample() -> np.ndarray:
    # 등분할이지만 11, −15를 놓치는 4×4 행렬
    return np.array(
        [
            [10.0, -1.0, -1.0, -4.0],
            [-1.0, 10.0, -1.0, -4.0],
            [6.0, 6.0, -14.0, 1.0],
            [6.0, 6.0, 1.0, -14.0],
        ]
    )


@pytest.fixture
def counterexample_partition() -> Partition:
    return Partition.from_cells([[1, 2], [3, 4]])


@pytest.fixture
def m3_matrix() -> np.ndarray:
    return np.array([[1.0, -4.0, -4.0], [4.0, 9.0, 4.0], [4.0, 4.0, 9.0]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], str]:
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
