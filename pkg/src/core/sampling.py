"""
Детерминированные выборки в единичном шаре B^n ⊂ C^n

Направления берутся из скремблированной последовательности Соболя в R^{2n},
переводятся в гауссовы координаты (ndtri) и нормируются на сферу.
"""
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from config.settings import config
from src.core.errors import InvalidInputError
from src.utils.icons import Icon
from src.utils.logger import get_logger

logger = get_logger(__name__)

_EDGE = 1e-12


def inner(a, b) -> np.ndarray:
    """Эрмитово скалярное произведение <a, b> = Σ a_j conj(b_j) по последней оси"""
    return np.sum(np.asarray(a) * np.conj(np.asarray(b)), axis=-1)


def sphere_directions(dim: int, count: int, seed: int, stream: int = 0) -> np.ndarray:
    """
    count точек на единичной сфере в C^dim

    Args:
        dim: Размерность n
        count: Число точек
        seed: Сид скремблирования
        stream: Номер независимого потока при одном сиде

    Returns:
        Массив count×dim комплексных единичных векторов
    """
    if count <= 0:
        return np.zeros((0, dim), dtype=complex)
    engine = qmc.Sobol(d=2 * dim, scramble=True, seed=np.random.default_rng([seed, stream]))
    power = max(int(np.ceil(np.log2(count))), 1)
    uniform = engine.random_base2(power)[:count]
    gaussian = ndtri(np.clip(uniform, _EDGE, 1 - _EDGE))
    vectors = gaussian[:, :dim] + 1j * gaussian[:, dim:]
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def tangent_vectors(points: np.ndarray, raw: np.ndarray) -> np.ndarray:
    """
    Единичные v с Re<z, v> = 0 для каждой точки z

    v <- v - Re<v,z>·z/||z||², затем нормировка; вырожденный случай
    заменяется на i·z/||z||.
    """
    norms_sq = np.sum(np.abs(points) ** 2, axis=1, keepdims=True)
    projection = np.real(inner(raw, points))[:, None]
    vectors = raw - projection * points / norms_sq
    lengths = np.linalg.norm(vectors, axis=1, keepdims=True)
    degenerate = lengths[:, 0] < 1e-8
    if np.any(degenerate):
        vectors[degenerate] = 1j * points[degenerate]
        lengths[degenerate] = np.linalg.norm(vectors[degenerate], axis=1, keepdims=True)
    vectors = vectors / lengths
    # Повторная проекция снимает погрешность первой
    vectors = vectors - np.real(inner(vectors, points))[:, None] * points / norms_sq
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class BallSample:
    """
    Выборка точек и касательных пар в B^n

    Attributes:
        dim: Размерность n
        radii: Радиусы сфер
        points: Точки (N×n), все на сферах радиусов radii
        point_radii: Радиус каждой точки
        tangent_points: Точки z касательных пар (M×n)
        tangent_vectors: Векторы v касательных пар, ||v|| = 1, Re<z,v> = 0
        seed: Сид
        per_sphere: Точек на сферу
    """
    dim: int
    radii: Tuple[float, ...]
    points: np.ndarray
    point_radii: np.ndarray
    tangent_points: np.ndarray
    tangent_vectors: np.ndarray
    seed: int
    per_sphere: int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def tangent_pairs(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.tangent_points, self.tangent_vectors))

    def scaled(self, r: float) -> "BallSample":
        """Та же выборка на радиусах r·R (касательные векторы не меняются)"""
        if not 0 < r <= 1:
            raise InvalidInputError(f"Масштаб должен быть в (0, 1], получено {r}")
        return replace(
            self,
            radii=tuple(r * rho for rho in self.radii),
            points=self.points * r,
            point_radii=self.point_radii * r,
            tangent_points=self.tangent_points * r,
        )

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "radii": list(self.radii),
            "per_sphere": self.per_sphere,
            "points": self.size,
            "tangent_pairs": int(self.tangent_points.shape[0]),
            "seed": self.seed,
        }


def make_sample(
    dim: int,
    radii: Optional[Sequence[float]] = None,
    per_sphere: Optional[int] = None,
    tangent_count: Optional[int] = None,
    seed: Optional[int] = None,
) -> BallSample:
    """
    Построить выборку в шаре

    Args:
        dim: Размерность n
        radii: Радиусы сфер из (0, 1) (по умолчанию DEFAULT_RADII)
        per_sphere: Точек на каждой сфере (>= 1)
        tangent_count: Касательных пар на каждой сфере
        seed: Сид

    Returns:
        BallSample (детерминирована по seed)

    Raises:
        InvalidInputError: Радиус вне (0, 1), per_sphere < 1, dim < 1
    """
    radii = tuple(float(r) for r in (radii if radii is not None else config.DEFAULT_RADII))
    per_sphere = config.PER_SPHERE if per_sphere is None else int(per_sphere)
    tangent_count = config.TANGENT_PER_SPHERE if tangent_count is None else int(tangent_count)
    seed = config.DEFAULT_SEED if seed is None else int(seed)

    if dim < 1:
        raise InvalidInputError(f"Размерность должна быть >= 1, получено {dim}")
    if per_sphere < 1:
        raise InvalidInputError(f"per_sphere должен быть >= 1, получено {per_sphere}")
    if tangent_count < 0:
        raise InvalidInputError(f"tangent_count не может быть отрицательным: {tangent_count}")
    if not radii or any(not 0 < r < 1 for r in radii):
        raise InvalidInputError(f"Радиусы должны лежать в (0, 1): {radii}")

    spheres = len(radii)
    directions = sphere_directions(dim, per_sphere * spheres, seed, stream=0)
    point_radii = np.repeat(np.array(radii), per_sphere)
    points = directions * point_radii[:, None]

    tangent_radii = np.repeat(np.array(radii), tangent_count)
    base = sphere_directions(dim, tangent_count * spheres, seed, stream=1)
    raw = sphere_directions(dim, tangent_count * spheres, seed, stream=2)
    tangent_points = base * tangent_radii[:, None]
    vectors = tangent_vectors(tangent_points, raw) if len(raw) else raw

    logger.debug(
        f"{Icon.SAMPLE} Выборка: n={dim}, сфер={spheres}, точек={len(points)}, пар={len(tangent_points)}, seed={seed}"
    )
    return BallSample(
        dim=dim,
        radii=radii,
        points=points,
        point_radii=point_radii,
        tangent_points=tangent_points,
        tangent_vectors=vectors,
        seed=seed,
        per_sphere=per_sphere,
    )
