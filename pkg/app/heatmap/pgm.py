import numpy as np

from app.errors import ShapeMismatchError


def to_gray(grid: np.ndarray) -> np.ndarray:
    """Map [0, 1] values to 8-bit levels, rounding half up."""
    values = np.clip(np.asarray(grid, dtype=np.float64), 0.0, 1.0)
    return np.floor(values * 255.0 + 0.5).astype(np.uint8)


def encode_pgm(grid: np.ndarray) -> bytes:
    if np.ndim(grid) != 2:
        raise ShapeMismatchError(f"PGM export needs a 2-D grid, got shape {np.shape(grid)}")
    height, width = np.shape(grid)
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + to_gray(grid).tobytes(order="C")
