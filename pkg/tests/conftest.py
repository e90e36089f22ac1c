import numpy as np
import pytest
from PIL import Image


def rand_image(c: int, h: int, w: int, seed: int = 0) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    return gen.random((c, h, w)).astype(np.float32)


@pytest.fixture
def tiny_dataset(tmp_path):
    """Three small PNG sources under <tmp>/src, deterministic content."""
    root = tmp_path / "src"
    root.mkdir()
    gen = np.random.Generator(np.random.Philox(key=np.uint64(99)))
    sizes = [(120, 160), (96, 96), (150, 100)]
    for i, (h, w) in enumerate(sizes):
        arr = (gen.random((h, w, 3)) * 255).astype(np.uint8)
        Image.fromarray(arr, mode="RGB").save(root / f"img_{i}.png")
    return root
