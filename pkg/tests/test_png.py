import io

import numpy as np
from PIL import Image

from skeltex.png import decode_png, encode_png, read_png, write_atomic, write_png


def test_pillow_reads_our_png(rng):
    pixels = rng.integers(0, 256, (13, 21, 3), dtype=np.uint8)
    data = encode_png(pixels)
    with Image.open(io.BytesIO(data)) as im:
        assert im.mode == "RGB" and im.size == (21, 13)
        assert im.info.get("interlace", 0) == 0
        assert np.array_equal(np.asarray(im), pixels)


def test_round_trip(tmp_path, rng):
    pixels = rng.integers(0, 256, (8, 5, 3), dtype=np.uint8)
    write_png(tmp_path / "a.png", pixels)
    assert np.array_equal(read_png(tmp_path / "a.png"), pixels)


def test_decodes_foreign_png(rng):
    pixels = rng.integers(0, 256, (6, 7, 3), dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(pixels).save(buf, format="PNG", optimize=True)
    assert np.array_equal(decode_png(buf.getvalue()), pixels)


def test_deterministic_bytes():
    pixels = np.arange(4 * 4 * 3, dtype=np.uint8).reshape(4, 4, 3)
    assert encode_png(pixels) == encode_png(pixels.copy())


def test_atomic_write_leaves_no_temp(tmp_path):
    write_atomic(tmp_path / "x.bin", b"abc")
    write_atomic(tmp_path / "x.bin", b"def")
    assert [p.name for p in tmp_path.iterdir()] == ["x.bin"]
    assert (tmp_path / "x.bin").read_bytes() == b"def"
