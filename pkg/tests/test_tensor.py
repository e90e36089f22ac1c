import io
import struct

import numpy as np
import pytest

from cropfold.errors import (
    DataRangeError,
    RawFormatError,
    RawIOError,
    TruncatedFileError,
    UnsupportedVersionError,
    ValidationError,
)
from cropfold.tensor import raw_file_size, read_raw, validate_image, write_raw

from conftest import rand_image


def make_raw(magic=b"CMTX", version=1, dims=(1, 1, 1), payload=(0.5,)):
    head = struct.pack("<4sBIII", magic, version, *dims)
    return head + np.asarray(payload, dtype="<f4").tobytes()


def test_write_single_zero_pixel():
    buf = io.BytesIO()
    n = write_raw(np.zeros((1, 1, 1), np.float32), buf)
    data = buf.getvalue()
    assert n == 21
    assert len(data) == 21
    assert data[-4:] == b"\x00\x00\x00\x00"


def test_write_3x2x2_is_65_bytes():
    buf = io.BytesIO()
    assert write_raw(rand_image(3, 2, 2), buf) == 65
    assert len(buf.getvalue()) == 65


def test_round_trip_bit_identical():
    tensor = rand_image(3, 224, 224, seed=5)
    buf = io.BytesIO()
    write_raw(tensor, buf)
    buf.seek(0)
    back = read_raw(buf)
    assert back.shape == tensor.shape
    assert back.dtype == np.float32
    assert back.tobytes() == tensor.tobytes()


def test_read_then_write_identity():
    blob = make_raw(dims=(2, 3, 4), payload=np.linspace(0, 1, 24))
    tensor = read_raw(io.BytesIO(blob))
    buf = io.BytesIO()
    write_raw(tensor, buf)
    assert buf.getvalue() == blob


def test_decode_simple_payload():
    tensor = read_raw(io.BytesIO(make_raw()))
    assert tensor.shape == (1, 1, 1)
    assert tensor[0, 0, 0] == np.float32(0.5)


def test_bad_magic_rejected():
    with pytest.raises(RawFormatError, match="magic"):
        read_raw(io.BytesIO(make_raw(magic=b"XXXX")))


def test_bad_version_rejected():
    with pytest.raises(UnsupportedVersionError, match="version 2"):
        read_raw(io.BytesIO(make_raw(version=2)))


def test_truncated_payload_names_lengths():
    blob = make_raw(dims=(3, 2, 2), payload=np.zeros(12))
    with pytest.raises(TruncatedFileError, match="expected 48 bytes, got 40"):
        read_raw(io.BytesIO(blob[:-8]))


def test_truncated_header():
    with pytest.raises(TruncatedFileError, match="header"):
        read_raw(io.BytesIO(b"CMTX\x01"))


def test_out_of_range_value_reports_index():
    blob = make_raw(dims=(1, 1, 3), payload=[0.5, 1.5, 0.0])
    with pytest.raises(DataRangeError, match="index 1"):
        read_raw(io.BytesIO(blob))


def test_non_finite_value_rejected():
    blob = make_raw(dims=(1, 1, 2), payload=[0.25, np.nan])
    with pytest.raises(DataRangeError, match="index 1"):
        read_raw(io.BytesIO(blob))


def test_zero_dim_rejected():
    with pytest.raises(RawFormatError, match="dims"):
        read_raw(io.BytesIO(make_raw(dims=(0, 1, 1), payload=[])))


@pytest.mark.parametrize("shape", [(1, 1, 1), (3, 2, 2), (2, 7, 5), (3, 64, 64)])
def test_file_size_pure_function_of_shape(shape):
    buf = io.BytesIO()
    write_raw(rand_image(*shape, seed=shape[2]), buf)
    assert len(buf.getvalue()) == raw_file_size(*shape)


def test_write_failure_reports_offset():
    class Broken(io.RawIOBase):
        def write(self, b):
            raise OSError("disk full")

    with pytest.raises(RawIOError, match="offset 0"):
        write_raw(rand_image(1, 2, 2), Broken())


def test_validate_image_rejects_bad_inputs():
    with pytest.raises(ValidationError, match="dtype"):
        validate_image(np.zeros((1, 2, 2), np.float64))
    with pytest.raises(ValidationError, match="3 dims"):
        validate_image(np.zeros((2, 2), np.float32))
    bad = np.zeros((1, 2, 2), np.float32)
    bad[0, 1, 1] = 1.5
    with pytest.raises(ValidationError, match="index 3"):
        validate_image(bad)
    nan = np.zeros((1, 1, 2), np.float32)
    nan[0, 0, 0] = np.nan
    with pytest.raises(ValidationError, match="non-finite"):
        validate_image(nan)
