import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maf.core import (
    DepthMap,
    FlowField,
    decode_rle,
    encode_depth,
    encode_flow,
    encode_rle,
    parse_depth,
    parse_flow,
    read_depth,
    read_flow,
    write_depth,
    write_flow,
)
from maf.errors import (
    ArtifactMissing,
    BadHeader,
    BadMagic,
    NonPositiveDims,
    RunSumMismatch,
    TrailingData,
    TruncatedFile,
)

MAGIC = struct.pack("<f", 202021.25)


def flo_bytes(w, h, values):
    return MAGIC + struct.pack("<ii", w, h) + struct.pack(f"<{len(values)}f", *values)


class TestFlow:
    def test_minimal_file(self, tmp_path):
        p = tmp_path / "a.flo"
        p.write_bytes(flo_bytes(1, 1, [3.0, 4.0]))
        flow = read_flow(p)
        assert (flow.width, flow.height) == (1, 1)
        assert flow.fx.tolist() == [[3.0]]
        assert flow.fy.tolist() == [[4.0]]
        assert flow.valid.tolist() == [[True]]

    def test_row_major_interleaved(self):
        flow = parse_flow(flo_bytes(2, 1, [1, 2, 3, 4]))
        assert flow.fx.tolist() == [[1.0, 3.0]]
        assert flow.fy.tolist() == [[2.0, 4.0]]

    def test_bad_magic(self):
        data = struct.pack("<f", 0.0) + struct.pack("<ii", 1, 1) + struct.pack("<2f", 3, 4)
        with pytest.raises(BadMagic):
            parse_flow(data)

    @pytest.mark.parametrize("w,h", [(0, 1), (1, 0), (-2, 3)])
    def test_non_positive_dims(self, w, h):
        with pytest.raises(NonPositiveDims):
            parse_flow(MAGIC + struct.pack("<ii", w, h))

    @pytest.mark.parametrize("cut", [0, 2, 4, 8, 12, 15])
    def test_truncated(self, cut):
        data = flo_bytes(1, 1, [3.0, 4.0])[:cut]
        with pytest.raises(TruncatedFile):
            parse_flow(data)

    def test_trailing_bytes_rejected(self):
        with pytest.raises(TrailingData):
            parse_flow(flo_bytes(1, 1, [3.0, 4.0]) + b"\0")

    def test_unknown_flow_marked_invalid(self):
        flow = parse_flow(flo_bytes(3, 1, [1e10, 0.0, 0.0, -2e9, 1.0, 1.0]))
        assert flow.valid.tolist() == [[False, False, True]]

    def test_invalid_pixels_get_sentinel_on_write(self):
        flow = FlowField(np.ones((1, 2)), np.ones((1, 2)), np.array([[True, False]]))
        back = parse_flow(encode_flow(flow))
        assert back.valid.tolist() == [[True, False]]
        assert back.fx[0, 1] > 1e9

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactMissing) as err:
            read_flow(tmp_path / "nope.flo")
        assert "nope.flo" in str(err.value)

    def test_round_trip_8x8(self, tmp_path):
        rng = np.random.default_rng(0)
        flow = FlowField(rng.normal(size=(8, 8)), rng.normal(size=(8, 8)))
        p = tmp_path / "f.flo"
        write_flow(p, flow)
        first = p.read_bytes()
        write_flow(p, read_flow(p))
        assert p.read_bytes() == first
        assert np.array_equal(read_flow(p).fx, flow.fx.astype(np.float32))


class TestDepth:
    def test_minimal(self):
        d = parse_depth(b"Pf\n1 1\n-1.0\n" + struct.pack("<f", 2.5))
        assert d.z.tolist() == [[2.5]]
        assert d.valid.tolist() == [[True]]

    def test_negative_sample_is_invalid_not_error(self):
        d = parse_depth(b"Pf\n2 1\n-1.0\n" + struct.pack("<2f", -1.0, 3.0))
        assert d.valid.tolist() == [[False, True]]

    def test_big_endian_and_bottom_up_rows(self):
        # positive scale means big-endian; the first stored row is the bottom one
        d = parse_depth(b"Pf\n1 2\n1.0\n" + struct.pack(">2f", 1.0, 2.0))
        assert d.z.tolist() == [[2.0], [1.0]]

    @pytest.mark.parametrize(
        "data",
        [
            b"PF\n1 1\n-1.0\n" + b"\0" * 12,
            b"P5\n1 1\n-1.0\n" + b"\0" * 4,
            b"Pf\n1\n-1.0\n" + b"\0" * 4,
            b"Pf\n0 1\n-1.0\n",
            b"Pf\n1 1\nabc\n" + b"\0" * 4,
            b"Pf\n1 1\n0.0\n" + b"\0" * 4,
            b"Pf\n1 1",
        ],
    )
    def test_bad_header(self, data):
        with pytest.raises(BadHeader):
            parse_depth(data)

    def test_truncated(self):
        with pytest.raises(TruncatedFile):
            parse_depth(b"Pf\n2 2\n-1.0\n" + b"\0" * 12)

    def test_round_trip_8x8(self, tmp_path):
        rng = np.random.default_rng(1)
        depth = DepthMap(rng.uniform(0.5, 20, size=(8, 8)))
        p = tmp_path / "d.pfm"
        write_depth(p, depth)
        first = p.read_bytes()
        write_depth(p, read_depth(p))
        assert p.read_bytes() == first

    def test_masked_positive_depth_written_invalid(self):
        d = DepthMap(np.full((1, 2), 3.0), np.array([[False, True]]))
        assert parse_depth(encode_depth(d)).valid.tolist() == [[False, True]]


class TestRle:
    def test_all_background(self):
        assert not decode_rle([4], 2, 2).any()

    def test_all_foreground(self):
        assert decode_rle([0, 4], 2, 2).all()

    def test_column_major(self):
        # 2 rows x 3 cols; first column background, second column foreground
        mask = decode_rle([2, 2, 2], 3, 2)
        assert mask.tolist() == [[False, True, False], [False, True, False]]
        assert encode_rle(mask) == [2, 2, 2]

    def test_leading_foreground_gets_empty_background_run(self):
        assert encode_rle(np.array([[True, False]])) == [0, 1, 1]

    @pytest.mark.parametrize("runs", [[3], [1, 4], [2, -1, 3]])
    def test_run_sum_mismatch(self, runs):
        with pytest.raises(RunSumMismatch):
            decode_rle(runs, 2, 2)

    def test_round_trip_random_masks(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            mask = rng.random((16, 16)) < rng.random()
            runs = encode_rle(mask)
            assert sum(runs) == 256
            assert np.array_equal(decode_rle(runs, 16, 16), mask)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=1, max_size=12), st.integers(1, 6))
    def test_decode_encode_identity(self, raw, h):
        total = sum(raw)
        if total == 0 or total % h:
            return
        runs = encode_rle(decode_rle(raw, total // h, h))
        assert np.array_equal(decode_rle(runs, total // h, h), decode_rle(raw, total // h, h))
        # canonical form: no empty runs except possibly the first
        assert all(r > 0 for r in runs[1:])
