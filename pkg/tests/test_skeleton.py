import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from skeltex.skeleton import (NUM_JOINTS, BodyFrame, SkeletonDataError, SkeletonParseError, SkeletonSequence,
                              format_skeleton, parse_skeleton_file, parse_skeleton_text, write_skeleton_file)

from conftest import NTU_FIXTURE


def _joint_lines(value="0 0 0", n=NUM_JOINTS):
    return [value] * n


def test_single_zero_frame():
    text = "\n".join(["1", "1", "42"] + _joint_lines()) + "\n"
    seq = parse_skeleton_text(text)
    assert seq.T == 1
    assert len(seq.frames[0]) == 1
    assert seq.frames[0][0].body_id == "42"
    assert np.array_equal(seq.frames[0][0].joints, np.zeros((25, 3)))


def test_two_frames_two_bodies():
    frame = ["2", "7"] + _joint_lines("1 2 3") + ["9"] + _joint_lines("4 5 6")
    seq = parse_skeleton_text("\n".join(["2"] + frame + frame))
    assert seq.T == 2
    assert [[b.body_id for b in f] for f in seq.frames] == [["7", "9"], ["7", "9"]]
    assert seq.frames[1][1].joints[0].tolist() == [4, 5, 6]


def test_extra_fields_and_joint_count_line_are_accepted():
    text = "\n".join(["1", "1", "123 0 1 1 1 1 0 0.1 0.2 2", "25"] + _joint_lines("1 2 3 9 9 9 9 0 0 0 1 2"))
    seq = parse_skeleton_text(text)
    assert seq.frames[0][0].body_id == "123"
    assert np.all(seq.frames[0][0].joints == [1, 2, 3])


def test_ntu_layout_fixture():
    seq = parse_skeleton_file(NTU_FIXTURE)
    assert seq.T == 3
    assert seq.source_id == NTU_FIXTURE.stem
    assert seq.bodies_per_frame() == {1: 1, 2: 2}
    assert seq.body_ids() == ["72057594037931101", "72057594037931102"]
    assert all(np.isfinite(b.joints).all() for f in seq.frames for b in f)


def test_zero_body_frames_are_kept():
    text = "\n".join(["2", "0", "1", "5"] + _joint_lines())
    seq = parse_skeleton_text(text)
    assert seq.empty_frames() == [0]
    assert seq.T == 2


@pytest.mark.parametrize("n_joints", [24, 26])
def test_wrong_declared_joint_count_is_located(n_joints):
    text = "\n".join(["1", "1", "5 0 0", str(n_joints)] + _joint_lines(n=n_joints))
    with pytest.raises(SkeletonParseError) as err:
        parse_skeleton_text(text)
    assert err.value.line == 4
    assert "expected 25" in str(err.value)


def test_short_body_is_located():
    # second body starts after only 24 joint lines of the first
    lines = ["1", "2", "5"] + _joint_lines(n=24) + ["6"] + _joint_lines()
    with pytest.raises(SkeletonParseError) as err:
        parse_skeleton_text("\n".join(lines))
    assert err.value.line is not None


def test_truncated_file_names_line():
    text = "\n".join(["2", "1", "5"] + _joint_lines())
    with pytest.raises(SkeletonParseError, match="end of file") as err:
        parse_skeleton_text(text)
    assert err.value.line == 29


def test_bad_header():
    with pytest.raises(SkeletonParseError) as err:
        parse_skeleton_text("abc\n")
    assert err.value.line == 1


def test_nan_coordinate_names_frame_and_joint():
    joints = _joint_lines()
    joints[4] = "0 nan 0"
    text = "\n".join(["2", "1", "5"] + _joint_lines() + ["1", "5"] + joints)
    with pytest.raises(SkeletonDataError) as err:
        parse_skeleton_text(text)
    assert (err.value.frame, err.value.joint) == (1, 4)


def test_trailing_data_rejected():
    text = "\n".join(["1", "1", "5"] + _joint_lines() + ["1"])
    with pytest.raises(SkeletonParseError, match="trailing"):
        parse_skeleton_text(text)


def test_body_frame_requires_25_joints():
    with pytest.raises(ValueError):
        BodyFrame("1", np.zeros((24, 3)))


coords = arrays(np.float64, (NUM_JOINTS, 3),
                elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False, allow_subnormal=True))
body_ids = st.text("0123456789abcdefXYZ_", min_size=1, max_size=12)


@st.composite
def sequences(draw):
    T = draw(st.integers(1, 3))
    frames = []
    for _ in range(T):
        n = draw(st.integers(0, 3))
        frames.append([BodyFrame(draw(body_ids), draw(coords)) for _ in range(n)])
    return SkeletonSequence(frames, "roundtrip")


@settings(max_examples=60, deadline=None)
@given(sequences())
def test_round_trip_identity(seq):
    # oracle: write then re-parse must reproduce every bit
    again = parse_skeleton_text(format_skeleton(seq), source_id="roundtrip")
    assert again == seq
    for f1, f2 in zip(seq.frames, again.frames):
        for b1, b2 in zip(f1, f2):
            assert b1.joints.tobytes() == b2.joints.tobytes()


def test_round_trip_through_file(tmp_path):
    seq = parse_skeleton_file(NTU_FIXTURE)
    path = tmp_path / f"{seq.source_id}.skeleton"
    write_skeleton_file(seq, path)
    assert parse_skeleton_file(path) == seq
