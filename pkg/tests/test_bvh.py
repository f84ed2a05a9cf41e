"""BVH parser/writer against the hand-built fixture corpus."""

import numpy as np
import pytest

from dqmotion import bvh
from dqmotion.errors import (
    BadRateError,
    BvhSyntaxError,
    ChannelMismatchError,
    UnsupportedChannelError,
)

from conftest import fixture_corpus, malformed_corpus


class TestParseTwoJoint:
    """The fixture values below were transcribed from the file by hand."""

    def test_skeleton(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "two_joint.bvh")
        skeleton = clip.skeleton
        assert skeleton.names == ["hip", "knee"]
        assert skeleton.joints[0].parent is None
        assert skeleton.joints[1].parent == 0
        assert skeleton.joints[0].channels == (
            "Xposition", "Yposition", "Zposition", "Zrotation", "Yrotation", "Xrotation",
        )
        assert skeleton.joints[1].channels == ("Zrotation", "Yrotation", "Xrotation")
        assert skeleton.joints[1].rotation_order == "ZYX"
        assert np.allclose(skeleton.joints[1].offset, [0.0, -4.5, 0.0])
        assert skeleton.channel_count == 9

    def test_frames(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "two_joint.bvh")
        assert clip.frames.shape == (2, 9)
        assert np.allclose(
            clip.frames[0], [1.0, 2.0, 3.0, 10.0, 20.0, 30.0, -15.0, 0.0, 45.0]
        )
        assert np.allclose(
            clip.frames[1], [-1.5, 2.5, 0.0, 0.0, 80.0, 0.0, 5.0, -5.0, 60.0]
        )
        assert np.isclose(clip.frame_time, 0.00833333)
        assert np.isclose(clip.fps, 120.0, atol=1e-3)


class TestParseCorpus:
    @pytest.mark.parametrize("path", fixture_corpus(), ids=lambda p: p.name)
    def test_topological_order(self, path):
        skeleton = bvh.parse_file(path).skeleton
        for idx, joint in enumerate(skeleton.joints):
            if idx == 0:
                assert joint.parent is None
            else:
                assert joint.parent < idx

    def test_end_sites_retained(self, fixtures_dir):
        skeleton = bvh.parse_file(fixtures_dir / "gimbal_lock.bvh").skeleton
        ends = [j for j in skeleton.joints if j.is_end_site]
        assert len(ends) == 1
        assert ends[0].channels == ()
        assert np.allclose(ends[0].offset, [0.0, 0.8, 0.0])

    def test_whitespace_tolerance(self, fixtures_dir):
        # arm_chain.bvh mixes CRLF line endings, tabs and double spaces.
        clip = bvh.parse_file(fixtures_dir / "arm_chain.bvh")
        assert clip.skeleton.names[:3] == ["shoulder", "elbow", "wrist"]
        assert clip.frames.shape == (3, 12)
        assert np.allclose(clip.frames[2, 3:6], [0.7, 1.2, -0.15])

    def test_root_channel_order_honored(self, fixtures_dir):
        skeleton = bvh.parse_file(fixtures_dir / "arm_chain.bvh").skeleton
        assert skeleton.joints[0].channels == (
            "Zrotation", "Xrotation", "Yrotation", "Xposition", "Yposition", "Zposition",
        )
        assert skeleton.joints[0].rotation_order == "ZXY"


class TestParseErrors:
    def test_zero_frames(self, fixtures_dir):
        with pytest.raises(BvhSyntaxError) as info:
            bvh.parse_file(fixtures_dir / "malformed_frames0.bvh")
        assert "at least 1" in str(info.value)
        assert info.value.line == 8

    def test_unknown_channel(self, fixtures_dir):
        with pytest.raises(UnsupportedChannelError) as info:
            bvh.parse_file(fixtures_dir / "malformed_channel.bvh")
        assert "Wrotation" in str(info.value)

    def test_row_width(self, fixtures_dir):
        with pytest.raises(ChannelMismatchError) as info:
            bvh.parse_file(fixtures_dir / "malformed_rowwidth.bvh")
        assert info.value.line == 11  # the short second motion row

    def test_missing_hierarchy(self, fixtures_dir):
        with pytest.raises(BvhSyntaxError):
            bvh.parse_file(fixtures_dir / "malformed_nohierarchy.bvh")

    def test_truncated_motion(self, fixtures_dir):
        with pytest.raises(BvhSyntaxError):
            bvh.parse_file(fixtures_dir / "malformed_truncated.bvh")

    def test_line_numbers_are_anchored(self, fixtures_dir):
        for path in malformed_corpus():
            with pytest.raises(BvhSyntaxError) as info:
                bvh.parse_file(path)
            assert info.value.line >= 1
            assert f"line {info.value.line}" in str(info.value)

    def test_non_finite_channel_value(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n0 nan 0\n"
        )
        with pytest.raises(ChannelMismatchError) as info:
            bvh.parse(text)
        assert info.value.line == 10

    def test_position_channel_on_child(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n"
            " JOINT b\n {\n  OFFSET 1 0 0\n  CHANNELS 3 Xposition Yrotation Xrotation\n }\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n0 0 0 0 0 0\n"
        )
        with pytest.raises(BvhSyntaxError):
            bvh.parse(text)

    def test_second_root_rejected(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n}\n"
            "ROOT b\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n0 0 0\n"
        )
        with pytest.raises(BvhSyntaxError):
            bvh.parse(text)

    def test_trailing_rows_rejected(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n0 0 0\n1 1 1\n"
        )
        with pytest.raises(BvhSyntaxError):
            bvh.parse(text)


class TestEdgeCases:
    def test_channelless_joint_accepted(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n"
            " JOINT fixed\n {\n  OFFSET 1 0 0\n  CHANNELS 0\n }\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n10 20 30\n"
        )
        clip = bvh.parse(text)
        assert clip.skeleton.joints[1].channels == ()
        assert not clip.skeleton.joints[1].is_end_site
        assert clip.frames.shape == (1, 3)
        # Fixed joints survive the write path with an explicit CHANNELS 0.
        assert "CHANNELS 0" in bvh.write(clip)
        assert bvh.parse(bvh.write(clip)).skeleton == clip.skeleton

    def test_duplicate_channel_rejected(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Zrotation Xrotation\n}\n"
            "MOTION\nFrames: 1\nFrame Time: 0.04\n0 0 0\n"
        )
        with pytest.raises(BvhSyntaxError):
            bvh.parse(text)

    def test_rotation_only_root(self):
        text = (
            "HIERARCHY\nROOT a\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Yrotation Xrotation\n}\n"
            "MOTION\nFrames: 2\nFrame Time: 0.04\n10 20 30\n11 21 31\n"
        )
        clip = bvh.parse(text)
        assert clip.skeleton.channel_count == 3
        from dqmotion.kinematics import clip_to_local

        poses = clip_to_local(clip)
        assert np.allclose(poses[0].root_translation, np.zeros(3))


class TestWrite:
    @pytest.mark.parametrize("path", fixture_corpus(), ids=lambda p: p.name)
    def test_round_trip_fixed_point(self, path):
        clip = bvh.parse_file(path)
        text = bvh.write(clip)
        reparsed = bvh.parse(text)
        assert reparsed.skeleton == clip.skeleton
        assert np.max(np.abs(reparsed.frames - clip.frames)) < 1e-5
        assert abs(reparsed.frame_time - clip.frame_time) < 1e-5
        # A second write/parse cycle is byte-identical: a true fixed point.
        assert bvh.write(reparsed) == text

    def test_single_frame_clip_writes_one_row(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "two_joint.bvh")
        single = bvh.MotionClip(clip.skeleton, clip.frame_time, clip.frames[:1])
        text = bvh.write(single)
        motion = text.split("MOTION\n", 1)[1].splitlines()
        assert motion[0] == "Frames: 1"
        assert len(motion) == 3  # Frames, Frame Time, one data row

    def test_channel_order_verbatim(self, fixtures_dir):
        text = bvh.write(bvh.parse_file(fixtures_dir / "arm_chain.bvh"))
        assert "CHANNELS 6 Zrotation Xrotation Yrotation Xposition Yposition Zposition" in text

    def test_uses_lf_and_two_space_indent(self, fixtures_dir):
        text = bvh.write(bvh.parse_file(fixtures_dir / "two_joint.bvh"))
        assert "\r" not in text
        assert "\t" not in text
        assert "\n  JOINT knee\n" in text


class TestSubsample:
    def test_120_to_30_keeps_every_fourth(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "subsample_120fps.bvh")
        out = bvh.subsample(clip, 30.0)
        assert out.num_frames == 3
        assert np.allclose(out.frames, clip.frames[[0, 4, 8]])
        assert np.isclose(out.frame_time, clip.frame_time * 4)

    def test_identity_at_source_rate(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "two_joint.bvh")
        out = bvh.subsample(clip, clip.fps)
        assert np.array_equal(out.frames, clip.frames)
        assert out.frame_time == clip.frame_time

    def test_seven_frames_stride_four(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "subsample_120fps.bvh")
        seven = bvh.MotionClip(clip.skeleton, clip.frame_time, clip.frames[:7])
        out = bvh.subsample(seven, 30.0)
        assert out.num_frames == 2
        assert np.allclose(out.frames, clip.frames[[0, 4]])

    def test_bad_rate(self, fixtures_dir):
        clip = bvh.parse_file(fixtures_dir / "gimbal_lock.bvh")  # 30 fps
        with pytest.raises(BadRateError):
            bvh.subsample(clip, 60.0)
        with pytest.raises(BadRateError):
            bvh.subsample(clip, 0.0)
