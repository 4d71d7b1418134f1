import random

import pytest

from sparseview.errors import (
    DanglingReference,
    DuplicateId,
    MalformedLine,
    SelfLoop,
)
from sparseview.recon_io import (
    CameraIntrinsics,
    CameraModel,
    MatchEdge,
    PosedView,
    camera_center,
    load_scene_dir,
    parse_cameras,
    parse_images,
    parse_match_graph,
    parse_points,
    parse_reconstruction,
    write_reconstruction,
)
from sparseview.synth import SynthKind, SynthSpec, gen_ring_scene


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestCameras:
    def test_pinhole_line(self, tmp_path):
        path = write(tmp_path, "cameras.txt", "1 PINHOLE 1024 768 1000 1000 512 384\n")
        cams = parse_cameras(path)
        cam = cams[1]
        assert cam.model is CameraModel.PINHOLE
        assert (cam.width, cam.height) == (1024, 768)
        assert cam.params == (1000.0, 1000.0, 512.0, 384.0)

    def test_comments_ignored(self, tmp_path):
        path = write(tmp_path, "c.txt", "# header\n1 SIMPLE_PINHOLE 640 480 500 320 240\n")
        assert len(parse_cameras(path)) == 1

    def test_wrong_arity_names_line(self, tmp_path):
        path = write(tmp_path, "c.txt", "# c\n1 PINHOLE 640 480 500 320 240\n")
        with pytest.raises(MalformedLine) as exc:
            parse_cameras(path)
        assert exc.value.line_no == 2

    def test_duplicate_camera(self, tmp_path):
        path = write(
            tmp_path,
            "c.txt",
            "1 SIMPLE_PINHOLE 640 480 500 320 240\n1 SIMPLE_PINHOLE 640 480 500 320 240\n",
        )
        with pytest.raises(DuplicateId):
            parse_cameras(path)

    def test_negative_focal_rejected(self, tmp_path):
        path = write(tmp_path, "c.txt", "1 SIMPLE_PINHOLE 640 480 -500 320 240\n")
        with pytest.raises(MalformedLine):
            parse_cameras(path)

    @pytest.mark.parametrize(
        "model,arity",
        [
            (CameraModel.SIMPLE_PINHOLE, 3),
            (CameraModel.PINHOLE, 4),
            (CameraModel.SIMPLE_RADIAL, 4),
            (CameraModel.RADIAL, 5),
            (CameraModel.OPENCV, 8),
        ],
    )
    def test_model_arities(self, model, arity):
        params = tuple([100.0, 100.0][: min(arity, 2)] + [0.5] * (arity - 2))
        cam = CameraIntrinsics(1, model, 10, 10, params)
        assert len(cam.params) == arity
        with pytest.raises(ValueError):
            CameraIntrinsics(1, model, 10, 10, params + (0.0,))


class TestImages:
    def test_identity_pose(self, tmp_path):
        path = write(tmp_path, "i.txt", "1 1 0 0 0 0 0 0 1 a.jpg\n\n")
        view = parse_images(path)[1]
        assert view.position == (0.0, 0.0, 0.0)

    def test_identity_rotation_translation(self, tmp_path):
        path = write(tmp_path, "i.txt", "1 1 0 0 0 1 2 3 1 a.jpg\n\n")
        view = parse_images(path)[1]
        assert view.position == (-1.0, -2.0, -3.0)

    def test_observation_line_skipped(self, tmp_path):
        text = "1 1 0 0 0 0 0 0 1 a.jpg\n1.0 2.0 7 3.0 4.0 9\n2 1 0 0 0 0 0 1 1 b.jpg\n\n"
        views = parse_images(write(tmp_path, "i.txt", text))
        assert sorted(views) == [1, 2]

    def test_bad_quaternion_norm(self, tmp_path):
        path = write(tmp_path, "i.txt", "1 2 0 0 0 0 0 0 1 a.jpg\n\n")
        with pytest.raises(MalformedLine) as exc:
            parse_images(path)
        assert exc.value.line_no == 1

    def test_duplicate_view(self, tmp_path):
        text = "1 1 0 0 0 0 0 0 1 a.jpg\n\n1 1 0 0 0 0 0 0 1 b.jpg\n\n"
        with pytest.raises(DuplicateId):
            parse_images(write(tmp_path, "i.txt", text))

    def test_camera_center_against_quaternion(self):
        # 90 degree rotation about +y: q = (cos45, 0, sin45, 0),
        # R = [[0,0,1],[0,1,0],[-1,0,0]], center = -R^T (1,0,0) = (0,0,-1)
        s = 2.0 ** -0.5
        center = camera_center((s, 0.0, s, 0.0), (1.0, 0.0, 0.0))
        assert center[0] == pytest.approx(0.0, abs=1e-12)
        assert center[1] == pytest.approx(0.0, abs=1e-12)
        assert center[2] == pytest.approx(-1.0, abs=1e-12)


class TestPoints:
    def test_track_parse(self, tmp_path):
        path = write(tmp_path, "p.txt", "7 1 2 3 255 0 0 0.5 1 0 2 4\n")
        pts = parse_points(path)
        assert pts[0].point_id == 7
        assert pts[0].xyz == (1.0, 2.0, 3.0)
        assert pts[0].track == (1, 2)

    def test_odd_track_rejected(self, tmp_path):
        path = write(tmp_path, "p.txt", "7 1 2 3 255 0 0 0.5 1 0 2\n")
        with pytest.raises(MalformedLine):
            parse_points(path)


class TestMatchGraph:
    def test_endpoint_normalization(self, tmp_path):
        edges = parse_match_graph(write(tmp_path, "m.txt", "3 1 120\n"))
        assert edges == [MatchEdge(1, 3, 120)]

    def test_duplicate_merge_max(self, tmp_path):
        edges = parse_match_graph(write(tmp_path, "m.txt", "1 2 50\n2 1 70\n"))
        assert edges == [MatchEdge(1, 2, 70)]

    def test_self_loop(self, tmp_path):
        with pytest.raises(SelfLoop):
            parse_match_graph(write(tmp_path, "m.txt", "5 5 10\n"))

    def test_malformed_names_line(self, tmp_path):
        with pytest.raises(MalformedLine) as exc:
            parse_match_graph(write(tmp_path, "m.txt", "1 2 50\n1 2\n"))
        assert exc.value.line_no == 2


class TestSceneValidation:
    def test_dangling_edge_endpoint(self, tmp_path):
        cams = write(tmp_path, "cameras.txt", "1 SIMPLE_PINHOLE 640 480 500 320 240\n")
        imgs = write(tmp_path, "images.txt", "1 1 0 0 0 0 0 0 1 a.jpg\n\n")
        matches = write(tmp_path, "matches.txt", "1 2 80\n")
        with pytest.raises(DanglingReference):
            parse_reconstruction(cams, imgs, matches_path=matches)

    def test_dangling_camera(self, tmp_path):
        cams = write(tmp_path, "cameras.txt", "1 SIMPLE_PINHOLE 640 480 500 320 240\n")
        imgs = write(tmp_path, "images.txt", "1 1 0 0 0 0 0 0 9 a.jpg\n\n")
        with pytest.raises(DanglingReference):
            parse_reconstruction(cams, imgs)


class TestRoundTrip:
    def test_scene_round_trip_exact(self, tmp_path):
        spec = SynthSpec(
            kind=SynthKind.RING_OF_CLUSTERS, cluster_count=5, cluster_size=4,
            noise_sigma=0.3, seed=9,
        )
        scene = gen_ring_scene(spec)
        out = tmp_path / "scene"
        write_reconstruction(scene, str(out))
        back = load_scene_dir(str(out))
        assert sorted(back.views) == sorted(scene.views)
        for vid, view in scene.views.items():
            got = back.views[vid]
            assert got.camera_id == view.camera_id
            assert got.image_name == view.image_name
            for a, b in zip(got.rotation, view.rotation):
                assert a == pytest.approx(b, abs=1e-9)
            for a, b in zip(got.position, view.position):
                assert a == pytest.approx(b, abs=1e-9)
        assert back.edges == scene.edges
        assert back.intrinsics == scene.intrinsics
        assert [p.xyz for p in back.points] == [p.xyz for p in scene.points]
        assert [p.track for p in back.points] == [p.track for p in scene.points]

    def test_second_write_byte_identical(self, tmp_path):
        rng = random.Random(4)
        for trial in range(5):
            spec = SynthSpec(
                kind=SynthKind.RING_OF_CLUSTERS,
                cluster_count=rng.randint(2, 6),
                cluster_size=rng.randint(1, 5),
                noise_sigma=rng.random(),
                seed=rng.randint(0, 999),
            )
            scene = gen_ring_scene(spec)
            d1 = tmp_path / f"a{trial}"
            d2 = tmp_path / f"b{trial}"
            write_reconstruction(scene, str(d1))
            write_reconstruction(load_scene_dir(str(d1)), str(d2))
            for name in ("cameras.txt", "images.txt", "points3D.txt", "matches.txt"):
                assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_line_order_insensitive(self, tmp_path):
        spec = SynthSpec(kind=SynthKind.RING_OF_CLUSTERS, cluster_count=3, cluster_size=3, seed=2)
        scene = gen_ring_scene(spec)
        out = tmp_path / "scene"
        write_reconstruction(scene, str(out))

        rng = random.Random(0)
        # shuffle camera lines and pose/observation pairs
        cam_lines = [l for l in (out / "cameras.txt").read_text().splitlines() if not l.startswith("#")]
        rng.shuffle(cam_lines)
        (out / "cameras.txt").write_text("\n".join(cam_lines) + "\n")
        img_lines = [l for l in (out / "images.txt").read_text().splitlines() if not l.startswith("#")]
        pairs = [img_lines[i : i + 2] for i in range(0, len(img_lines), 2)]
        rng.shuffle(pairs)
        (out / "images.txt").write_text("\n".join(l for p in pairs for l in p) + "\n")
        match_lines = [l for l in (out / "matches.txt").read_text().splitlines() if not l.startswith("#")]
        rng.shuffle(match_lines)
        (out / "matches.txt").write_text("\n".join(match_lines) + "\n")

        back = load_scene_dir(str(out))
        assert back.views == scene.views
        assert back.edges == scene.edges
        assert back.intrinsics == scene.intrinsics


def test_posed_view_rejects_non_unit_quaternion():
    with pytest.raises(ValueError):
        PosedView(1, 1, (1.0, 1.0, 0.0, 0.0), (0.0, 0.0, 0.0), "a.jpg")
