"""Readers and writers for sparse-reconstruction text files.

Scene geometry comes in as COLMAP-style text files:

  cameras.txt    CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]
  images.txt     IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME
                 followed by one observation line per image (skipped)
  points3D.txt   POINT3D_ID X Y Z R G B ERROR (IMAGE_ID POINT2D_IDX)[]
  matches.txt    VIEW_A VIEW_B MATCH_COUNT

`#`-prefixed lines are comments. Extrinsics are world-to-camera; the camera
center is -R^T t.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum

from .errors import DanglingReference, DuplicateId, MalformedLine, SelfLoop


class CameraModel(Enum):
    SIMPLE_PINHOLE = "SIMPLE_PINHOLE"
    PINHOLE = "PINHOLE"
    SIMPLE_RADIAL = "SIMPLE_RADIAL"
    RADIAL = "RADIAL"
    OPENCV = "OPENCV"


# params arity and which params are focal lengths, per model
MODEL_ARITY = {
    CameraModel.SIMPLE_PINHOLE: 3,
    CameraModel.PINHOLE: 4,
    CameraModel.SIMPLE_RADIAL: 4,
    CameraModel.RADIAL: 5,
    CameraModel.OPENCV: 8,
}
_FOCAL_SLOTS = {
    CameraModel.SIMPLE_PINHOLE: (0,),
    CameraModel.PINHOLE: (0, 1),
    CameraModel.SIMPLE_RADIAL: (0,),
    CameraModel.RADIAL: (0,),
    CameraModel.OPENCV: (0, 1),
}


@dataclass(frozen=True)
class CameraIntrinsics:
    camera_id: int
    model: CameraModel
    width: int
    height: int
    params: tuple[float, ...]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"camera {self.camera_id}: nonpositive image size")
        arity = MODEL_ARITY[self.model]
        if len(self.params) != arity:
            raise ValueError(
                f"camera {self.camera_id}: model {self.model.value} needs "
                f"{arity} params, got {len(self.params)}"
            )
        for slot in _FOCAL_SLOTS[self.model]:
            if not self.params[slot] > 0:
                raise ValueError(f"camera {self.camera_id}: focal must be positive")


def rotation_matrix(q: tuple[float, float, float, float]) -> list[list[float]]:
    """3x3 world-to-camera rotation from a (qw, qx, qy, qz) quaternion."""
    w, x, y, z = q
    return [
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ]


def camera_center(
    q: tuple[float, float, float, float], t: tuple[float, float, float]
) -> tuple[float, float, float]:
    """Camera center in world coordinates, -R^T t."""
    r = rotation_matrix(q)
    return (
        -(r[0][0] * t[0] + r[1][0] * t[1] + r[2][0] * t[2]),
        -(r[0][1] * t[0] + r[1][1] * t[1] + r[2][1] * t[2]),
        -(r[0][2] * t[0] + r[1][2] * t[1] + r[2][2] * t[2]),
    )


@dataclass(frozen=True)
class PosedView:
    view_id: int
    camera_id: int
    rotation: tuple[float, float, float, float]
    translation: tuple[float, float, float]
    image_name: str
    position: tuple[float, float, float] = field(init=False, compare=False)

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.rotation))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"view {self.view_id}: quaternion norm {norm} not unit")
        object.__setattr__(
            self, "position", camera_center(self.rotation, self.translation)
        )

    def forward_axis(self) -> tuple[float, float, float]:
        """Viewing direction in world coordinates (third row of R)."""
        r = rotation_matrix(self.rotation)
        return (r[2][0], r[2][1], r[2][2])


@dataclass(frozen=True)
class MatchEdge:
    view_a: int
    view_b: int
    match_count: int

    def __post_init__(self):
        if self.view_a == self.view_b:
            raise SelfLoop(self.view_a)
        if self.view_a > self.view_b:
            raise ValueError("edge endpoints must satisfy view_a < view_b")
        if self.match_count < 0:
            raise ValueError("negative match count")


@dataclass(frozen=True)
class ScenePoint:
    point_id: int
    xyz: tuple[float, float, float]
    track: tuple[int, ...]


@dataclass
class SceneReconstruction:
    scene_id: str
    intrinsics: dict[int, CameraIntrinsics]
    views: dict[int, PosedView]
    edges: list[MatchEdge]
    points: list[ScenePoint] = field(default_factory=list)

    def validate(self) -> None:
        for view in self.views.values():
            if view.camera_id not in self.intrinsics:
                raise DanglingReference("camera", view.camera_id)
        for edge in self.edges:
            for vid in (edge.view_a, edge.view_b):
                if vid not in self.views:
                    raise DanglingReference("view", vid)
        seen = set()
        for edge in self.edges:
            key = (edge.view_a, edge.view_b)
            if key in seen:
                raise DuplicateId("edge", edge.view_a)
            seen.add(key)
        for point in self.points:
            for vid in point.track:
                if vid not in self.views:
                    raise DanglingReference("view", vid)

    def positions(self) -> dict[int, tuple[float, float, float]]:
        return {vid: view.position for vid, view in self.views.items()}

    def centroid(self) -> tuple[float, float, float]:
        if not self.points:
            raise ValueError("scene has no points; centroid undefined")
        n = len(self.points)
        sx = sum(p.xyz[0] for p in self.points)
        sy = sum(p.xyz[1] for p in self.points)
        sz = sum(p.xyz[2] for p in self.points)
        return (sx / n, sy / n, sz / n)


def _content_lines(path):
    """Yield (line_no, stripped_line) skipping comments and blank lines."""
    with open(path, "r") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield line_no, line


def parse_cameras(path: str) -> dict[int, CameraIntrinsics]:
    cameras: dict[int, CameraIntrinsics] = {}
    for line_no, line in _content_lines(path):
        toks = line.split()
        if len(toks) < 4:
            raise MalformedLine(line_no, "camera line needs id, model, width, height", path)
        try:
            camera_id = int(toks[0])
            model = CameraModel(toks[1])
            width, height = int(toks[2]), int(toks[3])
            params = tuple(float(t) for t in toks[4:])
        except (ValueError, KeyError) as exc:
            raise MalformedLine(line_no, f"bad camera line: {exc}", path) from exc
        if camera_id in cameras:
            raise DuplicateId("camera", camera_id)
        try:
            cameras[camera_id] = CameraIntrinsics(camera_id, model, width, height, params)
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc), path) from exc
    return cameras


def parse_images(path: str) -> dict[int, PosedView]:
    """Parse image poses; every pose line is followed by an observation line.

    The observation line (2D keypoints) may be empty and is not interpreted.
    """
    views: dict[int, PosedView] = {}
    expect_pose = True
    with open(path, "r") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if line.startswith("#"):
                continue
            if expect_pose:
                if not line:
                    continue
                toks = line.split()
                if len(toks) < 10:
                    raise MalformedLine(line_no, "pose line needs 10 fields", path)
                try:
                    view_id = int(toks[0])
                    q = tuple(float(t) for t in toks[1:5])
                    t = tuple(float(x) for x in toks[5:8])
                    camera_id = int(toks[8])
                    name = " ".join(toks[9:])
                except ValueError as exc:
                    raise MalformedLine(line_no, f"bad pose line: {exc}", path) from exc
                if view_id in views:
                    raise DuplicateId("view", view_id)
                try:
                    views[view_id] = PosedView(view_id, camera_id, q, t, name)
                except ValueError as exc:
                    raise MalformedLine(line_no, str(exc), path) from exc
                expect_pose = False
            else:
                # observation line; content ignored
                expect_pose = True
    return views


def parse_points(path: str) -> list[ScenePoint]:
    points: dict[int, ScenePoint] = {}
    for line_no, line in _content_lines(path):
        toks = line.split()
        if len(toks) < 8:
            raise MalformedLine(line_no, "point line needs at least 8 fields", path)
        if (len(toks) - 8) % 2 != 0:
            raise MalformedLine(line_no, "track must be (image_id, point2d_idx) pairs", path)
        try:
            point_id = int(toks[0])
            xyz = (float(toks[1]), float(toks[2]), float(toks[3]))
            track = tuple(int(toks[i]) for i in range(8, len(toks), 2))
        except ValueError as exc:
            raise MalformedLine(line_no, f"bad point line: {exc}", path) from exc
        if point_id in points:
            raise DuplicateId("point", point_id)
        points[point_id] = ScenePoint(point_id, xyz, track)
    return [points[pid] for pid in sorted(points)]


def parse_reconstruction(
    cameras_path: str,
    images_path: str,
    points_path: str | None = None,
    matches_path: str | None = None,
    scene_id: str | None = None,
) -> SceneReconstruction:
    if scene_id is None:
        scene_id = os.path.basename(os.path.dirname(os.path.abspath(cameras_path)))
    scene = SceneReconstruction(
        scene_id=scene_id,
        intrinsics=parse_cameras(cameras_path),
        views=parse_images(images_path),
        edges=parse_match_graph(matches_path) if matches_path else [],
        points=parse_points(points_path) if points_path else [],
    )
    scene.validate()
    return scene


def parse_match_graph(path: str) -> list[MatchEdge]:
    """Parse VIEW_A VIEW_B MATCH_COUNT lines.

    Endpoints are normalized to view_a < view_b; duplicate pairs merge by
    taking the maximum count.
    """
    merged: dict[tuple[int, int], int] = {}
    for line_no, line in _content_lines(path):
        toks = line.split()
        if len(toks) != 3:
            raise MalformedLine(line_no, "match line needs 3 fields", path)
        try:
            a, b, count = int(toks[0]), int(toks[1]), int(toks[2])
        except ValueError as exc:
            raise MalformedLine(line_no, f"bad match line: {exc}", path) from exc
        if a == b:
            raise SelfLoop(a)
        if count < 0:
            raise MalformedLine(line_no, "negative match count", path)
        key = (min(a, b), max(a, b))
        merged[key] = max(merged.get(key, 0), count)
    return [MatchEdge(a, b, merged[(a, b)]) for a, b in sorted(merged)]


def _fmt(x: float) -> str:
    # repr round-trips exactly through float()
    return repr(float(x))


def write_cameras(cameras: dict[int, CameraIntrinsics], path: str) -> None:
    with open(path, "w") as f:
        f.write("# CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n")
        for cid in sorted(cameras):
            cam = cameras[cid]
            params = " ".join(_fmt(p) for p in cam.params)
            f.write(f"{cid} {cam.model.value} {cam.width} {cam.height} {params}\n")


def write_images(views: dict[int, PosedView], path: str) -> None:
    with open(path, "w") as f:
        f.write("# IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n")
        for vid in sorted(views):
            v = views[vid]
            q = " ".join(_fmt(c) for c in v.rotation)
            t = " ".join(_fmt(c) for c in v.translation)
            f.write(f"{vid} {q} {t} {v.camera_id} {v.image_name}\n")
            f.write("\n")  # empty observation line


def write_points(points: list[ScenePoint], path: str) -> None:
    with open(path, "w") as f:
        f.write("# POINT3D_ID X Y Z R G B ERROR TRACK[]\n")
        for p in sorted(points, key=lambda p: p.point_id):
            xyz = " ".join(_fmt(c) for c in p.xyz)
            track = " ".join(f"{vid} 0" for vid in p.track)
            tail = f" {track}" if track else ""
            f.write(f"{p.point_id} {xyz} 0 0 0 0{tail}\n")


def write_match_graph(edges: list[MatchEdge], path: str) -> None:
    with open(path, "w") as f:
        f.write("# VIEW_A VIEW_B MATCH_COUNT\n")
        for e in sorted(edges, key=lambda e: (e.view_a, e.view_b)):
            f.write(f"{e.view_a} {e.view_b} {e.match_count}\n")


def write_reconstruction(scene: SceneReconstruction, directory: str) -> None:
    """Write cameras.txt, images.txt, points3D.txt and matches.txt."""
    os.makedirs(directory, exist_ok=True)
    write_cameras(scene.intrinsics, os.path.join(directory, "cameras.txt"))
    write_images(scene.views, os.path.join(directory, "images.txt"))
    write_points(scene.points, os.path.join(directory, "points3D.txt"))
    write_match_graph(scene.edges, os.path.join(directory, "matches.txt"))


def load_scene_dir(directory: str, matches_path: str | None = None) -> SceneReconstruction:
    """Load a scene from a directory laid out as written by write_reconstruction."""
    cameras = os.path.join(directory, "cameras.txt")
    images = os.path.join(directory, "images.txt")
    points = os.path.join(directory, "points3D.txt")
    if matches_path is None:
        candidate = os.path.join(directory, "matches.txt")
        matches_path = candidate if os.path.exists(candidate) else None
    return parse_reconstruction(
        cameras,
        images,
        points_path=points if os.path.exists(points) else None,
        matches_path=matches_path,
        scene_id=os.path.basename(os.path.abspath(directory)),
    )
