"""View-dependent stream prioritization from 2D field-of-view geometry.

A viewer sees the room top-down.  Participants inside the main FOV cone are
the most important, those inside the wide FOV still matter, everyone else is
ignored.  Each participant carries a ring of inward-pointing cameras; the
cameras closest to the participant-to-viewer direction capture the face the
viewer actually sees, so they get the second-level boost.  The two levels
combine multiplicatively into a global priority and a class label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .adapt import StreamDescriptor

TWO_PI = 2.0 * math.pi
MAIN_FOV_DEFAULT = math.pi / 3  # 60 degrees
WIDE_FOV_DEFAULT = math.pi  # 180 degrees

# inclusive-boundary headroom: a camera exactly on the cone edge still counts
_ANGLE_EPS = 1e-12

__all__ = [
    "TWO_PI",
    "MAIN_FOV_DEFAULT",
    "WIDE_FOV_DEFAULT",
    "Coverage",
    "PriorityClass",
    "PriorityTriple",
    "ViewerState",
    "CameraMount",
    "Participant",
    "wrap_angle",
    "first_level",
    "participant_normal",
    "second_level",
    "global_priority",
    "classify_scene",
]


def wrap_angle(angle: float) -> float:
    """Map any angle to (-pi, pi]."""
    a = math.fmod(angle + math.pi, TWO_PI)
    if a <= 0.0:
        a += TWO_PI
    return a - math.pi


class Coverage(Enum):
    """Coarse visibility level of a participant or camera."""

    MAIN = "main"
    WIDE = "wide"
    EXCLUDED = "excluded"


class PriorityClass(Enum):
    """Combined (first-level, second-level) class; value = (first, second) is-main."""

    C11 = (False, False)
    C12 = (False, True)
    C21 = (True, False)
    C22 = (True, True)

    @property
    def first_is_main(self) -> bool:
        return self.value[0]

    @property
    def second_is_main(self) -> bool:
        return self.value[1]

    @property
    def rank(self) -> int:
        """0 low (C11), 1 medium (C12/C21), 2 high (C22)."""
        return int(self.value[0]) + int(self.value[1])


@dataclass(frozen=True)
class PriorityTriple:
    """Level weights (p0, p1, p2): p0 for the low levels, p1/p2 for main hits."""

    p0: float = 1.0
    p1: float = 2.0
    p2: float = 2.0

    def __post_init__(self) -> None:
        if self.p0 != 1.0:
            raise ValueError("p0 is the normalization anchor and must be 1")
        if self.p1 < self.p0 or self.p2 < self.p0:
            raise ValueError("p1 and p2 must be at least p0")

    @property
    def label(self) -> str:
        return f"({self.p0:g},{self.p1:g},{self.p2:g})"


@dataclass(frozen=True)
class ViewerState:
    """Receiver pose plus the two FOV cone widths (full angles, radians)."""

    x: float
    y: float
    heading: float
    main_fov: float = MAIN_FOV_DEFAULT
    wide_fov: float = WIDE_FOV_DEFAULT

    def __post_init__(self) -> None:
        if not (0.0 < self.main_fov <= self.wide_fov <= TWO_PI):
            raise ValueError("need 0 < main_fov <= wide_fov <= 2*pi")


@dataclass(frozen=True)
class CameraMount:
    """A camera on the participant's ring, optical axis pointing inward.

    ``ring_angle`` is measured from the participant's heading, so the ring
    turns with the participant.  ``full_bandwidth`` is the capture bitrate
    the camera produces at full frame rate.
    """

    camera_id: int
    ring_angle: float
    full_bandwidth: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "ring_angle", self.ring_angle % TWO_PI)
        if self.full_bandwidth <= 0:
            raise ValueError("full_bandwidth must be positive")


@dataclass(frozen=True)
class Participant:
    """One remote site: a person at a position with a ring of cameras."""

    id: int
    x: float
    y: float
    heading: float
    cameras: tuple[CameraMount, ...] = ()

    def __post_init__(self) -> None:
        angles = [c.ring_angle for c in self.cameras]
        if len(set(angles)) != len(angles):
            raise ValueError("camera ring angles must be distinct")


def _bearing(from_x: float, from_y: float, to_x: float, to_y: float) -> float:
    dx = to_x - from_x
    dy = to_y - from_y
    if math.hypot(dx, dy) < 1e-12:
        raise ValueError("coincident positions leave the direction undefined")
    return math.atan2(dy, dx)


def first_level(viewer: ViewerState, participant: Participant) -> Coverage:
    """Classify a participant against the viewer's FOV cones."""
    bearing = _bearing(viewer.x, viewer.y, participant.x, participant.y)
    theta = abs(wrap_angle(bearing - viewer.heading))
    if theta <= viewer.main_fov / 2.0 + _ANGLE_EPS:
        return Coverage.MAIN
    if theta <= viewer.wide_fov / 2.0 + _ANGLE_EPS:
        return Coverage.WIDE
    return Coverage.EXCLUDED


def participant_normal(viewer: ViewerState, participant: Participant) -> tuple[float, float]:
    """Unit vector from the participant toward the viewer."""
    dx = viewer.x - participant.x
    dy = viewer.y - participant.y
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        raise ValueError("coincident positions leave the direction undefined")
    return (dx / norm, dy / norm)


def second_level(
    normal: tuple[float, float],
    camera: CameraMount,
    participant: Participant,
    main_half: float = MAIN_FOV_DEFAULT / 2.0,
    wide_half: float = WIDE_FOV_DEFAULT / 2.0,
) -> Coverage:
    """Classify a camera by its angle to the participant's viewer-facing normal."""
    camera_dir = participant.heading + camera.ring_angle
    phi = abs(wrap_angle(camera_dir - math.atan2(normal[1], normal[0])))
    if phi <= main_half + _ANGLE_EPS:
        return Coverage.MAIN
    if phi <= wide_half + _ANGLE_EPS:
        return Coverage.WIDE
    return Coverage.EXCLUDED


def global_priority(
    first: Coverage, second: Coverage, triple: PriorityTriple
) -> tuple[PriorityClass, float]:
    """Combine the two coverage levels into (class, numeric priority)."""
    if first is Coverage.EXCLUDED or second is Coverage.EXCLUDED:
        raise ValueError("excluded streams carry no priority")
    f1 = triple.p1 if first is Coverage.MAIN else triple.p0
    f2 = triple.p2 if second is Coverage.MAIN else triple.p0
    cls = PriorityClass((first is Coverage.MAIN, second is Coverage.MAIN))
    return cls, f1 * f2


def classify_scene(
    viewer: ViewerState,
    participants: Sequence[Participant],
    triple: PriorityTriple,
) -> list[StreamDescriptor]:
    """Emit one prioritized descriptor per visible camera stream.

    Participants outside the wide FOV and cameras on the far half of their
    ring contribute nothing.
    """
    out: list[StreamDescriptor] = []
    for part in participants:
        fl = first_level(viewer, part)
        if fl is Coverage.EXCLUDED:
            continue
        normal = participant_normal(viewer, part)
        for cam in part.cameras:
            sl = second_level(
                normal, cam, part, viewer.main_fov / 2.0, viewer.wide_fov / 2.0
            )
            if sl is Coverage.EXCLUDED:
                continue
            cls, pr = global_priority(fl, sl, triple)
            out.append(
                StreamDescriptor(
                    site_id=part.id,
                    camera_id=cam.camera_id,
                    full_bandwidth=cam.full_bandwidth,
                    global_priority=pr,
                    priority_class=cls.name,
                )
            )
    return out
