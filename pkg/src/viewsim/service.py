"""Session server exposing the simulator over HTTP + WebSocket.

Each session owns one evolving room.  A tick runs the fixed pipeline
mobility -> facing -> classify -> adapt -> metrics and publishes an
immutable FrameState snapshot; parameter patches are queued and applied
atomically at the next tick boundary.  Sessions live in memory only; a
replay export (config + seed) is enough to reproduce a run exactly.

All wire angles are degrees; internal math is radians.
"""

from __future__ import annotations

import asyncio
import math
import uuid
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .adapt import SQRT2, InfeasibleBudget, ReductionLadder, build_ladder, canonical_order
from .experiments import ALGORITHMS
from .priority import PriorityClass, PriorityTriple, ViewerState, classify_scene, first_level
from .world import MobilityConfig, Room, apply_facing, make_room, step_mobility

__all__ = ["create_app", "app"]


# ---------------------------------------------------------------------------
# wire models


class MobilityModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    p_stay: float = Field(0.3, ge=0)
    p_walk: float = Field(0.5, ge=0)
    p_turn: float = Field(0.2, ge=0)
    step_length: float = Field(0.15, ge=0)
    turn_step_deg: float = Field(15.0, ge=0)
    tick_seconds: float = Field(0.1, gt=0)

    def to_config(self) -> MobilityConfig:
        return MobilityConfig(
            mode_probabilities=(self.p_stay, self.p_walk, self.p_turn),
            step_length=self.step_length,
            turn_step=math.radians(self.turn_step_deg),
            tick=self.tick_seconds,
        )


class ViewerModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: float | None = None  # default: a quarter diameter behind center
    y: float = 0.0
    heading_deg: float = 0.0
    main_fov_deg: float = Field(60.0, gt=0)
    wide_fov_deg: float = Field(180.0, gt=0)

    def to_state(self, room_diameter: float) -> ViewerState:
        x = -room_diameter / 4.0 if self.x is None else self.x
        return ViewerState(
            x=x,
            y=self.y,
            heading=math.radians(self.heading_deg),
            main_fov=math.radians(self.main_fov_deg),
            wide_fov=math.radians(self.wide_fov_deg),
        )


class LadderModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    base: float = Field(SQRT2, gt=1)
    depth: int = Field(4, ge=1)


class CreateSessionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    seed: int = 0
    n_participants: int = Field(10, ge=0)
    cameras_per_site: int = Field(10, ge=1)
    room_diameter: float = Field(10.0, gt=0)
    placement: Literal["uniform", "pairs"] = "uniform"
    pair_distance: float = Field(1.0, gt=0)
    facing: Literal["centroid", "at_least_one", "random"] = "centroid"
    bandwidth_range: tuple[float, float] = (5.0, 15.0)
    viewer: ViewerModel = ViewerModel()
    mobility: MobilityModel = MobilityModel()
    ladder: LadderModel = LadderModel()
    triple: tuple[float, float, float] = (1.0, 2.0, 2.0)
    algorithm: Literal["compromise", "round_robin", "aggressive"] = "compromise"
    budget_mbps: float | None = Field(None, gt=0)
    budget_fraction: float | None = Field(None, gt=0, le=1)
    tick_rate: float = Field(10.0, ge=1, le=60)


class PatchSessionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    budget_mbps: float | None = Field(None, gt=0)
    algorithm: Literal["compromise", "round_robin", "aggressive"] | None = None
    facing: Literal["centroid", "at_least_one", "random"] | None = None
    triple: tuple[float, float, float] | None = None
    ladder: LadderModel | None = None
    tick_rate: float | None = Field(None, ge=1, le=60)
    viewer: dict | None = None  # partial update of ViewerModel fields
    mobility: dict | None = None  # partial update of MobilityModel fields


class StepModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int = Field(1, ge=0, le=10_000)


# ---------------------------------------------------------------------------
# session state


@dataclass
class Session:
    id: str
    seed: int
    rng: np.random.Generator
    room: Room
    mobility: MobilityConfig
    facing: str
    ladder: ReductionLadder
    triple: PriorityTriple
    algorithm: str
    budget: float
    tick_rate: float
    replay_config: dict
    tick: int = 0
    run_state: str = "paused"
    frame: dict = field(default_factory=dict)
    pending: list[PatchSessionModel] = field(default_factory=list)
    subscribers: set[asyncio.Queue] = field(default_factory=set)
    task: asyncio.Task | None = None


def _http_error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def _build_frame(session: Session) -> dict:
    """Classify the current room, adapt it, and snapshot everything."""
    viewer = session.room.viewer
    streams = classify_scene(viewer, session.room.participants, session.triple)
    participants_json = []
    for part in session.room.participants:
        participants_json.append(
            {
                "id": int(part.id),
                "x": float(part.x),
                "y": float(part.y),
                "heading_deg": math.degrees(part.heading),
                "first_level": first_level(viewer, part).value,
            }
        )

    infeasible = False
    if streams:
        priorities = np.array([d.global_priority for d in streams])
        bandwidths = np.array([d.full_bandwidth for d in streams])
        labels = [d.priority_class for d in streams]
        site = np.array([d.site_id for d in streams])
        cam = np.array([d.camera_id for d in streams])
        order = canonical_order(priorities, bandwidths, site, cam)
        solver = ALGORITHMS[session.algorithm]
        try:
            factors = solver(priorities, bandwidths, session.ladder.factors, session.budget, order)
        except InfeasibleBudget:
            infeasible = True
            factors = np.full(len(streams), session.ladder.floor)
        full_total = float(bandwidths.sum())
        adapted = bandwidths * factors
        quality_before = float((priorities * bandwidths).sum())
        quality_after = float((priorities * adapted).sum())
        per_class = {}
        labels_arr = np.array(labels)
        for cls in PriorityClass:
            mask = labels_arr == cls.name
            if not mask.any():
                continue
            before = float((priorities[mask] * bandwidths[mask]).sum())
            after = float((priorities[mask] * adapted[mask]).sum())
            per_class[cls.name] = after / before
        streams_json = [
            {
                "site": int(d.site_id),
                "camera": int(d.camera_id),
                "class": d.priority_class,
                "priority": float(d.global_priority),
                "full_mbps": float(d.full_bandwidth),
                "adapted_mbps": float(adapted[i]),
                "factor": float(factors[i]),
            }
            for i, d in enumerate(streams)
        ]
        totals = {
            "full_bandwidth_mbps": full_total,
            "budget_mbps": float(session.budget),
            "minimum_budget_mbps": full_total * session.ladder.floor,
            "total_bandwidth_mbps": float(adapted.sum()),
            "quality_before": quality_before,
            "total_quality": quality_after,
            "adaptation_ratio": quality_after / quality_before if quality_before else 1.0,
            "per_class_ratio": per_class,
        }
    else:
        streams_json = []
        totals = {
            "full_bandwidth_mbps": 0.0,
            "budget_mbps": float(session.budget),
            "minimum_budget_mbps": 0.0,
            "total_bandwidth_mbps": 0.0,
            "quality_before": 0.0,
            "total_quality": 0.0,
            "adaptation_ratio": 1.0,
            "per_class_ratio": {},
        }

    return {
        "tick": session.tick,
        "algorithm": session.algorithm,
        "infeasible": infeasible,
        "viewer": {
            "x": float(viewer.x),
            "y": float(viewer.y),
            "heading_deg": math.degrees(viewer.heading),
            "main_fov_deg": math.degrees(viewer.main_fov),
            "wide_fov_deg": math.degrees(viewer.wide_fov),
        },
        "participants": participants_json,
        "streams": streams_json,
        "totals": totals,
    }


def _apply_patches(session: Session) -> None:
    """Fold every queued patch into the session parameters, in arrival order."""
    for patch in session.pending:
        if patch.budget_mbps is not None:
            session.budget = patch.budget_mbps
        if patch.algorithm is not None:
            session.algorithm = patch.algorithm
        if patch.facing is not None:
            session.facing = patch.facing
        if patch.triple is not None:
            session.triple = PriorityTriple(*patch.triple)
        if patch.ladder is not None:
            session.ladder = build_ladder(patch.ladder.base, patch.ladder.depth)
        if patch.tick_rate is not None:
            session.tick_rate = patch.tick_rate
        if patch.viewer is not None:
            current = session.room.viewer
            fields = {
                "x": current.x,
                "y": current.y,
                "heading_deg": math.degrees(current.heading),
                "main_fov_deg": math.degrees(current.main_fov),
                "wide_fov_deg": math.degrees(current.wide_fov),
            }
            fields.update(patch.viewer)
            viewer = ViewerModel(**fields).to_state(session.room.diameter)
            session.room = Room(
                diameter=session.room.diameter,
                participants=session.room.participants,
                viewer=viewer,
                rng_seed=session.room.rng_seed,
            )
        if patch.mobility is not None:
            current_m = session.mobility
            fields = {
                "p_stay": current_m.mode_probabilities[0],
                "p_walk": current_m.mode_probabilities[1],
                "p_turn": current_m.mode_probabilities[2],
                "step_length": current_m.step_length,
                "turn_step_deg": math.degrees(current_m.turn_step),
                "tick_seconds": current_m.tick,
            }
            fields.update(patch.mobility)
            session.mobility = MobilityModel(**fields).to_config()
    session.pending.clear()


def _advance(session: Session) -> None:
    """One tick: apply patches, move, re-face, classify, adapt, snapshot."""
    _apply_patches(session)
    session.room = step_mobility(session.room, session.mobility, 1, session.rng)
    refaced = apply_facing(
        session.room.participants, session.room.viewer, session.facing, session.rng
    )
    session.room = Room(
        diameter=session.room.diameter,
        participants=tuple(refaced),
        viewer=session.room.viewer,
        rng_seed=session.room.rng_seed,
    )
    session.tick += 1
    session.frame = _build_frame(session)
    _broadcast(session)


def _broadcast(session: Session) -> None:
    for queue in list(session.subscribers):
        queue.put_nowait(session.frame)


async def _run_loop(session: Session) -> None:
    while session.run_state == "running":
        _advance(session)
        await asyncio.sleep(1.0 / session.tick_rate)


# ---------------------------------------------------------------------------
# application


def create_app() -> FastAPI:
    app = FastAPI(title="view-aware stream adaptation simulator")
    # the browser UI is served as static files from a separate origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise _http_error(404, "unknown_session", f"no session {session_id!r}")
        return session

    def params_view(session: Session) -> dict:
        viewer = session.room.viewer
        return {
            "session_id": session.id,
            "tick": session.tick,
            "run_state": session.run_state,
            "seed": session.seed,
            "algorithm": session.algorithm,
            "budget_mbps": float(session.budget),
            "tick_rate": float(session.tick_rate),
            "facing": session.facing,
            "triple": [session.triple.p0, session.triple.p1, session.triple.p2],
            "ladder": {"base": session.ladder.base, "depth": session.ladder.depth},
            "viewer": {
                "x": viewer.x,
                "y": viewer.y,
                "heading_deg": math.degrees(viewer.heading),
                "main_fov_deg": math.degrees(viewer.main_fov),
                "wide_fov_deg": math.degrees(viewer.wide_fov),
            },
            "mobility": {
                "p_stay": session.mobility.mode_probabilities[0],
                "p_walk": session.mobility.mode_probabilities[1],
                "p_turn": session.mobility.mode_probabilities[2],
                "step_length": session.mobility.step_length,
                "turn_step_deg": math.degrees(session.mobility.turn_step),
                "tick_seconds": session.mobility.tick,
            },
            "n_participants": len(session.room.participants),
            "room_diameter": session.room.diameter,
            "pending_patches": len(session.pending),
        }

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(config: CreateSessionModel):
        try:
            viewer = config.viewer.to_state(config.room_diameter)
            mobility = config.mobility.to_config()
            ladder = build_ladder(config.ladder.base, config.ladder.depth)
            triple = PriorityTriple(*config.triple)
            rng = np.random.default_rng(config.seed)
            room = make_room(
                config.n_participants,
                config.cameras_per_site,
                config.room_diameter,
                viewer,
                rng,
                placement=config.placement,
                pair_distance=config.pair_distance,
                facing=config.facing,
                bandwidth_range=config.bandwidth_range,
                rng_seed=config.seed,
            )
        except ValueError as exc:
            raise _http_error(422, "invalid_config", str(exc))
        if config.budget_mbps is not None:
            budget = config.budget_mbps
        else:
            full = sum(
                cam.full_bandwidth for part in room.participants for cam in part.cameras
            )
            budget = (config.budget_fraction or 0.5) * full if full else 1.0
        session = Session(
            id=uuid.uuid4().hex[:12],
            seed=config.seed,
            rng=rng,
            room=room,
            mobility=mobility,
            facing=config.facing,
            ladder=ladder,
            triple=triple,
            algorithm=config.algorithm,
            budget=float(budget),
            tick_rate=config.tick_rate,
            replay_config=config.model_dump(),
        )
        session.frame = _build_frame(session)
        sessions[session.id] = session
        return {"session_id": session.id, "frame": session.frame}

    @app.get("/sessions/{session_id}")
    async def get_params(session_id: str):
        return params_view(get_session(session_id))

    @app.patch("/sessions/{session_id}")
    async def patch_params(session_id: str, patch: PatchSessionModel):
        session = get_session(session_id)
        # dry-run the real apply path on a throwaway copy so a bad patch
        # (unknown algorithm, probabilities not summing to 1, ...) is rejected
        # here instead of blowing up at the next tick boundary
        probe = replace(session, pending=[*session.pending, patch], subscribers=set())
        try:
            _apply_patches(probe)
        except (ValueError, ValidationError) as exc:
            raise _http_error(422, "invalid_patch", str(exc))
        session.pending.append(patch)
        return {"applied_at_tick": session.tick + 1, "queued": len(session.pending)}

    @app.post("/sessions/{session_id}/step")
    async def step_session(session_id: str, body: StepModel | None = None):
        session = get_session(session_id)
        if session.run_state == "running":
            raise _http_error(409, "session_running", "pause before stepping manually")
        n = body.n if body is not None else 1
        for _ in range(n):
            _advance(session)
        return session.frame

    @app.post("/sessions/{session_id}/pause")
    async def pause_session(session_id: str):
        session = get_session(session_id)
        session.run_state = "paused"
        return params_view(session)

    @app.post("/sessions/{session_id}/resume")
    async def resume_session(session_id: str):
        session = get_session(session_id)
        if session.run_state != "running":
            session.run_state = "running"
            session.task = asyncio.create_task(_run_loop(session))
        return params_view(session)

    @app.get("/sessions/{session_id}/frame")
    async def get_frame(session_id: str):
        return get_session(session_id).frame

    @app.get("/sessions/{session_id}/replay")
    async def export_replay(session_id: str):
        session = get_session(session_id)
        return {"config": session.replay_config, "seed": session.seed, "tick": session.tick}

    @app.delete("/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        session = get_session(session_id)
        session.run_state = "paused"
        if session.task is not None:
            session.task.cancel()
        del sessions[session_id]

    @app.websocket("/sessions/{session_id}/stream")
    async def stream_frames(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.add(queue)
        try:
            await websocket.send_json(session.frame)
            while True:
                frame = await queue.get()
                await websocket.send_json(frame)
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.discard(queue)

    return app


app = create_app()
