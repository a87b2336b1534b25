"""HTTP annotation service.

Sessions live in memory, keyed by a generated id. Every mutating request
must carry the revision it was based on; a stale revision is rejected with
409 and the session is left untouched (optimistic concurrency). Mutations on
one session are serialized by a per-session lock; reads take snapshots.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import PlainTextResponse

from strumkit import dsp
from strumkit.annotation import (AnnotationSession, DeleteEvent, EventSource,
                                 InsertEvent, OverrideEvent, RecordingPlan,
                                 SetMotionOffset, SetStartTime,
                                 apply_session_edit, auto_annotate,
                                 export_annotations, session_to_dict)
from strumkit.audio import load_wav_bytes, resample
from strumkit.config import AppConfig
from strumkit.events import ChordSymbol, Direction
from strumkit.motion import differentiate_smoothed, motion_from_csv


@dataclass
class _StoredSession:
    session: AnnotationSession
    odf: dsp.OnsetCurve
    lock: threading.Lock = field(default_factory=threading.Lock)


def _state_payload(session_id: str, stored: _StoredSession) -> dict:
    payload = session_to_dict(stored.session)
    payload["id"] = session_id
    payload["unknown_direction_count"] = stored.session.unknown_direction_count
    payload["has_motion"] = stored.session.motion is not None
    return payload


def _envelope(times: np.ndarray, values: np.ndarray, from_s: float,
              to_s: float, points: int) -> dict:
    """Min/max envelope over `points` equal-width time buckets.

    Buckets without samples are dropped so the payload stays dense.
    """
    mask = (times >= from_s) & (times <= to_s)
    times, values = times[mask], values[mask]
    if len(times) <= points:
        return {"t": times.tolist(), "min": values.tolist(),
                "max": values.tolist()}
    edges = np.linspace(from_s, to_s, points + 1)
    bucket = np.clip(np.searchsorted(edges, times, side="right") - 1,
                     0, points - 1)
    t_out, lo_out, hi_out = [], [], []
    for b in np.unique(bucket):
        chunk = values[bucket == b]
        t_out.append(0.5 * (edges[b] + edges[b + 1]))
        lo_out.append(float(chunk.min()))
        hi_out.append(float(chunk.max()))
    return {"t": t_out, "min": lo_out, "max": hi_out}


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="strumkit annotation service")
    store: dict[str, _StoredSession] = {}
    store_lock = threading.Lock()

    def get_stored(session_id: str) -> _StoredSession:
        stored = store.get(session_id)
        if stored is None:
            raise HTTPException(404, f"unknown session: {session_id}")
        return stored

    def check_revision(stored: _StoredSession, revision: int) -> None:
        if revision != stored.session.revision:
            raise HTTPException(
                409, f"stale revision {revision}, "
                     f"current is {stored.session.revision}")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions")
    async def create_session(audio: UploadFile = File(...),
                             plan: str = Form(...),
                             motion: UploadFile | None = File(None)) -> dict:
        try:
            clip = load_wav_bytes(await audio.read())
        except Exception as exc:
            raise HTTPException(422, f"malformed audio: {exc}") from exc
        try:
            plan_obj = RecordingPlan.from_dict(json.loads(plan))
        except Exception as exc:
            raise HTTPException(422, f"malformed plan: {exc}") from exc
        trace = None
        if motion is not None:
            try:
                trace = motion_from_csv((await motion.read()).decode())
            except Exception as exc:
                raise HTTPException(422, f"malformed motion: {exc}") from exc

        session = AnnotationSession(audio=clip, plan=plan_obj, motion=trace)
        session.events = auto_annotate(session)
        odf = dsp.spectral_flux(dsp.log_mel(resample(clip, dsp.SAMPLE_RATE)))
        session_id = uuid.uuid4().hex[:12]
        stored = _StoredSession(session, odf)
        with store_lock:
            store[session_id] = stored
        return _state_payload(session_id, stored)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return _state_payload(session_id, get_stored(session_id))

    @app.get("/sessions/{session_id}/view")
    def get_view(session_id: str, from_s: float = 0.0,
                 to_s: float | None = None, points: int = 1000) -> dict:
        stored = get_stored(session_id)
        session = stored.session
        if points < 2 or points > 100000:
            raise HTTPException(422, "points must be in [2, 100000]")
        if to_s is None:
            to_s = session.audio.duration_s
        if to_s <= from_s:
            raise HTTPException(422, "to_s must be greater than from_s")

        wave_t = np.arange(len(session.audio)) / session.audio.sample_rate
        odf_t = np.arange(len(stored.odf.values)) * stored.odf.frame_hop_s
        view = {
            "revision": session.revision,
            "from_s": from_s,
            "to_s": to_s,
            "waveform": _envelope(wave_t, session.audio.samples,
                                  from_s, to_s, points),
            "odf": _envelope(odf_t, stored.odf.values, from_s, to_s, points),
            "motion_derivative": None,
            "events": [
                {"time_s": e.time_s, "direction": e.event.direction.value,
                 "chord": str(e.event.chord), "source": e.source.value}
                for e in session.events
            ],
        }
        if session.motion is not None:
            trace = session.motion
            deriv = differentiate_smoothed(trace)
            # trace sample k is consulted at audio time k/rate + t0 - offset
            deriv_t = (np.arange(len(deriv)) / trace.sample_rate
                       + trace.t0_s - session.motion_offset_s)
            view["motion_derivative"] = _envelope(deriv_t, deriv,
                                                  from_s, to_s, points)
        return view

    @app.patch("/sessions/{session_id}")
    def patch_session(session_id: str, body: dict) -> dict:
        stored = get_stored(session_id)
        allowed = {"revision", "start_time_s", "motion_offset_s"}
        unknown = set(body) - allowed
        if unknown or "revision" not in body:
            raise HTTPException(422, "body must carry revision and only "
                                     "start_time_s / motion_offset_s")
        with stored.lock:
            check_revision(stored, body["revision"])
            try:
                if "start_time_s" in body:
                    apply_session_edit(stored.session,
                                       SetStartTime(float(body["start_time_s"])))
                if "motion_offset_s" in body:
                    apply_session_edit(
                        stored.session,
                        SetMotionOffset(float(body["motion_offset_s"])))
            except (ValueError, TypeError) as exc:
                raise HTTPException(422, str(exc)) from exc
        return _state_payload(session_id, stored)

    @app.post("/sessions/{session_id}/events")
    def post_event(session_id: str, body: dict) -> dict:
        stored = get_stored(session_id)
        if "revision" not in body or "action" not in body:
            raise HTTPException(422, "body must carry revision and action")
        try:
            edit = _parse_event_edit(body)
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(422, f"malformed event edit: {exc}") from exc
        with stored.lock:
            check_revision(stored, body["revision"])
            try:
                apply_session_edit(stored.session, edit)
            except (IndexError, ValueError) as exc:
                raise HTTPException(422, str(exc)) from exc
        return _state_payload(session_id, stored)

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str) -> PlainTextResponse:
        stored = get_stored(session_id)
        return PlainTextResponse(export_annotations(stored.session.events),
                                 media_type="text/csv")

    return app


def _parse_event_edit(body: dict):
    action = body["action"]
    if action == "override":
        return OverrideEvent(
            index=int(body["index"]),
            time_s=None if body.get("time_s") is None else float(body["time_s"]),
            direction=None if body.get("direction") is None
            else Direction(body["direction"]),
            chord=None if body.get("chord") is None
            else ChordSymbol.parse(body["chord"]),
        )
    if action == "insert":
        return InsertEvent(float(body["time_s"]),
                           Direction(body["direction"]),
                           ChordSymbol.parse(body["chord"]))
    if action == "delete":
        return DeleteEvent(int(body["index"]))
    raise ValueError(f"unknown action: {action!r}")


def serve(config: AppConfig | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    config = config or AppConfig()
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.service_port)
