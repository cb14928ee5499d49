"""Python access to the duet engine: schema validation, trace replay and an
in-process session service."""

import json
from pathlib import Path

from ._core import DuetError, schema_names
from . import _core

__all__ = ["DuetError", "Service", "replay", "schema_names", "validate"]


def validate(schema, doc):
    """Validate a document (dict/list or JSON text) against a named schema.

    Returns {"schema", "ok", "errors", "warnings", "normalized"}.
    """
    text = doc if isinstance(doc, str) else json.dumps(doc)
    return json.loads(_core.validate(schema, text))


def replay(trace, fixtures="", catalog=""):
    """Replay a trace file. Returns (passed, report, final_state)."""
    passed, report, state = _core.replay(str(trace), str(fixtures), str(catalog))
    return passed, json.loads(report), json.loads(state)


class ApiError(DuetError):
    pass


class Service:
    """The HTTP API, driven in-process."""

    def __init__(self, core):
        self._core = core

    @classmethod
    def from_config(cls, path):
        return cls(_core.Service.from_config_file(Path(path)))

    @classmethod
    def from_config_text(cls, text, base_dir="."):
        return cls(_core.Service.from_config_text(text, Path(base_dir)))

    def request(self, method, path, query=None, body=None):
        """Returns (status, decoded body)."""
        payload = "" if body is None else json.dumps(body)
        query = {k: str(v) for k, v in (query or {}).items()}
        status, text = self._core.handle(method, path, query, payload)
        return status, json.loads(text)

    def _ok(self, method, path, query=None, body=None):
        status, doc = self.request(method, path, query, body)
        if status >= 300:
            err = ApiError(doc.get("message", ""))
            err.code = doc.get("error")
            err.status = status
            err.detail = doc.get("detail")
            raise err
        return doc

    def create_session(self, goal):
        return self._ok("POST", "/sessions", body={"goal": goal})

    def state(self, session_id, since=None):
        query = {} if since is None else {"since": since}
        return self._ok("GET", f"/sessions/{session_id}/state", query)

    def act(self, session_id, kind, target, payload=None):
        body = {"kind": kind, "target": target, "payload": payload or {}}
        return self._ok("POST", f"/sessions/{session_id}/actions", body=body)

    def advance(self, session_id, stage):
        return self._ok("POST", f"/sessions/{session_id}/stage", body={"target": stage})

    def history(self, session_id, since=0):
        return self._ok("GET", f"/sessions/{session_id}/history", {"since": since})

    def status(self):
        return self._ok("GET", "/status")

    def quiesce(self, session_id):
        self._core.quiesce(session_id)

    @property
    def load_problems(self):
        return list(self._core.load_problems())
