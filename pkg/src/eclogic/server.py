"""Serve mode: the session exposed over a small JSON HTTP API.

Endpoints (single session per server instance, mutations serialized):

* ``GET  /state``  current session observation
* ``GET  /graph``  semantic causal graph as a JSON edge list
* ``POST /load``   model document (JSON body); resets the session
* ``POST /step``   action object, as in ``Session.step``
* ``POST /eval``   ``{"formula": "...", "mode": "epistemic"|"obs"|"single"}``
* ``POST /undo``   no body
* ``POST /reset``  no body
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .epistemic import SemanticsMode, evaluate
from .errors import EclogicError
from .models import load_model_document
from .session import Session
from .syntax import parse


class ServerState:
    def __init__(self, session: Optional[Session]):
        self.session = session
        self.lock = threading.Lock()


def _api_error(message: str, code: int = 400) -> tuple[int, dict]:
    return code, {"error": message}


def handle_request(state: ServerState, method: str, path: str, body: Optional[dict]):
    """Route one request; returns (status_code, payload)."""
    if method == "GET" and path == "/state":
        if state.session is None:
            return _api_error("no model loaded", 409)
        return 200, state.session.state()
    if method == "GET" and path == "/graph":
        if state.session is None:
            return _api_error("no model loaded", 409)
        return 200, {
            "nodes": list(state.session.signature.order),
            "edges": state.session.graph(),
        }
    if method == "POST" and path == "/load":
        if not isinstance(body, dict):
            return _api_error("body must be a model document")
        mode_name = body.pop("mode", None)
        pointed = load_model_document(body)
        mode = SemanticsMode(mode_name) if mode_name else (
            SemanticsMode.OBSERVABLES_O
            if pointed.model.signature.observables
            else SemanticsMode.EPISTEMIC_W
        )
        with state.lock:
            state.session = Session(pointed, mode)
            return 200, state.session.state()
    if state.session is None:
        return _api_error("no model loaded", 409)
    if method == "POST" and path == "/step":
        if not isinstance(body, dict):
            return _api_error("body must be an action object")
        with state.lock:
            return 200, state.session.step(body)
    if method == "POST" and path == "/eval":
        if not isinstance(body, dict) or "formula" not in body:
            return _api_error("body must carry a formula")
        session = state.session
        mode = SemanticsMode(body.get("mode", session.mode.value))
        f = parse(body["formula"], session.signature)
        result = evaluate(session.current, f, mode, assume_bound=True)
        return 200, {"status": "ok", "formula": body["formula"], "result": result}
    if method == "POST" and path == "/undo":
        with state.lock:
            return 200, state.session.undo()
    if method == "POST" and path == "/reset":
        with state.lock:
            return 200, state.session.reset()
    return _api_error(f"no route for {method} {path}", 404)


def make_server(session: Optional[Session], host: str = "127.0.0.1", port: int = 0):
    state = ServerState(session)

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # quiet by default
            pass

        def _respond(self, code: int, payload: dict):
            data = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(data)

        def do_OPTIONS(self):
            self._respond(204, {})

        def _dispatch(self, method: str):
            body = None
            length = int(self.headers.get("Content-Length") or 0)
            if length:
                try:
                    body = json.loads(self.rfile.read(length).decode("utf-8"))
                except json.JSONDecodeError:
                    self._respond(400, {"error": "body is not valid JSON"})
                    return
            try:
                code, payload = handle_request(state, method, self.path, body)
            except EclogicError as exc:
                code, payload = 422, {"error": str(exc)}
            except Exception as exc:  # pragma: no cover - defensive
                code, payload = 500, {"error": f"internal error: {exc}"}
            self._respond(code, payload)

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

    server = ThreadingHTTPServer((host, port), Handler)
    server.eclogic_state = state
    return server
