"""Record serve-mode API fixtures for the frontend tests.

Boots the real eclogic server on an ephemeral port, performs the exact
request sequence the lab UI makes in its scripted session, and stores each
response body byte-verbatim under tests/fixtures/, indexed by manifest.json.
Responses for identical requests are replayed in recording order by the
fixture server, so the session's before/after answers stay distinguishable.

Run from frontend/:  python3 scripts/record_fixtures.py
"""

import json
import pathlib
import threading
import urllib.error
import urllib.request

from eclogic.epistemic import SemanticsMode
from eclogic.models import load_model_file
from eclogic.server import make_server
from eclogic.session import Session

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
MODEL = ROOT.parent / "models" / "flashlight_obs.json"


def request(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        base + path, data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as response:
            return response.status, response.read()
    except urllib.error.HTTPError as err:
        return err.code, err.read()


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    doc = json.loads(MODEL.read_text())
    pointed = load_model_file(str(MODEL))
    server = make_server(Session(pointed, SemanticsMode.OBSERVABLES_O), port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    base = f"http://{host}:{port}"

    script = [
        ("load", "POST", "/load", doc),
        ("state", "GET", "/state", None),
        ("eval_kb0_before", "POST", "/eval", {"formula": "K B=0"}),
        ("step_p1", "POST", "/step", {"type": "intervene", "assignment": {"P": "1"}}),
        ("eval_kb0_after", "POST", "/eval", {"formula": "K B=0"}),
        ("undo", "POST", "/undo", None),
        ("step_empty", "POST", "/step", {"type": "intervene", "assignment": {}}),
        ("eval_parse_error", "POST", "/eval", {"formula": "[P="}),
        ("graph", "GET", "/graph", None),
    ]
    manifest = []
    for name, method, path, body in script:
        status, payload = request(base, method, path, body)
        out = FIXTURES / f"{name}.json"
        out.write_bytes(payload)
        manifest.append(
            {"name": name, "method": method, "path": path, "body": body,
             "status": status, "file": out.name}
        )
        print(f"recorded {name}: {method} {path} -> {status} ({len(payload)} bytes)")
    (FIXTURES / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (FIXTURES / "flashlight_obs.json").write_text(json.dumps(doc) + "\n")
    server.shutdown()
    server.server_close()


if __name__ == "__main__":
    main()
