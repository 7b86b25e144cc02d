import io
import json
import threading
import urllib.request

import pytest

from eclogic.cli import main
from eclogic.server import make_server
from eclogic.session import Session
from eclogic.epistemic import SemanticsMode
from eclogic.models import load_model_file

FLASH = "models/flashlight.json"
FLASH_OBS = "models/flashlight_obs.json"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_paper_judgments(self, capsys):
        code, out, _ = run_cli(capsys, "check", FLASH_OBS, "[P=1] K B=0", "--mode=obs")
        assert code == 0 and out.strip() == "true"
        code, out, _ = run_cli(capsys, "check", FLASH_OBS, "K [P=1] B=0", "--mode=obs")
        assert code == 0 and out.strip() == "false"

    def test_strict_exit_code(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", FLASH_OBS, "K [P=1] B=0", "--mode=obs", "--strict"
        )
        assert code == 1 and out.strip() == "false"

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "check", "no-such-file.json", "B=0")
        assert code == 2 and "error" in err

    def test_syntax_error(self, capsys):
        code, _, err = run_cli(capsys, "check", FLASH, "[P=")
        assert code == 2 and "position" in err

    def test_validation_error(self, capsys):
        code, _, err = run_cli(capsys, "check", FLASH, "Q=1")
        assert code == 3

    def test_obs_mode_requires_observables(self, capsys):
        code, _, err = run_cli(capsys, "check", FLASH, "B=0", "--mode=obs")
        assert code == 3 and "observables" in err

    def test_trace(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", FLASH_OBS, "[P=1] K B=0", "--mode=obs", "--trace"
        )
        assert code == 0
        assert out.splitlines()[0] == "true"
        assert "intervene [P=1] team 2 -> 1" in out

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", FLASH, "[P=1] L=0", "--format=json"
        )
        payload = json.loads(out)
        assert payload["result"] is True
        assert payload["formula"] == "[P=1] L=0"

    def test_single_mode(self, capsys):
        code, out, _ = run_cli(capsys, "check", FLASH, "[P=1] L=0", "--mode=single")
        assert code == 0 and out.strip() == "true"


class TestTranslate:
    def test_full_translation(self, capsys):
        code, out, _ = run_cli(
            capsys, "translate", FLASH, "[[P=1] L=0 !] K B=0", "--kind=tr"
        )
        assert code == 0
        from eclogic.syntax import parse, fragment, FragmentTag

        sig = load_model_file(FLASH).model.signature
        assert FragmentTag.LKCp in fragment(parse(out.strip(), sig))

    def test_tr1(self, capsys):
        code, out, _ = run_cli(capsys, "translate", FLASH, "B=0", "--kind=tr1")
        assert code == 0 and out.strip() == "[] B=0"

    def test_fragment_violation(self, capsys):
        code, _, err = run_cli(capsys, "translate", FLASH, "K B=0", "--kind=tr1")
        assert code == 3


class TestValidity:
    def test_valid_formula(self, capsys):
        code, out, err = run_cli(
            capsys, "validity", FLASH, "[P=1, L=0] L=0", "--format=json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "valid"
        assert payload["models_checked"] == 512
        assert "elapsed" in err

    def test_counterexample_document(self, capsys):
        code, out, _ = run_cli(capsys, "validity", FLASH, "K B=0", "--format=json")
        payload = json.loads(out)
        assert payload["verdict"] == "counterexample"
        doc = payload["counterexample"]
        assert set(doc) >= {"exogenous", "endogenous", "team", "actual"}

    def test_byte_identical_replay(self, capsys):
        first = run_cli(capsys, "validity", FLASH, "K B=0", "--format=json", "--seed=7")
        second = run_cli(capsys, "validity", FLASH, "K B=0", "--format=json", "--seed=7")
        assert first[1] == second[1]


class TestProve(object):
    def test_accepted(self, capsys, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("1. K L=0 -> L=0 ; axiom T\n")
        code, out, _ = run_cli(capsys, "prove", str(path), "--model", FLASH, "--system", "LKC")
        assert code == 0 and "accepted" in out

    def test_rejected(self, capsys, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("1. K L=0 -> L=0 ; axiom Four\n")
        code, out, _ = run_cli(capsys, "prove", str(path), "--model", FLASH, "--system", "LKC")
        assert code == 1 and "rejected at line 1" in out

    def test_premises_flag(self, capsys, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("1. B=0 ; premise\n")
        code, out, _ = run_cli(
            capsys, "prove", str(path), "--model", FLASH, "--system", "LC",
            "--premise", "B=0",
        )
        assert code == 0


class TestGraph:
    def test_dot_output(self, capsys):
        code, out, _ = run_cli(capsys, "graph", FLASH)
        assert code == 0
        assert '"P" -> "L";' in out and '"B" -> "L";' in out


REPL_SCRIPT = """\
eval K B=0
intervene P=1
eval K B=0
undo
announce B=1
show
quit
"""


class TestRepl:
    def run_repl(self, capsys, monkeypatch, script, *argv):
        monkeypatch.setattr("sys.stdin", io.StringIO(script))
        return run_cli(capsys, "repl", *argv)

    def test_experiment_session(self, capsys, monkeypatch):
        code, out, _ = self.run_repl(
            capsys, monkeypatch, REPL_SCRIPT, FLASH_OBS, "--mode=obs"
        )
        assert code == 0
        blocks = out.split("> ")
        # before the experiment the battery state is unknown
        assert blocks[1].strip().splitlines()[-1] == "false"
        # the intervention shrinks the team to one row and teaches B=0
        assert "team (1):" in blocks[2]
        assert "known: P=1, B=0, L=0" in blocks[2]
        assert blocks[3].strip().splitlines()[-1] == "true"
        # undo restores both team members
        assert "team (2):" in blocks[4]
        # announcing something false at the actual world is refused
        assert "refused" in blocks[5]
        assert "team (2):" in blocks[6]

    def test_replay_byte_identical(self, capsys, monkeypatch):
        first = self.run_repl(
            capsys, monkeypatch, REPL_SCRIPT, FLASH_OBS, "--mode=obs", "--seed=5"
        )
        second = self.run_repl(
            capsys, monkeypatch, REPL_SCRIPT, FLASH_OBS, "--mode=obs", "--seed=5"
        )
        assert first[1] == second[1]

    def test_unknown_command(self, capsys, monkeypatch):
        code, out, _ = self.run_repl(capsys, monkeypatch, "frobnicate\nquit\n", FLASH)
        assert "unknown command" in out


@pytest.fixture
def api_server():
    pointed = load_model_file(FLASH_OBS)
    session = Session(pointed, SemanticsMode.OBSERVABLES_O)
    server = make_server(session, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}"
    server.shutdown()
    server.server_close()


def api(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    request = urllib.request.Request(
        base + path, data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


class TestServe:
    def test_state_and_step(self, api_server):
        status, state = api(api_server, "GET", "/state")
        assert status == 200
        assert len(state["team"]) == 2
        assert state["known_values"] == {"P": "0", "L": "0"}

        status, obs = api(
            api_server, "POST", "/step",
            {"type": "intervene", "assignment": {"P": "1"}},
        )
        assert status == 200 and obs["status"] == "ok"
        assert len(obs["team"]) == 1
        assert obs["known_values"]["B"] == "0"

        status, obs = api(api_server, "POST", "/undo")
        assert status == 200 and len(obs["team"]) == 2

    def test_eval_does_not_mutate(self, api_server):
        status, payload = api(
            api_server, "POST", "/eval", {"formula": "[P=1] K B=0"}
        )
        assert status == 200 and payload["result"] is True
        status, state = api(api_server, "GET", "/state")
        assert len(state["team"]) == 2

    def test_graph(self, api_server):
        status, payload = api(api_server, "GET", "/graph")
        assert status == 200
        assert payload["edges"] == [["P", "L"], ["B", "L"]]
        assert payload["nodes"] == ["P", "B", "L"]

    def test_load_and_reset(self, api_server):
        doc = json.load(open(FLASH))
        status, state = api(api_server, "POST", "/load", doc)
        assert status == 200 and state["observables"] == []
        status, obs = api(
            api_server, "POST", "/step",
            {"type": "intervene", "assignment": {"B": "0"}},
        )
        assert status == 200 and len(obs["team"]) == 1
        status, obs = api(api_server, "POST", "/reset")
        assert status == 200 and len(obs["team"]) == 2

    def test_error_routes(self, api_server):
        status, payload = api(api_server, "GET", "/nope")
        assert status == 404
        status, payload = api(api_server, "POST", "/eval", {"formula": "[P="})
        assert status == 422 and "error" in payload

    def test_refusal_keeps_state(self, api_server):
        api(api_server, "POST", "/reset")
        status, obs = api(
            api_server, "POST", "/step", {"type": "announce", "formula": "B=1"}
        )
        assert status == 200 and obs["status"] == "refused"
        assert len(obs["team"]) == 2
