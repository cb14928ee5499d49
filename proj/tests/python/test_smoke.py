import copy
import json
import subprocess

import jsonschema
import pytest
from referencing import Registry, Resource

import duetui

SCHEMA_FOR_TEMPLATE = {
    "task_decompose": "TaskDecomposition",
    "navigation_gen": "Navigation",
    "cardview_gen": "CardViewConfig",
    "summary_gen": "SummaryContent",
}


def load_registry(root):
    bundle = json.loads((root / "schemas" / "bundle.json").read_text())
    schemas = {}
    registry = Registry()
    for name, file in bundle["schemas"].items():
        doc = json.loads((root / "schemas" / file).read_text())
        schemas[name] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    return schemas, registry


def fixture_documents(root):
    for path in sorted((root / "fixtures" / "barcelona").glob("*.json")):
        template = path.stem
        if template not in SCHEMA_FOR_TEMPLATE:
            continue
        for entry in json.loads(path.read_text())["fixtures"]:
            for response in entry["responses"]:
                if isinstance(response, str):
                    try:
                        response = json.loads(response)
                    except ValueError:
                        continue
                yield SCHEMA_FOR_TEMPLATE[template], response


def schema_valid(schemas, registry, name, doc):
    validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
    return validator.is_valid(doc)


def test_schema_names_match_the_bundle(root):
    bundle = json.loads((root / "schemas" / "bundle.json").read_text())
    assert sorted(duetui.schema_names()) == sorted(bundle["schemas"])


def test_fixture_documents_agree_with_jsonschema(root):
    schemas, registry = load_registry(root)
    seen = 0
    for name, doc in fixture_documents(root):
        engine = duetui.validate(name, doc)
        assert engine["ok"] == schema_valid(schemas, registry, name, doc), (name, engine["errors"])
        seen += 1
    assert seen > 0


def test_broken_documents_fail_both_validators(root):
    schemas, registry = load_registry(root)
    for name, doc in fixture_documents(root):
        if not isinstance(doc, dict):
            continue
        for key in schemas[name].get("required", []):
            broken = copy.deepcopy(doc)
            broken.pop(key, None)
            assert not schema_valid(schemas, registry, name, broken)
            assert not duetui.validate(name, broken)["ok"], (name, key)
            broken[key] = 12345 if not isinstance(doc.get(key), (int, float)) else "twelve"
            if not schema_valid(schemas, registry, name, broken):
                assert not duetui.validate(name, broken)["ok"], (name, key)


def test_unknown_schema_is_reported():
    report = duetui.validate("NoSuchThing", {})
    assert not report["ok"]
    assert report["errors"][0]["code"] == "UnknownSchema"


def test_bad_json_text_raises():
    with pytest.raises(duetui.DuetError) as err:
        duetui.validate("TaskDecomposition", "{nope")
    assert err.value.code == "MalformedDocument"


def test_golden_replay_is_deterministic(root):
    trace = root / "traces" / "barcelona.trace"
    passed, report, state = duetui.replay(trace)
    assert passed
    again = duetui.replay(trace)
    assert json.dumps(report, sort_keys=True) == json.dumps(again[1], sort_keys=True)
    assert state["sessionId"] == again[2]["sessionId"]


def test_service_session_flow(root):
    goal = json.loads((root / "traces" / "barcelona.trace").read_text())["meta"]["goal"]
    svc = duetui.Service.from_config_text("provider = scripted\nfixtures = fixtures/barcelona\n[catalog]\ndir = catalog\n",
                                          base_dir=root)
    created = svc.create_session(goal)
    sid = created["sessionId"]
    assert created["stage"] == "Define"
    svc.quiesce(sid)
    state = svc.state(sid)
    assert svc.state(sid, since=state["interfaceVersion"])["unchanged"] is True

    target = {"pageStateId": "page-trip_type", "componentId": "field:trip_type", "valueKey": "trip_type"}
    act = svc.act(sid, "select", target, {"valueKey": "trip_type", "value": "Family Vacation"})
    assert act["loopsScheduled"] == ["task", "interface"]
    svc.quiesce(sid)
    assert svc.state(sid)["interfaceVersion"] > state["interfaceVersion"]
    assert svc.advance(sid, "Empathize")["stage"] == "Empathize"
    assert svc.history(sid)["records"][0]["seq"] == 1
    assert svc.status()["sessions"] == 1

    with pytest.raises(duetui.DuetError) as err:
        svc.advance(sid, "Duet")
    assert err.value.status == 409
    status, body = svc.request("GET", "/sessions/nope/state")
    assert status == 404 and body["error"] == "UnknownSession"


def test_cli_exit_codes(root, cli, tmp_path):
    trace = root / "traces" / "barcelona.trace"
    assert subprocess.run([cli, "replay", str(trace)], capture_output=True).returncode == 0

    good = tmp_path / "plan.json"
    good.write_text(json.dumps({"goal": "g", "subtasks": []}))
    assert subprocess.run([cli, "validate", str(good), "--schema", "TaskDecomposition"],
                          capture_output=True).returncode == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"subtasks": 3}))
    assert subprocess.run([cli, "validate", str(bad), "--schema", "TaskDecomposition"],
                          capture_output=True).returncode == 2

    missing = tmp_path / "absent.trace"
    assert subprocess.run([cli, "replay", str(missing)], capture_output=True).returncode == 3
    config = tmp_path / "bad.ini"
    config.write_text("provider = oracle\n")
    assert subprocess.run([cli, "serve", "--config", str(config)], capture_output=True).returncode == 3
