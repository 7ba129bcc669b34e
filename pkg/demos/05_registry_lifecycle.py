"""Walk a submission through the full curation lifecycle, over HTTP.

Run: python demos/05_registry_lifecycle.py
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from toxbench.registry import ModelCard, RegistryStore, running_registry


def call(base, method, path, body=None, token=None):
    data = json.dumps(body).encode() if body is not None else None
    headers = {"Content-Type": "application/json"}
    if token:
        headers["X-Admin-Token"] = token
    request = urllib.request.Request(base + path, data=data, headers=headers,
                                     method=method)
    try:
        with urllib.request.urlopen(request) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


card = ModelCard(
    model_name="Demo Linear Baseline",
    developer="toxbench demos",
    architecture="masked multitask logistic regression",
    model_version="1.0.0",
    space_url="https://example.org/spaces/demo-linear",
    commit_hash="0123abcd",
    intended_use="demonstration only",
)

with tempfile.TemporaryDirectory() as tmp:
    store = RegistryStore(Path(tmp) / "events.jsonl")
    with running_registry(store, admin_token="demo-token") as server:
        base = server.base_url
        print(f"registry on {base}\n")

        # an incomplete card is rejected with an itemized error
        status, doc = call(base, "POST", "/submissions", {"model_name": "incomplete"})
        print(f"incomplete card -> HTTP {status}")
        for problem in doc["error"]["problems"]:
            print("   ", problem)

        # the real submission enters as pending
        status, doc = call(base, "POST", "/submissions", card.to_dict())
        sub_id = doc["id"]
        print(f"\nsubmitted -> id {sub_id}, status {doc['status']}")

        # evaluation runs (here: attach a result by hand; demo 04 shows the real run)
        call(base, "POST", f"/submissions/{sub_id}/start", token="demo-token")
        call(base, "POST", f"/submissions/{sub_id}/result",
             {"status": "scored", "mean_auc": 0.842,
              "per_endpoint": {"NR-AR": 0.81, "SR-p53": 0.88}},
             token="demo-token")
        _, doc = call(base, "GET", f"/submissions/{sub_id}")
        print(f"after evaluation: status {doc['status']} (awaiting review)")

        # the public leaderboard hides preliminary rows
        _, doc = call(base, "GET", "/leaderboard")
        print(f"public leaderboard rows before approval: {len(doc['rows'])}")

        # an administrator reviews and approves
        call(base, "POST", f"/submissions/{sub_id}/review",
             {"decision": "approve", "reviewer": "alice", "note": "reproduced"},
             token="demo-token")
        _, doc = call(base, "GET", "/leaderboard")
        print("after approval:")
        for row in doc["rows"]:
            print(f"   #{row['id']} {row['model_name']}: mean AUC {row['mean_auc']:.3f}")

    # the event log fully reproduces the state
    replayed = RegistryStore(Path(tmp) / "events.jsonl")
    print(f"\nreplayed state hash equal: {replayed.state_hash() == store.state_hash()}")
