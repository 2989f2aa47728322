"""Checks the bundled scenario and formation files against their schemas."""
import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1])
schemas = {
    "scenario": json.loads((root / "scenario.schema.json").read_text()),
    "formation": json.loads((root / "formation.schema.json").read_text()),
}
failed = False
for path in sorted(root.glob("*.json")):
    if path.name.endswith(".schema.json"):
        continue
    doc = json.loads(path.read_text())
    kind = "formation" if "members" in doc else "scenario"
    try:
        jsonschema.validate(doc, schemas[kind])
        print(f"ok   {path.name} ({kind})")
    except jsonschema.ValidationError as e:
        failed = True
        print(f"FAIL {path.name}: {e.message}")
sys.exit(1 if failed else 0)
