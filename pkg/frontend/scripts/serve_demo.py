"""Build a demo project under .demo/ and serve the UI on port 8000.

The demo schema, question templates, and scale land in .demo/ next to a
fresh session log, then the elicit CLI serves this directory as the web
root. Extra arguments are passed through, so a different port or session
log can be chosen: python3 scripts/serve_demo.py --port 9000
"""

from pathlib import Path
import os
import sys

from elicit import write_demo_project

root = Path(__file__).resolve().parent.parent
demo = root / ".demo"
if not (demo / "schema.json").exists():
    write_demo_project(demo)

os.execv(sys.executable, [
    sys.executable, "-m", "elicit.cli", "serve",
    "--schema", str(demo / "schema.json"),
    "--templates", str(demo / "templates.json"),
    "--scale", str(demo / "scale.json"),
    "--session", str(demo / "live.jsonl"),
    "--ui", str(root),
] + sys.argv[1:])
