"""Drive the command-line pipeline end to end and inspect the bundle.

Everything the web explorer shows comes from a single analysis bundle
written by the `track` (or `export`) subcommand. This demo simulates a
clip into a temp directory, tracks it, and prints what landed in the
bundle JSON. The same flow from a shell:

    flocktrack simulate --out /tmp/clip --seed 5 --n-birds 3 --clip-s 10
    flocktrack track --config /tmp/clip/config.json \
        --detections /tmp/clip/detections.csv --gt /tmp/clip/gt.csv \
        --out /tmp/run
    flocktrack serve --dir /tmp/run

Run from the repo root:

    python3 demos/05_cli_bundle.py
"""

import json
import os
import tempfile

from flocktrack.cli import main as cli
from flocktrack.pipeline import load_bundle


def main():
    with tempfile.TemporaryDirectory() as tmp:
        clip = os.path.join(tmp, "clip")
        run = os.path.join(tmp, "run")

        assert cli(["simulate", "--out", clip, "--seed", "5", "--n-birds", "3",
                    "--clip-s", "10"]) == 0
        assert cli(["track",
                    "--config", os.path.join(clip, "config.json"),
                    "--detections", os.path.join(clip, "detections.csv"),
                    "--gt", os.path.join(clip, "gt.csv"),
                    "--out", run]) == 0

        bundle = load_bundle(os.path.join(run, "bundle.json"))
        print("\nbundle contents:")
        print(f"  schema_version   {bundle['schema_version']}")
        print(f"  tracks           {bundle['tracks']}")
        print(f"  trajectory rows  "
              f"{sum(len(v) for v in bundle['trajectories'].values())}")
        print(f"  per-second rows  {len(bundle['per_second'])}")
        print(f"  events           {len(bundle['events'])}")

        report = json.load(open(os.path.join(run, "report.json")))
        print(f"  report MOTA      {report['body']['mota']}")


if __name__ == "__main__":
    main()
