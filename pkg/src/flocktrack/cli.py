"""Command-line entry points: track, simulate, eval, export, serve.

Exit codes: 0 success, 1 input error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import functools
import http.server
import json
import os
import sys

from flocktrack import metrics, pipeline, simulate
from flocktrack.pipeline import IngestError, PipelineConfig


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return PipelineConfig.load(args.config)
    return PipelineConfig()


def _run_track(args, do_eval: bool) -> int:
    cfg = _load_config(args)
    detections = pipeline.ingest_detections(args.detections)
    frames = pipeline.directory_frames(args.frames) if args.frames else None
    bundle = pipeline.run_pipeline(cfg, detections, frames)

    if do_eval and args.gt:
        gt_records = pipeline.ingest_ground_truth(args.gt)
        gt_events = None
        if args.gt_behavior:
            gt_events, _ = pipeline.ingest_behavior_ground_truth(args.gt_behavior)
        score = pipeline.evaluate(cfg, bundle, gt_records, gt_events)
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w") as fh:
            json.dump(score.to_dict(), fh, indent=2, sort_keys=True)
        _print_score(score)

    os.makedirs(args.out, exist_ok=True)
    bundle_path = os.path.join(args.out, "bundle.json")
    pipeline.export_bundle(bundle, bundle_path)
    print(f"wrote {bundle_path}")
    return 0


def _print_score(score: metrics.ClipScore) -> None:
    print(f"body   MOTA {score.body.mota * 100:7.2f}%   MOTP {score.body.motp:8.3f} px/match")
    if score.head is not None:
        print(f"head   MOTA {score.head.mota * 100:7.2f}%   MOTP {score.head.motp:8.3f} px/match")
    if score.events:
        print(f"{'behavior':<10}{'prec':>8}{'recall':>8}{'I':>5}{'D':>5}{'IOU':>8}")
        for kind, rep in sorted(score.events.items()):
            print(
                f"{kind:<10}{rep.precision:>8.3f}{rep.recall:>8.3f}"
                f"{rep.insertions:>5}{rep.deletions:>5}{rep.mean_iou:>8.3f}"
            )


def _cmd_track(args) -> int:
    return _run_track(args, do_eval=True)


def _cmd_export(args) -> int:
    return _run_track(args, do_eval=False)


def _cmd_simulate(args) -> int:
    cfg = simulate.SimConfig(
        seed=args.seed,
        n_birds=args.n_birds,
        clip_s=args.clip_s,
        fps=args.fps,
        behavior_script=args.behavior_script,
        miss_rate=args.miss_rate,
        fp_rate=args.fp_rate,
        jitter_sigma=args.jitter_sigma,
        n_id_swaps=args.id_swaps,
    )
    sim = simulate.simulate(cfg)
    simulate.write_outputs(sim, args.out, write_frames=args.write_frames)
    print(f"wrote simulator outputs to {args.out} ({sim.n_frames} frames, {cfg.n_birds} birds)")
    return 0


def _cmd_eval(args) -> int:
    gt = pipeline.ingest_ground_truth(args.gt)
    hyp = pipeline.ingest_ground_truth(args.hyp)
    gt_frames = {}
    hyp_frames = {}
    for rec in gt:
        gt_frames.setdefault(rec.frame, {})[rec.track_id] = rec.box.center
    for rec in hyp:
        hyp_frames.setdefault(rec.frame, {})[rec.track_id] = rec.box.center
    score = metrics.evaluate_tracking(gt_frames, hyp_frames, args.match_radius)
    report = {
        "mota": score.mota,
        "motp": score.motp,
        "misses": score.misses,
        "false_positives": score.false_positives,
        "mismatches": score.mismatches,
        "gt_total": score.gt_total,
    }
    if args.gt_behavior and args.hyp_behavior:
        gt_events, fps = pipeline.ingest_behavior_ground_truth(args.gt_behavior)
        hyp_events, _ = pipeline.ingest_behavior_ground_truth(args.hyp_behavior)
        reports = metrics.evaluate_events(gt_events, hyp_events, fps)
        report["events"] = {
            kind: {
                "precision": rep.precision,
                "recall": rep.recall,
                "insertions": rep.insertions,
                "deletions": rep.deletions,
                "mean_iou": rep.mean_iou,
            }
            for kind, rep in reports.items()
        }
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 0


def _cmd_serve(args) -> int:
    handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=args.dir)
    server = http.server.ThreadingHTTPServer((args.host, args.port), handler)
    print(f"serving {args.dir} on http://{args.host}:{server.server_address[1]}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flocktrack", description=__doc__)
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func in (("track", _cmd_track), ("export", _cmd_export)):
        p = sub.add_parser(name, help=f"{name} a detection stream into a bundle")
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--detections", required=True, help="detections CSV")
        p.add_argument("--frames", help="directory of frame_%%06d.png images")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--gt", help="ground-truth CSV (track + evaluate)")
        p.add_argument("--gt-behavior", help="behavior ground-truth CSV")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="generate a synthetic clip")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-birds", type=int, default=5)
    p.add_argument("--clip-s", type=float, default=60.0)
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--behavior-script", action="store_true")
    p.add_argument("--miss-rate", type=float, default=0.0)
    p.add_argument("--fp-rate", type=float, default=0.0)
    p.add_argument("--jitter-sigma", type=float, default=0.0)
    p.add_argument("--id-swaps", type=int, default=0)
    p.add_argument("--write-frames", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("eval", help="score a hypothesis file against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--gt-behavior")
    p.add_argument("--hyp-behavior")
    p.add_argument("--match-radius", type=float, default=50.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="serve a bundle directory for the web explorer")
    p.add_argument("--dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, FileNotFoundError, simulate.SimConfigError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        if getattr(args, "verbose", False):
            raise
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
