"""Configuration-driven experiment runner.

Subcommands:

* ``run <config>``   execute the scenarios listed in a config file, writing
                     per-scenario JSON, CSV curves, rendered PNG figures,
                     and a versioned manifest into the output directory
* ``list``           print the scenario catalog
* ``check <id>``     run a single scenario (with ``--param k=v`` overrides)
                     and print its JSON result

Config files are flat key-value text with sectioned scenario blocks:

    [run]
    output_dir = out
    seed = 1234
    jobs = 1

    [scenario:thm34-holomorphic]
    k = 2000

    [scenario:thm36-cp-rate:highres]
    n_hi = 13

A ``[scenario:<id>]`` section name may carry an optional third ``:<tag>``
field so the same scenario can run twice with different parameters.  The
environment variable CPSG_JOBS overrides the ``jobs`` value.

Exit status: 0 when no scenario fails, 1 when any scenario fails or errors
(partial results are preserved), 2 for configuration problems including
unknown scenario ids.
"""

from __future__ import annotations

import argparse
import configparser
import datetime
import hashlib
import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigError
from .reporting import emit_curve, write_json
from .scenarios import CATALOG, CATALOG_BY_ID, list_catalog, run_scenario

MANIFEST_SCHEMA = "v1"


@dataclass
class RunConfig:
    output_dir: str = "out"
    seed: int = 0
    jobs: int = 1
    scenarios: list = field(default_factory=list)   # (scenario_id, tag, overrides)


def parse_config(path) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    cfg = RunConfig()
    if parser.has_section("run"):
        run = parser["run"]
        cfg.output_dir = run.get("output_dir", cfg.output_dir)
        for key in run:
            if key not in ("output_dir", "seed", "jobs"):
                raise ConfigError(f"unknown key {key!r} in [run]")
        try:
            cfg.seed = run.getint("seed", cfg.seed)
            cfg.jobs = run.getint("jobs", cfg.jobs)
        except ValueError as exc:
            raise ConfigError(f"bad integer in [run]: {exc}") from exc

    for section in parser.sections():
        if section == "run":
            continue
        parts = section.split(":")
        if parts[0] != "scenario" or len(parts) not in (2, 3):
            raise ConfigError(
                f"unknown section [{section}]; expected [run] or [scenario:<id>]")
        scenario_id = parts[1]
        tag = parts[2] if len(parts) == 3 else ""
        if scenario_id not in CATALOG_BY_ID:
            raise ConfigError(f"unknown scenario id {scenario_id!r} in [{section}]")
        overrides = dict(parser[section])
        cfg.scenarios.append((scenario_id, tag, overrides))
    return cfg


def _scenario_seed(base_seed: int, scenario_id: str, tag: str) -> int:
    h = hashlib.sha256(f"{base_seed}:{scenario_id}:{tag}".encode()).digest()
    return int.from_bytes(h[:8], "little") % (2**63)


def _slug(scenario_id: str, tag: str) -> str:
    s = scenario_id.replace("/", "_")
    return f"{s}__{tag}" if tag else s


def _execute_one(scenario_id, tag, overrides, base_seed, out_dir):
    slug = _slug(scenario_id, tag)
    seed = _scenario_seed(base_seed, scenario_id, tag)
    record = {"scenario_id": scenario_id, "tag": tag, "seed": seed,
              "parameters": {k: str(v) for k, v in overrides.items()}}
    audit_path = os.path.join(out_dir, f"{slug}.audit.jsonl")
    files = {}
    try:
        with open(audit_path, "w") as audit_fh:
            outcome = run_scenario(scenario_id, overrides, seed=seed,
                                   audit=audit_fh)
        if os.path.getsize(audit_path) == 0:
            os.unlink(audit_path)
        else:
            files["audit"] = os.path.basename(audit_path)
        record["verdict"] = outcome.verdict
        record["payload"] = outcome.payload
        for name, curve, info in outcome.curves:
            if curve is None:
                continue
            stem = f"{slug}__{name}"
            files[name] = emit_curve(curve, out_dir, stem, info,
                                     title=f"{scenario_id} {name}")
    except Exception as exc:
        record["verdict"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
        record["traceback"] = traceback.format_exc()
    record["files"] = files
    write_json(record, os.path.join(out_dir, f"{slug}.json"))
    return slug, record


def cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    jobs = int(os.environ.get("CPSG_JOBS", cfg.jobs))
    os.makedirs(cfg.output_dir, exist_ok=True)

    results = []
    if jobs > 1 and len(cfg.scenarios) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute_one, sid, tag, ov, cfg.seed,
                                   cfg.output_dir)
                       for sid, tag, ov in cfg.scenarios]
            results = [f.result() for f in futures]
    else:
        for sid, tag, ov in cfg.scenarios:
            results.append(_execute_one(sid, tag, ov, cfg.seed, cfg.output_dir))

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "seed": cfg.seed,
        "jobs": jobs,
        "scenarios": [
            {"scenario_id": rec["scenario_id"], "tag": rec["tag"],
             "verdict": rec["verdict"], "result_file": f"{slug}.json"}
            for slug, rec in results
        ],
    }
    write_json(manifest, os.path.join(cfg.output_dir, "manifest.json"))

    for slug, rec in results:
        print(f"{rec['scenario_id']:<28} {rec['verdict']}")
    verdicts = [rec["verdict"] for _, rec in results]
    if any(v == "fail" or v == "error" for v in verdicts):
        return 1
    return 0


def cmd_list(_args) -> int:
    print(list_catalog())
    return 0


def cmd_check(args) -> int:
    if args.scenario_id not in CATALOG_BY_ID:
        print(f"error: unknown scenario id {args.scenario_id!r}; "
              "run `cpsglab list` for the catalog", file=sys.stderr)
        return 2
    overrides = {}
    for item in args.param or []:
        if "=" not in item:
            print(f"error: --param expects key=value, got {item!r}", file=sys.stderr)
            return 2
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    try:
        outcome = run_scenario(args.scenario_id, overrides, seed=args.seed)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc = {"scenario_id": args.scenario_id, "verdict": outcome.verdict,
           "payload": outcome.payload}
    print(json.dumps(doc, indent=2, sort_keys=True))
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for name, curve, info in outcome.curves:
            if curve is not None:
                emit_curve(curve, args.output,
                           f"{_slug(args.scenario_id, '')}__{name}", info,
                           title=f"{args.scenario_id} {name}")
    return 0 if outcome.verdict != "fail" else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cpsglab",
        description="decay-rate laboratory for semigroup time discretizations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute scenarios from a config file")
    p_run.add_argument("config")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="print the scenario catalog")
    p_list.set_defaults(func=cmd_list)

    p_check = sub.add_parser("check", help="run a single scenario")
    p_check.add_argument("scenario_id")
    p_check.add_argument("--param", action="append", metavar="KEY=VALUE")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--output", help="directory for curve CSVs and figures")
    p_check.set_defaults(func=cmd_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
