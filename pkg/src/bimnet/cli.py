"""Command-line front end: ``bimnet convert | stats | validate``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .export import ExportFormat, export_csv, export_graphml, export_json, load_json
from .model import OPENING_TYPES
from .network import Network, Tolerances, build_network, network_stats
from .relations import DEFAULT_THRESHOLD, DEFAULT_TOUCH_TOL, EdgeKind
from .step import StepError, parse_step

logger = logging.getLogger("bimnet")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_INVALID = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    input: Path
    out: str = "graph"
    format: ExportFormat = ExportFormat.JSON
    threshold_m: float = DEFAULT_THRESHOLD
    touch_tol_m: float = DEFAULT_TOUCH_TOL
    angular_eps: float = 1e-6
    strict_refs: bool = False
    csv_psets: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.threshold_m > 0:
            raise ValueError("--threshold must be positive")
        if self.touch_tol_m < 0 or self.angular_eps < 0:
            raise ValueError("tolerances must be non-negative")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(touch=self.touch_tol_m, angular=self.angular_eps, coplanar=self.angular_eps)


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: cannot read ({exc.strerror or exc})") from None


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        return data.decode("latin-1")


def _build(cfg: RunConfig, data: bytes) -> Network:
    try:
        table = parse_step(_decode(data), strict_refs=cfg.strict_refs)
    except StepError as exc:
        raise CliError(EXIT_PARSE, f"{cfg.input}: {exc}") from None
    net = build_network(table, cfg.threshold_m, cfg.tolerances, hashlib.sha256(data).hexdigest())
    if table.dangling:
        net.meta["dangling_refs"] = len(table.dangling)
    return net


def _load(cfg: RunConfig) -> Network:
    """Network from an IFC file, or from a previously exported JSON document."""
    data = _read_bytes(cfg.input)
    if cfg.input.suffix.lower() == ".json":
        try:
            return load_json(data)
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            raise CliError(EXIT_PARSE, f"{cfg.input}: not a network document ({exc})") from None
    return _build(cfg, data)


def _artifacts(cfg: RunConfig, net: Network) -> dict[str, bytes]:
    if cfg.format is ExportFormat.JSON:
        return {f"{cfg.out}.json": export_json(net)}
    if cfg.format is ExportFormat.GRAPHML:
        return {f"{cfg.out}.graphml": export_graphml(net)}
    nodes, edges = export_csv(net, cfg.csv_psets)
    return {f"{cfg.out}.nodes.csv": nodes, f"{cfg.out}.edges.csv": edges}


def _report(net: Network) -> dict:
    codes = Counter(d.code for d in net.diagnostics)
    return {
        "stats": network_stats(net),
        "diagnostic_counts": dict(sorted(codes.items())),
        "inexact_components": [n.express_id for n in net.nodes if not n.aabb.exact],
        "skipped_relations": sorted(d.entity_id for d in net.diagnostics
                                    if d.code in ("skipped_relation", "bad_relation") and d.entity_id is not None),
        "dangling_refs": net.meta.get("dangling_refs", 0),
        "diagnostics": [str(d) for d in net.diagnostics],
    }


def _write(path: str, data: bytes) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: cannot write ({exc.strerror or exc})") from None


def cmd_convert(cfg: RunConfig) -> int:
    net = _build(cfg, _read_bytes(cfg.input))
    for path, data in _artifacts(cfg, net).items():
        _write(path, data)
        logger.info("wrote %s", path)
    report = json.dumps(_report(net), indent=1, sort_keys=True) + "\n"
    _write(f"{cfg.out}.report.json", report.encode("utf-8"))
    for d in net.diagnostics:
        logger.warning("%s: %s", cfg.input, d)
    return EXIT_OK


def _format_stats(stats: dict) -> str:
    rows = []
    for key, value in stats.items():
        if isinstance(value, dict):
            rows.append((key, ""))
            rows.extend((f"  {k}", str(v)) for k, v in value.items())
        else:
            rows.append((key, str(value)))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}".rstrip() for k, v in rows)


def cmd_stats(cfg: RunConfig, as_json: bool = False) -> int:
    stats = network_stats(_load(cfg))
    print(json.dumps(stats, indent=1, sort_keys=True) if as_json else _format_stats(stats))
    return EXIT_OK


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


def check_one_edge(net: Network) -> list[str]:
    seen: dict[tuple[int, int], str] = {}
    problems = []
    for e in net.edges:
        key = (min(e.a, e.b), max(e.a, e.b))
        if key in seen:
            problems.append(f"nodes {key[0]}-{key[1]} carry both {seen[key]} and {e.kind.label}")
        else:
            seen[key] = e.kind.label
    return problems


def check_threshold(net: Network, threshold: float) -> list[str]:
    return [f"spatial edge {e.a}-{e.b} has signed distance {e.features.signed_distance_m} > {threshold}"
            for e in net.edges
            if e.kind is EdgeKind.SPATIAL and e.features.signed_distance_m > threshold * (1 + 1e-8)]


def check_openings(net: Network) -> list[str]:
    return [f"node {n.id} (#{n.express_id}) is an opening element" for n in net.nodes if n.node_type in OPENING_TYPES]


def _digest(net: Network) -> str:
    h = hashlib.sha256()
    h.update(export_json(net))
    h.update(export_graphml(net))
    for part in export_csv(net):
        h.update(part)
    return h.hexdigest()


def check_determinism(cfg: RunConfig, net: Network) -> list[str]:
    first = _digest(net)
    second = _digest(_load(cfg))
    if first != second:
        return [f"two runs produced different exports ({first[:12]} != {second[:12]})"]
    return []


def validate_network(cfg: RunConfig, net: Network) -> dict[str, list[str]]:
    threshold = float(net.meta.get("threshold_m") or cfg.threshold_m)
    return {
        "one_edge_per_pair": check_one_edge(net),
        "threshold_bound": check_threshold(net, threshold),
        "opening_exclusion": check_openings(net),
        "determinism": check_determinism(cfg, net),
    }


def cmd_validate(cfg: RunConfig) -> int:
    try:
        net = _load(cfg)
    except CliError as exc:
        if exc.code != EXIT_PARSE or cfg.input.suffix.lower() != ".json":
            raise
        # a structurally broken export (e.g. reversed endpoints) is a failed invariant, not a parse error
        print(f"FAIL network_schema: {exc}")
        return EXIT_INVALID
    results = validate_network(cfg, net)
    for name, problems in results.items():
        print(f"{'PASS' if not problems else 'FAIL'} {name}")
        for p in problems[:20]:
            print(f"  {p}")
        if len(problems) > 20:
            print(f"  ... {len(problems) - 20} more")
    return EXIT_OK if not any(results.values()) else EXIT_INVALID


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bimnet", description="Turn an IFC building model into a component relationship network.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress and diagnostics")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("input", type=Path, help="IFC (STEP) file, or an exported .json network")
        p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="spatial edge distance (m)")
        p.add_argument("--touch-tol", type=float, default=DEFAULT_TOUCH_TOL, help="touch-floor vertical gap (m)")
        p.add_argument("--eps", type=float, default=1e-6, help="angular and coplanarity tolerance")
        p.add_argument("--strict-refs", action="store_true", help="fail on references to missing entities")
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    p = sub.add_parser("convert", help="build the network and export it")
    common(p)
    p.add_argument("--out", default="graph", help="output path prefix (default: graph)")
    p.add_argument("--format", choices=[f.value for f in ExportFormat], default="json")
    p.add_argument("--csv-psets", default="", help="comma-separated Pset.Property columns for CSV nodes")

    p = sub.add_parser("stats", help="print network statistics")
    common(p)
    p.add_argument("--json", action="store_true", help="print JSON instead of aligned text")

    p = sub.add_parser("validate", help="check network invariants")
    common(p)
    return ap


def _config(args) -> RunConfig:
    return RunConfig(
        input=args.input,
        out=getattr(args, "out", "graph"),
        format=ExportFormat(getattr(args, "format", "json")),
        threshold_m=args.threshold,
        touch_tol_m=args.touch_tol,
        angular_eps=args.eps,
        strict_refs=args.strict_refs,
        csv_psets=[p.strip() for p in getattr(args, "csv_psets", "").split(",") if p.strip()],
    )


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
    except ValueError as exc:
        ap.print_usage(sys.stderr)
        print(f"bimnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "convert":
            return cmd_convert(cfg)
        if args.command == "stats":
            return cmd_stats(cfg, args.json)
        return cmd_validate(cfg)
    except CliError as exc:
        print(f"bimnet: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
