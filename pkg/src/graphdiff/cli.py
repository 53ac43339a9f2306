"""Command line front-end.

Exit status: 0 when every check passed, 1 when a check failed, 2 on invalid
input (malformed JSON, schema violations, graphs breaking the standing
hypotheses, boundary data with a non-dense form domain).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as gio
from .boundary import density_condition
from .convergence import convergence_study
from .graph import validate
from .lattice import LatticeOracleError, theorem_check
from .mesh import mesh_graph
from .operator import NotDenseError, build_operator, build_system, verify_operator_description
from .semigroup import check_positive, check_submarkov, evolve

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


@dataclass
class RunConfig:
    input_path: str
    command: str
    target: str | None = None  # sub-target of check / verify
    h_target: float = 0.01
    eigen_count: int | None = None
    t0: float = 0.0
    t1: float = 1.0
    steps: int = 10
    initial: str = "eigen:0"
    samples: int = 10
    levels: int = 4
    eigen_index: int = 1
    reference: float | None = None
    output_path: str | None = None
    seed: int = 0


class InputError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _load(cfg: RunConfig, *, check_valid: bool = True):
    graph, raw = gio.load(cfg.input_path)
    rep = validate(graph)
    if check_valid and not rep.ok:
        raise InputError("; ".join(str(v) for v in rep.violations))
    return graph, raw


def _boundary(graph, raw):
    return gio.boundary_from_dict(graph, raw)


def _dof_labels(system) -> list[str]:
    labels = [""] * system.n
    for eid, sl in system.dof_map.edge_slices.items():
        for k in range(sl.stop - sl.start):
            labels[sl.start + k] = f"{eid}:{k}"
    for vid, d in system.dof_map.vertex_dofs.items():
        labels[d] = f"vertex:{vid}"
    return labels


def _initial(source: str, op, labels, seed: int) -> np.ndarray:
    n = op.system.n
    if source.startswith("eigen:"):
        k = int(source.split(":", 1)[1])
        if not 0 <= k < op.modes.shape[1]:
            raise InputError(f"--initial: eigenvector index {k} out of range")
        return op.modes[:, k].copy()
    if source.startswith("indicator:"):
        node = source.split(":", 1)[1]
        f = np.zeros(n)
        if node in labels:
            f[labels.index(node)] = 1.0
        elif node.isdigit() and int(node) < n:
            f[int(node)] = 1.0
        else:
            raise InputError(f"--initial: unknown node {node!r}")
        return f
    p = Path(source)
    if not p.exists():
        raise InputError(f"--initial: no such file {source!r}")
    vals = [float(x) for row in csv.reader(p.read_text().splitlines()) for x in row if x.strip()]
    if len(vals) != n:
        raise InputError(f"--initial: expected {n} values, got {len(vals)}")
    return np.array(vals)


def _operator(cfg, graph, raw, eigen_count=None):
    system = build_system(graph, _boundary(graph, raw), cfg.h_target)
    return build_operator(system, eigen_count=eigen_count)


def _execute(cfg: RunConfig) -> tuple[int, str]:
    cmd = cfg.command
    if cmd == "validate":
        graph, _ = _load(cfg, check_valid=False)
        rep = validate(graph)
        if not rep.ok:
            for v in rep.violations:
                print(f"invalid input: {v}", file=sys.stderr)
        return (EXIT_OK if rep.ok else EXIT_INVALID), _json(rep.to_dict())

    graph, raw = _load(cfg)

    if cmd == "mesh":
        rows = []
        for eid, m in mesh_graph(graph, cfg.h_target).items():
            cells = np.append(m.cell_lengths, np.nan)
            for k in range(m.size):
                rows.append([eid, k, float(m.nodes[k]), float(m.lumped_masses[k]),
                             float(cells[k]) if k < m.size - 1 else ""])
        return EXIT_OK, _csv(["edge", "node", "x", "mass", "cell_length"], rows)

    if cmd == "check" and cfg.target == "density":
        res = density_condition(_boundary(graph, raw).X)
        out = {"holds": res.holds, "rank": res.rank, "n_vertices": res.n_vertices,
               "certificates": {c[1]: v for c, v in res.certificates.items()}}
        return (EXIT_OK if res.holds else EXIT_FAILED), _json(out)

    if cmd == "check" and cfg.target == "lattice":
        bd = _boundary(graph, raw)
        chk = theorem_check(bd, seed=cfg.seed)
        out = chk.to_dict()
        if chk.per_vertex is not None:
            out["is_sublattice"] = all(h.sublattice for h in chk.per_vertex.values())
            out["is_stonean"] = all(h.stonean for h in chk.per_vertex.values())
            out["witnesses"] = {v: d["witness"] for v, d in out["per_vertex"].items() if d["witness"] is not None}
        else:
            out["witnesses"] = [] if out["witness"] is None else [out["witness"]]
            out["per_vertex"] = None
        return (EXIT_OK if out["is_sublattice"] else EXIT_FAILED), _json(out)

    if cmd == "spectrum":
        op = _operator(cfg, graph, raw, cfg.eigen_count)
        lam = op.eigenvalues if cfg.eigen_count is None else op.eigenvalues[:cfg.eigen_count]
        return EXIT_OK, _csv(["index", "eigenvalue"], [[k, float(x)] for k, x in enumerate(lam)])

    if cmd == "evolve":
        if cfg.steps < 1 or cfg.t1 < cfg.t0 or cfg.t0 < 0:
            raise InputError("need 0 <= t0 <= t1 and steps >= 1")
        op = _operator(cfg, graph, raw)
        labels = _dof_labels(op.system)
        f0 = _initial(cfg.initial, op, labels, cfg.seed)
        times = np.linspace(cfg.t0, cfg.t1, cfg.steps + 1)
        res = evolve(op, f0, times)
        rows = [[float(t), *map(float, s), float(mn), float(ex)]
                for t, s, mn, ex in zip(res.times, res.states, res.min_entry_kernel, res.max_one_excess)]
        return EXIT_OK, _csv(["time", *labels, "min_kernel_entry", "max_one_excess"], rows)

    if cmd == "check" and cfg.target in ("positivity", "submarkov"):
        op = _operator(cfg, graph, raw)
        v = check_positive(op) if cfg.target == "positivity" else check_submarkov(op)
        return (EXIT_OK if v.holds_for_all_t else EXIT_FAILED), _json(v.to_dict())

    if cmd == "verify" and cfg.target == "operator":
        op = _operator(cfg, graph, raw)
        rep = verify_operator_description(op, samples=cfg.samples, seed=cfg.seed)
        return (EXIT_OK if rep.passed else EXIT_FAILED), _json(rep.to_dict())

    if cmd == "convergence":
        tab = convergence_study(graph, _boundary(graph, raw), cfg.h_target, cfg.levels,
                                cfg.eigen_index, cfg.reference)
        ok = tab.eigen_rate >= 1.9 and tab.eps_rate >= 0.9
        return (EXIT_OK if ok else EXIT_FAILED), _json(tab.to_dict())

    raise InputError(f"unknown command {cmd!r} {cfg.target or ''}".strip())


def run(cfg: RunConfig) -> int:
    try:
        code, text = _execute(cfg)
    except (gio.SchemaError, InputError, NotDenseError, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except LatticeOracleError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", dest="h_target", type=float, default=0.01, help="target mesh width")
    common.add_argument("-o", "--output", dest="output_path", default=None)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="graphdiff", description="Diffusion on weighted metric graphs")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "mesh"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input_path")
    sp = sub.add_parser("spectrum", parents=[common])
    sp.add_argument("input_path")
    sp.add_argument("--count", dest="eigen_count", type=int, default=None)
    sp = sub.add_parser("evolve", parents=[common])
    sp.add_argument("input_path")
    sp.add_argument("--t0", type=float, default=0.0)
    sp.add_argument("--t1", type=float, default=1.0)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--initial", default="eigen:0", help='csv file, "eigen:k" or "indicator:node"')
    sp = sub.add_parser("check", parents=[common])
    sp.add_argument("target", choices=["lattice", "positivity", "submarkov", "density"])
    sp.add_argument("input_path")
    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("target", choices=["operator"])
    sp.add_argument("input_path")
    sp.add_argument("--samples", type=int, default=10)
    sp = sub.add_parser("convergence", parents=[common])
    sp.add_argument("input_path")
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--eigen-index", dest="eigen_index", type=int, default=1)
    sp.add_argument("--reference", type=float, default=None)
    return p


def main(argv=None) -> int:
    p = _parser()
    try:
        ns = p.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    if os.environ.get("GRAPHDIFF_SEED"):
        cfg.seed = int(os.environ["GRAPHDIFF_SEED"])
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
