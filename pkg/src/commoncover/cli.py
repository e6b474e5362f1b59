"""Command-line interface and on-disk formats.

Graph files are JSON objects with a "vertices" list and a "darts" list;
the head of a dart is always derived from reversal and origin, never
stored.  Morphism files store plain id-to-id tables.  Object-graph files
add named object tables and element-level edge morphisms.  All output is
written with sorted keys and no timestamps, so identical inputs and flags
produce byte-identical artifacts.

Exit codes: 0 success or a true answer, 1 a false or negative answer,
2 input or schema errors, 3 internal verification failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys

from .ball_system import build_ball_system_retrying, discover_atoms
from .bounds import bound_report
from .cover_builder import AxiomError, build_cover, extract_certificate
from .gluing import build_glued_cover
from .graphs import Graph, GraphError, GraphMorphism, is_covering, validate_graph
from .object_graphs import (ObjectGraph, SeedSpec, build_object_cover,
                            close_star_maps, make_object, obj_morphism,
                            validate_object_graph)
from .oracle import BudgetExceeded, brute_common_cover
from .refinement import common_cover_exists
from .regular import regular_common_cover
from .star_system import (STRATEGY_ALIGNED, STRATEGY_DR_FULL,
                          build_star_system, build_star_system_retrying)


class SchemaError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in sorted(x.items())}
    return x


def write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _expect(cond, where, message):
    if not cond:
        raise SchemaError("%s: %s" % (where, message))


def load_graph(path: str) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("%s: %s" % (path, exc))
    _expect(isinstance(data, dict), path, "top level must be an object")
    _expect(isinstance(data.get("vertices"), list), path, "missing vertices list")
    _expect(isinstance(data.get("darts"), list), path, "missing darts list")
    vertices, vcol = [], {}
    for i, entry in enumerate(data["vertices"]):
        where = "%s: vertices[%d]" % (path, i)
        _expect(isinstance(entry, dict) and isinstance(entry.get("id"), str),
                where, "needs a string id")
        vertices.append(entry["id"])
        if entry.get("colour") is not None:
            vcol[entry["id"]] = entry["colour"]
    darts, origin, reverse, dcol = [], {}, {}, {}
    for i, entry in enumerate(data["darts"]):
        where = "%s: darts[%d]" % (path, i)
        _expect(isinstance(entry, dict) and isinstance(entry.get("id"), str),
                where, "needs a string id")
        for key in ("reverse", "from"):
            _expect(isinstance(entry.get(key), str), where, "needs %r" % key)
        darts.append(entry["id"])
        origin[entry["id"]] = entry["from"]
        reverse[entry["id"]] = entry["reverse"]
        if entry.get("colour") is not None:
            dcol[entry["id"]] = entry["colour"]
    try:
        g = Graph(vertices, darts, origin, reverse, vcol, dcol)
    except GraphError as exc:
        raise SchemaError("%s: %s" % (path, exc))
    report = validate_graph(g)
    _expect(report.ok, path, "; ".join(report.violations[:3]) or "invalid graph")
    return g


def dump_graph(g: Graph) -> dict:
    def vertex(v):
        out = {"id": v}
        if v in g.vertex_colour:
            out["colour"] = g.vertex_colour[v]
        return out

    def dart(d):
        out = {"id": d, "reverse": g.reverse[d], "from": g.origin[d]}
        if d in g.dart_colour:
            out["colour"] = g.dart_colour[d]
        return out

    return {"vertices": [vertex(v) for v in g.vertices],
            "darts": [dart(d) for d in g.darts]}


def dump_morphism(m: GraphMorphism) -> dict:
    return {"vmap": dict(m.vmap), "dmap": dict(m.dmap)}


def load_morphism(path: str, source: Graph, target: Graph) -> GraphMorphism:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("%s: %s" % (path, exc))
    _expect(isinstance(data, dict) and isinstance(data.get("vmap"), dict)
            and isinstance(data.get("dmap"), dict), path, "needs vmap and dmap")
    return GraphMorphism(source, target, data["vmap"], data["dmap"])


# -- object graphs on disk -------------------------------------------------------


def _load_morphism_tables(entry, where):
    _expect(isinstance(entry, dict) and isinstance(entry.get("vmap"), dict)
            and isinstance(entry.get("emap"), dict), where, "needs vmap and emap")
    return obj_morphism(entry["vmap"], entry["emap"])


def load_object_graph(path: str) -> ObjectGraph:
    g = load_graph(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    objects = {}
    _expect(isinstance(data.get("objects"), dict), path, "missing objects table")
    for name, spec in data["objects"].items():
        where = "%s: objects[%s]" % (path, name)
        _expect(isinstance(spec, dict), where, "must be an object")
        vertices = [e["id"] for e in spec.get("vertices", [])]
        vlabels = [(e["id"], e["label"]) for e in spec.get("vertices", [])
                   if e.get("label") is not None]
        edges = [(e["id"], e["from"], e["to"], e.get("label"))
                 for e in spec.get("edges", [])]
        objects[name] = make_object(vertices, edges, vlabels)
    for key in ("vertex_objects", "edge_objects", "edge_morphisms"):
        _expect(isinstance(data.get(key), dict), path, "missing %s table" % key)
    vobj, eobj, emor = {}, {}, {}
    for v in g.vertices:
        name = data["vertex_objects"].get(v)
        _expect(name in objects, path, "vertex %r has no object" % v)
        vobj[v] = objects[name]
    for d in g.darts:
        name = data["edge_objects"].get(d)
        _expect(name in objects, path, "dart %r has no object" % d)
        _expect(data["edge_objects"].get(g.reverse[d]) == name, path,
                "dart %r and its reverse name different objects" % d)
        eobj[d] = objects[name]
        entry = data["edge_morphisms"].get(d)
        _expect(entry is not None, path, "dart %r has no edge morphism" % d)
        emor[d] = _load_morphism_tables(entry, "%s: edge_morphisms[%s]" % (path, d))
    x = ObjectGraph(g, vobj, eobj, emor)
    report = validate_object_graph(x)
    _expect(report.ok, path, "; ".join(report.violations[:3]) or "invalid")
    return x


def dump_object(obj) -> dict:
    return {"vertices": [{"id": v, **({"label": obj.vlabel[v]} if v in obj.vlabel else {})}
                         for v in obj.vertices],
            "edges": [{"id": e, "from": s, "to": d,
                       **({"label": lab} if lab is not None else {})}
                      for e, s, d, lab in obj.edges]}


def dump_object_graph(x: ObjectGraph) -> dict:
    names = {}
    table = {}
    def name_of(obj):
        key = (obj.vertices, obj.edges, obj.vertex_labels)
        if key not in names:
            names[key] = "ob%03d" % len(names)
            table[names[key]] = dump_object(obj)
        return names[key]

    out = dump_graph(x.graph)
    out["vertex_objects"] = {v: name_of(o) for v, o in sorted(x.vertex_objects.items())}
    out["edge_objects"] = {d: name_of(o) for d, o in sorted(x.edge_objects.items())}
    out["edge_morphisms"] = {d: {"vmap": dict(m.vmap), "emap": dict(m.emap)}
                             for d, m in sorted(x.edge_morphisms.items())}
    out["objects"] = table
    return out


def load_seeds(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("%s: %s" % (path, exc))
    _expect(isinstance(data, dict) and isinstance(data.get("seeds"), list),
            path, "needs a seeds list")
    out = []
    for i, entry in enumerate(data["seeds"]):
        where = "%s: seeds[%d]" % (path, i)
        _expect(isinstance(entry, dict), where, "must be an object")
        for key in ("from", "to", "dart_map", "edge_maps"):
            _expect(key in entry, where, "needs %r" % key)
        edge_maps = {d: _load_morphism_tables(m, where)
                     for d, m in entry["edge_maps"].items()}
        vm = None
        if entry.get("vertex_map") is not None:
            vm = _load_morphism_tables(entry["vertex_map"], where)
        out.append(SeedSpec(entry["from"], entry["to"], dict(entry["dart_map"]),
                            edge_maps, vm))
    return out


def dump_object_morphism(m) -> dict:
    return {"graph": dump_morphism(m.graph),
            "vertex_morphisms": {v: {"vmap": dict(t.vmap), "emap": dict(t.emap)}
                                 for v, t in sorted(m.vertex_morphisms.items())},
            "edge_morphisms": {d: {"vmap": dict(t.vmap), "emap": dict(t.emap)}
                               for d, t in sorted(m.edge_morphisms.items())}}


# -- commands ---------------------------------------------------------------------


def cmd_check(args) -> int:
    g1, g2 = load_graph(args.first), load_graph(args.second)
    ok, joint = common_cover_exists(g1, g2)
    if ok:
        print("common cover exists (%d joint blocks)" % joint.partition.n_blocks())
        return 0
    print("no common cover")
    return 1


def _write_cover(outdir, graph, mu1, mu2, extra) -> None:
    os.makedirs(outdir, exist_ok=True)
    payload = {"graph": dump_graph(graph)}
    payload.update(extra)
    write_json(os.path.join(outdir, "cover.json"), payload)
    write_json(os.path.join(outdir, "mu1.json"), dump_morphism(mu1))
    write_json(os.path.join(outdir, "mu2.json"), dump_morphism(mu2))


def cmd_build(args) -> int:
    g1, g2 = load_graph(args.first), load_graph(args.second)
    ok, _ = common_cover_exists(g1, g2)
    if not ok:
        print("no common cover", file=_sys.stderr)
        return 1
    if args.backend == "star":
        strategy = STRATEGY_DR_FULL if args.strategy == "dr" else STRATEGY_ALIGNED
        system = build_star_system_retrying(g1, g2, strategy, args.explore)
        built = build_cover(system, component=args.component)
        _write_cover(args.out, built.graph, built.mu1, built.mu2, {
            "backend": "star", "strategy": args.strategy,
            "degrees": list(built.degrees), "n_multiple": built.n_multiple,
            "component_sizes": list(built.component_sizes),
            "provenance": {"vertices": built.vertex_label,
                           "darts": built.dart_label}})
    elif args.backend == "ball":
        system = build_ball_system_retrying(g1, g2, args.radius, args.explore)
        based_arrow = None
        if args.based:
            based_arrow = discover_atoms(g1, g2, system.alignment,
                                         args.radius, 0).vertex_arrows[0]
        built = build_cover(system, component=args.component,
                            based_at=based_arrow)
        cert = extract_certificate(built, system, args.certificate_radius,
                                   check_fixed_ball=args.based)
        _write_cover(args.out, built.graph, built.mu1, built.mu2, {
            "backend": "ball", "radius": args.radius,
            "degrees": list(built.degrees), "n_multiple": built.n_multiple,
            "component_sizes": list(built.component_sizes),
            "provenance": {"vertices": built.vertex_label,
                           "darts": built.dart_label}})
        write_json(os.path.join(args.out, "certificate.json"), {
            "radius": cert.radius, "test_radius": cert.test_radius,
            "mismatches": cert.mismatches,
            "fixes_base_ball": cert.fixes_base_ball,
            "entries": [{"tree_vertex": list(e.tree_vertex),
                         "arrow": e.arrow_serial,
                         "matches_label": e.matches_label,
                         "witness_ok": e.witness_ok} for e in cert.entries]})
        if not cert.ok:
            print("certificate has mismatches", file=_sys.stderr)
            return 3
    else:
        glued = build_glued_cover(g1, g2, args.radius, args.explore,
                                  component=args.component)
        _write_cover(args.out, glued.graph, glued.mu1, glued.mu2, {
            "backend": "glue", "radius": args.radius,
            "component_sizes": list(glued.component_sizes),
            "subdivided": glued.subdivided,
            "weights": {"scale": glued.weights.scale,
                        "integral": {str(k): v for k, v
                                     in glued.weights.integral.items()}}})
    print("wrote %s" % args.out)
    return 0


def cmd_build_objects(args) -> int:
    x1 = load_object_graph(args.first)
    x2 = load_object_graph(args.second)
    seeds = load_seeds(args.seeds)
    system = close_star_maps(x1, x2, seeds)
    result = build_object_cover(system, component=args.component)
    os.makedirs(args.out, exist_ok=True)
    write_json(os.path.join(args.out, "cover.json"), {
        **dump_object_graph(result.cover),
        "degrees": list(result.built.degrees),
        "n_multiple": result.built.n_multiple})
    write_json(os.path.join(args.out, "mu1.json"), dump_object_morphism(result.mu1))
    write_json(os.path.join(args.out, "mu2.json"), dump_object_morphism(result.mu2))
    print("wrote %s" % args.out)
    return 0


def cmd_verify(args) -> int:
    cover_path = args.cover
    if os.path.isdir(cover_path):
        cover_dir = cover_path
        cover_path = os.path.join(cover_path, "cover.json")
    else:
        cover_dir = os.path.dirname(cover_path)
    with open(cover_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    graph_data = payload.get("graph", payload)
    cover = _graph_from_data(graph_data, cover_path)
    g1, g2 = load_graph(args.first), load_graph(args.second)
    mu1 = load_morphism(os.path.join(cover_dir, "mu1.json"), cover, g1)
    mu2 = load_morphism(os.path.join(cover_dir, "mu2.json"), cover, g2)
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        rep = is_covering(mu)
        if not rep.ok:
            print("%s fails: %s at %r" % (name, rep.reason, rep.witness))
            return 1
    print("cover verifies onto both inputs")
    return 0


def _graph_from_data(data, where) -> Graph:
    _expect(isinstance(data, dict), where, "graph payload must be an object")
    vertices = [e["id"] for e in data.get("vertices", [])]
    vcol = {e["id"]: e["colour"] for e in data.get("vertices", [])
            if e.get("colour") is not None}
    darts = [e["id"] for e in data.get("darts", [])]
    origin = {e["id"]: e["from"] for e in data.get("darts", [])}
    reverse = {e["id"]: e["reverse"] for e in data.get("darts", [])}
    dcol = {e["id"]: e["colour"] for e in data.get("darts", [])
            if e.get("colour") is not None}
    g = Graph(vertices, darts, origin, reverse, vcol, dcol)
    report = validate_graph(g)
    _expect(report.ok, where, "; ".join(report.violations[:3]) or "invalid graph")
    return g


def cmd_bounds(args) -> int:
    params = {}
    for key, value in (("edges", args.edges), ("v_prime", args.v_prime),
                       ("d", args.d), ("radius", args.radius), ("v", args.v),
                       ("isotropy_lcm", args.iso_lcm), ("v1", args.v1),
                       ("v2", args.v2)):
        if value is not None:
            params[key] = value
    if args.kind == "regular":
        params["odd"] = bool(args.odd)
    try:
        report = bound_report(args.kind, actual=args.actual, **params)
    except ValueError as exc:
        raise SchemaError(str(exc))
    if report.bound.denominator == 1:
        print(report.bound.numerator)
    else:
        print("%.6g" % report.bound_float)
    if report.actual is not None:
        print("actual=%d satisfied=%s" % (report.actual, report.satisfied))
    return 0


def cmd_regular(args) -> int:
    g1, g2 = load_graph(args.first), load_graph(args.second)
    result = regular_common_cover(g1, g2, component=args.component)
    _write_cover(args.out, result.graph, result.mu1, result.mu2, {
        "backend": "regular", "degrees": list(result.degrees),
        "bound": result.bound, "total_vertices": result.total_vertices})
    print("wrote %s" % args.out)
    return 0


def cmd_export_dot(args) -> int:
    g = load_graph(args.file)
    lines = ["graph G {"]
    for v in g.vertices:
        attrs = ""
        if v in g.vertex_colour:
            attrs = ' [colour="%s"]' % g.vertex_colour[v]
        lines.append('  "%s"%s;' % (v, attrs))
    for d in g.edge_reps():
        rd = g.reverse[d]
        attrs = []
        if d in g.dart_colour:
            attrs.append('taillabel="%s"' % g.dart_colour[d])
        if rd in g.dart_colour:
            attrs.append('headlabel="%s"' % g.dart_colour[rd])
        suffix = " [%s]" % ", ".join(attrs) if attrs else ""
        lines.append('  "%s" -- "%s"%s;' % (g.origin[d], g.head(d), suffix))
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    g1, g2 = load_graph(args.first), load_graph(args.second)
    result = brute_common_cover(g1, g2, args.max)
    if result.budget_exceeded:
        print("budget exceeded", file=_sys.stderr)
        return 2
    if result.found:
        print("common cover with %d vertices (degree %d over the first input)"
              % (len(result.cover.vertices), result.degree))
        return 0
    print("none up to degree %d" % args.max)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commoncover",
        description="Construct and certify common finite covers of graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether a common cover exists")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build", help="build and verify a common finite cover")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--backend", choices=["star", "ball", "glue"], default="star")
    p.add_argument("--strategy", choices=["dr", "aligned"], default="dr")
    p.add_argument("-R", "--radius", type=int, default=1)
    p.add_argument("--explore", type=int, default=None)
    p.add_argument("--component", choices=["least", "all"], default="least")
    p.add_argument("--based", action="store_true",
                   help="ball backend: pin the cover to the basepoint arrow "
                        "and certify that the base ball is fixed")
    p.add_argument("--certificate-radius", type=int, default=2)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("build-objects", help="common cover of graphs of objects")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--seeds", required=True)
    p.add_argument("--component", choices=["least", "all"], default="least")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_build_objects)

    p = sub.add_parser("verify", help="re-verify a stored cover")
    p.add_argument("cover")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="closed-form cover size bounds")
    p.add_argument("--kind", choices=["general", "ball", "objects", "regular"],
                   required=True)
    p.add_argument("--edges", type=int)
    p.add_argument("--v-prime", dest="v_prime", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--iso-lcm", dest="iso_lcm", type=int)
    p.add_argument("--v1", type=int)
    p.add_argument("--v2", type=int)
    p.add_argument("--odd", action="store_true")
    p.add_argument("--actual", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("regular", help="fast common cover of regular graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--component", choices=["least", "all"], default="least")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_regular)

    p = sub.add_parser("export-dot", help="dot rendering of a graph file")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("oracle", help="brute-force least common cover")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max", type=int, default=4)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, GraphError) as exc:
        print("input error: %s" % exc, file=_sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print("budget exceeded: %s" % exc, file=_sys.stderr)
        return 2
    except AxiomError as exc:
        print("axiom failure: %s" % exc, file=_sys.stderr)
        return 2
    except RuntimeError as exc:
        print("verification failure: %s" % exc, file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
