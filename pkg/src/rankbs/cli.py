"""Command-line front end.

Exit codes: 0 success, 1 a negative mathematical verdict (the document is
still printed), 2 parse or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FilePath

from . import semigroup as sg
from . import staralg as sa
from .errors import (
    ActCompatibilityViolated,
    AxiomViolated,
    CubicConditionViolated,
    DegreesNotEquivalent,
    FlipSizeMismatch,
    NonBijectiveSigma,
    NonBijectiveTheta,
    NotPseudoFree,
    NotRightLCM,
    ParseError,
    RankBSError,
    RelationFailed,
    ZeroRestrictionSum,
)
from .parsing import SessionConfig, parse_expression, parse_path, preset_doc
from .periodicity import (
    CyclineTriple,
    affine_presentation_check,
    cycline_structure,
    is_cycline_to_depth,
    phi_pq,
    simplicity_report,
)
from .selfsim import act_restrict, from_json, is_pseudo_free
from .selftest import run_selftest

# errors that are verdicts about the input structure rather than malformed input
VERDICT_ERRORS = (
    NonBijectiveTheta, CubicConditionViolated, FlipSizeMismatch, NonBijectiveSigma,
    ActCompatibilityViolated, AxiomViolated, ZeroRestrictionSum, NotPseudoFree,
    NotRightLCM, RelationFailed, DegreesNotEquivalent,
)


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="session config JSON file")
    p.add_argument("--preset", default=argparse.SUPPRESS,
                   help="instance shorthand, e.g. odometer:2,3  po:2,3  lambda1:2,4  gbs:2,3,3,5  flip:2")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--depth", type=int, default=argparse.SUPPRESS)
    p.add_argument("--cap", type=int, default=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="rankbs", parents=[common],
                     description="Self-similar k-graphs, rank-k BS semigroups and their *-algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="build and validate the configured instance")
    p = sub.add_parser("nf", parents=[common], help="canonical form of a generator word")
    p.add_argument("word")
    p = sub.add_parser("mul", parents=[common], help="product of two semigroup elements")
    p.add_argument("x")
    p.add_argument("y")
    p = sub.add_parser("lcm", parents=[common], help="right LCM of two semigroup elements")
    p.add_argument("x")
    p.add_argument("y")
    p = sub.add_parser("act", parents=[common], help="a^g . path and the restriction exponent")
    p.add_argument("g", type=int)
    p.add_argument("path")
    sub.add_parser("report", parents=[common], help="periodicity / simplicity report")
    p = sub.add_parser("cycline", parents=[common], help="cycline verdict for (mu, a^g, nu)")
    p.add_argument("mu")
    p.add_argument("g", type=int)
    p.add_argument("nu")
    p = sub.add_parser("center", parents=[common], help="central unitary V_{p,q}")
    p.add_argument("p")
    p.add_argument("q")
    p = sub.add_parser("staralg", parents=[common], help="star-algebra computations")
    p.add_argument("op", choices=["eval", "mul", "kms", "center", "hom"])
    p.add_argument("args", nargs="+")
    p = sub.add_parser("furstenberg", parents=[common], help="affine model and digit relations")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    p.add_argument("--inject-cubic", action="store_true", help="add a cubic-violating instance")
    p.add_argument("--zoo-only", action="store_true", help="skip the configured instance")
    return parser


def load_config(ns) -> SessionConfig:
    if getattr(ns, "config", None):
        try:
            text = FilePath(ns.config).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}") from exc
        cfg = SessionConfig.loads(text)
    else:
        cfg = SessionConfig()
    doc = cfg.to_json()
    if getattr(ns, "preset", None):
        doc["action"] = preset_doc(ns.preset)
    for key in ("seed", "depth", "cap"):
        if hasattr(ns, key):
            doc[key] = getattr(ns, key)
    if getattr(ns, "json", False):
        doc["format"] = "json"
    return SessionConfig.from_json(doc)


def _degree(text: str, k: int) -> tuple:
    try:
        d = tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError as exc:
        raise ParseError(f"cannot parse degree {text!r}") from exc
    if len(d) != k or any(x < 0 for x in d):
        raise ParseError(f"degree {text!r} must have {k} nonnegative entries")
    return d


# ---------------------------------------------------------------------------
# commands; each returns (document, ok)


def cmd_validate(ss, ns, cfg):
    pf = is_pseudo_free(ss)
    return {"valid": True, "family": ss.family, "k": ss.k, "sizes": list(ss.sizes),
            "orbits": [{"color": c, "n": n, "m": m} for c, n, m in ss.orbit_data],
            "pseudo_free": pf.to_json()}, True


def cmd_nf(ss, ns, cfg):
    x = sg.parse_element(ss, ns.word)
    return {"input": ns.word, "normal_form": sg.element_str(ss, x), "element": x.to_json(),
            "in_S_N": sg.is_member(ss, x)}, True


def cmd_mul(ss, ns, cfg):
    x, y = sg.parse_element(ss, ns.x), sg.parse_element(ss, ns.y)
    z = sg.multiply(ss, x, y)
    return {"x": sg.element_str(ss, x), "y": sg.element_str(ss, y), "product": sg.element_str(ss, z),
            "element": z.to_json()}, True


def cmd_lcm(ss, ns, cfg):
    x, y = sg.parse_element(ss, ns.x), sg.parse_element(ss, ns.y)
    for name, el in (("x", x), ("y", y)):
        if not sg.is_member(ss, el):
            raise ParseError(f"{name} = {sg.element_str(ss, el)} is not in the semigroup")
    z = sg.right_lcm(ss, x, y)
    doc = {"x": sg.element_str(ss, x), "y": sg.element_str(ss, y)}
    if z is None:
        doc.update({"intersection": "empty", "lcm": None})
    else:
        doc.update({"intersection": "principal", "lcm": sg.element_str(ss, z), "element": z.to_json()})
    return doc, True


def cmd_act(ss, ns, cfg):
    p = parse_path(ss, ns.path)
    img, h = act_restrict(ss, ns.g, p)
    return {"g": ns.g, "path": str(p), "image": str(img), "restriction": h}, True


def cmd_report(ss, ns, cfg):
    rep = simplicity_report(ss)
    doc = rep.to_json()
    doc["text"] = rep.to_text()
    return doc, True


def cmd_cycline(ss, ns, cfg):
    t = CyclineTriple(parse_path(ss, ns.mu), ns.g, parse_path(ss, ns.nu))
    v = is_cycline_to_depth(ss, t, cfg.depth, cap=cfg.cap, seed=cfg.seed)
    doc = {"mu": str(t.mu), "g": t.g, "nu": str(t.nu), "depth_check": v.to_json()}
    try:
        st = cycline_structure(ss)
        doc["structural"] = {"cycline": st.contains(t), **st.to_json()}
    except RankBSError:
        doc["structural"] = None
    return doc, bool(v)


def _center(ss, p_text, q_text):
    p, q = _degree(p_text, ss.k), _degree(q_text, ss.k)
    phi = phi_pq(ss, p, q)
    V = sa.build_V(ss, p, q)
    comm = sa.commutes_with_generators(ss, V)
    unitary = sa.is_unitary(ss, V)
    doc = {"p": list(p), "q": list(q), "V": str(V), "unitary": unitary, "commutes": comm,
           "uv_pairs_checked": len(phi.forward) * len(phi.inverse)}
    return doc, unitary and comm["ok"]


def cmd_center(ss, ns, cfg):
    return _center(ss, ns.p, ns.q)


def _combo_doc(ss, A):
    return {"value": str(A), "terms": A.to_json(), "canonical": str(sa.canonical_form(ss, A))}


HOM_PRESETS = ("mn:2", "mn:3", "squareflip", "broken")


def cmd_staralg(ss, ns, cfg):
    op, args = ns.op, ns.args
    arity = {"eval": 1, "mul": 2, "kms": 2, "center": 2, "hom": 1}[op]
    if len(args) != arity:
        raise ParseError(f"staralg {op} takes {arity} argument(s)", got=len(args))
    if op == "eval":
        A = parse_expression(ss, args[0])
        return {"op": op, "input": args[0], **_combo_doc(ss, A)}, True
    if op == "mul":
        A, B = (parse_expression(ss, a) for a in args)
        return {"op": op, **_combo_doc(ss, sa.product(ss, A, B))}, True
    if op == "kms":
        A, B = (parse_expression(ss, a) for a in args)
        lhs = sa.omega(ss, sa.product(ss, A, B))
        rhs = sa.omega(ss, sa.product(ss, B, sa.sigma_i(ss, A)))
        return {"op": op, "omega_AB": str(lhs), "omega_B_sigma_A": str(rhs), "holds": lhs == rhs}, lhs == rhs
    if op == "center":
        doc, ok = _center(ss, *args)
        return {"op": op, **doc}, ok
    name = args[0]
    if name.startswith("mn:"):
        n = int(name[3:])
        return {"op": op, "example": name, **sa.run_example_mn(n)}, True
    if name == "squareflip":
        return {"op": op, "example": name, **sa.run_example_squareflip()}, True
    if name == "broken":
        b = sa.broken_flip_map()
        return {"op": op, "example": name, **sa.hom_check(b["src"], b["dst"], b["images"], with_unitary=False)}, True
    raise ParseError(f"unknown hom preset {name!r}; choose from {HOM_PRESETS}")


def cmd_furstenberg(ss, ns, cfg):
    try:
        res = affine_presentation_check(ns.p, ns.q)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    res["summary"] = f"all {res['mixed_relations']} digit relations verified"
    return res, True


COMMANDS = {
    "validate": cmd_validate, "nf": cmd_nf, "mul": cmd_mul, "lcm": cmd_lcm, "act": cmd_act,
    "report": cmd_report, "cycline": cmd_cycline, "center": cmd_center, "staralg": cmd_staralg,
    "furstenberg": cmd_furstenberg,
}

_NO_INSTANCE = ("furstenberg",)


def _render_text(command: str, doc: dict) -> str:
    if "error" in doc:
        lines = [f"error: {doc['error']}: {doc.get('message', '')}"]
        extra = {k: v for k, v in doc.items()
                 if k not in ("error", "message", "command", "exit_code", "config", "result")}
        lines += [f"  {k}: {json.dumps(v, sort_keys=True)}" for k, v in extra.items()]
        return "\n".join(lines)
    r = doc.get("result", {})
    if command == "validate":
        return "valid" + f" ({r['family']}, pseudo-free: {r['pseudo_free']['status']})"
    if command == "report":
        head = f"periodic: {_b(r['periodic'])}, simple: {_b(r['simple'])}, kirchberg: {_b(r['kirchberg'])}"
        return head + "\n" + r["text"]
    if command in ("nf",):
        return r["normal_form"]
    if command == "mul":
        return r["product"]
    if command == "lcm":
        return "empty intersection" if r["lcm"] is None else r["lcm"]
    if command == "act":
        return f"{r['image']}  restriction a^{r['restriction']}"
    if command == "cycline":
        v = r["depth_check"]
        line = f"{v['status']} to depth {v['depth']} ({v['checked']} words, exhaustive: {_b(v['exhaustive'])})"
        if v["status"] == "falsified":
            line += f"; witness w = {v['witness']['w']}"
        if r.get("structural"):
            line += f"\nstructural: {_b(r['structural']['cycline'])} ({r['structural']['description']})"
        return line
    if command == "furstenberg":
        return r["summary"]
    if command == "selftest":
        lines = [f"{s['instance']:<22} {s['suite']:<12} {'ok' if s['ok'] else 'FAIL'} ({s['checks']})"
                 for s in r["suites"]]
        lines.append(f"passed {r['passed']}, failed {r['failed']}")
        if "first_failure" in r:
            lines.append("first failure: " + json.dumps(r["first_failure"], sort_keys=True))
        return "\n".join(lines)
    if command == "center" or (command == "staralg" and r.get("op") == "center"):
        return (f"V = {r['V']}\nunitary: {_b(r['unitary'])}\n"
                f"commutes with generators: {_b(r['commutes']['ok'])} ({', '.join(r['commutes']['checked'])})\n"
                f"E:uv pairs checked: {r['uv_pairs_checked']}")
    if command == "staralg" and r.get("op") == "hom":
        lines = [f"{r['example']}: {'all checks pass' if r['ok'] else 'FAILED'}"]
        for key, val in r.items():
            if isinstance(val, dict):
                detail = val.get("relations") or val.get("generators") or val.get("value") or ""
                lines.append(f"  {key}: ok {json.dumps(detail, sort_keys=True) if detail else ''}".rstrip())
        return "\n".join(lines)
    if command == "staralg" and "value" in r:
        return f"{r['value']}\ncanonical: {r['canonical']}"
    if command == "staralg" and r.get("op") == "kms":
        return f"omega(AB) = {r['omega_AB']}, omega(B sigma(A)) = {r['omega_B_sigma_A']}, holds: {_b(r['holds'])}"
    return json.dumps(r, indent=2, sort_keys=True)


def _b(v) -> str:
    return "undetermined" if v is None else str(v).lower()


def run(argv=None) -> tuple:
    """Returns ``(exit_code, document, text)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = load_config(ns)
    except (_ArgError, ParseError) as exc:
        details = exc.to_dict() if isinstance(exc, RankBSError) else {"error": "UsageError", "message": str(exc)}
        doc = {"command": argv[0] if argv else None, "exit_code": 2, **details}
        return 2, doc, _render_text("", doc)
    command = ns.command
    doc = {"command": command, "config": cfg.to_json()}
    try:
        if command == "selftest":
            builder = None if ns.zoo_only or getattr(ns, "config", None) is None and not getattr(ns, "preset", None) \
                else (lambda: from_json(cfg.action, cap=cfg.cap))
            res = run_selftest(cfg.seed, builder, inject_cubic=ns.inject_cubic)
            ok = res["ok"]
        else:
            ss = None if command in _NO_INSTANCE else from_json(cfg.action, cap=cfg.cap)
            res, ok = COMMANDS[command](ss, ns, cfg)
        doc["result"] = res
        code = 0 if ok else 1
    except VERDICT_ERRORS as exc:
        doc.update(exc.to_dict())
        code = 1
        if command == "validate":
            doc["result"] = {"valid": False}
    except RankBSError as exc:
        doc.update(exc.to_dict())
        code = 2
    doc["exit_code"] = code
    fmt = cfg.format
    text = json.dumps(doc, sort_keys=True, indent=2) if fmt == "json" else _render_text(command, doc)
    return code, doc, text


def main(argv=None) -> int:
    code, _, text = run(argv)
    stream = sys.stdout if code != 2 else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
