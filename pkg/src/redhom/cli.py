"""Command-line surface: one workspace in, one JSON report on stdout.

Human-readable one-liners go to stderr; stdout carries a single
deterministic JSON document (sorted keys, no timestamps) embedding the
tool version and every window and seed that shaped the result.
Exit codes: 0 success or accept, 1 reject, fail, or absent, 2 malformed
input located by a JSON pointer.
"""

import argparse
import json
import sys

from . import __version__
from .homalg import (
    HomAlgError,
    biduality,
    ext_dims,
    pushforward,
    r_dual,
)
from .invariants import (
    check_P_transfer,
    check_cor33,
    check_main_theorem,
    check_prop27,
    check_t2,
)
from .reducing import (
    CertificateError,
    CertificateFormatError,
    SearchConfig,
    load_certificate,
    save_certificate,
    search,
    sequence_to_dict,
    transform_cosyzygy,
    transform_syzygy,
    verify,
)
from .resolution import resolve
from .workspace import WorkspaceError, load_workspace


def _search_flags(p: argparse.ArgumentParser, window_too: bool = True):
    d = SearchConfig()
    p.add_argument("--max-r", type=int, default=d.max_r)
    p.add_argument("--max-a", type=int, default=d.max_a)
    p.add_argument("--max-b", type=int, default=d.max_b)
    p.add_argument("--max-n", type=int, default=d.max_n)
    p.add_argument("--budget", type=int, default=d.budget)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--samples", type=int, default=d.samples)
    if window_too:
        p.add_argument("--window", type=int, default=d.window)


def _config_from(args) -> SearchConfig:
    return SearchConfig(max_r=args.max_r, max_a=args.max_a,
                        max_b=args.max_b, max_n=args.max_n,
                        budget=args.budget, seed=args.seed,
                        samples=args.samples, window=args.window)


def _bounds_dict(cfg: SearchConfig) -> dict:
    return {"max_r": cfg.max_r, "max_a": cfg.max_a, "max_b": cfg.max_b,
            "max_n": cfg.max_n, "budget": cfg.budget, "seed": cfg.seed,
            "samples": cfg.samples, "window": cfg.window}


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="redhom",
        description="exact homological invariants and chain certificates "
                    "over Artinian local algebras")
    top.add_argument("--workspace", help="workspace JSON file")
    sub = top.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra").add_subparsers(dest="sub", required=True)
    alg.add_parser("info")

    p = sub.add_parser("resolve")
    p.add_argument("module")
    p.add_argument("--window", type=int, default=10)

    p = sub.add_parser("ext")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--window", type=int, default=10)

    p = sub.add_parser("dual")
    p.add_argument("module")

    p = sub.add_parser("pushforward")
    p.add_argument("module")

    red = sub.add_parser("reduce").add_subparsers(dest="sub", required=True)
    p = red.add_parser("search")
    p.add_argument("module")
    p.add_argument("--target", choices=["pd", "gdim"], required=True)
    p.add_argument("--save", help="write the found certificate here")
    _search_flags(p)
    p = red.add_parser("verify")
    p.add_argument("certificate",
                   help="certificate name in the workspace, or a JSON path")
    p.add_argument("--window", type=int, default=10)
    tr = red.add_parser("transform").add_subparsers(dest="direction",
                                                    required=True)
    p = tr.add_parser("syzygy")
    p.add_argument("certificate")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--save")
    p = tr.add_parser("cosyzygy")
    p.add_argument("certificate")
    p.add_argument("module", help="the module whose syzygy the chain reduces")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--save")

    thm = sub.add_parser("theorem").add_subparsers(dest="sub", required=True)
    p = thm.add_parser("main")
    p.add_argument("module")
    p.add_argument("certificate")
    p.add_argument("--window", type=int, default=10)
    p = thm.add_parser("t2")
    p.add_argument("module")
    p.add_argument("certificate")
    p.add_argument("--window", type=int, default=10)
    p = thm.add_parser("prop27")
    p.add_argument("module")
    _search_flags(p)
    p = thm.add_parser("cor33")
    _search_flags(p)
    p = thm.add_parser("ptransfer")
    p.add_argument("certificate")
    p.add_argument("module", help="the fixed comparison module")
    p.add_argument("--window", type=int, default=10)

    cor = sub.add_parser("corpus").add_subparsers(dest="sub", required=True)
    p = cor.add_parser("run")
    p.add_argument("--filter", default="")

    return top


def _emit(report: dict, summary: str, code: int) -> int:
    report["tool_version"] = __version__
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if summary:
        sys.stderr.write(summary + "\n")
    return code


def _need_workspace(args):
    if not args.workspace:
        raise WorkspaceError("", "this command needs --workspace")
    return load_workspace(args.workspace)


def _certificate(ws, args):
    name = args.certificate
    if name in ws.certificates:
        return ws.certificate(name)
    if name.endswith(".json"):
        try:
            return load_certificate(name, algebra=ws.algebra)
        except OSError as exc:
            raise WorkspaceError(f"/certificates/{name}",
                                 f"cannot read certificate file: {exc}")
    return ws.certificate(name)  # raises with the /certificates pointer


def _report_theorem(rep) -> dict:
    return {"theorem": rep.name, "ok": rep.ok, "window": rep.window,
            "hypotheses": rep.hypotheses, "conclusions": rep.conclusions}


def _cmd_algebra(args) -> int:
    ws = _need_workspace(args)
    report = {"command": "algebra info", "algebra": ws.algebra.summary()}
    return _emit(report, f"algebra: {ws.algebra!r}", 0)


def _cmd_resolve(args) -> int:
    ws = _need_workspace(args)
    mod = ws.module(args.module)
    res = resolve(mod)
    res.extend(args.window)
    betti = res.betti_list(args.window)
    report = {"command": "resolve", "module": args.module,
              "window": args.window, "betti": betti,
              "terminated_at": res.terminated_at(args.window)}
    return _emit(report, f"betti numbers of {args.module}: {betti}", 0)


def _cmd_ext(args) -> int:
    ws = _need_workspace(args)
    dims = ext_dims(ws.module(args.source), ws.module(args.target),
                    args.window)
    report = {"command": "ext", "source": args.source,
              "target": args.target, "window": args.window, "dims": dims}
    return _emit(report,
                 f"Ext^i({args.source}, {args.target}) dims: {dims}", 0)


def _cmd_dual(args) -> int:
    ws = _need_workspace(args)
    mod = ws.module(args.module)
    dual = r_dual(mod)
    bid = biduality(mod)
    report = {"command": "dual", "module": args.module, "dim": mod.dim,
              "dual_dim": dual.module.dim,
              "dual_min_gens": dual.module.gens_count(),
              "torsionless": bid.is_injective,
              "reflexive": bid.is_bijective}
    return _emit(report,
                 f"dual of {args.module}: dim {dual.module.dim}, "
                 f"torsionless={bid.is_injective} "
                 f"reflexive={bid.is_bijective}", 0)


def _cmd_pushforward(args) -> int:
    ws = _need_workspace(args)
    mod = ws.module(args.module)
    try:
        push = pushforward(mod)
    except HomAlgError as exc:
        report = {"command": "pushforward", "module": args.module,
                  "embeds": False, "reason": str(exc)}
        return _emit(report, f"pushforward of {args.module}: {exc}", 1)
    mid = push.sequence.middle
    report = {"command": "pushforward", "module": args.module,
              "embeds": True,
              "free_rank": mid.dim // mod.algebra.dim,
              "forward_dim": push.forward.dim}
    return _emit(report,
                 f"{args.module} embeds into a rank "
                 f"{mid.dim // mod.algebra.dim} free module", 0)


def _step_summaries(seq) -> list:
    return [{"a": s.a, "b": s.b, "n": s.n,
             "middle_dim": s.sequence.middle.dim}
            for s in seq.steps]


def _cmd_reduce_search(args) -> int:
    ws = _need_workspace(args)
    mod = ws.module(args.module)
    cfg = _config_from(args)
    result = search(mod, args.target, cfg)
    report = {"command": "reduce search", "module": args.module,
              "target": args.target, "bounds": _bounds_dict(cfg),
              "found": result.found, "reason": result.reason,
              "candidates": result.candidates,
              "exhausted": result.exhausted}
    if result.found:
        report["r"] = result.sequence.r
        report["steps"] = _step_summaries(result.sequence)
        report["certificate"] = sequence_to_dict(result.sequence)
        if args.save:
            save_certificate(result.sequence, args.save)
        return _emit(report,
                     f"found a chain with r = {result.sequence.r} "
                     f"for {args.module} (target {args.target})", 0)
    return _emit(report, f"no chain found: {result.reason}", 1)


def _cmd_reduce_verify(args) -> int:
    ws = _need_workspace(args)
    seq = _certificate(ws, args)
    rep = verify(seq, window=args.window)
    report = {"command": "reduce verify", "certificate": args.certificate,
              "window": args.window, "accepted": rep.ok,
              "reason": rep.reason, "step": rep.step,
              "target": rep.target, "r": rep.r, "terminal": rep.terminal}
    if rep.ok:
        return _emit(report,
                     f"certificate accepted (r = {rep.r}, "
                     f"target {rep.target})", 0)
    return _emit(report,
                 f"certificate rejected at step {rep.step}: {rep.reason}", 1)


def _cmd_reduce_transform(args) -> int:
    ws = _need_workspace(args)
    seq = _certificate(ws, args)
    if args.direction == "syzygy":
        try:
            out = transform_syzygy(seq, window=args.window)
        except CertificateError as exc:
            report = {"command": "reduce transform syzygy",
                      "certificate": args.certificate,
                      "window": args.window, "ok": False,
                      "reason": str(exc)}
            return _emit(report, f"transform failed: {exc}", 1)
        report = {"command": "reduce transform syzygy",
                  "certificate": args.certificate, "window": args.window,
                  "ok": True, "base_dim": out.base.dim, "r": out.r,
                  "steps": _step_summaries(out),
                  "result": sequence_to_dict(out)}
        if args.save:
            save_certificate(out, args.save)
        return _emit(report,
                     f"chain transported to the syzygy "
                     f"(base dim {out.base.dim})", 0)
    mod = ws.module(args.module)
    outcome = transform_cosyzygy(seq, mod, window=args.window)
    report = {"command": "reduce transform cosyzygy",
              "certificate": args.certificate, "module": args.module,
              "window": args.window, "ok": outcome.ok,
              "reason": outcome.reason}
    if not outcome.ok:
        return _emit(report, f"transport rejected: {outcome.reason}", 1)
    out = outcome.sequence
    report["base_dim"] = out.base.dim
    report["r"] = out.r
    report["steps"] = _step_summaries(out)
    report["result"] = sequence_to_dict(out)
    if args.save:
        save_certificate(out, args.save)
    return _emit(report,
                 f"chain transported back to {args.module}", 0)


def _cmd_theorem(args) -> int:
    ws = _need_workspace(args)
    name = args.sub
    if name == "main":
        rep = check_main_theorem(ws.module(args.module),
                                 _certificate(ws, args),
                                 window=args.window)
    elif name == "t2":
        rep = check_t2(ws.module(args.module), _certificate(ws, args),
                       window=args.window)
    elif name == "prop27":
        rep = check_prop27(ws.algebra, ws.module(args.module),
                           config=_config_from(args))
    elif name == "cor33":
        rep = check_cor33(ws.algebra, window=args.window,
                          config=_config_from(args))
    else:
        rep = check_P_transfer(_certificate(ws, args),
                               ws.module(args.module), window=args.window)
    report = {"command": f"theorem {name}"}
    report.update(_report_theorem(rep))
    verdict = "holds" if rep.ok else "FAILED"
    return _emit(report, f"theorem {name}: {verdict}", 0 if rep.ok else 1)


def _cmd_corpus(args) -> int:
    from .corpus import run_corpus
    outcome = run_corpus(name_filter=args.filter)
    report = {"command": "corpus run", "filter": args.filter}
    report.update(outcome)
    passed = sum(1 for f in outcome["fixtures"] if f["ok"])
    total = len(outcome["fixtures"])
    return _emit(report, f"corpus: {passed}/{total} fixtures pass",
                 0 if outcome["all_ok"] else 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "algebra":
            return _cmd_algebra(args)
        if args.command == "resolve":
            return _cmd_resolve(args)
        if args.command == "ext":
            return _cmd_ext(args)
        if args.command == "dual":
            return _cmd_dual(args)
        if args.command == "pushforward":
            return _cmd_pushforward(args)
        if args.command == "reduce":
            if args.sub == "search":
                return _cmd_reduce_search(args)
            if args.sub == "verify":
                return _cmd_reduce_verify(args)
            return _cmd_reduce_transform(args)
        if args.command == "theorem":
            return _cmd_theorem(args)
        return _cmd_corpus(args)
    except (WorkspaceError, CertificateFormatError) as exc:
        report = {"command": args.command,
                  "error": {"pointer": exc.pointer, "message": exc.message}}
        return _emit(report, f"input error at {exc.pointer or '/'}: "
                             f"{exc.message}", 2)
    except CertificateError as exc:
        report = {"command": args.command, "ok": False, "reason": str(exc)}
        return _emit(report, f"failed: {exc}", 1)
    except ValueError as exc:
        report = {"command": args.command,
                  "error": {"pointer": "", "message": str(exc)}}
        return _emit(report, f"input error: {exc}", 2)


if __name__ == "__main__":
    sys.exit(main())
