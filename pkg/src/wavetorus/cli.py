"""Command-line front end: config parsing, orchestration, report emission.

Config files are strict JSON: unknown keys are rejected with the offending
path, and any randomized command requires an explicit seed.  Reports are
JSON-first with CSV sidecars; every report carries a provenance block
(config hash, seed, package version) and reruns of the same config produce
identical artifacts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .errors import (
    NoConvergence,
    NonlinearityRejected,
    ParseError,
    ResonantMass,
    SingularJacobian,
    StallAt,
    WavetorusError,
)

COMMANDS = ("solve", "continue", "multi", "verify", "norms", "mms", "linking")
RANDOMIZED = ("solve", "continue", "multi", "verify", "mms", "linking")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VIOLATION = 4

_TOP_KEYS = {"command", "seed", "M", "beta", "sigma", "oversample", "newton",
             "nl", "forcing", "initial", "out", "verify", "mms", "multi",
             "linking", "norms"}
_NEWTON_KEYS = {"tol", "max_iter", "line_search"}
_BETA_KEYS = {"start", "factor", "floor"}
_NL_KEYS = {"s", "a", "m", "b"}
_NL_TERM_KEYS = {"j", "c", "c_sin"}
_NL_M_KEYS = {"kind", "alpha", "bound"}
_FORCING_KEYS = {"kind", "path", "decay", "target_seed", "kernel_free"}
_INITIAL_KEYS = {"kind", "path", "amplitude", "decay", "modes"}
_VERIFY_KEYS = {"suite", "count", "ensemble_M", "decay", "p", "s", "gamma",
                "gamma_prime", "tails", "tail_count", "write_ratios"}
_MMS_KEYS = {"decay", "M_list", "seed_level"}
_MULTI_KEYS = {"n_seeds", "dedup_threshold"}
_LINKING_KEYS = {"l_values", "rho_values", "n_starts", "n_sphere"}
_NORMS_KEYS = {"field", "p", "q", "sobolev_s", "gamma", "es_s"}


@dataclass
class RunConfig:
    command: str
    raw: dict
    seed: int | None = None
    M: int = 16
    beta: object = 1e-3
    sigma: int = 1
    oversample: int = 4
    newton: dict = field(default_factory=lambda: {"tol": 1e-10, "max_iter": 40,
                                                  "line_search": True})
    nl: dict | None = None
    forcing: dict | None = None
    initial: dict = field(default_factory=lambda: {"kind": "zero"})
    verify: dict = field(default_factory=dict)
    mms: dict = field(default_factory=dict)
    multi: dict = field(default_factory=dict)
    linking: dict = field(default_factory=dict)
    norms: dict = field(default_factory=dict)
    out: str | None = None


def _check_keys(d: dict, allowed: set, path: str, errors: list) -> None:
    for k in d:
        if k not in allowed:
            errors.append(f'{path}{k}: unknown key')


def parse_config(text_or_dict, command: str | None = None) -> RunConfig:
    """Validate a config document; raises ParseError listing every problem."""
    if isinstance(text_or_dict, str):
        try:
            doc = json.loads(text_or_dict)
        except json.JSONDecodeError as exc:
            raise ParseError([f"config: invalid JSON ({exc})"]) from exc
    else:
        doc = dict(text_or_dict)
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise ParseError(["config: top level must be an object"])
    _check_keys(doc, _TOP_KEYS, "", errors)

    cmd = doc.get("command", command)
    if cmd is None:
        errors.append("command: missing")
    elif cmd not in COMMANDS:
        errors.append(f"command: unknown command {cmd!r}")
    elif command is not None and cmd != command:
        errors.append(f"command: config says {cmd!r} but {command!r} was invoked")

    cfg = RunConfig(command=cmd or "", raw=doc)

    seed = doc.get("seed")
    if seed is None:
        if cmd in RANDOMIZED:
            errors.append(f"seed: missing (required for {cmd})")
    elif not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        errors.append("seed: must be a nonnegative integer")
    else:
        cfg.seed = seed

    if "M" in doc:
        if not isinstance(doc["M"], int) or doc["M"] < 1:
            errors.append("M: must be a positive integer")
        else:
            cfg.M = doc["M"]
    elif cmd in ("solve", "continue", "multi", "linking"):
        errors.append("M: missing")

    if "beta" in doc:
        b = doc["beta"]
        if isinstance(b, dict):
            _check_keys(b, _BETA_KEYS, "beta.", errors)
            missing = _BETA_KEYS - set(b)
            if missing:
                errors.append(f"beta: schedule missing {sorted(missing)}")
            else:
                if not (isinstance(b["start"], (int, float)) and b["start"] > 0):
                    errors.append("beta.start: must be > 0")
                if not (isinstance(b["floor"], (int, float)) and b["floor"] > 0):
                    errors.append("beta.floor: must be > 0")
                if not (isinstance(b["factor"], (int, float)) and 0 < b["factor"] < 1):
                    errors.append("beta.factor: schedule must decrease "
                                  "(factor must lie in (0, 1))")
                elif b["start"] <= b["floor"]:
                    errors.append("beta: requires start > floor")
            cfg.beta = b
        elif isinstance(b, (int, float)) and not isinstance(b, bool) and b > 0:
            cfg.beta = float(b)
        else:
            errors.append("beta: must be a positive number or a schedule object")
    elif cmd in ("solve", "continue", "multi", "mms", "linking"):
        errors.append("beta: missing")
    if cmd == "continue" and not isinstance(cfg.beta, dict) and "beta" in doc:
        errors.append("beta: continue requires a schedule {start, factor, floor}")
    if cmd in ("solve", "multi", "mms", "linking") and isinstance(cfg.beta, dict):
        errors.append(f"beta: {cmd} requires a scalar penalty")

    if "sigma" in doc:
        if doc["sigma"] in (1, -1):
            cfg.sigma = doc["sigma"]
        else:
            errors.append("sigma: must be +1 or -1")
    if "oversample" in doc:
        if isinstance(doc["oversample"], int) and doc["oversample"] >= 2:
            cfg.oversample = doc["oversample"]
        else:
            errors.append("oversample: must be an integer >= 2")

    if "newton" in doc:
        n = doc["newton"]
        if not isinstance(n, dict):
            errors.append("newton: must be an object")
        else:
            _check_keys(n, _NEWTON_KEYS, "newton.", errors)
            cfg.newton.update({k: v for k, v in n.items() if k in _NEWTON_KEYS})
            if cfg.newton.get("tol", 1e-10) <= 0:
                errors.append("newton.tol: must be > 0")

    if "nl" in doc:
        nl = doc["nl"]
        if not isinstance(nl, dict):
            errors.append("nl: must be an object")
        else:
            _check_keys(nl, _NL_KEYS, "nl.", errors)
            for part in ("a", "b"):
                for i, term in enumerate(nl.get(part, []) or []):
                    if isinstance(term, dict):
                        _check_keys(term, _NL_TERM_KEYS, f"nl.{part}[{i}].", errors)
            if isinstance(nl.get("m"), dict):
                _check_keys(nl["m"], _NL_M_KEYS, "nl.m.", errors)
            if not errors:
                from .nonlinearity import nonlinearity_from_config

                try:
                    nonlinearity_from_config(nl)
                except NonlinearityRejected as exc:
                    errors.append(f"nl: rejected ({exc.reason})")
                except (KeyError, ValueError, TypeError) as exc:
                    errors.append(f"nl: {exc}")
            cfg.nl = nl
    elif cmd in ("solve", "continue", "multi", "mms", "linking"):
        errors.append("nl: missing")

    for name, keys in (("forcing", _FORCING_KEYS), ("initial", _INITIAL_KEYS),
                       ("verify", _VERIFY_KEYS), ("mms", _MMS_KEYS),
                       ("multi", _MULTI_KEYS), ("linking", _LINKING_KEYS),
                       ("norms", _NORMS_KEYS)):
        if name in doc:
            sub = doc[name]
            if not isinstance(sub, dict):
                errors.append(f"{name}: must be an object")
                continue
            _check_keys(sub, keys, f"{name}.", errors)
            setattr(cfg, name, sub)

    if cmd == "verify" and "verify" in doc:
        suite = doc["verify"].get("suite", "all")
        if suite not in ("hy", "gn", "embedding", "holder", "box", "all"):
            errors.append(f"verify.suite: unknown suite {suite!r}")
    if cmd == "verify" and "verify" not in doc:
        errors.append("verify: missing")
    if cmd == "mms" and "mms" not in doc:
        errors.append("mms: missing")
    if cmd == "mms" and "M_list" not in doc.get("mms", {}):
        errors.append("mms.M_list: missing")
    if cmd == "norms" and "field" not in doc.get("norms", {}):
        errors.append("norms.field: missing")
    if "out" in doc:
        if isinstance(doc["out"], str):
            cfg.out = doc["out"]
        else:
            errors.append("out: must be a string path")

    if errors:
        raise ParseError(errors)
    return cfg


def config_hash(doc: dict) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _provenance(cfg: RunConfig) -> dict:
    return {"config_hash": config_hash(cfg.raw), "seed": cfg.seed,
            "version": __version__}


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _build_problem(cfg: RunConfig, beta: float):
    from .nonlinearity import nonlinearity_from_config
    from .solver import PenalizedProblem

    nl = nonlinearity_from_config(cfg.nl)
    return PenalizedProblem(M=cfg.M, beta=beta, nl=nl, sigma=cfg.sigma,
                            oversample=cfg.oversample)


def _build_forcing(cfg: RunConfig, problem):
    """Returns (problem_with_forcing, target_or_None)."""
    from dataclasses import replace

    from .solver import residual
    from .spectral import SubspaceTag, random_field, read_field

    if cfg.forcing is None:
        return problem, None
    kind = cfg.forcing.get("kind", "none")
    if kind == "none":
        return problem, None
    if kind == "file":
        f = read_field(cfg.forcing["path"])
        return replace(problem, forcing=f), None
    if kind == "mms_target":
        tag = (SubspaceTag.EPERP if cfg.forcing.get("kernel_free")
               else SubspaceTag.ALL)
        target = random_field((cfg.forcing.get("target_seed", cfg.seed or 0), 777),
                              cfg.M, tag, float(cfg.forcing.get("decay", 0.5)))
        f = residual(problem, target)
        return replace(problem, forcing=f), target
    raise ParseError([f"forcing.kind: unknown kind {kind!r}"])


def _initial_field(cfg: RunConfig):
    from .spectral import SpectralField, SubspaceTag, random_field, read_field

    kind = cfg.initial.get("kind", "zero")
    if kind == "zero":
        return SpectralField.zeros(cfg.M)
    if kind == "file":
        return read_field(cfg.initial["path"])
    if kind == "random":
        amp = float(cfg.initial.get("amplitude", 1.0))
        decay = float(cfg.initial.get("decay", 0.5))
        return amp * random_field((cfg.seed or 0, 55), cfg.M, SubspaceTag.ALL, decay)
    if kind == "modes":
        from .spectral import SpectralField as SF

        modes = {(int(m["j"]), int(m["k"])): complex(m.get("re", 0.0), m.get("im", 0.0))
                 for m in cfg.initial["modes"]}
        base = SF.from_modes(cfg.M, modes, hermitian=True)
        amp = float(cfg.initial.get("amplitude", 0.0))
        if amp:
            base = base + amp * random_field((cfg.seed or 0, 56), cfg.M,
                                             SubspaceTag.ALL, 0.8)
        return base
    raise ParseError([f"initial.kind: unknown kind {kind!r}"])


def _cmd_solve(cfg: RunConfig, out: str) -> dict:
    from .solver import newton_solve
    from .spectral import write_field

    p = _build_problem(cfg, float(cfg.beta))
    p, target = _build_forcing(cfg, p)
    sol = newton_solve(p, _initial_field(cfg), tol=cfg.newton["tol"],
                       max_iter=cfg.newton["max_iter"],
                       line_search=cfg.newton.get("line_search", True))
    write_field(sol.u, os.path.join(out, "solution.json"))
    payload = {"residual_norm": sol.residual_norm, "I_value": sol.I_value,
               "newton_iters": sol.newton_iters,
               "files": {"solution": "solution.json"}}
    if target is not None:
        payload["mms_error_l2"] = float((sol.u - target).l2())
    return payload


def _cmd_continue(cfg: RunConfig, out: str) -> dict:
    from .solver import BetaSchedule, continuation_beta
    from .spectral import write_field
    from .verify import apriori_monitor

    sched = BetaSchedule(float(cfg.beta["start"]), float(cfg.beta["factor"]),
                         float(cfg.beta["floor"]))
    p = _build_problem(cfg, sched.start)
    p, _ = _build_forcing(cfg, p)
    trace = continuation_beta(p, sched, _initial_field(cfg),
                              tol=cfg.newton["tol"],
                              max_iter=cfg.newton["max_iter"])
    trace.to_csv(os.path.join(out, "trace.csv"))
    write_field(trace.rows[-1].u, os.path.join(out, "solution_final.json"))
    monitor = apriori_monitor(trace)
    return {"n_rows": len(trace.rows), "monitor": monitor,
            "files": {"trace": "trace.csv", "solution": "solution_final.json"}}


def _cmd_multi(cfg: RunConfig, out: str) -> dict:
    from .solver import multi_seed_search
    from .spectral import write_field

    p = _build_problem(cfg, float(cfg.beta))
    sols = multi_seed_search(p, int(cfg.multi.get("n_seeds", 16)),
                             float(cfg.multi.get("dedup_threshold", 0.99)),
                             master_seed=cfg.seed or 0,
                             tol=cfg.newton["tol"],
                             max_iter=cfg.newton["max_iter"])
    entries = []
    for i, s in enumerate(sols):
        fname = f"solution_{i:03d}.json"
        write_field(s.u, os.path.join(out, fname))
        entries.append({"file": fname, "I_value": s.I_value,
                        "residual_norm": s.residual_norm,
                        "newton_iters": s.newton_iters})
    return {"n_distinct": len(sols), "solutions": entries}


def _cmd_verify(cfg: RunConfig, out: str) -> dict:
    from .spectral import SubspaceTag
    from .verify import (
        EnsembleSpec,
        check_box_regularity,
        check_embedding,
        check_gn,
        check_hausdorff_young,
        check_holder_to_sobolev,
        write_ratio_csv,
    )

    v = cfg.verify
    spec = EnsembleSpec(count=int(v.get("count", 1000)),
                        M=int(v.get("ensemble_M", 16)),
                        decay=float(v.get("decay", 0.0)),
                        seed=cfg.seed, tag=SubspaceTag.EPERP,
                        oversample=cfg.oversample)
    suite = v.get("suite", "all")
    reports = []
    if suite in ("hy", "all"):
        ps = [float(v["p"])] if "p" in v else [4.0 / 3.0, 1.5, 2.0]
        for p in ps:
            reports.append(check_hausdorff_young(spec, p))
    if suite in ("gn", "all"):
        ps = [float(v["p"])] if "p" in v else [3.0, 4.0]
        for p in ps:
            reports.append(check_gn(spec, p))
    if suite in ("embedding", "all"):
        s = float(v.get("s", 0.5))
        reports.append(check_embedding(spec, s, tails=tuple(v.get("tails", (8, 16, 32))),
                                       tail_count=int(v.get("tail_count", 64))))
    if suite in ("holder", "all"):
        reports.append(check_holder_to_sobolev(spec, float(v.get("gamma", 0.6)),
                                               float(v.get("gamma_prime", 0.5))))
    if suite in ("box", "all"):
        reports.append(check_box_regularity(spec, float(v.get("p", 2.0)),
                                            float(v.get("gamma", 0.45))))
    violations = sum(r.violation_count for r in reports)
    out_reports = []
    for i, r in enumerate(reports):
        if v.get("write_ratios"):
            write_ratio_csv(r, os.path.join(out, f"ratios_{i:02d}_{r.name}.csv"))
        d = r.to_dict()
        d["extras"].pop("per_trial", None)
        out_reports.append(d)
    return {"suite": suite, "reports": out_reports,
            "violation_count": int(violations)}


def _cmd_norms(cfg: RunConfig, out: str) -> dict:
    from .errors import NotInEperp
    from .norms import (
        NormReport,
        holder_estimate,
        norm_E,
        norm_Es,
        norm_Lp,
        norm_lq,
        sobolev_norm,
        write_norm_reports_csv,
        write_norm_reports_json,
    )
    from .spectral import read_field

    u = read_field(cfg.norms["field"])
    reports = [NormReport("E", norm_E(u), {})]
    for s in cfg.norms.get("es_s", [1.0]):
        try:
            reports.append(NormReport("Es", norm_Es(u, float(s)), {"s": s}))
        except NotInEperp:
            pass  # field has kernel mass; the scale norm is undefined there
    for s in cfg.norms.get("sobolev_s", [1.0, 2.0]):
        for conv in ("aniso", "ell1"):
            reports.append(NormReport("sobolev", sobolev_norm(u, float(s), conv),
                                      {"s": s, "convention": conv}))
    for p in cfg.norms.get("p", [2.0]):
        reports.append(NormReport("Lp", norm_Lp(u, float(p), cfg.oversample), {"p": p}))
    for q in cfg.norms.get("q", [1.0, 2.0]):
        reports.append(NormReport("lq", norm_lq(u, float(q)), {"q": q}))
    for g in cfg.norms.get("gamma", [0.5]):
        reports.append(NormReport("holder_proxy", holder_estimate(u, float(g)),
                                  {"gamma": g}))
    write_norm_reports_json(reports, os.path.join(out, "norms.json"))
    write_norm_reports_csv(reports, os.path.join(out, "norms.csv"))
    return {"n_reports": len(reports), "files": {"json": "norms.json",
                                                 "csv": "norms.csv"}}


def _cmd_mms(cfg: RunConfig, out: str) -> dict:
    from .nonlinearity import nonlinearity_from_config
    from .verify import mms_run, write_mms_csv

    nl = nonlinearity_from_config(cfg.nl)
    table = mms_run(nl, float(cfg.mms.get("decay", 0.5)),
                    [int(m) for m in cfg.mms["M_list"]], float(cfg.beta),
                    seed=cfg.seed or 0, sigma=cfg.sigma,
                    oversample=cfg.oversample,
                    newton_tol=cfg.newton["tol"],
                    max_iter=cfg.newton["max_iter"],
                    seed_level=cfg.mms.get("seed_level"))
    write_mms_csv(table, os.path.join(out, "mms.csv"))
    failed = [r for r in table["rows"] if r["failed"]]
    return {"rows": table["rows"], "target_l2": table["target_l2"],
            "n_failed": len(failed), "files": {"table": "mms.csv"}}


def _cmd_linking(cfg: RunConfig, out: str) -> dict:
    from .solver import linking_report

    p = _build_problem(cfg, float(cfg.beta))
    rep = linking_report(p, [int(x) for x in cfg.linking.get("l_values", [4, 8])],
                         rho_values=tuple(cfg.linking.get("rho_values",
                                                          (0.25, 0.5, 1.0, 2.0))),
                         n_starts=int(cfg.linking.get("n_starts", 5)),
                         n_sphere=int(cfg.linking.get("n_sphere", 64)),
                         master_seed=cfg.seed or 0)
    return rep


_DISPATCH = {"solve": _cmd_solve, "continue": _cmd_continue, "multi": _cmd_multi,
             "verify": _cmd_verify, "norms": _cmd_norms, "mms": _cmd_mms,
             "linking": _cmd_linking}


def run(cfg: RunConfig, out_dir: str | None = None) -> int:
    """Execute a validated config; writes report.json plus artifacts."""
    out = out_dir or cfg.out or f"runs/{cfg.command}"
    os.makedirs(out, exist_ok=True)
    report = {"command": cfg.command, "provenance": _provenance(cfg)}
    try:
        payload = _DISPATCH[cfg.command](cfg, out)
    except (NoConvergence, SingularJacobian, StallAt, ResonantMass) as exc:
        report["status"] = "error"
        report["error_type"] = type(exc).__name__
        report["reason"] = str(exc)
        _write_json(os.path.join(out, "report.json"), report)
        print(f"wavetorus: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    report["status"] = "ok"
    report.update(payload)
    code = EXIT_OK
    if cfg.command == "verify" and report.get("violation_count", 0) > 0:
        report["status"] = "violation"
        code = EXIT_VIOLATION
    _write_json(os.path.join(out, "report.json"), report)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wavetorus",
        description="Spectral lab for time-periodic waves on the torus")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"wavetorus: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        cfg = parse_config(doc, command=args.command)
    except ParseError as exc:
        for e in exc.errors:
            print(f"wavetorus: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg, out_dir=args.out)
    except ParseError as exc:
        for e in exc.errors:
            print(f"wavetorus: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except WavetorusError as exc:
        print(f"wavetorus: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
