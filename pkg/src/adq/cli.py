"""Command-line front end: ``adq <command> ...``.

Every command produces a RunReport. Without ``--out`` a short text rendering
goes to stdout; ``--out FILE.json`` or ``--out FILE.csv`` writes the report in
that format instead. Exit status: 0 clean, 1 violations or failures present,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from . import goldbach, multfunc, replay, sieve, solver, spiro
from .errors import AdqError, PreconditionError
from .multfunc import format_rational, parse_rational

EXIT_CLEAN, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunReport:
    command: str
    params: dict
    started_at: str
    duration_ms: int
    result: Any
    violations: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations and not self.failures

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params, "started_at": self.started_at,
                "duration_ms": self.duration_ms, "result": self.result,
                "violations": self.violations, "failures": self.failures}

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["command"], d["params"], d["started_at"], d["duration_ms"], d["result"],
                   list(d.get("violations", [])), list(d.get("failures", [])))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


@dataclass
class Outcome:
    """What a command handler hands back to ``run``."""
    result: Any
    violations: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    rows: list[dict] | None = None      # CSV table; defaults to the result scalars


# ------------------------------------------------------------------ handlers

def _sieve(a) -> Outcome:
    ps = sieve.build_prime_set(a.limit, cache_dir=a.cache)
    primes = ps.primes()
    res = {"limit": ps.limit, "count": ps.count,
           "largest_prime": int(primes[-1]) if primes.size else None,
           "cache_file": str(sieve._cache_path(a.cache, a.limit)) if a.cache else None}
    return Outcome(res)


def _goldbach_pair(a) -> Outcome:
    try:
        g = goldbach.goldbach_pair(a.n)
    except goldbach.NoGoldbachPair:
        return Outcome({"n": a.n, "p": None, "q": None},
                       failures=[{"n": a.n, "reason": "no prime pair"}])
    return Outcome({"n": g.n, "p": g.p, "q": g.q})


def _goldbach_scan(a) -> Outcome:
    rep = goldbach.scan_goldbach(a.lo, a.hi, jobs=a.jobs)
    fails = [{"n": n, "reason": "no prime pair"} for n in rep.exceptions]
    return Outcome(rep.to_dict(), failures=fails, rows=fails)


def _classify(a) -> Outcome:
    warnings: list[str] = []
    fams = solver.classify(a.form, a.prime_limit, max_degree=a.max_degree, warnings=warnings)
    res = {"form": a.form, "prime_limit": a.prime_limit, "max_degree": a.max_degree,
           "count": len(fams), "families": [f.to_dict() for f in fams], "warnings": warnings}
    rows = []
    for i, f in enumerate(fams):
        for s, v in sorted(f.assignments.items()):
            rows.append({"family": i, "symbol": s.key, "value": format_rational(v)})
        for s in sorted(f.free):
            rows.append({"family": i, "symbol": s.key, "value": solver.FREE})
    return Outcome(res, rows=rows)


def _load_families(path: str) -> list[solver.SolutionFamily]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "result" in data:
        data = data["result"]
    if isinstance(data, dict) and "families" in data:
        data = data["families"]
    if isinstance(data, dict):
        data = [data]
    try:
        return [solver.SolutionFamily.from_dict(d) for d in data]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a family file ({exc})") from None


def _show(v) -> str:
    return v if isinstance(v, str) else format_rational(v)


def _forced(a) -> Outcome:
    fams = _load_families(a.family_file)
    tables, rows = [], []
    for i, fam in enumerate(fams):
        vals = solver.forced_values(fam, a.up_to)
        tables.append({"f2": format_rational(fam.f2) if fam.f2 is not None else None,
                       "values": [[n, _show(v)] for n, v in vals.items()]})
        rows += [{"family": i, "n": n, "value": _show(v)} for n, v in vals.items()]
    return Outcome({"up_to": a.up_to, "tables": tables}, rows=rows)


def _parse_assign(text: str) -> tuple[tuple[int, int], Any]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--assign expects p,e,num/den, got {text!r}")
    return (int(parts[0]), int(parts[1])), parse_rational(parts[2])


def _verify_family(a) -> Outcome:
    f = multfunc.family(a.name, dict(_parse_assign(s) for s in a.assign or []))
    viol = [r.to_dict() for r in multfunc.check_equation(f, a.form, a.prime_limit)]
    res = {"family": multfunc.family_to_config(f), "form": a.form,
           "prime_limit": a.prime_limit, "violation_count": len(viol)}
    return Outcome(res, violations=viol, rows=viol)


def _verify_shift(a) -> Outcome:
    imp = multfunc.check_shift_implication(multfunc.family(a.name), a.limit)
    res = imp.to_dict()
    fails = []
    if imp.conclusion_holds is False:
        fails.append({"reason": "premise holds but the shifted equation does not follow"})
    return Outcome(res, violations=res["shifted_violations"], failures=fails)


def _replay_outcome(rep: replay.ReplayReport) -> Outcome:
    return Outcome(rep.to_dict(), failures=list(rep.failures),
                   rows=[{**o.to_dict(), "witnesses": o.witnesses, "aux": o.aux}
                         for o in rep.outcomes])


def _replay_lemma4(a) -> Outcome:
    try:
        return _replay_outcome(replay.lemma4_replay(a.N))
    except PreconditionError as exc:
        return Outcome({"N": a.N}, failures=[{"reason": str(exc)}])


def _replay_h(a) -> Outcome:
    return _replay_outcome(replay.h_induction_replay(a.base, a.limit))


def _replay_branch(a) -> Outcome:
    return _replay_outcome(replay.branch_replay(a.value, a.limit))


def _replay_hn(a) -> Outcome:
    w = replay.hn_witness(a.n, a.search)
    if w is None:
        return Outcome({"n": a.n, "witness": None},
                       failures=[{"n": a.n, "reason": f"no witness up to {a.search}"}])
    return Outcome({"n": a.n, "witness": w.to_dict()}, rows=[w.to_dict()])


def _spiro_member(a) -> Outcome:
    fac = sieve.factorize(a.n)
    return Outcome({"n": a.n, "member": spiro.in_h(a.n),
                    "factorization": [list(pe) for pe in fac]})


def _spiro_cap(a) -> Outcome:
    return Outcome({"p": a.p, "cap": spiro.h_cap(a.p)})


def _spiro_smallest(a) -> Outcome:
    return Outcome({"limit": a.limit, "smallest_non_member": spiro.smallest_non_member(a.limit)})


def _spiro_hn(a) -> Outcome:
    members = list(spiro.hn_stream(a.n, a.limit))
    res: dict[str, Any] = {"n": a.n, "limit": a.limit, "count": len(members), "members": members}
    if a.density:
        res["density"] = f"{len(members)}/{a.limit}"
        res["approx"] = len(members) / a.limit
    return Outcome(res, rows=[{"member": m} for m in members])


def _spiro_find_q(a) -> Outcome:
    q = spiro.find_q_for_m(a.m)
    fails = [] if q is not None else [{"m": a.m, "reason": "no prime q found"}]
    return Outcome({"m": a.m, "q": q}, failures=fails)


# ------------------------------------------------------------------ parser

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="FILE", help="write the report as .json or .csv")

    p = argparse.ArgumentParser(prog="adq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn: Callable, **kw):
        sp = parent.add_parser(name, parents=[common], **kw)
        sp.set_defaults(fn=fn)
        return sp

    sp = leaf(sub, "sieve", _sieve, help="sieve primes up to a limit")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--cache", metavar="DIR")

    gb = sub.add_parser("goldbach", help="Goldbach pairs and range scans")
    gsub = gb.add_subparsers(dest="action", required=True)
    sp = leaf(gsub, "pair", _goldbach_pair)
    sp.add_argument("n", type=int)
    sp = leaf(gsub, "scan", _goldbach_scan)
    sp.add_argument("--from", dest="lo", type=int, required=True)
    sp.add_argument("--to", dest="hi", type=int, required=True)
    sp.add_argument("--jobs", type=int)

    sp = leaf(sub, "classify", _classify, help="solve the equation over small primes")
    sp.add_argument("--form", choices=multfunc.FORMS, required=True)
    sp.add_argument("--prime-limit", type=int, required=True)
    sp.add_argument("--max-degree", type=int, default=2)

    sp = leaf(sub, "forced", _forced, help="value tables for classified families")
    sp.add_argument("--family-file", required=True)
    sp.add_argument("--up-to", type=int, required=True)

    vf = sub.add_parser("verify", help="check functions against the equation")
    vsub = vf.add_subparsers(dest="action", required=True)
    sp = leaf(vsub, "family", _verify_family)
    sp.add_argument("--name", required=True)
    sp.add_argument("--assign", action="append", metavar="p,e,num/den")
    sp.add_argument("--prime-limit", type=int, required=True)
    sp.add_argument("--form", choices=multfunc.FORMS, default=multfunc.SHIFTED)
    sp = leaf(vsub, "shift-implication", _verify_shift)
    sp.add_argument("--name", required=True)
    sp.add_argument("--limit", type=int, required=True)

    rp = sub.add_parser("replay", help="replay the inductive arguments")
    rsub = rp.add_subparsers(dest="action", required=True)
    sp = leaf(rsub, "lemma4", _replay_lemma4)
    sp.add_argument("--N", dest="N", type=int, required=True)
    sp = leaf(rsub, "h-induction", _replay_h)
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp = leaf(rsub, "branch", _replay_branch)
    sp.add_argument("--value", type=int, choices=(0, 1), required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp = leaf(rsub, "hn-witness", _replay_hn)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--search", type=int, required=True)

    sr = sub.add_parser("spiro", help="the set H and its relatives")
    ssub = sr.add_subparsers(dest="action", required=True)
    sp = leaf(ssub, "member", _spiro_member)
    sp.add_argument("n", type=int)
    sp = leaf(ssub, "cap", _spiro_cap)
    sp.add_argument("p", type=int)
    sp = leaf(ssub, "smallest-nonmember", _spiro_smallest)
    sp.add_argument("--limit", type=int, required=True)
    sp = leaf(ssub, "hn", _spiro_hn)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--density", action="store_true")
    sp = leaf(ssub, "find-q", _spiro_find_q)
    sp.add_argument("--m", type=int, required=True)
    return p


# ------------------------------------------------------------------ output

def _cell(v):
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, sort_keys=True, default=list)
    return "" if v is None else v


def write_csv(report: RunReport, rows: list[dict] | None, path: Path) -> None:
    if rows is None:
        rows = [{"key": k, "value": v} for k, v in sorted(report.result.items())
                if not isinstance(v, (list, dict))] if isinstance(report.result, dict) else []
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols or ["key", "value"])
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})


def _brief(v, width: int = 10) -> str:
    if isinstance(v, list):
        head = ", ".join(json.dumps(x) if not isinstance(x, str) else x for x in v[:width])
        return f"[{head}{', ...' if len(v) > width else ''}] ({len(v)} items)"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_text(report: RunReport) -> str:
    lines = [f"{report.command}  ({report.duration_ms} ms)"]
    res = report.result
    if isinstance(res, dict):
        for k, v in res.items():
            if k == "families":
                for i, fam in enumerate(v):
                    lines.append(f"family {i}: f(2) = {fam['f2']}")
                    lines.append("  " + ", ".join(f"f({s}) = {x}" for s, x in fam["assignments"]))
                    if fam["free"]:
                        lines.append("  free: " + ", ".join(f"f({s})" for s in fam["free"]))
                    for r in fam.get("relations", []):
                        lines.append(f"  relation: {r} = 0")
                    for w in fam["warnings"]:
                        lines.append(f"  warning: {w}")
            elif k == "tables":
                for t in v:
                    lines.append(f"f(2) = {t['f2']}: " + " ".join(f"{n}:{x}" for n, x in t["values"]))
            elif k != "outcomes":
                lines.append(f"{k}: {_brief(v)}")
    else:
        lines.append(_brief(res))
    for name in ("violations", "failures"):
        items = getattr(report, name)
        lines.append(f"{name}: {len(items)}")
        lines += [f"  {json.dumps(x, sort_keys=True)}" for x in items[:5]]
    return "\n".join(lines) + "\n"


def _command_name(a) -> str:
    return " ".join(x for x in (a.command, getattr(a, "action", None)) if x)


def run(argv: list[str] | None = None) -> tuple[int, RunReport | None]:
    parser = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_CLEAN), None
    out = Path(a.out) if a.out else None
    if out is not None and out.suffix.lower() not in (".json", ".csv"):
        print(f"adq: --out must end in .json or .csv, got {out}", file=sys.stderr)
        return EXIT_USAGE, None
    params = {k: v for k, v in sorted(vars(a).items())
              if k not in ("fn", "out", "command", "action")}
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        o = a.fn(a)
    except (AdqError, ValueError, OSError) as exc:
        print(f"adq: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    report = RunReport(_command_name(a), params, started,
                       int((time.perf_counter() - t0) * 1000), o.result, o.violations, o.failures)
    if out is None:
        sys.stdout.write(render_text(report))
    elif out.suffix.lower() == ".json":
        out.write_text(report.to_json())
    else:
        write_csv(report, o.rows, out)
    return (EXIT_CLEAN if report.clean else EXIT_FAIL), report


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
