"""Command-line front end: cost, analyze, precision, compare, rr-state, export."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import kernels
from .bracket import BracketGraph, BracketLabError, PrizeVector, RoundSchedule, conduction_cost
from .generators import gen_round_robin, generate
from .precision import Seeded, enumerate_all, precision_report
from .progress import Standings, analyze_bracket, rr_progress, standings_after

FORMATS = ("se", "de", "de-seeded", "rr")
PROBE_REMAINING = 12


@dataclass
class AnalysisConfig:
    format: str | None = "se"
    participants: int = 8
    prizes: tuple[float, ...] | None = None
    output: str = "table"
    bracket: str | None = None
    standings: str | None = None
    jobs: int = 1

    def structure(self):
        if self.bracket:
            return BracketGraph.load(self.bracket)
        return generate(self.format, self.participants)

    @property
    def name(self) -> str:
        return self.bracket if self.bracket else self.format

    def prize_vector(self, fmt) -> PrizeVector:
        if isinstance(fmt, RoundSchedule):
            default = PrizeVector(tuple(float(fmt.n - r) for r in range(fmt.n)))
            need = fmt.n
        else:
            default = PrizeVector.positional(sorted(fmt.placement_classes))
            need = len(fmt.placement_classes)
        if self.prizes is None:
            return default
        if len(self.prizes) != need:
            raise BracketLabError(f"--prizes needs {need} values for {self.name}, got {len(self.prizes)}")
        return PrizeVector(self.prizes)

    def constraint(self, fmt):
        return Seeded.top_half(fmt) if self.format == "de-seeded" and not self.bracket else None


# -- analysis helpers --------------------------------------------------------


def cd_probe_rr(n: int, prizes: PrizeVector):
    """Round-robin CD check on the mid-event states reached by stronger-wins play.

    Every state with at least one round left and at most ``PROBE_REMAINING``
    matches left is analysed; any finding fails the format.
    """
    sched = gen_round_robin(n)
    per_round = n // 2
    first = max(1, sched.n_rounds - PROBE_REMAINING // per_round)
    findings = []
    for k in range(first, sched.n_rounds):
        rep = rr_progress(standings_after(sched, k), prizes)
        findings += rep.findings
    return findings


def cd_findings(cfg: AnalysisConfig, fmt):
    prizes = cfg.prize_vector(fmt)
    if isinstance(fmt, RoundSchedule):
        return cd_probe_rr(fmt.n, prizes)
    return analyze_bracket(fmt, prizes)[1]


def compare_rows(cfgs: list[AnalysisConfig]) -> list[dict]:
    rows = []
    for cfg in cfgs:
        fmt = cfg.structure()
        tally = enumerate_all(fmt, cfg.constraint(fmt), jobs=cfg.jobs)
        rows.append({
            "format": cfg.name,
            "participants": fmt.n,
            "cc": conduction_cost(fmt),
            "cd": "pass" if not cd_findings(cfg, fmt) else "fail",
            "rp": precision_report(tally).verdict,
        })
    return rows


# -- output ------------------------------------------------------------------


def _table(headers, rows) -> str:
    widths = [max(len(str(h)), *(len(str(r[k])) for r in rows)) for k, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*map(str, r)) for r in rows]
    return "\n".join(line.rstrip() for line in lines)


def _emit_records(records: list[dict], mode: str, out) -> None:
    if mode == "json":
        print(json.dumps(records, indent=2), file=out)
        return
    headers = list(records[0]) if records else []
    if mode == "csv":
        import csv
        w = csv.DictWriter(out, headers, lineterminator="\n")
        w.writeheader()
        w.writerows(records)
        return
    print(_table(headers, [[r[h] for h in headers] for r in records]), file=out)


def cmd_cost(cfg: AnalysisConfig, out=None) -> dict:
    out = out or sys.stdout
    fmt = cfg.structure()
    rec = {"format": cfg.name, "participants": fmt.n, "matches": conduction_cost(fmt), "rounds": fmt.n_rounds}
    _emit_records([rec], cfg.output, out)
    return rec


def _findings_block(findings) -> list[str]:
    if not findings:
        return ["violations: none"]
    lines = ["violations:"]
    seen = set()
    for f in findings:
        key = (f.participant, f.match, f.kind, f.severity, f.detail)
        if key in seen:
            continue
        seen.add(key)
        sev = "" if f.severity == "violation" else f"/{f.severity}"
        lines.append(f"  [{f.kind}{sev}] {f.participant} {f.match or ''}: {f.detail}")
    return lines


def cmd_analyze(cfg: AnalysisConfig, out=None, slot: str | None = None) -> dict:
    out = out or sys.stdout
    fmt = cfg.structure()
    prizes = cfg.prize_vector(fmt)
    if isinstance(fmt, RoundSchedule):
        if cfg.standings:
            return cmd_rr_state(cfg, out)
        findings = cd_probe_rr(fmt.n, prizes)
        doc = {"format": cfg.name, "participants": fmt.n, "prizes": list(prizes),
               "probe": "stronger-wins play, states with at most "
                        f"{PROBE_REMAINING} matches left",
               "violations": [f.to_dict() for f in findings],
               "cd": "pass" if not findings else "fail"}
        if cfg.output == "json":
            print(json.dumps(doc, indent=2), file=out)
        else:
            print(f"format={cfg.name} participants={fmt.n} prizes={','.join(f'{p:g}' for p in prizes)}", file=out)
            print(f"probe: {doc['probe']}", file=out)
            print("\n".join(_findings_block(findings)), file=out)
            print(f"CD: {doc['cd']}", file=out)
        return doc

    trees, findings = analyze_bracket(fmt, prizes)
    if slot is not None:
        trees = [t for t in trees if t.participant == slot]
        if not trees:
            raise BracketLabError(f"no entry slot {slot!r}")
    doc = {"format": cfg.name, "participants": fmt.n, "prizes": list(prizes),
           "trees": [{"slot": t.participant, "root": t.root.to_dict()} for t in trees],
           "violations": [f.to_dict() for f in findings],
           "cd": "pass" if not findings else "fail"}
    if cfg.output == "json":
        print(json.dumps(doc, indent=2), file=out)
    else:
        print(f"format={cfg.name} participants={fmt.n} prizes={','.join(f'{p:g}' for p in prizes)}", file=out)
        for t in trees:
            print(t.render(), file=out)
        print("\n".join(_findings_block(findings)), file=out)
        print(f"CD: {doc['cd']}", file=out)
    return doc


def cmd_precision(cfg: AnalysisConfig, out=None) -> dict:
    out = out or sys.stdout
    fmt = cfg.structure()
    tally = enumerate_all(fmt, cfg.constraint(fmt), jobs=cfg.jobs)
    rep = precision_report(tally)
    if cfg.output == "csv":
        out.write(tally.to_csv())
    elif cfg.output == "json":
        print(tally.to_json(rep.expected, format=cfg.name, precise=list(rep.precise), rp=rep.verdict), file=out)
    else:
        print(f"format={cfg.name} participants={fmt.n} assignments={tally.total} backend={kernels.BACKEND}",
              file=out)
        print("legend: * modal class, [..] deserved class", file=out)
        for s in range(tally.n, 0, -1):
            modal = tally.modal(s)
            cells = []
            for c in tally.classes:
                cell = f"{c.label} {tally.count(s, c.label)} ({tally.percent(s, c.label)}%)"
                if rep.expected[s] == c.label:
                    cell = f"[{cell}]"
                if c.label in modal:
                    cell += "*"
                cells.append(cell)
            print(f"{s}: " + "  ".join(cells), file=out)
        print(f"precise: {', '.join(rep.precise) or 'none'}", file=out)
        print(f"RP: {rep.verdict}", file=out)
    return {"tally": tally, "report": rep}


def cmd_compare(cfgs: list[AnalysisConfig], out=None, mode: str = "table") -> list[dict]:
    out = out or sys.stdout
    rows = compare_rows(cfgs)
    if mode == "table":
        print(_table(["System", "CC", "CD", "RP"],
                     [[r["format"], r["cc"], r["cd"], r["rp"]] for r in rows]), file=out)
    else:
        _emit_records(rows, mode, out)
    return rows


def cmd_rr_state(cfg: AnalysisConfig, out=None) -> dict:
    out = out or sys.stdout
    if not cfg.standings:
        raise BracketLabError("rr-state needs --standings FILE")
    st = Standings.load(cfg.standings)
    n = len(st.names)
    if cfg.prizes is None:
        prizes = PrizeVector(tuple(float(n - r) for r in range(n)))
    elif len(cfg.prizes) != n:
        raise BracketLabError(f"--prizes needs {n} values (one per rank), got {len(cfg.prizes)}")
    else:
        prizes = PrizeVector(cfg.prizes)
    rep = rr_progress(st, prizes)
    doc = rep.to_dict()
    doc["cd"] = "pass" if not rep.findings else "fail"
    if cfg.output == "json":
        print(json.dumps(doc, indent=2), file=out)
    elif cfg.output == "csv":
        _emit_records([
            {"participant": p.name, "wins": p.wins, "losses": p.losses, "remaining": p.remaining,
             "reachable": " ".join(p.reachable),
             "stability": "unknown" if p.stability is None else p.stability,
             "violations": len(p.findings)}
            for p in rep.participants], "csv", out)
    else:
        rows = [[p.name, f"{p.wins}-{p.losses}", p.remaining,
                 "unknown" if p.stability is None else f"{p.stability:g}", ", ".join(p.reachable)]
                for p in rep.participants]
        print(_table(["participant", "record", "left", "stability", "reachable"], rows), file=out)
        print("\n".join(_findings_block(rep.findings)), file=out)
        print(f"CD: {doc['cd']}", file=out)
    return doc


# -- argument parsing -----------------------------------------------------------


def _prizes(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--participants", type=int, default=8)
    common.add_argument("--prizes", type=_prizes, default=None, help="comma-separated, best class first")
    common.add_argument("--bracket", metavar="FILE", help="custom bracket file (JSON)")
    common.add_argument("--standings", metavar="FILE", help="round-robin standings file (JSON)")
    common.add_argument("--output", choices=("table", "csv", "json"), default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")

    p = argparse.ArgumentParser(prog="bracketlab", description="Tournament structure analysis")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("cost", parents=[common], help="match and round count")
    a = sub.add_parser("analyze", parents=[common], help="progress trees and competitiveness checks")
    a.add_argument("--slot", help="only print the tree for this entry slot")
    sub.add_parser("precision", parents=[common], help="exhaustive rank tally")
    sub.add_parser("compare", parents=[common], help="CC/CD/RP summary across formats")
    sub.add_parser("rr-state", parents=[common], help="analyse a partially played round-robin")
    sub.add_parser("export", parents=[common], help="write a generated bracket as JSON")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = AnalysisConfig(args.format or "se", args.participants, args.prizes, args.output,
                         args.bracket, args.standings, args.jobs)
    try:
        if args.jobs < 1:
            raise BracketLabError("--jobs must be at least 1")
        if args.command == "cost":
            cmd_cost(cfg)
        elif args.command == "analyze":
            if args.format is None and args.standings and not args.bracket:
                cfg.format = "rr"
                cfg.participants = len(Standings.load(args.standings).names)
            cmd_analyze(cfg, slot=args.slot)
        elif args.command == "precision":
            cmd_precision(cfg)
        elif args.command == "compare":
            if args.bracket:
                cfgs = [cfg]
            elif args.format:
                cfgs = [cfg]
            else:
                cfgs = [AnalysisConfig(f, args.participants, None, args.output, jobs=args.jobs) for f in FORMATS]
                if args.prizes is not None:
                    raise BracketLabError("--prizes needs a single --format in compare")
            cmd_compare(cfgs, mode=args.output)
        elif args.command == "rr-state":
            cmd_rr_state(cfg)
        elif args.command == "export":
            fmt = cfg.structure()
            if isinstance(fmt, RoundSchedule):
                print(json.dumps({"n": fmt.n, "rounds": [list(map(list, r)) for r in fmt.rounds]}, indent=2))
            else:
                print(json.dumps(fmt.to_dict(), indent=2))
    except (BracketLabError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
