"""Command-line front end.

    susypva [run] (--builtin NAME | --input FILE | --criterion K)
            [--stage {validate,axioms,walgebra,brackets,hierarchy,all}]
            [--depth N] [--window N] [--format {text,json,latex}] [--out FILE]

Exit status: 0 success, 1 invariant failure, 2 input error, 3 truncation overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .chibracket import BracketSpec, check_compatibility, check_pva, hamiltonian_flow, neveu_schwarz
from .dsred import WPresentation, affine_specs, check_gauge_invariance, reduced_spec
from .hierarchy import BiHamiltonianError, Hierarchy, check_hierarchy
from .liesuper import InputError, LieSuperAlgebra, ReductionData, Report, builtin, load_json
from .loopalg import LoopAlgebra, LoopElem, TruncationError
from .superpoly import ParseError, SPoly

__all__ = ["PipelineConfig", "run", "main", "STAGES"]

STAGES = ("validate", "axioms", "walgebra", "brackets", "hierarchy")
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_TRUNC = 0, 1, 2, 3


@dataclass
class PipelineConfig:
    builtin: str | None = None
    input: str | None = None
    criterion: int | None = None
    stage: str = "all"
    depth: int = 2
    window: int | None = None
    format: str = "text"
    out: str | None = None

    def check(self):
        if sum(x is not None for x in (self.builtin, self.input, self.criterion)) != 1:
            raise InputError("give exactly one of --builtin, --input, --criterion")
        if self.depth < 0:
            raise InputError("depth must be >= 0")
        if self.window is None:
            self.window = self.depth + 2
        if self.window < self.depth + 2:
            raise InputError(f"window {self.window} is smaller than depth + 2 = {self.depth + 2}")
        if self.stage not in STAGES + ("all",):
            raise InputError(f"unknown stage {self.stage!r}")


@dataclass
class Section:
    stage: str
    report: Report = field(default_factory=Report)
    data: dict = field(default_factory=dict)


# ------------------------------------------------------------------ formatting

def _poly(x, latex: bool) -> str:
    return x.to_latex() if latex else str(x)


def _chi(x, latex: bool) -> str:
    return x.to_text(chi="\\chi", latex=True) if latex else x.to_text()


def _loop(g: LieSuperAlgebra, x: LoopElem, latex: bool) -> str:
    parts = []
    for (a, k), u in sorted(x.c.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        z = "" if k == 0 else (f" z^{{{k}}}" if latex else f" z^{k}")
        parts.append(f"{g.names[a]}{z} (x) ({_poly(u, latex)})" if not latex
                     else f"{g.names[a]}{z} \\otimes ({_poly(u, latex)})")
    return " + ".join(parts) or "0"


# ------------------------------------------------------------------ stages

def _load(cfg: PipelineConfig):
    """Returns ``(algebra, reduction, spec)``; a bare bracket spec has no algebra."""
    if cfg.builtin is not None:
        key = cfg.builtin.lower()
        if key in ("ns", "neveu-schwarz", "neveu_schwarz"):
            return None, None, neveu_schwarz()
        try:
            g, rd = builtin(cfg.builtin)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        return g, rd, None
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{cfg.input}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(doc, dict) and "pva" in doc:
        try:
            return None, None, BracketSpec.from_text(doc["pva"], name=doc.get("name", "input"))
        except ParseError as exc:
            raise InputError(f"{cfg.input}: {exc}") from None
    try:
        g, rd = load_json(text)
    except (ValueError, ArithmeticError) as exc:
        raise InputError(f"{cfg.input}: {exc}") from None
    return g, rd, None


def _stage_validate(g, rd, spec, sec: Section, ctx):
    rep = sec.report
    if spec is not None:
        for msg in spec.validate_parity():
            rep.fail(msg)
        sec.data["generators"] = [f"{v.name}:{v.parity}" for v in spec.generators]
        return
    rep.extend(g.validate())
    sec.data["algebra"] = g.label
    sec.data["dim"] = g.dim
    if rd is None:
        rep.note("no reduction data")
        return
    rep.extend(rd.validate())
    sec.data["reduction"] = rd.describe()


def _stage_axioms(g, rd, spec, sec: Section, ctx):
    rep = sec.report
    if spec is not None:
        r = check_pva(spec)
        for f in r.failures:
            rep.fail(f)
        rep.note(f"{spec.name}: {r.checked} generator checks")
        return
    W = ctx.presentation(g, rd)
    a1, a2 = affine_specs(W)
    for s in (a1, a2):
        if s is None:
            continue
        r = check_pva(s)
        for f in r.failures:
            rep.fail(f"{s.name}: {f}")
        rep.note(f"{s.name}: skew-symmetry and Jacobi on {len(s.generators)} generators")
    if a2 is not None:
        r = check_compatibility(a1, a2)
        for f in r.failures:
            rep.fail(f"compatibility: {f}")
        rep.note("first and second affine brackets compatible" if r.ok else "affine brackets not compatible")


def _stage_walgebra(g, rd, spec, sec: Section, ctx):
    latex = ctx.latex
    W = ctx.presentation(g, rd)
    sec.data["N"] = _loop(g, W.N, latex)
    sec.data["V"] = [g.fmt(v) for v in rd.v_basis]
    sec.data["w"] = {f"w{k + 1}": _poly(p, latex) for k, p in enumerate(W.w)}
    for k, p in enumerate(W.w):
        ok, wit = check_gauge_invariance(W, p)
        if not ok:
            sec.report.fail(f"w{k + 1} is not gauge invariant: {wit[0][0]} gives {wit[0][1]}")
    if sec.report.ok:
        sec.report.note(f"{len(W.w)} generators, all gauge invariant")


def _stage_brackets(g, rd, spec, sec: Section, ctx):
    latex = ctx.latex
    if spec is not None:
        pairs = sorted(spec.stored_pairs(), key=lambda ab: (ab[0].index, ab[1].index))
        sec.data["table"] = {f"{a.name},{b.name}": _chi(spec.table(a, b), latex) for a, b in pairs}
        return
    W = ctx.presentation(g, rd)
    specs = [reduced_spec(W, 1)] + ([reduced_spec(W, 2)] if rd.s else [])
    for which, s in enumerate(specs, 1):
        table = {}
        for a in W.wvars:
            for b in W.wvars:
                if a.index <= b.index:
                    table[f"{a.name},{b.name}"] = _chi(s.table(a, b), latex)
        sec.data[f"bracket{which}"] = table
        r = check_pva(s)
        for f in r.failures:
            sec.report.fail(f"W bracket {which}: {f}")
    if len(specs) == 2:
        for f in check_compatibility(*specs).failures:
            sec.report.fail(f"W compatibility: {f}")
    if sec.report.ok:
        sec.report.note("reduced brackets satisfy skew-symmetry and Jacobi" + (" and are compatible" if len(specs) == 2 else ""))


def _stage_hierarchy(g, rd, spec, sec: Section, ctx):
    latex, cfg = ctx.latex, ctx.cfg
    if spec is not None:
        psi = spec.generators[0]
        h = psi() * psi(1)
        sec.data["hamiltonian"] = f"int({_poly(h, latex)})"
        sec.data["flow"] = {psi.name: _poly(hamiltonian_flow(spec, h, psi()), latex)}
        return
    if rd.s is None:
        sec.report.fail("the hierarchy needs s")
        return
    W = ctx.presentation(g, rd)
    H = Hierarchy(W, LoopAlgebra(rd), window=cfg.window)
    sec.data["C"] = g.fmt(H.C)
    sec.data["rho"] = {f"rho_{n}": H.rho(n).to_latex() if latex else H.rho(n).to_text() for n in range(cfg.depth + 1)}
    flows = {}
    try:
        for n in range(cfg.depth):
            flows[f"t{n}"] = {f"d{w.name}/dt{n}": _poly(x, latex) for w, x in zip(W.wvars, H.flow(n))}
    except BiHamiltonianError as exc:
        sec.report.fail(str(exc))
    sec.data["flows"] = flows
    if sec.report.ok:
        sec.report.extend(check_hierarchy(H, cfg.depth))


_RUNNERS = {
    "validate": _stage_validate,
    "axioms": _stage_axioms,
    "walgebra": _stage_walgebra,
    "brackets": _stage_brackets,
    "hierarchy": _stage_hierarchy,
}


class _Context:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.latex = cfg.format == "latex"
        self._W = None

    def presentation(self, g, rd) -> WPresentation:
        if rd is None:
            raise InputError("this stage needs reduction data")
        if self._W is None:
            self._W = WPresentation(rd)
        return self._W


# ------------------------------------------------------------------ rendering

def _render(sections: list[Section], fmt: str, title: str) -> str:
    if fmt == "json":
        doc = {"input": title, "ok": all(s.report.ok for s in sections),
               "stages": [{"stage": s.stage, "ok": s.report.ok,
                           "messages": [{"level": t, "text": m} for t, m in s.report.items],
                           "data": s.data} for s in sections]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "latex":
        return _render_latex(sections, title)
    out = [f"# {title}"]
    for s in sections:
        out.append(f"== {s.stage}: {'ok' if s.report.ok else 'FAILED'}")
        out.extend(_text_data(s.data))
        out.extend(s.report.lines())
    return "\n".join(out) + "\n"


def _text_data(data, indent: str = "") -> list[str]:
    lines = []
    for k, v in data.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.extend(_text_data(v, indent + "  "))
        elif isinstance(v, list):
            lines.append(f"{indent}{k}: " + "; ".join(str(x) for x in v))
        else:
            lines.append(f"{indent}{k} = {v}")
    return lines


def _render_latex(sections: list[Section], title: str) -> str:
    out = [f"% {title}"]
    for s in sections:
        out.append(f"% stage {s.stage}: {'ok' if s.report.ok else 'FAILED'}")
        for t, m in s.report.items:
            out.append(f"% [{t}] {m}")
        for key, val in s.data.items():
            if key.startswith("bracket") and isinstance(val, dict):
                which = key[-1]
                out.append("\\begin{align*}")
                rows = []
                for pair, v in val.items():
                    a, b = pair.split(",")
                    rows.append(f"\\{{{{{a}}}_\\chi {b}\\}}_{which} &= {v}")
                out.append(" \\\\\n".join(rows))
                out.append("\\end{align*}")
            elif isinstance(val, dict):
                out.append("\\begin{align*}")
                rows = []
                for k2, v2 in val.items():
                    if isinstance(v2, dict):
                        rows.extend(f"{k3} &= {v3}" for k3, v3 in v2.items())
                    else:
                        rows.append(f"{k2} &= {v2}")
                out.append(" \\\\\n".join(rows))
                out.append("\\end{align*}")
            else:
                out.append(f"% {key}: {val}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ entry points

def run(cfg: PipelineConfig) -> tuple[int, str]:
    """Execute the configured stages; returns the exit status and the rendered report."""
    try:
        cfg.check()
    except InputError as exc:
        return EXIT_INPUT, f"input error: {exc}\n"
    if cfg.criterion is not None:
        from .acceptance import run_criterion

        try:
            rep = run_criterion(cfg.criterion)
        except ValueError as exc:
            return EXIT_INPUT, f"input error: {exc}\n"
        sec = Section(f"criterion {cfg.criterion}", rep)
        return (EXIT_OK if rep.ok else EXIT_FAIL), _render([sec], cfg.format, f"criterion {cfg.criterion}")
    try:
        g, rd, spec = _load(cfg)
    except InputError as exc:
        return EXIT_INPUT, f"input error: {exc}\n"
    title = cfg.builtin or cfg.input
    stages = STAGES if cfg.stage == "all" else STAGES[: STAGES.index(cfg.stage) + 1]
    if spec is not None:
        stages = tuple(s for s in stages if s != "walgebra")
    ctx = _Context(cfg)
    sections = []
    status = EXIT_OK
    for st in stages:
        sec = Section(st)
        sections.append(sec)
        try:
            _RUNNERS[st](g, rd, spec, sec, ctx)
        except TruncationError as exc:
            sec.report.fail(f"truncation overflow at slot {exc.slot}: {exc}")
            status = EXIT_TRUNC
            break
        except InputError as exc:
            sec.report.fail(str(exc))
            status = EXIT_INPUT
            break
        except ArithmeticError as exc:
            sec.report.fail(f"{type(exc).__name__}: {exc}")
        if not sec.report.ok:
            status = EXIT_FAIL
            break
    return status, _render(sections, cfg.format, title)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="susypva", description="SUSY PVA and W-algebra engine")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME",
                     help="osp22, sl21, sl(m|n), osp(2n|2n), psl(n|n), or ns for the Neveu-Schwarz bracket")
    src.add_argument("--input", metavar="FILE", help="JSON algebra with reduction data, or {\"pva\": text}")
    src.add_argument("--criterion", type=int, metavar="K", help="run acceptance check K (1-9)")
    p.add_argument("--stage", default="all", choices=STAGES + ("all",))
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--window", type=int, default=None, help="z-window; defaults to depth + 2")
    p.add_argument("--format", default="text", choices=("text", "json", "latex"))
    p.add_argument("--out", metavar="FILE")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "run":
        argv = argv[1:]
    try:
        ns = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = PipelineConfig(**vars(ns))
    status, text = run(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
