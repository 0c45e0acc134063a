"""Command line entry point: ``ekrkit <command> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage or precondition error,
3 budget or timeout, 4 I/O or file format error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .constructions import (
    NamedFamilySpec,
    ParameterRangeError,
    RegimeError,
    claim35_trichotomy,
    claim41_gap,
    smallest_n,
    theorem_bound,
)
from .family import (
    CanonicalTooLarge,
    FamilyError,
    SetFamily,
    canonical_form,
    disjoint_pair,
    is_maximal_intersecting,
    is_star,
    max_degree,
)
from .framework import (
    FrameworkError,
    certificate_chain,
    certificate_json,
    level_t_certificate,
)
from .properties import level_t_property
from .report import VerificationReport, family_json, set_json
from .search import (
    BudgetExceeded,
    SearchConstraints,
    SearchTimeout,
    build_instance,
    enumerate_maximal,
    max_family,
    verify_claim36,
    verify_frankl,
    verify_nocommon,
    verify_theorem,
)
from .search.oracle import DEFAULT_TIMEOUT, THREADS_ENV, class_name, thread_count
from .serialize import FormatError, atomic_write, dumps, family_to_text, read_family

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4
COMMANDS = ("construct", "check", "framework-cert", "search", "verify", "sweep-bounds", "enumerate")


@dataclass
class RunConfig:
    command: str
    parameters: dict[str, Any]
    output_path: str | None = None
    format: str = "json"
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise click.UsageError(f"unknown command {self.command!r}")
        if self.format not in ("json", "tsv", "text"):
            raise click.UsageError(f"unknown format {self.format!r}")

    def header(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "output_path": self.output_path,
            "format": self.format,
            "version": __version__,
            "timestamp": self.timestamp,
        }


class Outcome:
    """What a command produced: a JSON-able body plus the claim ids that failed."""

    def __init__(self, body: Any, failed: list[str] | None = None) -> None:
        self.body = body
        self.failed = failed or []


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        atomic_write(cfg.output_path, text)
    else:
        click.echo(text, nl=False)


def _json_doc(cfg: RunConfig, body: Any) -> str:
    return dumps({"config": cfg.header(), "result": body})


def _failed(reports: list[VerificationReport]) -> list[str]:
    seen: list[str] = []
    for r in reports:
        if not r.passed and r.claim_id not in seen:
            seen.append(r.claim_id)
    return seen


def run(cfg: RunConfig, action: Callable[[], Outcome], render: Callable[[RunConfig, Outcome], str] | None = None) -> int:
    """Execute ``action``, write the artifact and map failures onto exit codes."""
    try:
        outcome = action()
        text = render(cfg, outcome) if render else _json_doc(cfg, outcome.body)
        _emit(cfg, text)
    except FrameworkError as exc:
        body = {"error": type(exc).__name__, "message": str(exc), "witness": _jsonable(exc.witness)}
        _safe_emit(cfg, _json_doc(cfg, body))
        click.echo(f"failed: {type(exc).__name__}: {exc}", err=True)
        return EXIT_FAIL
    except (SearchTimeout, BudgetExceeded, CanonicalTooLarge) as exc:
        body = {"error": "budget", "message": str(exc)}
        if isinstance(exc, SearchTimeout):
            body["node_count"] = exc.nodes
            if getattr(exc, "upper_bound", None) is not None:
                body["upper_bound"] = exc.upper_bound
        _safe_emit(cfg, _json_doc(cfg, body))
        click.echo(f"budget: {exc}", err=True)
        return EXIT_BUDGET
    except (FormatError, OSError) as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return EXIT_IO
    except (ParameterRangeError, RegimeError, FamilyError, ValueError) as exc:
        click.echo(f"precondition: {exc}", err=True)
        return EXIT_USAGE
    if outcome.failed:
        click.echo("failed claims: " + " ".join(outcome.failed), err=True)
        return EXIT_FAIL
    return EXIT_PASS


def _safe_emit(cfg: RunConfig, text: str) -> None:
    try:
        _emit(cfg, text)
    except OSError:
        pass


def _jsonable(witness: Any) -> Any:
    if isinstance(witness, SetFamily):
        return family_json(witness)
    return witness


def _load(path: str) -> SetFamily:
    return read_family(path)


def _k_of(F: SetFamily, k: int | None) -> int:
    if k is not None:
        return k
    u = F.uniformity()
    if u is None:
        raise FamilyError("family is not uniform or is empty; pass --k")
    return u


def _parse_range(text: str) -> list[int]:
    """'4', '2..5' or '3,5,7'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected N, A..B or a comma list, got {text!r}") from None


def _finish(code: int) -> None:
    sys.exit(code)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Exact checks for intersecting families and their stability bounds."""


# ---------------------------------------------------------------------------


@main.command()
@click.option("--kind", type=click.Choice(["star", "m_i", "m_kj", "k2"]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--i", "i_", type=int, help="index for m_i")
@click.option("--j", type=int, help="index for m_kj")
@click.option("--p", type=int, default=1, show_default=True, help="centre of the star")
@click.option("--e1", help="E1 for k2, comma separated")
@click.option("--e2", help="E2 for k2, comma separated")
@click.option("--x0", type=int, help="x0 for k2")
@click.option("--out", type=click.Path(dir_okay=False), help="write here instead of stdout")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), help="default: by suffix of --out")
def construct(kind, n, k, i_, j, p, e1, e2, x0, out, fmt) -> None:
    """Build a named family."""
    params: dict[str, Any] = {}
    if kind == "star":
        params["p"] = p
    elif kind == "m_i":
        if i_ is None:
            raise click.UsageError("--i is required for m_i")
        params["i"] = i_
    elif kind == "m_kj":
        if j is None:
            raise click.UsageError("--j is required for m_kj")
        params["j"] = j
    elif e1 or e2 or x0 is not None:
        if not (e1 and e2 and x0 is not None):
            raise click.UsageError("--e1, --e2 and --x0 go together")
        params.update(E1=_parse_range(e1), E2=_parse_range(e2), x0=x0)
    fmt = fmt or ("json" if out is None or Path(out).suffix == ".json" else "text")
    spec = NamedFamilySpec(kind, n, k, params)
    cfg = RunConfig("construct", {"kind": kind, "n": n, "k": k, **params}, out, fmt)

    def render(cfg: RunConfig, oc: Outcome) -> str:
        F = oc.body
        if cfg.format == "json":
            return dumps({"config": cfg.header(), "label": spec.label(), **family_json(F)})
        return f"# config: {json.dumps(cfg.header())}\n# label: {spec.label()}\n" + family_to_text(F)

    _finish(run(cfg, lambda: Outcome(spec.build()), render))


@main.command()
@click.option("--family", "path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=int, help="uniformity; read from the family by default")
@click.option("--out", type=click.Path(dir_okay=False))
def check(path, k, out) -> None:
    """Basic properties of a family; fails when it is not intersecting."""
    cfg = RunConfig("check", {"family": path, "k": k}, out)

    def action() -> Outcome:
        F = _load(path)
        kk = _k_of(F, k)
        pair = disjoint_pair(F)
        p, d = max_degree(F) if F.blocks else (None, 0)
        body: dict[str, Any] = {
            "n": F.n, "k": kk, "size": len(F),
            "intersecting": pair is None,
            "disjoint_pair": None if pair is None else [set_json(b) for b in pair],
            "trivial": bool(F.blocks) and is_star(F),
            "max_degree": {"element": p, "degree": d},
        }
        if pair is None:
            body["maximal"] = is_maximal_intersecting(F, kk)
            try:
                body["class"] = class_name(F, kk) if F.n >= 2 * kk + 1 else None
                body["canonical"] = family_json(canonical_form(F))
            except CanonicalTooLarge:
                body["class"] = body["canonical"] = None
        return Outcome(body, [] if pair is None else ["intersecting"])

    _finish(run(cfg, action))


@main.command("framework-cert")
@click.option("--family", "path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=int)
@click.option("--level", "--t", "t", type=int, help="also compare with the level-t bound")
@click.option("--unchecked", is_flag=True, help="accept non-maximal families; claim32 is then skipped")
@click.option("--out", type=click.Path(dir_okay=False))
def framework_cert(path, k, t, unchecked, out) -> None:
    """Run the decomposition certificate chain on a family."""
    cfg = RunConfig("framework-cert", {"family": path, "k": k, "t": t, "unchecked": unchecked}, out)

    def action() -> Outcome:
        F = _load(path)
        kk = _k_of(F, k)
        d, reports = certificate_chain(F, kk, unchecked=unchecked)
        body: dict[str, Any] = {"decomposition": d.summary(), "reports": certificate_json(d, reports)}
        if t is not None:
            level = level_t_certificate(F, t, kk, chain=reports)
            reports.append(level)
            body["level"] = level.to_json()
        return Outcome(body, _failed(reports))

    _finish(run(cfg, action))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--forbid-trivial", is_flag=True)
@click.option("--forbid-template", "templates", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--fixed-f0", type=int)
@click.option("--max-degree-cap", type=int)
@click.option("--all-witnesses", is_flag=True, help="list every optimal class (default: the first only)")
@click.option("--timeout", type=float, default=DEFAULT_TIMEOUT, show_default=True)
@click.option("--seedless", is_flag=True, help="assert that no randomness is involved")
@click.option("--out", type=click.Path(dir_okay=False))
def search(n, k, forbid_trivial, templates, fixed_f0, max_degree_cap, all_witnesses, timeout, seedless, out) -> None:
    """Largest intersecting family under constraints."""
    params = {
        "n": n, "k": k, "forbid_trivial": forbid_trivial, "forbid_template": list(templates),
        "fixed_f0": fixed_f0, "max_degree_cap": max_degree_cap, "all_witnesses": all_witnesses,
        "timeout": timeout, "seedless": seedless, "threads": thread_count(),
    }
    cfg = RunConfig("search", params, out)

    def action() -> Outcome:
        c = SearchConstraints(forbid_trivial, tuple(_load(p) for p in templates), fixed_f0, max_degree_cap)
        res = max_family(build_instance(n, k), c, timeout)
        if not all_witnesses:
            res.witnesses, res.classes = res.witnesses[:1], res.classes[:1]
        return Outcome(res.to_json())

    _finish(run(cfg, action))


def _verify_reports(theorem, frankl, claim, n, k, t, timeout) -> list[VerificationReport]:
    if theorem is not None:
        if theorem >= 4:
            return [level_t_property(theorem, k, n)]
        if n is None:
            raise click.UsageError("--n is required for theorems 0 to 3")
        return [verify_theorem(theorem, n, k, timeout)]
    if frankl is not None:
        return [verify_frankl(n, k, frankl, timeout)]
    if claim == "claim35":
        ts = [t] if t is not None else list(range(1, n - k + 1))
        return [claim35_trichotomy(tt, n, k) for tt in ts]
    if claim == "claim36":
        return [verify_claim36(n, k, timeout)]
    if claim == "claim41":
        if t is None:
            raise click.UsageError("--t is required for claim41")
        gap = claim41_gap(n, k, t)
        return [VerificationReport("claim41", gap > 0, {"n": n, "k": k, "t": t, "gap": gap},
                                   [] if gap > 0 else [{"gap": gap}])]
    if claim == "nocommon":
        return [verify_nocommon(n, k, timeout)]
    raise click.UsageError("give one of --theorem, --frankl or --claim")


@main.command()
@click.option("--theorem", type=int, help="level t: 0 EKR, 1 HM, 2, 3 by search; >= 4 by properties")
@click.option("--frankl", type=int, help="degree-capped bound for M_i")
@click.option("--claim", type=click.Choice(["claim35", "claim36", "claim41", "nocommon"]))
@click.option("--n", type=int, help="default for --theorem >= 4: smallest admissible n")
@click.option("--k", type=int, required=True)
@click.option("--t", type=int, help="level for claim35 and claim41")
@click.option("--timeout", type=float, default=DEFAULT_TIMEOUT, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def verify(theorem, frankl, claim, n, k, t, timeout, out) -> None:
    """Check one statement and report pass or fail."""
    if sum(x is not None for x in (theorem, frankl, claim)) != 1:
        raise click.UsageError("give exactly one of --theorem, --frankl or --claim")
    if n is None and not (theorem is not None and theorem >= 4):
        raise click.UsageError("--n is required")
    params = {"theorem": theorem, "frankl": frankl, "claim": claim, "n": n, "k": k, "t": t, "timeout": timeout}
    cfg = RunConfig("verify", params, out)

    def action() -> Outcome:
        reports = _verify_reports(theorem, frankl, claim, n, k, t, timeout)
        body = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
        return Outcome(body, _failed(reports))

    _finish(run(cfg, action))


@main.command("sweep-bounds")
@click.option("--t", "t_range", required=True, help="levels, e.g. 2..4")
@click.option("--k", "k_range", required=True, help="uniformities, e.g. 4..8")
@click.option("--n", "n_range", default="auto", show_default=True,
              help="'auto' for the smallest admissible n, or a range")
@click.option("--format", "fmt", type=click.Choice(["tsv", "json"]), default="tsv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def sweep_bounds(t_range, k_range, n_range, fmt, out) -> None:
    """Tabulate level bounds; combinations outside a bound's hypothesis are skipped."""
    cfg = RunConfig("sweep-bounds", {"t": t_range, "k": k_range, "n": n_range}, out, fmt)

    def action() -> Outcome:
        rows = []
        for t in _parse_range(t_range):
            for k in _parse_range(k_range):
                ns = [smallest_n(t, k)] if n_range == "auto" else _parse_range(n_range)
                for n in ns:
                    try:
                        rows.append(theorem_bound(t, n, k).to_json())
                    except RegimeError:
                        continue
        return Outcome(rows)

    def render(cfg: RunConfig, oc: Outcome) -> str:
        if cfg.format == "json":
            return _json_doc(cfg, oc.body)
        lines = [f"# config: {json.dumps(cfg.header())}", "level\tn\tk\tvalue\tformula_id"]
        lines += [f"{r['level']}\t{r['n']}\t{r['k']}\t{r['value']}\t{r['formula_id']}" for r in oc.body]
        return "\n".join(lines) + "\n"

    _finish(run(cfg, action, render))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--budget", type=int, default=40, show_default=True, help="largest binom(n,k) allowed")
@click.option("--timeout", type=float, default=DEFAULT_TIMEOUT, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def enumerate(n, k, budget, timeout, out) -> None:  # noqa: A001 - the command name
    """All maximal non-trivial intersecting families up to isomorphism."""
    cfg = RunConfig("enumerate", {"n": n, "k": k, "budget": budget, "timeout": timeout}, out)

    def action() -> Outcome:
        fams = enumerate_maximal(n, k, budget, timeout)
        return Outcome({"count": len(fams),
                        "families": [{"size": len(F), "class": class_name(F, k), **family_json(F)} for F in fams]})

    _finish(run(cfg, action))


__all__ = ["COMMANDS", "RunConfig", "main", "run", "THREADS_ENV"]
