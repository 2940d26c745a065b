"""Command-line driver for the verification suite.

``crosscap-calc verify CHECK`` runs one named check (or ``all``) across a
parameter range, emits a machine-readable report, and exits nonzero when
anything fails.  ``crosscap-calc golden REPORT GOLDEN`` compares a report
against a frozen one, ignoring timings.

Each check has a hard cap on its scope parameter so a mistyped range
cannot start a week-long enumeration; a value past the cap becomes a
failing report entry rather than an exception, so batch runs continue.
Caps can be raised or lowered via the ``CROSSCAP_CAP_OVERRIDE``
environment variable, e.g. ``CROSSCAP_CAP_OVERRIDE=chain=8,o2=6``.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import SCHEMA_VERSION, __version__, exactmat, fpres, gf2, rschreier, words
from .gf2 import CapExceededError
from .reports import CheckReport, ReportBuilder

CAP_ENV_VAR = "CROSSCAP_CAP_OVERRIDE"

TOOL_NAME = "crosscap-calc"

#: genus past which the conjugated-twist tuple sweep is skipped (the
#: number of even index tuples grows as 2^(g-1))
TST_GENUS_LIMIT = 6

#: stabilizer checks are exhaustive up to this genus, sampled above it
STABILIZER_EXHAUSTIVE_LIMIT = 4

STABILIZER_SAMPLE = 100

# Upper bounds on the scope parameter each check accepts.  For
# ``transversal`` and ``rs`` the bound applies to the quotient dimension
# (the transversal has 2^dim elements); everywhere else it applies to
# the scope value itself: genus for the surface checks, chain length for
# ``chain``, factor count for ``commutator-lemma``.
DEFAULT_CAPS: dict[str, int] = {
    "presentation": 8,
    "commutation": 16,
    "quotient-rank": 64,
    "main-theorem": 64,
    "o2": 5,
    "stabilizer": 5,
    "chain": 6,
    "commutator-lemma": 16,
    "transversal": 16,
    "rs": 16,
    "case-identities": 8,
}

#: scope ranges used when no explicit range is given
DEFAULT_RANGES: dict[str, tuple[int, int]] = {
    "presentation": (3, 8),
    "commutation": (3, 8),
    "quotient-rank": (3, 12),
    "main-theorem": (3, 12),
    "o2": (3, 5),
    "stabilizer": (3, 5),
    "chain": (1, 6),
    "commutator-lemma": (1, 8),
    "transversal": (3, 7),
    "rs": (3, 5),
    "case-identities": (5, 6),
}

#: checks whose scope parameter is not the genus
PARAM_NAME: dict[str, str] = {"chain": "k", "commutator-lemma": "n"}

#: checks where the cap bounds the quotient dimension, not the genus
DIMENSION_CAPPED = frozenset({"transversal", "rs"})


def scope_param(check: str) -> str:
    return PARAM_NAME.get(check, "g")


def min_scope(check: str) -> int:
    return 1 if check in PARAM_NAME else 3


def quotient_dim_bound(g: int) -> int:
    """Closed form for the quotient rank; used only to gate caps so the
    gate never runs the computation it protects."""
    return math.comb(g - 1, 2) + (1 if g % 2 == 0 else 0)


# ---------------------------------------------------------------------------
# check runners: one generator of CheckReports per selector


def _fold(rb: ReportBuilder, rep: CheckReport) -> None:
    """Merge one sub-report's counts into an aggregating builder."""
    rb.passed += rep.passed
    rb.failed += rep.failed
    for line in rep.failures:
        if len(rb.failures) >= CheckReport.MAX_FAILURES:
            break
        rb.failures.append(line)
    for text in rep.caveats:
        rb.caveat(text)


def _run_presentation(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    yield fpres.verify_relators(fpres.build_presentation(g, fpres.VARIANT_PROP))
    yield fpres.verify_relators(fpres.build_presentation(g, fpres.VARIANT_COR))
    rb = ReportBuilder("representation-control", g=g)
    rb.record(
        fpres.degenerate_representation_control(g),
        "(Y[1,2]Y[1,3])^3 evaluates to the identity; representation degenerate",
    )
    yield rb.build()


def _run_commutation(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    yield fpres.verify_commutation_lemma(g)
    rb = ReportBuilder("commutation-control", g=g)
    a = exactmat.make_y(g, 1, 2)
    b = exactmat.make_y(g, 2, 1)
    rb.record(a * b != b * a, "Y[1,2] and Y[2,1] unexpectedly commute")
    yield rb.build()


def _run_quotient_rank(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    rb = ReportBuilder("quotient-rank", g=g)
    expected = quotient_dim_bound(g)
    got = fpres.quotient_rank(g)
    rb.record(got == expected, f"rank {got} != closed form {expected}")
    got_twist = fpres.twist_quotient_rank(g)
    rb.record(
        got_twist == expected - 1,
        f"twist-subgroup rank {got_twist} != closed form {expected - 1}",
    )
    rb.detail(f"rank {got}, twist-subgroup rank {got_twist}")
    yield rb.build()


def _run_main_theorem(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    rb = ReportBuilder("main-theorem", g=g)
    expected = quotient_dim_bound(g) - 1
    got = fpres.twist_quotient_rank(g)
    rb.record(got == expected, f"twist quotient rank {got} != {expected}")
    rb.detail(f"level-2 group is index 2^{got} over the twist-subgroup part")
    yield rb.build()
    yield fpres.symbol_kernel_report(g)
    rb = ReportBuilder("tst-membership", g=g)
    if g <= TST_GENUS_LIMIT:
        tuples = 0
        for r in range(2, g + 1, 2):
            for idx in itertools.combinations(range(1, g + 1), r):
                _fold(rb, rschreier.verify_tst_membership(g, idx))
                tuples += 1
        rb.detail(f"{tuples} even index tuples checked")
    else:
        rb.detail(
            f"conjugated-twist tuple sweep skipped above genus {TST_GENUS_LIMIT}"
        )
    yield rb.build()


def _run_o2(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    rb = ReportBuilder("o2-generation", g=g)
    enumerated = gf2.enumerate_o2(g)
    generated = gf2.generate_group(g, gf2.standard_twist_generators(g).values())
    rb.record(
        generated == enumerated,
        f"generated {len(generated)} elements != enumerated {len(enumerated)}",
    )
    rb.detail(f"group order {len(enumerated)}")
    if g == 3:
        perms = frozenset(
            gf2.F2Matrix.from_columns(3, [1 << p[i] for i in range(3)])
            for p in itertools.permutations(range(3))
        )
        rb.record(
            enumerated == perms,
            "group on 3 classes is not the 6 permutation matrices",
        )
    yield rb.build()


def _run_stabilizer(g: int, seed: int) -> Iterator[CheckReport]:
    sample = None if g <= STABILIZER_EXHAUSTIVE_LIMIT else STABILIZER_SAMPLE
    for case in gf2.STABILIZER_CASES:
        yield gf2.stabilizer_case_check(g, case, sample_count=sample, seed=seed)


def _expected_factor_shape(f: words.ChainFactor) -> tuple[int, ...]:
    conj = f.conjugator
    return tuple(-x for x in reversed(conj)) + (f.base, f.base) + conj


def _run_chain(k: int, seed: int) -> Iterator[CheckReport]:
    del seed
    rb = ReportBuilder("chain-relation", k=k)
    factors = words.chain_square_decomposition(k)
    rb.record(
        len(factors) == k * (k + 1) // 2,
        f"{len(factors)} factors != k(k+1)/2 = {k * (k + 1) // 2}",
    )
    for f in factors:
        if not rb.record(
            f.word().letters == _expected_factor_shape(f),
            f"factor base={f.base} conj={f.conjugator} is not a conjugated square",
        ):
            break
    rb.record(
        words.braid_equal(words.chain_power(k), words.decomposition_product(factors)),
        "(s1...sk)^(k+1) != product of the conjugated squares",
    )
    s1 = words.BraidWord(k + 1, (1,))
    s2 = words.BraidWord(k + 1, (2,)) if k >= 2 else words.BraidWord(k + 1, (-1,))
    rb.record(not words.braid_equal(s1, s2), "distinct braid letters compare equal")
    yield rb.build()


def _run_commutator_lemma(n: int, seed: int) -> Iterator[CheckReport]:
    del seed
    rb = ReportBuilder("commutator-lemma", n=n)
    rb.record(
        words.verify_commutator_lemma(n),
        f"free-group commutator identity fails at n={n}",
    )
    yield rb.build()


def _run_transversal(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    yield rschreier.verify_transversal(g)


def _run_rs(g: int, seed: int) -> Iterator[CheckReport]:
    yield rschreier.verify_rs_zero_images(g, seed=seed)
    counts = rschreier.construction_counts(g)["families"]
    include4 = counts["4"] <= rschreier.LETTER_FOLD_LIMIT
    families = ("1", "2", "3", "4") if include4 else ("1", "2", "3")
    yield rschreier.verify_family_zero_images(g, families, seed=seed)
    if include4:
        yield rschreier.verify_reduced4_constraint(g)


def _run_case_identities(g: int, seed: int) -> Iterator[CheckReport]:
    del seed
    yield rschreier.verify_case_identities(g)


Runner = Callable[[int, int], Iterator[CheckReport]]

CHECK_RUNNERS: dict[str, Runner] = {
    "presentation": _run_presentation,
    "commutation": _run_commutation,
    "quotient-rank": _run_quotient_rank,
    "main-theorem": _run_main_theorem,
    "o2": _run_o2,
    "stabilizer": _run_stabilizer,
    "chain": _run_chain,
    "commutator-lemma": _run_commutator_lemma,
    "transversal": _run_transversal,
    "rs": _run_rs,
    "case-identities": _run_case_identities,
}

CHECK_NAMES = tuple(CHECK_RUNNERS)


# ---------------------------------------------------------------------------
# configuration and the run loop


@dataclass(frozen=True)
class RunConfig:
    """One resolved ``verify`` invocation."""

    check: str
    value_range: tuple[int, int] | None = None
    # which scope flag the range came from ("g", "k", or "n"); in ``all`` mode
    # the range only restricts checks scoped by this parameter
    range_param: str | None = None
    seed: int = 0
    emit: str = "json"
    out: str | None = None
    cap_overrides: dict[str, int] = field(default_factory=dict)


def parse_range(text: str) -> tuple[int, int]:
    """``"5"`` or ``"3..8"`` (inclusive)."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise ValueError(f"bad range {text!r}: expected N or N..M") from None
    if a > b:
        raise ValueError(f"bad range {text!r}: empty")
    return a, b


def parse_cap_overrides(raw: str) -> dict[str, int]:
    """``"chain=8,o2=6"`` from the environment or tests."""
    out: dict[str, int] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, num = part.partition("=")
        name = name.strip()
        if not sep or name not in DEFAULT_CAPS:
            raise ValueError(
                f"bad cap override {part!r}: expected NAME=INT with NAME one of"
                f" {', '.join(DEFAULT_CAPS)}"
            )
        try:
            out[name] = int(num)
        except ValueError:
            raise ValueError(f"bad cap override {part!r}: {num!r} is not an int") from None
    return out


def effective_caps(cap_overrides: dict[str, int]) -> dict[str, int]:
    caps = dict(DEFAULT_CAPS)
    caps.update(parse_cap_overrides(os.environ.get(CAP_ENV_VAR, "")))
    caps.update(cap_overrides)
    return caps


def _cap_violation(check: str, value: int, cap: int) -> str | None:
    if check in DIMENSION_CAPPED:
        dim = quotient_dim_bound(value)
        if dim > cap:
            return (
                f"quotient dimension {dim} at g={value} exceeds cap {cap}"
                f" (the transversal would have 2^{dim} elements);"
                f" raise it via {CAP_ENV_VAR}={check}=N"
            )
        return None
    if value > cap:
        return (
            f"{scope_param(check)}={value} exceeds cap {cap};"
            f" raise it via {CAP_ENV_VAR}={check}=N"
        )
    return None


def _cap_report(check: str, value: int, message: str) -> CheckReport:
    return CheckReport(
        check=f"{check}:cap",
        scope=((scope_param(check), value),),
        passed=0,
        failed=1,
        failures=(message,),
    )


def run(config: RunConfig) -> dict:
    """Execute the configured checks and assemble the report document."""
    if config.check == "all":
        selected = CHECK_NAMES
    elif config.check in CHECK_RUNNERS:
        selected = (config.check,)
    else:
        raise ValueError(
            f"unknown check {config.check!r}; expected one of: all,"
            f" {', '.join(CHECK_NAMES)}"
        )
    caps = effective_caps(config.cap_overrides)
    entries: list[dict] = []
    all_ok = True
    for name in selected:
        range_applies = config.value_range is not None and (
            config.range_param is None or config.range_param == scope_param(name)
        )
        lo, hi = config.value_range if range_applies else DEFAULT_RANGES[name]
        lo = max(lo, min_scope(name))
        for value in range(lo, hi + 1):
            message = _cap_violation(name, value, caps[name])
            if message is not None:
                entry = _cap_report(name, value, message).to_json()
                entry["duration_ms"] = 0
                entries.append(entry)
                all_ok = False
                continue
            start = time.perf_counter()
            try:
                for rep in CHECK_RUNNERS[name](value, config.seed):
                    now = time.perf_counter()
                    entry = rep.to_json()
                    entry["duration_ms"] = round((now - start) * 1000)
                    start = now
                    entries.append(entry)
                    all_ok = all_ok and rep.ok
            except CapExceededError as exc:
                entry = _cap_report(name, value, str(exc)).to_json()
                entry["duration_ms"] = round((time.perf_counter() - start) * 1000)
                entries.append(entry)
                all_ok = False
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL_NAME,
        "tool_version": __version__,
        "config": {
            "check": config.check,
            "range": None
            if config.value_range is None
            else f"{config.value_range[0]}..{config.value_range[1]}",
            "seed": config.seed,
            "caps": caps,
        },
        "checks": entries,
        "overall_pass": all_ok,
    }


# ---------------------------------------------------------------------------
# emission and golden comparison


def render_markdown(report: dict) -> str:
    config = report["config"]
    lines = [
        "# crosscap-calc verification report",
        "",
        f"- tool: {report['tool']} {report['tool_version']}"
        f" (schema {report['schema_version']})",
        f"- check: {config['check']}, range: {config['range'] or 'defaults'},"
        f" seed: {config['seed']}",
        f"- overall: {'PASS' if report['overall_pass'] else 'FAIL'}",
        "",
        "| check | scope | passed | failed | notes |",
        "|---|---|---:|---:|---|",
    ]
    for entry in report["checks"]:
        scope = ", ".join(
            f"{key}={entry[key]}" for key in ("g", "k", "n") if key in entry
        )
        if entry["failed"]:
            notes = entry["failures"][0]
        elif entry.get("caveats"):
            notes = f"{len(entry['caveats'])} caveat(s)"
        else:
            notes = ""
        lines.append(
            f"| {entry['check']} | {scope} | {entry['passed']}"
            f" | {entry['failed']} | {notes} |"
        )
    lines.append("")
    return "\n".join(lines)


def emit_report(report: dict, emit: str, out: str | None) -> None:
    if emit == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    elif emit == "markdown":
        text = render_markdown(report)
    else:
        raise ValueError(f"unknown emit format {emit!r}")
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


class SchemaMismatchError(ValueError):
    """The two reports use different report schema versions."""


def _strip_timing(doc):
    if isinstance(doc, dict):
        return {k: _strip_timing(v) for k, v in doc.items() if k != "duration_ms"}
    if isinstance(doc, list):
        return [_strip_timing(v) for v in doc]
    return doc


def _diff(a, b, path: str, out: list[str]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b)):
            sub = f"{path}.{key}" if path else key
            if key not in a:
                out.append(f"{sub}: only in golden")
            elif key not in b:
                out.append(f"{sub}: only in report")
            else:
                _diff(a[key], b[key], sub, out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(f"{path}: {len(a)} entries != {len(b)} in golden")
            return
        for i, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, f"{path}[{i}]", out)
    elif a != b or type(a) is not type(b):
        out.append(f"{path}: {a!r} != golden {b!r}")


def golden_compare(report: dict, golden: dict) -> list[str]:
    """Differences between a report and a frozen golden, ignoring timings.

    A schema version mismatch is an error, not a difference list: the
    comparison itself is undefined across schemas.
    """
    if report.get("schema_version") != golden.get("schema_version"):
        raise SchemaMismatchError(
            f"schema_version {report.get('schema_version')!r} !="
            f" golden {golden.get('schema_version')!r}"
        )
    diffs: list[str] = []
    _diff(_strip_timing(report), _strip_timing(golden), "", diffs)
    return diffs


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="exact-arithmetic verification suite for the level-2"
        " crosscap-slide action",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run one check or all of them")
    verify.add_argument("check", choices=("all",) + CHECK_NAMES)
    verify.add_argument("--g", dest="g", help="genus or genus range, e.g. 5 or 3..8")
    verify.add_argument("--k", dest="k", help="chain length or range (chain only)")
    verify.add_argument(
        "--n", dest="n", help="factor count or range (commutator-lemma only)"
    )
    verify.add_argument("--seed", type=int, default=0, help="RNG seed for sampling")
    verify.add_argument("--emit", choices=("json", "markdown"), default="json")
    verify.add_argument("--out", help="write the report here instead of stdout")

    golden = sub.add_parser("golden", help="compare a report against a golden file")
    golden.add_argument("report", help="freshly produced JSON report")
    golden.add_argument("golden", help="frozen JSON report to compare against")
    return parser


def _resolve_range(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Return ``(scope_key, (lo, hi))`` from --g/--k/--n, or ``(None, None)``."""
    given = {key: getattr(args, key) for key in ("g", "k", "n") if getattr(args, key)}
    if not given:
        return None, None
    if len(given) > 1:
        parser.error("give at most one of --g/--k/--n")
    key, text = next(iter(given.items()))
    if args.check != "all" and key != scope_param(args.check):
        parser.error(
            f"check {args.check!r} is scoped by --{scope_param(args.check)}, not --{key}"
        )
    try:
        lo, hi = parse_range(text)
    except ValueError as exc:
        parser.error(str(exc))
    floor = 1 if key in ("k", "n") else 3
    if lo < floor:
        parser.error(f"--{key} must start at {floor} or above, got {lo}")
    return key, (lo, hi)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "golden":
        with open(args.report, encoding="utf-8") as handle:
            report = json.load(handle)
        with open(args.golden, encoding="utf-8") as handle:
            golden = json.load(handle)
        try:
            diffs = golden_compare(report, golden)
        except SchemaMismatchError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for line in diffs:
            print(line)
        if diffs:
            print(f"{len(diffs)} difference(s)", file=sys.stderr)
            return 1
        print("reports match (timings ignored)")
        return 0

    range_param, value_range = _resolve_range(args, parser)
    try:
        config = RunConfig(
            check=args.check,
            value_range=value_range,
            range_param=range_param,
            seed=args.seed,
            emit=args.emit,
            out=args.out,
        )
        report = run(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    emit_report(report, config.emit, config.out)
    return 0 if report["overall_pass"] else 1
