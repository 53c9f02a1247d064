"""Command-line front end for the verification suite.

    slicegrav-verify --p 2 --q 2 --suite slice,negative --format both --out report.json

Exit codes: 0 when every positive check passes and every negative control
fails clearly, 1 otherwise, 2 for usage errors or an unwritable output path.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from .verify import SUITES, SuiteConfig, build_cases, run_suite, summarize

DEFAULT_SIGNATURES = ((1, 2), (2, 2), (2, 3))
SUITE_ALIASES = {
    "all": SUITES,
    "thm3": ("slice", "words"),
    "thm4": ("iterated",),
    "thm5": ("dagger",),
    "cor": ("paravector", "null"),
}
WEIGHT_CHOICES = {"literal": ("literal",), "corrected": ("corrected",), "both": ("literal", "corrected")}


@dataclass(frozen=True)
class RunConfig:
    p: int | None = None
    q: int | None = None
    max_l: int = 4
    seed: int = 42
    samples: int = 100
    degree: int = 4
    delta: float = 0.1
    tol_l1: float = 1e-8
    tol_l3: float = 1e-6
    tol_l5: float = 1e-5
    suites: tuple = SUITES
    weights: str = "both"
    format: str = "both"
    out: str | None = None

    def validate(self):
        p = 2 if self.p is None else self.p
        q = 2 if self.q is None else self.q
        if p < 1 or q < 1:
            raise ValueError("p and q must be at least 1")
        if p + q > 8:
            raise ValueError("p + q must not exceed 8")
        if not 1 <= self.max_l <= 5:
            raise ValueError("max-l must lie in 1..5")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        for name in ("tol_l1", "tol_l3", "tol_l5"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name.replace('_', '-')} must be positive")

    def suite_config(self) -> SuiteConfig:
        if self.p is None and self.q is None:
            signatures, primary, para = DEFAULT_SIGNATURES, (2, 2), (1, 2)
        else:
            pq = (2 if self.p is None else self.p, 2 if self.q is None else self.q)
            signatures, primary = (pq,), pq
            para = (pq[0],) if pq[0] <= 2 else (1, 2)
        return SuiteConfig(
            signatures=signatures,
            primary=primary,
            paravector_dims=para,
            max_l=self.max_l,
            seed=self.seed,
            samples=self.samples,
            degree=self.degree,
            delta=self.delta,
            tol_l1=self.tol_l1,
            tol_l3=self.tol_l3,
            tol_l5=self.tol_l5,
            suites=self.suites,
            forms=WEIGHT_CHOICES[self.weights],
        )


def _suite_list(text: str) -> tuple:
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        names = SUITE_ALIASES.get(tok, (tok,))
        for n in names:
            if n not in SUITES:
                raise argparse.ArgumentTypeError(f"unknown suite {tok!r}; choose from {', '.join(SUITES + tuple(SUITE_ALIASES))}")
            if n not in out:
                out.append(n)
    if not out:
        raise argparse.ArgumentTypeError("empty suite list")
    return tuple(n for n in SUITES if n in out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slicegrav-verify", description="Numerically verify conformal covariance identities of slice Dirac operators.")
    ap.add_argument("--p", type=int, default=None, help="dimension of the p-part (default: run signatures (1,2), (2,2), (2,3))")
    ap.add_argument("--q", type=int, default=None, help="dimension of the q-part")
    ap.add_argument("--max-l", type=int, default=4, help="largest operator power for iterated checks (<= 5)")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=100, help="sample points per case")
    ap.add_argument("--degree", type=int, default=4, help="degree of random test polynomials")
    ap.add_argument("--delta", type=float, default=0.1, help="clearance from singular sets")
    ap.add_argument("--tol-l1", type=float, default=1e-8, help="tolerance for l <= 2")
    ap.add_argument("--tol-l3", type=float, default=1e-6, help="tolerance for l = 3, 4")
    ap.add_argument("--tol-l5", type=float, default=1e-5, help="tolerance for l = 5")
    ap.add_argument("--suite", type=_suite_list, default=SUITES, help=f"comma-separated subset of {','.join(SUITES)} (aliases: {','.join(SUITE_ALIASES)})")
    ap.add_argument("--weights", choices=tuple(WEIGHT_CHOICES), default="both", help="weight form for intertwining checks")
    ap.add_argument("--format", choices=("json", "text", "both"), default="both")
    ap.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return ap


def parse_args(argv=None) -> RunConfig:
    ap = build_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(
        p=ns.p, q=ns.q, max_l=ns.max_l, seed=ns.seed, samples=ns.samples, degree=ns.degree, delta=ns.delta,
        tol_l1=ns.tol_l1, tol_l3=ns.tol_l3, tol_l5=ns.tol_l5, suites=ns.suite, weights=ns.weights,
        format=ns.format, out=ns.out,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        ap.error(str(exc))
    return cfg


def machine_report(cfg: SuiteConfig, reports) -> dict:
    """Deterministic report document; contains no timings."""
    return {"config": cfg.as_dict(), "cases": [r.as_row() for r in reports], "summary": summarize(reports)}


def text_report(reports, elapsed: float | None = None) -> str:
    lines = [f"{'case':<72} {'max_rel':>9} {'median':>9} {'tol':>7} {'time':>6}  result"]
    for r in reports:
        row = r.as_row()
        mx = "nan" if row["max_rel"] is None else f"{row['max_rel']:.2e}"
        md = "nan" if row["median_rel"] is None else f"{row['median_rel']:.2e}"
        if r.error:
            verdict = "ERROR " + r.error
        elif r.case.negative:
            verdict = "fails correctly" if r.passed else "NOT DETECTED"
        else:
            verdict = "pass" if r.passed else "FAIL"
        cid = row["id"] if len(row["id"]) <= 72 else row["id"][:69] + "..."
        lines.append(f"{cid:<72} {mx:>9} {md:>9} {row['tolerance']:>7.0e} {r.wall_time:>5.2f}s  {verdict}")
    s = summarize(reports)
    lines.append(
        f"positive {s['positive_passed']}/{s['positive']} passed, "
        f"negative controls {s['negative_failed_correctly']}/{s['negative']} detected, errors {s['errors']}"
    )
    if elapsed is not None:
        lines.append(f"wall time {elapsed:.1f}s")
    return "\n".join(lines)


def emit_report(reports, fmt: str, path: str | None, cfg: SuiteConfig, elapsed: float | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    if fmt in ("text", "both"):
        print(text_report(reports, elapsed), file=stream)
    if fmt in ("json", "both"):
        doc = json.dumps(machine_report(cfg, reports), indent=2, sort_keys=True) + "\n"
        if path:
            try:
                with open(path, "w") as fh:
                    fh.write(doc)
            except OSError as exc:
                print(f"slicegrav-verify: cannot write report: {exc}", file=sys.stderr)
                return 2
        else:
            stream.write(doc)
    return 0 if all(r.passed for r in reports) else 1


def _writable(path: str) -> bool:
    if os.path.isdir(path):
        return False
    if os.path.exists(path):
        return os.access(path, os.W_OK)
    return os.access(os.path.dirname(os.path.abspath(path)), os.W_OK)


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if cfg.out and cfg.format != "text" and not _writable(cfg.out):
        print(f"slicegrav-verify: cannot write report to {cfg.out}", file=sys.stderr)
        return 2
    scfg = cfg.suite_config()
    t0 = time.perf_counter()
    reports = run_suite(scfg, build_cases(scfg))
    return emit_report(reports, cfg.format, cfg.out, scfg, time.perf_counter() - t0)


if __name__ == "__main__":
    sys.exit(main())
