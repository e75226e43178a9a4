"""Command-line front end: ``hyperarr <command> [options]``."""

from __future__ import annotations

import argparse
import json
import random
import signal
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .algebra import ParseError, Ring
from .arrangement import Arrangement, ArrangementError, Flat, cone, load, to_json, to_text
from .assprimes import associated_primes, cross_validate_ass
from .classify import (
    FREE,
    OTHER,
    POG,
    Derivation,
    PreconditionError,
    classify,
    derivation_module,
    euler_field,
    is_logarithmic,
    saito_check,
    verify_addition_theorem,
    verify_deletion_theorem,
)
from .linalg import primitive

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_TIMEOUT = 4


class InstanceTimeout(Exception):
    pass


@contextmanager
def time_limit(seconds: float | None):
    """Raise InstanceTimeout after ``seconds`` of wall time (main thread only)."""
    if not seconds:
        yield
        return

    def handler(signum, frame):
        raise InstanceTimeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# -- random arrangements -------------------------------------------------


@dataclass(frozen=True)
class RandomModel:
    """n distinct central hyperplanes in l variables with coefficients in [-c, c]."""

    l: int
    n: int
    c: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.l < 1 or self.n < 0 or self.c < 1:
            raise ValueError("need l >= 1, n >= 0, c >= 1")
        # number of distinct normalized forms available
        if self.n > ((2 * self.c + 1) ** self.l - 1) // 2:
            raise ValueError("not enough distinct hyperplanes for these bounds")

    def sample(self, index: int = 0) -> Arrangement:
        rng = random.Random(f"{self.seed}:{self.l}:{self.n}:{self.c}:{index}")
        forms: list[tuple[int, ...]] = []
        while len(forms) < self.n:
            v = [rng.randint(-self.c, self.c) for _ in range(self.l)]
            if not any(v):
                continue
            f = primitive(v)
            if f not in forms:
                forms.append(f)
        return Arrangement.from_vectors(forms, self.l)


# -- helpers -------------------------------------------------------------


def _parse_indices(text: str) -> list[int]:
    try:
        return [int(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise PreconditionError(f"bad index list {text!r}") from None


def _select_flat(A: Arrangement, text: str | None) -> Flat:
    if text is None:
        raise PreconditionError("--flat is required")
    idx = _parse_indices(text)
    for i in idx:
        if not 0 <= i < len(A):
            raise PreconditionError(f"hyperplane index {i} out of range (0..{len(A) - 1})")
    return A.flat(idx)


def _select_hyperplane(A: Arrangement, h: int | None) -> int:
    if h is None:
        raise PreconditionError("--hyperplane is required")
    if not 0 <= h < len(A):
        raise PreconditionError(f"hyperplane index {h} out of range (0..{len(A) - 1})")
    return h


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _arrangement_out(A: Arrangement, fmt: str) -> str:
    return _dump(to_json(A)) if fmt == "json" else to_text(A).rstrip("\n")


def _load_affine(path: str):
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return data["forms"], data.get("variables")
    names = None
    forms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("vars:"):
            names = tuple(v.strip() for v in line[5:].replace(",", " ").split())
            continue
        forms.append(line)
    return forms, names


def _load_candidates(path: str, ring: Ring) -> list[Derivation]:
    """JSON list of coefficient lists, or one derivation per line as comma-separated polynomials."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        rows = json.loads(text)
    else:
        rows = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append([s.strip() for s in line.split(",")])
    out = []
    for row in rows:
        if len(row) != ring.nvars:
            raise ParseError(f"derivation {row} needs {ring.nvars} coefficients")
        out.append(Derivation(tuple(ring.parse(str(s)) for s in row)))
    return out


# -- commands ------------------------------------------------------------


def cmd_lattice(A: Arrangement, args) -> tuple[int, str]:
    L = A.lattice
    if args.format == "json":
        data = {"rank": L.rank, "counts": L.counts(), **L.to_json()}
        return EXIT_OK, _dump(data)
    lines = [f"rank {L.rank}, flats per rank {L.counts()}"]
    for r, level in enumerate(L.levels):
        lines.append(f"L_{r}: " + " ".join("{" + ",".join(map(str, X.indices)) + "}" for X in level))
    return EXIT_OK, "\n".join(lines)


def cmd_betti(A: Arrangement, args) -> tuple[int, str]:
    c = classify(A)
    if args.format == "json":
        return EXIT_OK, _dump({
            "resolution": c.resolution_string(),
            "betti": c.betti.to_json(),
            "projdim": c.projdim,
            "totals": list(c.betti.totals),
        })
    return EXIT_OK, c.resolution_string()


def cmd_classify(A: Arrangement, args) -> tuple[int, str]:
    c = classify(A)
    if args.format == "json":
        return EXIT_OK, _dump(c.to_json(timings=args.timings))
    lines = [f"kind: {c.kind}"]
    if c.exponents is not None:
        lines.append(f"exponents: {list(c.exponents)}")
    if c.poexp is not None:
        lines.append(f"poexp: {list(c.poexp)}")
        lines.append(f"level: {c.level}")
    lines.append(f"S/J: {c.resolution_string()}")
    lines.append(f"D(A): {c.derivations.resolution_string()}")
    for f in c.flags:
        lines.append(f"flag: {f}")
    return EXIT_OK, "\n".join(lines)


def cmd_derivations(A: Arrangement, args) -> tuple[int, str]:
    D = derivation_module(A)
    if args.format == "json":
        return EXIT_OK, _dump(D.to_json())
    lines = [D.resolution_string()]
    lines.extend(f"[{g.pdeg}] {g}" for g in D.generators)
    return EXIT_OK, "\n".join(lines)


def cmd_assoc_primes(A: Arrangement, args) -> tuple[int, str]:
    P = associated_primes(A, method=args.method)
    if args.format == "json":
        return EXIT_OK, _dump({"method": P.method, "primes": P.to_json(A)})
    lines = [f"method: {P.method}"]
    for item in P.to_json(A):
        lines.append(f"rank {item['rank']} {item['flat']}: <{', '.join(item['generators'])}>")
    return EXIT_OK, "\n".join(lines)


def cmd_localize(A: Arrangement, args) -> tuple[int, str]:
    return EXIT_OK, _arrangement_out(A.localization(_select_flat(A, args.flat)), args.format)


def cmd_restrict(A: Arrangement, args) -> tuple[int, str]:
    return EXIT_OK, _arrangement_out(A.restriction(_select_hyperplane(A, args.hyperplane)), args.format)


def cmd_delete(A: Arrangement, args) -> tuple[int, str]:
    return EXIT_OK, _arrangement_out(A.deletion(_select_hyperplane(A, args.hyperplane)), args.format)


def cmd_saito(A: Arrangement, args) -> tuple[int, str]:
    if args.candidates:
        cands = _load_candidates(args.candidates, A.ring)
        source = "file"
    else:
        c = classify(A)
        if not c.is_free:
            raise PreconditionError(f"arrangement is {c.kind}; pass --candidates to test a given set")
        cands = c.derivations.generators
        source = "computed"
    ok = saito_check(cands, A)
    data = {
        "source": source,
        "basis": ok,
        "pdegs": [d.pdeg for d in cands],
        "candidates": [str(d) for d in cands],
    }
    if args.format == "json":
        return EXIT_OK, _dump(data)
    verdict = "basis of D(A)" if ok else "not a basis"
    return EXIT_OK, f"{verdict}; pdegs {data['pdegs']}\n" + "\n".join(data["candidates"])


# -- theorem checks over a corpus -------------------------------------------


def check_arrangement(A: Arrangement) -> dict:
    """Run every applicable invariant on one arrangement; return a report with violations."""
    violations: list[dict] = []
    checks: list[str] = []
    c = classify(A)

    def fail(name: str, detail: dict, witness: Arrangement | None = None):
        violations.append({"check": name, **detail, "witness": to_json(witness or A)})

    checks.append("euler_logarithmic")
    if A.nvars and not is_logarithmic(euler_field(A.ring), A):
        fail("euler_logarithmic", {})
    for g in c.derivations.generators:
        if not is_logarithmic(g, A):
            fail("generators_logarithmic", {"derivation": str(g)})
    if c.is_free:
        checks.append("free_exponent_sum")
        if sum(c.exponents) != len(A):
            fail("free_exponent_sum", {"exponents": list(c.exponents)})
        if len(A) > 0:
            checks.append("saito")
            if not saito_check(c.derivations.generators, A):
                fail("saito", {})
    totals = c.betti.totals
    if c.is_pog:
        checks.append("pog_betti_shape")
        r = A.rank
        if tuple(totals) != (1, r, r, 1):
            fail("pog_betti_shape", {"totals": list(totals), "rank": r})

    checks.append("localization")
    for X in A.flats():
        if X.rank == 0 or len(X) == len(A):
            continue
        B = A.localization(X)
        cB = classify(B)
        tB = cB.betti.totals
        for i, b in enumerate(tB):
            if b > (totals[i] if i < len(totals) else 0):
                fail("betti_monotonicity", {"flat": X.to_json(), "local": list(tB), "global": list(totals)}, B)
                break
        if cB.projdim > c.projdim:
            fail("projdim_monotonicity", {"flat": X.to_json()}, B)
        if c.is_free and not cB.is_free:
            fail("localization_of_free", {"flat": X.to_json(), "kind": cB.kind}, B)
        if c.is_pog:
            if cB.kind not in (FREE, POG):
                fail("localization_of_pog", {"flat": X.to_json(), "kind": cB.kind}, B)
            if not cB.is_free and len(cB.derivations.generators) != A.nvars + 1:
                fail("local_generator_count", {"flat": X.to_json()}, B)

    if len(A) >= 2:
        P = associated_primes(A, classification=c)
        rank2 = set(A.flats(2))
        checks.append("ass_contains_rank2")
        if not rank2 <= set(P.flats):
            fail("ass_contains_rank2", {})
        if c.is_free and set(P.flats) != rank2:
            fail("ass_of_free", {"ass": [X.to_json() for X in P.flats]})
        if c.projdim == 3:
            checks.append("ass_cross_validation")
            rep = cross_validate_ass(A, c)
            if not rep["agree"]:
                fail("ass_cross_validation", {k: rep[k] for k in ("only_combinatorial", "only_oracle")})

    if A.is_essential() and len(A) >= 1:
        for h in range(len(A)):
            if c.is_free:
                checks.append("deletion_theorem")
                rep = verify_deletion_theorem(A, h, c)
                if not rep["holds"]:
                    fail("deletion_theorem", rep)
            B = A.deletion(h)
            cB = classify(B)
            if cB.is_free:
                checks.append("addition_theorem")
                rep = verify_addition_theorem(A, h, cB)
                if not rep["holds"]:
                    fail("addition_theorem", rep)
    return {
        "n": len(A),
        "l": A.nvars,
        "kind": c.kind,
        "checks": sorted(set(checks)),
        "violations": violations,
    }


def _corpus(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(q for q in path.iterdir() if q.suffix in (".json", ".txt", ".arr")))
        else:
            files.append(path)
    return files


def _run_instances(func: Callable, items: list, timeout: float | None, jobs: int):
    """Apply ``func`` to every item; return (status, result) pairs in input order."""
    if jobs > 1 and len(items) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            yield from pool.map(_guarded, [(func, it, timeout) for it in items])
        return
    for it in items:
        yield _guarded((func, it, timeout))


def _guarded(job):
    func, item, timeout = job
    try:
        with time_limit(timeout):
            return "ok", func(item)
    except InstanceTimeout:
        return "timeout", None


def _verify_file(path: Path) -> dict:
    A = load(path)
    rep = check_arrangement(A)
    rep["file"] = str(path)
    return rep


def cmd_verify_theorems(args) -> tuple[int, str]:
    files = _corpus(args.corpus)
    reports = []
    code = EXIT_OK
    for path, (status, rep) in zip(files, _run_instances(_verify_file, files, args.timeout, args.jobs)):
        if status == "timeout":
            reports.append({"file": str(path), "status": "timeout"})
            code = EXIT_TIMEOUT
            break
        rep["status"] = "ok"
        reports.append(rep)
    n_viol = sum(len(r.get("violations", [])) for r in reports)
    if n_viol:
        code = EXIT_VIOLATION
        out_dir = Path(args.out or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        k = 0
        for r in reports:
            for v in r.get("violations", []):
                target = out_dir / f"violation-{k:03d}.json"
                target.write_text(_dump(v["witness"]) + "\n")
                v["reproduction"] = str(target)
                k += 1
    summary = {"files": len(reports), "violations": n_viol, "reports": reports}
    if args.format == "json":
        return code, _dump(summary)
    lines = []
    for r in reports:
        if r.get("status") == "timeout":
            lines.append(f"{r['file']}: timeout")
            continue
        bad = r["violations"]
        lines.append(f"{r['file']}: {r['kind']}, {len(r['checks'])} checks, "
                     + ("ok" if not bad else f"{len(bad)} violations"))
        for v in bad:
            lines.append(f"  {v['check']}: reproduction in {v.get('reproduction')}")
    lines.append(f"{len(reports)} arrangements, {n_viol} violations")
    return code, "\n".join(lines)


# -- deletion search -------------------------------------------------------


def deletion_profile(A: Arrangement) -> dict | None:
    """Classify every deletion of a plus-one generated A; None if A is not POG."""
    c = classify(A)
    if not c.is_pog:
        return None
    kinds = [classify(A.deletion(h)).kind for h in range(len(A))]
    return {
        "arrangement": to_json(A),
        "forms": A.render_forms(),
        "poexp": list(c.poexp),
        "level": c.level,
        "deletions": kinds,
    }


def _search_one(job):
    model, index = job
    return deletion_profile(model.sample(index))


def search_deletion_pog(model: RandomModel, count: int, timeout: float | None = None, jobs: int = 1):
    tally = {FREE: 0, POG: 0, OTHER: 0}
    pog: list[dict] = []
    witnesses: list[dict] = []
    status = "complete"
    items = [(model, i) for i in range(count)]
    for (_, i), (st, prof) in zip(items, _run_instances(_search_one, items, timeout, jobs)):
        if st == "timeout":
            status = f"timeout at instance {i}"
            break
        if prof is None:
            continue
        prof["instance"] = i
        pog.append(prof)
        for k in prof["deletions"]:
            tally[k] += 1
        if {FREE, POG, OTHER} <= set(prof["deletions"]):
            witnesses.append(prof)
    return {
        "model": {"l": model.l, "n": model.n, "c": model.c, "seed": model.seed},
        "count": count,
        "status": status,
        "pog_instances": len(pog),
        "tally": tally,
        "witnesses": witnesses,
        "evidence": pog,
    }


def cmd_search(args) -> tuple[int, str]:
    if args.input:
        A = load(args.input)
        prof = deletion_profile(A)
        if prof is None:
            raise PreconditionError("input arrangement is not plus-one generated")
        tally = {FREE: 0, POG: 0, OTHER: 0}
        for k in prof["deletions"]:
            tally[k] += 1
        report = {"count": 1, "status": "complete", "pog_instances": 1, "tally": tally,
                  "witnesses": [prof] if all(tally.values()) else [], "evidence": [prof]}
    else:
        model = RandomModel(args.l, args.n, args.coeff, args.seed)
        report = search_deletion_pog(model, args.count, args.timeout, args.jobs)
    code = EXIT_TIMEOUT if report["status"].startswith("timeout") else EXIT_OK
    if args.format == "json":
        return code, _dump(report)
    lines = [f"{report['pog_instances']} plus-one generated of {report['count']} ({report['status']})",
             "deletions: " + ", ".join(f"{k} {v}" for k, v in report["tally"].items())]
    for w in report["witnesses"]:
        lines.append("all three behaviours: " + " * ".join(f"({f})" for f in w["forms"]))
        lines.append("  deletions: " + " ".join(w["deletions"]))
    return code, "\n".join(lines)


def cmd_cone(args) -> tuple[int, str]:
    forms, names = _load_affine(args.input)
    return EXIT_OK, _arrangement_out(cone(forms, names), args.format)


# -- entry point -------------------------------------------------------------

FILE_COMMANDS = {
    "lattice": (cmd_lattice, "intersection lattice by rank"),
    "betti": (cmd_betti, "minimal resolution and Betti table of S/J(A)"),
    "classify": (cmd_classify, "free / plus-one generated / other"),
    "derivations": (cmd_derivations, "minimal generators and resolution of D(A)"),
    "assoc-primes": (cmd_assoc_primes, "associated primes of S/J(A) as flats"),
    "localize": (cmd_localize, "the localization A_X at --flat"),
    "restrict": (cmd_restrict, "the restriction A^H to --hyperplane"),
    "delete": (cmd_delete, "A without --hyperplane"),
    "saito-verify": (cmd_saito, "Saito's criterion on computed or given derivations"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timeout", type=float, default=None, help="seconds per instance")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch commands")

    parser = argparse.ArgumentParser(prog="hyperarr", description="Hyperplane arrangement algebra.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in FILE_COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("input")
        if name == "localize":
            p.add_argument("--flat", help="comma-separated hyperplane indices")
        if name in ("restrict", "delete"):
            p.add_argument("--hyperplane", type=int)
        if name == "classify":
            p.add_argument("--timings", action="store_true", help="include timings in JSON")
        if name == "assoc-primes":
            p.add_argument("--method", choices=("free_shortcut", "combinatorial_thm47", "oracle_saturation"))
        if name == "saito-verify":
            p.add_argument("--candidates", help="file with l derivations")

    p = sub.add_parser("cone", parents=[common], help="cone of an affine arrangement")
    p.add_argument("input")

    p = sub.add_parser("verify-theorems", parents=[common], help="run invariant checks over a corpus")
    p.add_argument("corpus", nargs="*", help="files or directories")
    p.add_argument("--out", help="directory for reproduction files")

    p = sub.add_parser("search-deletion-pog", parents=[common],
                       help="deletions of random plus-one generated arrangements")
    p.add_argument("input", nargs="?", help="fixed arrangement instead of random ones")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--l", type=int, default=3, help="number of variables")
    p.add_argument("--n", type=int, default=6, help="number of hyperplanes")
    p.add_argument("--coeff", type=int, default=3, help="coefficient bound")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-theorems":
            return cmd_verify_theorems(args)
        if args.command == "search-deletion-pog":
            return cmd_search(args)
        with time_limit(args.timeout):
            if args.command == "cone":
                return cmd_cone(args)
            A = load(args.input)
            func = FILE_COMMANDS[args.command][0]
            return func(A, args)
    except (ParseError, json.JSONDecodeError, OSError) as e:
        return EXIT_PARSE, f"error: {e}"
    except PreconditionError as e:
        return EXIT_PRECONDITION, f"error: {e}"
    except ArrangementError as e:
        # selectors are checked up front, so what is left comes from the input
        return EXIT_PARSE, f"error: {e}"
    except InstanceTimeout:
        return EXIT_TIMEOUT, _dump({"status": "timeout"}) if args.format == "json" else "timeout"


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run(argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_VIOLATION, EXIT_TIMEOUT) else sys.stderr
    if out:
        print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
