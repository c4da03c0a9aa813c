"""lndkit command line: run the pipelines on a problem file.

Exit codes: 0 certified result, 1 input error, 2 cap exceeded or uncertified.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .degmod import Filtration, d_basis_check, degree_resolution, graded_ring_truncation
from .factor import ModificationNotFoundError, canonical_factorization
from .lnd import (
    IllDefinedDerivationError,
    NoSliceError,
    NotVerifiedError,
    find_local_slice,
    kernel_generators,
    principal_generator,
)
from .poly import PolynomialParseError, format_polynomial
from .problem import FIXTURES, Problem, ProblemError, fixture, load_problem
from .subalg import CapExceededError

EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED = 0, 1, 2


class Uncertified(Exception):
    """Raised to turn a partial result into exit code 2."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


def _p(poly) -> str:
    return format_polynomial(poly)


def _tags(A, poly) -> str | None:
    t = A.rewrite(poly)
    return None if t is None else _p(t)


def _algebra(A) -> dict:
    return {
        "generators": [{"name": n, "poly": _p(g)} for n, g in zip(A.labels, A.generators)],
        "relations": [_p(r) for r in A.relation_ideal().groebner_basis()],
    }


def _ideal(A, gens) -> list:
    return [{"poly": _p(g), "in_A": _tags(A, g)} for g in gens]


# ---------------------------------------------------------------- context


class Session:
    def __init__(self, problem: Problem, args):
        self.problem = problem
        self.args = args
        self.D = problem.derivation
        self._A = None
        self._filt = None
        self.kernel_info = None

    def verify(self) -> dict:
        return self.D.verify_locally_nilpotent(self.args.cap)

    @property
    def A(self):
        if self._A is None:
            self.verify()
            if self.problem.kernel is not None and not self.args.recompute:
                self._A = self.problem.kernel
                self.kernel_info = {"source": "given", "certified": True}
            else:
                kr = kernel_generators(self.D, self.args.kernel_cap)
                self._A = kr.algebra
                self.kernel_info = {"source": "computed", "certified": kr.certified, "rounds": kr.rounds}
                if not kr.certified:
                    raise Uncertified("kernel computation not certified within cap")
        return self._A

    @property
    def filtration(self) -> Filtration:
        if self._filt is None:
            A = self.A
            policy = self.args.policy or self.problem.option("policy", "auto")
            self._filt = Filtration(self.D, A, policy, cap=self.args.chain_cap, interleave=self.args.interleave)
        return self._filt

    def max_n(self, default: int = 32) -> int:
        if self.args.max is not None:
            return self.args.max
        return int(self.problem.option("max", default))


# ---------------------------------------------------------------- commands


def cmd_check(s: Session) -> dict:
    return {"locally_nilpotent": True, "witnesses": s.verify(), "cap": s.args.cap}


def cmd_kernel(s: Session) -> dict:
    s.args.recompute = s.args.recompute or s.problem.kernel is None
    A = s.A
    out = {"kernel": _algebra(A)}
    out.update(s.kernel_info)
    if not s.D.is_zero():
        sl = find_local_slice(s.D, kernel=A.generators)
        out["slice"] = {"r": _p(sl.r), "f": _p(sl.f)}
    if s.problem.kernel is not None and s.kernel_info["source"] == "computed":
        from .subalg import algebra_equal

        out["equals_given"] = algebra_equal(A, s.problem.kernel)
    return out


def cmd_degmod(s: Session) -> dict:
    n = s.args.n
    M = s.filtration.module(n)
    return {
        "n": n,
        "policy": M.policy,
        "certified": M.certified,
        "generators": [{"poly": _p(g), "deg_D": d} for g, d in zip(M.generators, M.degrees)],
        "d_basis": d_basis_check(M),
    }


def _image(s: Session, n: int) -> dict:
    A = s.A
    gens = s.filtration.image_ideal(n) if not s.D.is_zero() else []
    principal, gen = principal_generator(A, gens) if gens else (True, None)
    return {
        "n": n,
        "generators": _ideal(A, gens),
        "principal": principal,
        "principal_generator": _p(gen) if gen is not None else None,
    }


def cmd_plinth(s: Session) -> dict:
    return _image(s, 1)


def cmd_image(s: Session) -> dict:
    return _image(s, s.args.n)


def _resolution_report(res) -> dict:
    return {
        "jumps": list(res.jumps),
        "index": res.index,
        "complete": res.complete,
        "chain": [dict(n=n, adjoined=[_p(g) for g in added], **_algebra(alg)) for n, alg, added in res.chain],
    }


def _resolution(s: Session):
    res = degree_resolution(s.D, s.A, s.max_n(), filtration=s.filtration, names=s.problem.symbols)
    return res


def cmd_resolution(s: Session) -> dict:
    res = _resolution(s)
    out = _resolution_report(res)
    if not res.complete:
        raise Uncertified(f"B not reached by n = {res.max_n}", out)
    return out


def cmd_factorize(s: Session) -> dict:
    res = _resolution(s)
    if not res.complete:
        raise Uncertified(f"B not reached by n = {res.max_n}", _resolution_report(res))
    cf = canonical_factorization(s.D, s.A, res.max_n, resolution=res)
    out = _resolution_report(res)
    out["levels"] = [
        {"n": lv.n, "fixed_point_ideal": [_p(g) for g in lv.fixed_point_ideal]} for lv in cf.levels
    ]
    out["pool"] = [_p(p) for p in cf.pool]
    out["slice_split"] = cf.slice_split
    steps = []
    for (n0, _, _), (n1, _, _), st in zip(res.chain[1:], res.chain[2:], cf.steps):
        base = st.triple.base
        steps.append({
            "from": n0,
            "to": n1,
            "f": _p(st.triple.f),
            "f_in_base": _tags(base, st.triple.f),
            "center": _ideal(base, st.triple.center),
            "exponent": st.exponent,
            "new_generators": [_p(w) for w in st.new_generators],
            "exceptional": [_p(e) for e in st.exceptional],
            "equivariant": st.equivariant,
            "principal": st.principal,
            "verified": st.verified,
        })
    out["steps"] = steps
    if not all(st.verified for st in cf.steps):
        raise Uncertified("a modification step could not be verified", out)
    return out


def cmd_grdb(s: Session) -> dict:
    A = s.A
    N = s.max_n(10)
    gr = graded_ring_truncation(s.D, A, N, filtration=s.filtration)
    return {
        "N": N,
        "ideals": {str(n): [_p(g) for g in gens] for n, gens in gr.ideals.items()},
        "generators": [{"weight": w, "poly": _p(a), "in_A": _tags(A, a)} for a, w in gr.generators],
    }


COMMANDS = {
    "check": (cmd_check, "verify local nilpotency and print witnesses"),
    "kernel": (cmd_kernel, "generators of ker D"),
    "degmod": (cmd_degmod, "generators and deg_D values of F_n"),
    "plinth": (cmd_plinth, "plinth ideal I_1"),
    "image": (cmd_image, "image ideal I_n"),
    "resolution": (cmd_resolution, "degree resolution, jump set and index"),
    "factorize": (cmd_factorize, "canonical factorization with modification triples"),
    "grdb": (cmd_grdb, "truncation of the associated graded ring"),
}


# ---------------------------------------------------------------- output


def _human(report: dict, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_human(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                sub = _human(item, indent + 2)
                if sub:
                    sub[0] = pad + "  - " + sub[0].lstrip()
                lines.extend(sub)
        elif isinstance(v, list):
            lines.append(f"{pad}{k}: [{', '.join(map(str, v))}]")
        else:
            lines.append(f"{pad}{k}: {v}")
    return lines


def emit(report: dict, as_json: bool, stream) -> None:
    if as_json:
        stream.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        stream.write("\n".join(_human(report)) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lndkit", description="Degree modules and factorizations for locally nilpotent derivations.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("fixtures", help="list bundled problem files")
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", help="problem file, or fixture:NAME for a bundled one")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--cap", type=int, default=512, help="nilpotency cap per variable (512)")
        p.add_argument("--kernel-cap", type=int, default=16, help="kernel algorithm rounds (16)")
        p.add_argument("--chain-cap", type=int, default=64, help="saturation steps per F_n (64)")
        p.add_argument("--policy", choices=["auto", "products", "slice-powers"], default=None)
        p.add_argument("--interleave", action="store_true", help="saturate by visible factors of Dr in turn")
        p.add_argument("--recompute", action="store_true", help="ignore a given [kernel] section")
        if name in ("degmod", "image"):
            p.add_argument("--n", type=int, required=True)
        if name in ("resolution", "factorize", "grdb"):
            p.add_argument("--max", type=int, default=None)
    return ap


def _load(spec: str) -> Problem:
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise ProblemError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
        return fixture(name)
    return load_problem(spec)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=stderr, format="%(name)s: %(message)s")
    if args.command == "fixtures":
        stdout.write("\n".join(FIXTURES) + "\n")
        return EXIT_OK
    try:
        problem = _load(args.problem)
    except (ProblemError, PolynomialParseError, IllDefinedDerivationError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
        stderr.write("error: --n must be non-negative\n")
        return EXIT_INPUT
    session = Session(problem, args)
    head = {"command": args.command, "problem": problem.name}
    try:
        report = COMMANDS[args.command][0](session)
    except NotVerifiedError as exc:
        emit({**head, "status": "uncertified", "error": str(exc)}, args.json, stdout)
        return EXIT_UNCERTIFIED
    except Uncertified as exc:
        emit({**head, "status": "uncertified", "error": str(exc), **(exc.report or {})}, args.json, stdout)
        return EXIT_UNCERTIFIED
    except (CapExceededError, ModificationNotFoundError) as exc:
        emit({**head, "status": "uncertified", "error": str(exc)}, args.json, stdout)
        return EXIT_UNCERTIFIED
    except NoSliceError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    if session.kernel_info is not None and args.command != "kernel":
        head["kernel"] = session.kernel_info["source"]
    emit({**head, "status": "certified", **report}, args.json, stdout)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
