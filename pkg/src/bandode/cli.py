"""Command-line pipeline: ingest, validate, assemble, solve, extract, report.

Problems come from a JSON document (exact rational strings throughout) or
from one of the built-in reproduction problems.  Exit status: 0 when at
least one square-summable candidate was extracted, 2 when the pipeline ran
but found none, 3 on a validation failure, 1 on usage or configuration
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from . import assembly, diffop, extraction, kernel, solution
from .diffop import OdeProblem, PolyGR, ValidationError
from .exact import (
    format_rat,
    format_scientific,
    parse_gauss,
    parse_rat,
)

BUILTIN_NAMES = ("hermite3", "weber", "weber_scaled", "legendre")

_ODE_DOC_KEYS = {"order", "coefficients", "k0", "k0d", "scale", "shift"}
_COEFF_KEYS = {"num", "den"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    builtin: str | None = None
    ode_path: str | None = None
    nu: Fraction = Fraction(0)
    mu: Fraction = Fraction(0)
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    k0: int = 3
    k0d: int | None = None
    n: int = 100  # number of coefficients, i.e. top index + 1
    scheme: str = "B"
    base: int = extraction.DEFAULT_BASE
    c: Fraction = extraction.DEFAULT_C
    zeta: Fraction = extraction.DEFAULT_ZETA
    mu_variant: str = "symmetric"
    grid: tuple[Fraction, Fraction, int] = (Fraction(-3), Fraction(3), 61)
    digits: int = 40
    out: str = "bandode_out"
    dump_matrix: bool = False
    report: str = "text"
    ratio_pairs: tuple[tuple[int, int], ...] = ((2, 0),)

    def to_dict(self) -> dict:
        return {
            "builtin": self.builtin,
            "ode_path": self.ode_path,
            "nu": format_rat(self.nu),
            "mu": format_rat(self.mu),
            "a": format_rat(self.a),
            "b": format_rat(self.b),
            "k0": self.k0,
            "k0d": self.k0d,
            "n": self.n,
            "scheme": self.scheme,
            "base": self.base,
            "c": format_rat(self.c),
            "zeta": format_rat(self.zeta),
            "mu_variant": self.mu_variant,
            "grid": f"{format_rat(self.grid[0])}:{format_rat(self.grid[1])}:{self.grid[2]}",
            "digits": self.digits,
            "out": self.out,
            "dump_matrix": self.dump_matrix,
            "report": self.report,
            "ratio_pairs": [list(p) for p in self.ratio_pairs],
        }

    @staticmethod
    def from_dict(data: dict) -> "RunConfig":
        cfg = RunConfig(
            builtin=data["builtin"],
            ode_path=data["ode_path"],
            nu=parse_rat(data["nu"]),
            mu=parse_rat(data["mu"]),
            a=parse_rat(data["a"]),
            b=parse_rat(data["b"]),
            k0=int(data["k0"]),
            k0d=None if data["k0d"] is None else int(data["k0d"]),
            n=int(data["n"]),
            scheme=data["scheme"],
            base=int(data["base"]),
            c=parse_rat(data["c"]),
            zeta=parse_rat(data["zeta"]),
            mu_variant=data["mu_variant"],
            grid=_parse_grid(data["grid"]),
            digits=int(data["digits"]),
            out=data["out"],
            dump_matrix=bool(data["dump_matrix"]),
            report=data["report"],
            ratio_pairs=tuple(tuple(p) for p in data["ratio_pairs"]),
        )
        return cfg


def builtin_problem(
    name: str,
    nu: Fraction = Fraction(0),
    mu: Fraction = Fraction(0),
    a: Fraction = Fraction(30),
    k0: int = 3,
    k0d: int | None = None,
) -> OdeProblem:
    """The reproduction problems, with their exact printed coefficients."""
    if name == "weber":
        polys = [PolyGR([2 * nu + 1, 0, -1]), PolyGR(), PolyGR([1])]
    elif name == "weber_scaled":
        if a <= 0:
            raise ConfigError("weber_scaled needs a positive scale a")
        polys = [
            PolyGR([2 * nu + 1, 0, -(a * a)]),
            PolyGR(),
            PolyGR([1 / (a * a)]),
        ]
    elif name == "hermite3":
        polys = [
            PolyGR([54, -(18 * nu + 162), -54, 81]),
            PolyGR([18 * nu, 54, -81]),
            PolyGR([0, -1]),
            PolyGR([1]),
        ]
    elif name == "legendre":
        lam = nu * (nu + 1)
        polys = [
            PolyGR([lam - mu * mu, 0, -lam]),
            PolyGR([0, -2, 0, 2]),
            PolyGR([1, 0, -2, 0, 1]),
        ]
    else:
        raise ConfigError(f"unknown builtin problem {name!r}")
    return diffop.make_problem(polys, k0=k0, k0d=k0d)


def _parse_coefficient_poly(entry, where: str) -> PolyGR:
    if not isinstance(entry, list):
        raise ConfigError(f"{where}: polynomial must be an array of rational strings")
    try:
        return PolyGR([parse_gauss(str(c)) for c in entry])
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: malformed rational string ({exc})") from exc


def parse_ode_document(doc: dict):
    """Validate and parse the ODE JSON document.

    Returns (problem_builder, overrides) where problem_builder(k0, k0d)
    makes the OdeProblem and overrides holds optional k0/k0d/scale/shift
    values from the file.
    """
    if not isinstance(doc, dict):
        raise ConfigError("ODE document must be a JSON object")
    unknown = set(doc) - _ODE_DOC_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in ODE document: {sorted(unknown)}")
    if "coefficients" not in doc:
        raise ConfigError("ODE document lacks 'coefficients'")
    entries = doc["coefficients"]
    if not isinstance(entries, list) or not entries:
        raise ConfigError("'coefficients' must be a nonempty array")
    if "order" in doc and int(doc["order"]) != len(entries) - 1:
        raise ConfigError(
            f"'order' = {doc['order']} disagrees with {len(entries) - 1} coefficient entries"
        )
    numerators, denominators = [], []
    rational_form = False
    for m, entry in enumerate(entries):
        where = f"coefficient {m}"
        if isinstance(entry, dict):
            unknown = set(entry) - _COEFF_KEYS
            if unknown:
                raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
            if "num" not in entry:
                raise ConfigError(f"{where}: rational coefficient needs 'num'")
            numerators.append(_parse_coefficient_poly(entry["num"], where))
            den = entry.get("den", ["1"])
            denominators.append(_parse_coefficient_poly(den, where))
            rational_form = True
        else:
            numerators.append(_parse_coefficient_poly(entry, where))
            denominators.append(PolyGR([1]))

    def build(k0: int, k0d: int | None) -> OdeProblem:
        if rational_form:
            return diffop.clear_denominators(numerators, denominators, k0=k0, k0d=k0d)
        return diffop.make_problem(numerators, k0=k0, k0d=k0d)

    overrides = {}
    for key in ("k0", "k0d"):
        if key in doc:
            overrides[key] = int(doc[key])
    for key in ("scale", "shift"):
        if key in doc:
            overrides[key] = parse_rat(str(doc[key]))
    return build, overrides


def _parse_grid(spec: str) -> tuple[Fraction, Fraction, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be LO:HI:COUNT, got {spec!r}")
    try:
        lo, hi, count = parse_rat(parts[0]), parse_rat(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"malformed grid {spec!r} ({exc})") from exc
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    return lo, hi, count


def grid_points(grid: tuple[Fraction, Fraction, int]) -> list[Fraction]:
    lo, hi, count = grid
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems must not exit with code 2
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="bandode",
        description="Exact band-diagonal solver for finite-norm ODE solutions.",
    )
    src = parser.add_argument_group("problem source")
    src.add_argument("--ode", metavar="FILE", help="ODE document (JSON, exact rationals)")
    src.add_argument("--builtin", choices=BUILTIN_NAMES, help="built-in problem")
    src.add_argument("--nu", type=parse_rat, default=None, help="builtin parameter nu")
    src.add_argument("--mu", type=parse_rat, default=None, help="builtin parameter mu")
    src.add_argument("--a", type=parse_rat, default=None, help="coordinate scale a > 0")
    src.add_argument("--b", type=parse_rat, default=None, help="coordinate shift b")
    run = parser.add_argument_group("pipeline")
    run.add_argument("--k0", type=int, default=None, help="input-space level (default 3)")
    run.add_argument("--k0d", type=int, default=None, help="output-space level (default: largest admissible)")
    run.add_argument("--n", type=int, default=None, help="number of coefficients N+1 (default 100)")
    run.add_argument("--scheme", choices=("A", "B"), default=None, help="truncation scheme (default B)")
    run.add_argument("--base", type=int, default=None, help="weight base (default 10^16)")
    run.add_argument("--c", type=parse_rat, default=None, help="acceptance factor (default 10^4)")
    run.add_argument("--zeta", type=parse_rat, default=None, help="orthogonality target (default 1/100)")
    run.add_argument("--mu-variant", choices=("symmetric", "printed"), default=None, dest="mu_variant")
    out = parser.add_argument_group("output")
    out.add_argument("--grid", default=None, help="evaluation grid LO:HI:COUNT")
    out.add_argument("--digits", type=int, default=None, help="decimal digits in output (default 40)")
    out.add_argument("--out", default=None, help="output directory (default bandode_out)")
    out.add_argument("--dump-matrix", action="store_true", default=None, dest="dump_matrix")
    out.add_argument("--report", choices=("text", "json"), default=None)
    return parser


def parse_config(argv) -> RunConfig:
    """Parse flags (and the ODE document, when given) into a RunConfig.

    Values in the ODE document (k0, k0d, scale, shift) apply unless the
    corresponding flag overrides them.
    """
    if not argv:
        raise ConfigError("no arguments; need --builtin NAME or --ode FILE (see --help)")
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.ode and ns.builtin:
        raise ConfigError("--ode and --builtin conflict; give exactly one")
    if not ns.ode and not ns.builtin:
        raise ConfigError("missing ODE: give --builtin NAME or --ode FILE")
    overrides = {}
    if ns.ode:
        try:
            doc = json.loads(Path(ns.ode).read_text())
        except FileNotFoundError:
            raise ConfigError(f"ODE file not found: {ns.ode}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"ODE file is not valid JSON: {exc}")
        _, overrides = parse_ode_document(doc)

    cfg = RunConfig(builtin=ns.builtin, ode_path=ns.ode)
    if ns.nu is not None:
        cfg.nu = ns.nu
    if ns.mu is not None:
        cfg.mu = ns.mu
    if ns.a is not None:
        cfg.a = ns.a
    elif cfg.builtin == "weber_scaled":
        cfg.a = Fraction(30)
    if ns.b is not None:
        cfg.b = ns.b
    elif "shift" in overrides:
        cfg.b = overrides["shift"]
    if ns.a is None and "scale" in overrides:
        cfg.a = overrides["scale"]
    cfg.k0 = ns.k0 if ns.k0 is not None else overrides.get("k0", 3)
    cfg.k0d = ns.k0d if ns.k0d is not None else overrides.get("k0d")
    if ns.n is not None:
        cfg.n = ns.n
    if cfg.n < 2:
        raise ConfigError("--n must be at least 2")
    if ns.scheme is not None:
        cfg.scheme = ns.scheme
    if ns.base is not None:
        if ns.base < 2:
            raise ConfigError("--base must be at least 2")
        cfg.base = ns.base
    if ns.c is not None:
        if ns.c < 1:
            raise ConfigError("--c must be at least 1")
        cfg.c = ns.c
    if ns.zeta is not None:
        if not 0 < ns.zeta < 1:
            raise ConfigError("--zeta must lie strictly between 0 and 1")
        cfg.zeta = ns.zeta
    if ns.mu_variant is not None:
        cfg.mu_variant = ns.mu_variant
    if ns.grid is not None:
        cfg.grid = _parse_grid(ns.grid)
    if ns.digits is not None:
        if ns.digits < 1:
            raise ConfigError("--digits must be at least 1")
        cfg.digits = ns.digits
    if ns.out is not None:
        cfg.out = ns.out
    if ns.dump_matrix:
        cfg.dump_matrix = True
    if ns.report is not None:
        cfg.report = ns.report
    return cfg


def _load_problem(cfg: RunConfig) -> OdeProblem:
    if cfg.builtin:
        problem = builtin_problem(
            cfg.builtin, nu=cfg.nu, mu=cfg.mu, a=cfg.a, k0=cfg.k0, k0d=cfg.k0d
        )
        if cfg.builtin == "weber_scaled":
            if cfg.b:
                problem = diffop.transform_coords(problem, Fraction(1), cfg.b)
            return problem
    else:
        doc = json.loads(Path(cfg.ode_path).read_text())
        build, _ = parse_ode_document(doc)
        problem = build(cfg.k0, cfg.k0d)
    if cfg.a != 1 or cfg.b != 0:
        problem = diffop.transform_coords(problem, cfg.a, cfg.b)
    return problem


def run(cfg: RunConfig, stream=None) -> int:
    """Execute the full pipeline; returns the exit status."""
    stream = stream or sys.stdout
    stage = "ingest"
    try:
        problem = _load_problem(cfg)
        stage = "regularize"
        problem = diffop.regularize_fuchsian(problem)
        if cfg.k0d is None:
            problem = replace(problem, k0d=problem.k0 - diffop.s0(problem))
        stage = "validate"
        diffop.validate_spaces(problem).raise_if_failed()
        N = cfg.n - 1
        stage = "assemble"
        matrix = assembly.build(problem, N)
        stage = "solve"
        head = kernel.head_solve(matrix)
        kb = kernel.extend(matrix, head, N)
        stage = "extract"
        profile = extraction.make_weights(
            N, problem.k0, scheme=cfg.scheme, base=cfg.base, mu_variant=cfg.mu_variant
        )
        outcome = extraction.extract_l2_detailed(kb, profile, c=cfg.c, zeta=cfg.zeta)
        stage = "report"
        _write_outputs(cfg, problem, matrix, kb, profile, outcome, stream)
        return 0 if outcome.candidates else 2
    except ValidationError as exc:
        print(f"[{stage}] validation failed: {exc}", file=sys.stderr)
        return 3
    except (assembly.PivotError, kernel.EmptyKernelError, extraction.ConfigurationError) as exc:
        print(f"[{stage}] {exc}", file=sys.stderr)
        return 3


def _sigma_strings(value: Fraction) -> dict:
    return {
        "exact": format_rat(value),
        "decimal": format_scientific(value, 6),
    }


def _report_data(cfg, problem, kb, profile, outcome) -> dict:
    data = {
        "problem": cfg.builtin or cfg.ode_path,
        "order": problem.M,
        "k0": problem.k0,
        "k0d": problem.k0d,
        "s0": diffop.s0(problem),
        "extra_degree": problem.extra_degree,
        "ell0": 2 * problem.M + problem.k0 - problem.k0d,
        "j0": max(problem.k0d, 0),
        "N_plus_1": kb.N + 1,
        "D": kb.D,
        "scheme": profile.scheme,
        "K": profile.K,
        "J": profile.J,
        "base": profile.base,
        "c": format_rat(cfg.c),
        "zeta": format_rat(cfg.zeta),
        "mu_variant": profile.mu_variant,
        "accepted": len(outcome.candidates),
        "certified_rounds": outcome.certified,
        "rejected_head_dominance": outcome.rejected_head_dominance,
        "candidates": [
            {"index": i + 1, "sigma": _sigma_strings(cand.sigma)}
            for i, cand in enumerate(outcome.candidates)
        ],
    }
    if outcome.sigma_min is not None:
        data["sigma_min"] = _sigma_strings(outcome.sigma_min)
    if outcome.sigma_second is not None:
        data["sigma_second"] = _sigma_strings(outcome.sigma_second)
        data["sigma_gap"] = _sigma_strings(outcome.sigma_gap)
    if outcome.sigma_stop is not None:
        data["sigma_stop"] = _sigma_strings(outcome.sigma_stop)
    return data


def _format_text_report(data: dict) -> str:
    lines = ["extraction report"]
    for key, value in data.items():
        if key == "candidates":
            for cand in value:
                lines.append(
                    f"  candidate {cand['index']}: sigma = {cand['sigma']['exact']}"
                    f" ~ {cand['sigma']['decimal']}"
                )
            continue
        if isinstance(value, dict):
            lines.append(f"{key}: {value['exact']} ~ {value['decimal']}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _write_outputs(cfg, problem, matrix, kb, profile, outcome, stream) -> None:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = _report_data(cfg, problem, kb, profile, outcome)
    if cfg.report == "json":
        report_text = json.dumps(data, indent=2, default=str) + "\n"
        (out_dir / "extraction_report.json").write_text(report_text)
    else:
        report_text = _format_text_report(data)
        (out_dir / "extraction_report.txt").write_text(report_text)
    stream.write(report_text)
    if cfg.dump_matrix:
        with open(out_dir / "matrix.txt", "w") as handle:
            for line in matrix.dump_lines():
                handle.write(line + "\n")
    xs = grid_points(cfg.grid)
    ratio_lines = []
    for i, cand in enumerate(outcome.candidates, start=1):
        sol = solution.SpectralSolution(
            k0=problem.k0, coeffs=cand.vector, meta={"sigma": cand.sigma}
        )
        try:
            sol = solution.normalize(sol)
        except solution.NormalizationDegenerateError:
            sol = solution.normalize_peak(sol)
        solution.export_csv(sol, xs, cfg.digits, out_dir / f"candidate_{i}.csv")
        entries = solution.ratio_report(sol, cfg.ratio_pairs)
        for entry in entries:
            if entry.error:
                ratio_lines.append(
                    f"candidate {i}: f{entry.numerator_index}/f{entry.denominator_index}: {entry.error}"
                )
            else:
                ratio_lines.append(
                    f"candidate {i}: f{entry.numerator_index}/f{entry.denominator_index} = "
                    f"{entry.value} ~ {entry.decimal(cfg.digits)}"
                )
        head_cut = min(profile.K, sol.N - 1)
        ratio_lines.append(
            f"candidate {i}: tail_mass(K) ~ "
            + format_scientific(solution.tail_mass(sol, head_cut), 6)
        )
        defect = solution.residual_rows(matrix, sol, profile.K)
        ratio_lines.append(
            f"candidate {i}: residual ~ " + format_scientific(defect, 6)
        )
    ratio_text = "\n".join(ratio_lines) + "\n" if ratio_lines else ""
    if ratio_text:
        (out_dir / "ratio_report.txt").write_text(ratio_text)
        stream.write(ratio_text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except diffop.InvalidOperatorError as exc:
        print(f"[ingest] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
