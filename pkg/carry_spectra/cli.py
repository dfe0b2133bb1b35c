"""CLI for exact carry-chain spectra."""

import sys
import json
import logging
import argparse
from fractions import Fraction
from math import factorial, lcm
from pathlib import Path

from . import BinaryChain, BudgetExceeded, MarkovCarrySystem, RunConfig, IdentityViolation
from .cascade import (DEFAULT_BRUTE_FORCE_BUDGET, avoidance_brute_force, avoidance_sequence,
                      chain_brute_force, chain_spec, dispersion_regime, doubling_chain, restrict,
                      threshold_classify)
from .classify import (classify_general, mult_shadow_search, moduli_space, shadow_equivalent_binary,
                       similarity_witness)
from .eigensys import build_eigensystem
from .exactnum import RatMatrix, characteristic_polynomial, eulerian_row, format_polynomial
from .holte import (build_holte, check_centrosymmetry, is_oscillatory, is_totally_nonnegative,
                    reversibility_defect, stationary_distribution)
from .report import (MODULI_HEADERS, VERIFY_HEADERS, format_bfile, format_csv, format_eigensystem,
                     format_holte, format_json, format_moduli, format_sequence, format_spectrum,
                     format_threshold, format_verify, jsonable, moduli_rows, threshold_data,
                     verify_rows)
from .verify import DEFAULT_GRID_BASES, DEFAULT_GRID_KMAX, run_checks

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse a comma-separated integer list."""
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}") from None


def parse_chain(text: str) -> BinaryChain:
    """Parse N,g,t,r."""
    values = parse_int_list(text)
    if len(values) != 4:
        raise ValueError(f"a chain is N,g,t,r; got {text!r}")
    N, g, t, r = values
    return BinaryChain(N=N, g=g, t=t, r=r)


def parse_matrix(text: str) -> RatMatrix:
    """A JSON array of rows; entries are integers or "p/q" strings. A path to such a file also works."""
    try:
        rows = json.loads(text)
    except json.JSONDecodeError:
        try:
            raw = Path(text).read_text()
        except OSError:
            raise ValueError(f"matrix is neither JSON rows nor a readable file: {text[:60]!r}") from None
        try:
            rows = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ValueError(f"{text} is not valid JSON: {e}") from None
    try:
        return RatMatrix.from_rows([[Fraction(e) for e in row] for row in rows])
    except TypeError:
        raise ValueError("matrix must be a JSON array of rows") from None


def build_config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        k=getattr(args, "k", None),
        base=getattr(args, "base", None),
        forbid=parse_int_list(args.forbid) if getattr(args, "forbid", None) else (),
        length=getattr(args, "len", None),
        grid_kmax=getattr(args, "grid_kmax", DEFAULT_GRID_KMAX),
        grid_bases=parse_int_list(args.grid_bases) if getattr(args, "grid_bases", None) else DEFAULT_GRID_BASES,
        budget=getattr(args, "budget", DEFAULT_BRUTE_FORCE_BUDGET),
        fmt=getattr(args, "format", "text"),
        out=getattr(args, "out", None),
    )


def emit(text: str, cfg: RunConfig) -> None:
    """Write to --out, or stdout."""
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def progress(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _require_format(cfg: RunConfig, allowed: tuple[str, ...]) -> None:
    if cfg.fmt not in allowed:
        raise ValueError(f"{cfg.command} supports --format {', '.join(allowed)}; got {cfg.fmt}")


def cmd_spectrum(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json"))
    k, N = cfg.k, cfg.base
    sys_ = build_holte(k, N)
    pi = stationary_distribution(k)
    eigenvalues = [Fraction(1, N ** j) for j in range(k)]
    pi_scaled = list(eulerian_row(k))
    if [p * factorial(k) for p in pi] != pi_scaled or sys_.prob_matrix.apply(pi) != pi:
        raise IdentityViolation(f"stationary distribution check failed for k={k}, N={N}")
    if cfg.fmt == "json":
        data = {"pi_scaled": pi_scaled, "pi": pi, "eigenvalues": eigenvalues}
        emit(format_json(k, N, data, ["eulerian-stationary", "holte-spectrum"]), cfg)
    else:
        emit(format_spectrum(k, N, pi_scaled, eigenvalues), cfg)


def cmd_eigensystem(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json"))
    k = cfg.k
    progress(args, f"Building eigensystem for k={k}...")
    system = build_eigensystem(k, cfg.base)
    scale = factorial(k)
    if cfg.fmt == "json":
        rows = [{"j": j, "u_scaled": [scale * x for x in system.left[j]], "v": system.right[j],
                 "Q": system.quotients[j], "Q_text": format_polynomial(system.quotients[j]),
                 "c": system.constants[j]} for j in range(k)]
        data = {"scale": scale, "rows": rows}
        if system.eigenvalues:
            data["eigenvalues"] = system.eigenvalues
        emit(format_json(k, cfg.base, data, ["stirling-eulerian", "binomial-palindromic"]), cfg)
    else:
        emit(format_eigensystem(system, scale), cfg)


def cmd_holte(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json", "csv"))
    k, N = cfg.k, cfg.base
    sys_ = build_holte(k, N)
    facts = {
        "centrosymmetric": check_centrosymmetry(sys_),
        "totally nonnegative": is_totally_nonnegative(sys_.count_matrix),
        "oscillatory": is_oscillatory(sys_.count_matrix),
        "reversibility defects": [f"({c},{cp}): {f[0]} vs {f[1]}"
                                  for c, cp, f in reversibility_defect(sys_)],
    }
    if cfg.fmt == "json":
        data = {"count_matrix": sys_.count_matrix, **facts}
        emit(format_json(k, N, data, ["holte-entry", "centrosymmetry", "oscillatory"]), cfg)
    elif cfg.fmt == "csv":
        rows = [{"row": i, **{f"c{j}": sys_.count_matrix[i, j] for j in range(k)}} for i in range(k)]
        emit(format_csv(rows, ["row"] + [f"c{j}" for j in range(k)]), cfg)
    else:
        emit(format_holte(k, N, sys_.count_matrix, facts), cfg)


def _cascade_target(args, cfg: RunConfig):
    """A BinaryChain from --chain/--doubling, else a Holte restriction (default F = {k-1})."""
    if getattr(args, "chain", None):
        return parse_chain(args.chain)
    if getattr(args, "doubling", None):
        return doubling_chain(args.doubling)
    if cfg.k is None or cfg.base is None:
        raise ValueError("give --k and --base, or --chain / --doubling")
    forbid = cfg.forbid or (cfg.k - 1,)
    return restrict(build_holte(cfg.k, cfg.base), forbid)


def cmd_cascade(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json", "csv", "bfile"))
    target = _cascade_target(args, cfg)
    L_max = cfg.length if cfg.length is not None else 7
    if L_max < 0:
        raise ValueError(f"--len must be >= 0, got {L_max}")
    seq = avoidance_sequence(target, L_max)
    if args.oracle:
        progress(args, "Cross-checking against direct enumeration...")
        for L in range(L_max + 1):
            if isinstance(target, BinaryChain):
                brute = chain_brute_force(target, L, budget=cfg.budget)
            else:
                brute = avoidance_brute_force(cfg.k, cfg.base, target.forbidden, L, budget=cfg.budget)
            if brute != seq[L]:
                raise IdentityViolation(f"a({L}) = {seq[L]} but enumeration gives {brute}")
    if cfg.fmt == "bfile":
        emit(format_bfile(seq), cfg)
    elif cfg.fmt == "csv":
        emit(format_csv([{"L": L, "a": a} for L, a in enumerate(seq)], ["L", "a"]), cfg)
    elif cfg.fmt == "json":
        data = {"sequence": seq}
        if isinstance(target, BinaryChain):
            data["chain"] = {"N": target.N, "g": target.g, "t": target.t, "r": target.r}
            if target.g + target.r > 0:
                label, index = dispersion_regime(target)
                data["dispersion"] = {"index": index, "regime": label}
            emit(format_json(2, target.N, data, ["transfer-matrix", "chebyshev-representation"]), cfg)
        else:
            data["forbidden"] = sorted(target.forbidden)
            emit(format_json(cfg.k, cfg.base, data, ["transfer-matrix", "cascade-free-sequence"]), cfg)
    else:
        emit(format_sequence(seq), cfg)


def cmd_threshold(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json"))
    target = _cascade_target(args, cfg)
    verdict = threshold_classify(chain_spec(target) if isinstance(target, BinaryChain) else target)
    if cfg.fmt == "json":
        k = 2 if isinstance(target, BinaryChain) else cfg.k
        N = target.N if isinstance(target, BinaryChain) else cfg.base
        emit(format_json(k, N, threshold_data(verdict), ["chebyshev-threshold"]), cfg)
    else:
        emit(format_threshold(verdict), cfg)


def cmd_moduli(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json", "csv"))
    points = moduli_space(args.nmax, args.dmax)
    if cfg.fmt == "csv":
        emit(format_csv(moduli_rows(points), MODULI_HEADERS), cfg)
    elif cfg.fmt == "json":
        emit(format_json(None, None, moduli_rows(points), ["moduli-space"]), cfg)
    else:
        emit(format_moduli(points), cfg)


def _alphabet(m: RatMatrix) -> int:
    """Common denominator of the transition probabilities."""
    return lcm(*(e.denominator for e in m.entries))


def cmd_classify(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json"))
    if args.chain_a or args.chain_b:
        if not (args.chain_a and args.chain_b):
            raise ValueError("give both --chain-a and --chain-b")
        a, b = parse_chain(args.chain_a), parse_chain(args.chain_b)
        data = {"invariant_a": [a.N, a.det], "invariant_b": [b.N, b.det],
                "equivalent": shadow_equivalent_binary(a, b)}
    elif args.a and args.b:
        ma, mb = parse_matrix(args.a), parse_matrix(args.b)
        sa = MarkovCarrySystem(k=ma.rows, N=_alphabet(ma), matrix=ma)
        sb = MarkovCarrySystem(k=mb.rows, N=_alphabet(mb), matrix=mb)
        data = {"chi_a": characteristic_polynomial(ma), "chi_b": characteristic_polynomial(mb),
                "equivalent": classify_general(sa, sb)}
        if data["equivalent"]:
            data["witness"] = similarity_witness(sa, sb)
    else:
        raise ValueError("give --a and --b matrices, or --chain-a and --chain-b")
    if cfg.fmt == "json":
        emit(format_json(None, None, data, ["stochastic-classification"]), cfg)
    else:
        lines = []
        for key, value in data.items():
            if key.startswith("chi"):
                lines.append(f"  {key}: {format_polynomial(value, 'lambda')}")
            else:
                lines.append(f"  {key}: {json.dumps(jsonable(value))}")
        emit("\n".join(lines), cfg)


def cmd_mult_shadow(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json"))
    witnesses = mult_shadow_search(cfg.base, cfg.length)
    if cfg.fmt == "json":
        data = {"L": cfg.length, "witnesses": [
            {"h": [list(v) for v in h], "g": [[a, b, out] for (a, b), out in sorted(g.items())]}
            for h, g in witnesses]}
        emit(format_json(None, cfg.base, data, ["multiplicative-shadow"]), cfg)
    else:
        emit(f"{len(witnesses)} consistent encodings for N={cfg.base}, L={cfg.length}", cfg)


def cmd_verify(args):
    cfg = build_config(args)
    _require_format(cfg, ("text", "json", "csv"))
    progress(args, f"Running identity suite for k <= {cfg.grid_kmax}, N in {list(cfg.grid_bases)}...")
    report = run_checks(cfg.grid_kmax, cfg.grid_bases, budget=cfg.budget,
                        workers=args.workers, corrupt_stirling=args.corrupt_stirling)
    if cfg.fmt == "json":
        data = {"ok": report.ok, "checks": verify_rows(report)}
        anchors = sorted({c.anchor for c in report.checks})
        emit(format_json(cfg.grid_kmax, None, data, anchors), cfg)
    elif cfg.fmt == "csv":
        emit(format_csv(verify_rows(report), VERIFY_HEADERS), cfg)
    else:
        emit(format_verify(report), cfg)
    if not report.ok:
        progress(args, f"{len(report.failed)} check(s) failed")
        sys.exit(EXIT_CHECK_FAILED)


def main(argv: list[str] | None = None):
    parser = argparse.ArgumentParser(
        prog="carry-spectra",
        description="Exact spectra, eigenvectors and cascade counts of carry-propagation chains",
    )
    parser.add_argument("--quiet", "-q", action="store_true", help="Suppress progress output")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    # Shared arguments for output
    def add_output_args(p, formats: str):
        p.add_argument("--format", default="text", help=f"Output format: {formats} (default: text)")
        p.add_argument("--out", default=None, help="Write output to this file instead of stdout")

    def add_kn_args(p, base_required: bool = True):
        p.add_argument("--k", type=int, required=True, help="Number of summands (>= 2)")
        p.add_argument("--base", type=int, required=base_required, default=None, help="Base N (>= 2)")

    # spectrum
    spectrum_p = sub.add_parser("spectrum", help="Stationary distribution and eigenvalues")
    add_kn_args(spectrum_p)
    add_output_args(spectrum_p, "text, json")

    # eigensystem
    eigen_p = sub.add_parser("eigensystem", help="Biorthogonal eigenvector system with Q_j")
    add_kn_args(eigen_p, base_required=False)
    add_output_args(eigen_p, "text, json")

    # holte
    holte_p = sub.add_parser("holte", help="Count matrix and its structural checks")
    add_kn_args(holte_p)
    add_output_args(holte_p, "text, json, csv")

    # cascade, sequence
    def add_target_args(p):
        p.add_argument("--k", type=int, default=None, help="Number of summands")
        p.add_argument("--base", type=int, default=None, help="Base N")
        p.add_argument("--forbid", default=None,
                       help="Comma-separated forbidden carry states (default: k-1)")
        p.add_argument("--chain", default=None, help="Binary GEN/PROP/KILL chain as N,g,t,r")
        p.add_argument("--doubling", type=int, default=None, help="Base-N doubling chain (odd N)")

    for name in ("cascade", "sequence"):
        cascade_p = sub.add_parser(name, help="Cascade-free counts a(0..L)")
        add_target_args(cascade_p)
        cascade_p.add_argument("--len", type=int, default=7, help="Largest L (default: 7)")
        cascade_p.add_argument("--oracle", action="store_true",
                               help="Cross-check every term by direct enumeration")
        cascade_p.add_argument("--budget", type=int, default=DEFAULT_BRUTE_FORCE_BUDGET,
                               help=f"Enumeration cap for --oracle (default: {DEFAULT_BRUTE_FORCE_BUDGET})")
        add_output_args(cascade_p, "text, json, csv, bfile")

    # threshold
    threshold_p = sub.add_parser("threshold", help="Chebyshev threshold verdict with certificates")
    add_target_args(threshold_p)
    add_output_args(threshold_p, "text, json")

    # moduli
    moduli_p = sub.add_parser("moduli", help="Moduli grid of achievable (N, d) pairs")
    moduli_p.add_argument("--nmax", type=int, default=12, help="Largest N (default: 12)")
    moduli_p.add_argument("--dmax", type=int, default=21, help="Largest d (default: 21)")
    add_output_args(moduli_p, "text, json, csv")

    # classify
    classify_p = sub.add_parser("classify", help="Shadow equivalence of two chains")
    classify_p.add_argument("--a", default=None, help="First matrix as JSON rows (or a file)")
    classify_p.add_argument("--b", default=None, help="Second matrix as JSON rows (or a file)")
    classify_p.add_argument("--chain-a", default=None, help="First binary chain as N,g,t,r")
    classify_p.add_argument("--chain-b", default=None, help="Second binary chain as N,g,t,r")
    add_output_args(classify_p, "text, json")

    # mult-shadow
    mult_p = sub.add_parser("mult-shadow", help="Exhaustive multiplicative encoding search")
    mult_p.add_argument("--base", type=int, required=True, help="Digit alphabet size N")
    mult_p.add_argument("--len", type=int, required=True, help="Number of digits L (N^L <= 8)")
    add_output_args(mult_p, "text, json")

    # verify
    verify_p = sub.add_parser("verify", help="Run the full identity suite over a (k, N) grid")
    verify_p.add_argument("--grid-kmax", type=int, default=DEFAULT_GRID_KMAX,
                          help=f"Largest k in the grid (default: {DEFAULT_GRID_KMAX})")
    verify_p.add_argument("--grid-bases", default=",".join(map(str, DEFAULT_GRID_BASES)),
                          help="Comma-separated bases (default: 2,3)")
    verify_p.add_argument("--budget", type=int, default=DEFAULT_BRUTE_FORCE_BUDGET,
                          help=f"Enumeration cap for oracle checks (default: {DEFAULT_BRUTE_FORCE_BUDGET})")
    verify_p.add_argument("--workers", type=int, default=1, help="Worker threads (default: 1)")
    verify_p.add_argument("--corrupt-stirling", action="store_true", help=argparse.SUPPRESS)
    add_output_args(verify_p, "text, json, csv")

    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    commands = {
        "spectrum": cmd_spectrum,
        "eigensystem": cmd_eigensystem,
        "holte": cmd_holte,
        "cascade": cmd_cascade,
        "sequence": cmd_cascade,
        "threshold": cmd_threshold,
        "moduli": cmd_moduli,
        "classify": cmd_classify,
        "mult-shadow": cmd_mult_shadow,
        "verify": cmd_verify,
    }
    try:
        commands[args.command](args)
    except BudgetExceeded as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_BUDGET)
    except IdentityViolation as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CHECK_FAILED)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
