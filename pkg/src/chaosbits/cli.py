"""Command-line interface.

One executable, ``chaosbits``, with subcommands for bitstream
generation (gen), the statistical battery (test), correlation/spectrum
analysis (analyze), state-orbit cycle detection (cycle), the
phase-space distance (distance), image encryption (encrypt/decrypt) and
image histograms (histogram).

Exit codes: 0 success, 1 statistical failure (battery verdict FAIL, or
no cycle confirmed within budget), 2 usage error, 3 runtime error
(degenerate seed, exhausted transcript, I/O failure).

Every subcommand is deterministic given its flags; wall-clock seeding
happens only under --seed-from-time, which prints the resolved seed so
the run can be replayed.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from .analysis import (
    BudgetExceeded,
    autocorrelation,
    cross_correlation,
    detect_cycle,
    phase_distance,
    phase_distance_tail_bound,
    power_spectrum,
)
from .battery import report_to_csv, report_to_text, run_battery
from .cipher import (
    chi_square_uniformity,
    histogram,
    read_pgm,
    write_pgm,
    xor_cipher,
)
from .generator import (
    ChaoticBitGenerator,
    DegenerateSeedError,
    GeneratorConfig,
    SeedSpec,
    TranscriptDriver,
    TranscriptExhausted,
    bits_to_ascii,
    config_from_text,
    config_to_text,
    pack_bits,
    parse_ascii_bits,
    seed_from_time,
    transcript_from_text,
)

__all__ = ["SCHEMES", "SchemeSpec", "resolve_scheme", "main"]

# Named schemes: (n_cells, m_set).
SCHEMES: dict[str, tuple[int, tuple[int, ...]]] = {
    "scheme-1": (8, (1,)),
    "scheme-2": (8, (8,)),
    "scheme-3": (8, (1, 2, 3, 4, 5, 6, 7, 8)),
    "scheme-4": (5, (4, 5)),
    "scheme-5": (5, (9, 10)),
    "scheme-6": (5, (14, 15)),
}


@dataclass(frozen=True)
class SchemeSpec:
    """A named scheme resolved to a concrete generator configuration."""

    name: str
    config: GeneratorConfig


def resolve_scheme(name: str, seed: SeedSpec, emit_initial: bool = True) -> SchemeSpec:
    """Build the configuration of a named scheme around a seed."""
    if name not in SCHEMES:
        raise ValueError(f"unknown scheme {name!r}; known: {', '.join(sorted(SCHEMES))}")
    n_cells, m_set = SCHEMES[name]
    return SchemeSpec(name=name, config=GeneratorConfig(n_cells, m_set, seed, emit_initial))


def _time_seed() -> int:
    # Microsecond fractional part of epoch time, 6 decimal digits.
    # Values that map onto degenerate logistic seeds are re-read.
    for _ in range(100):
        t = (time.time_ns() // 1000) % 1_000_000
        try:
            seed_from_time(t if t > 0 else 1, 2)
        except DegenerateSeedError:
            time.sleep(2e-6)
            continue
        if t > 0:
            return t
        time.sleep(2e-6)
    raise DegenerateSeedError("could not derive a usable time seed; pass --seed explicitly")


def _add_generator_args(p: argparse.ArgumentParser, transcript_ok: bool = False) -> None:
    g = p.add_argument_group("generator")
    g.add_argument("--scheme", choices=sorted(SCHEMES), help="named (n_cells, m_set) scheme")
    g.add_argument("--n-cells", type=int, help="custom system size (with --m-set)")
    g.add_argument("--m-set", help="custom comma-separated gap alphabet (with --n-cells)")
    g.add_argument("--config", metavar="FILE", help="key=value config file, exclusive with the flags above")
    g.add_argument("--seed", type=int, metavar="T", help="time-derived seed value")
    g.add_argument("--x0", metavar="BITS", help="explicit initial cell vector, e.g. 10100")
    g.add_argument("--y0", type=float, help="explicit logistic seed in (0,1)")
    g.add_argument("--seed-from-time", action="store_true", help="seed from the clock and print the value")
    g.add_argument("--no-emit-initial", action="store_true", help="start output at the first driven block")
    if transcript_ok:
        g.add_argument(
            "--transcript",
            metavar="FILE",
            help="force explicit drivers from a file with lines m=... and s=...",
        )


def _resolve_config(args) -> tuple[GeneratorConfig, tuple | None]:
    transcript = None
    if getattr(args, "transcript", None):
        with open(args.transcript, "r", encoding="ascii") as fh:
            transcript = transcript_from_text(fh.read())

    shape_flags = args.scheme is not None or args.n_cells is not None or args.m_set is not None
    seed_flags = (
        args.seed is not None or args.x0 is not None or args.y0 is not None or args.seed_from_time
    )
    if args.config:
        if shape_flags or seed_flags or args.no_emit_initial:
            raise ValueError("--config replaces the other generator flags; do not combine them")
        with open(args.config, "r", encoding="ascii") as fh:
            return config_from_text(fh.read()), transcript

    if args.scheme is not None:
        if args.n_cells is not None or args.m_set is not None:
            raise ValueError("give either --scheme or --n-cells/--m-set, not both")
        n_cells, m_set = SCHEMES[args.scheme]
    elif args.n_cells is not None and args.m_set is not None:
        n_cells = args.n_cells
        try:
            m_set = tuple(int(v) for v in args.m_set.split(","))
        except ValueError:
            raise ValueError(f"bad --m-set {args.m_set!r}; expected comma-separated integers") from None
    else:
        raise ValueError("generator shape required: --scheme, --n-cells with --m-set, or --config")

    seed_forms = sum(
        (args.seed is not None, args.x0 is not None, bool(args.seed_from_time))
    )
    if args.seed is not None:
        if args.x0 is not None or args.y0 is not None or args.seed_from_time:
            raise ValueError("give exactly one seed form: --seed, --x0/--y0, or --seed-from-time")
        seed = SeedSpec.from_time(args.seed)
    elif args.seed_from_time:
        if seed_forms > 1 or args.y0 is not None:
            raise ValueError("give exactly one seed form: --seed, --x0/--y0, or --seed-from-time")
        t = _time_seed()
        print(f"resolved seed.t={t}", file=sys.stderr)
        seed = SeedSpec.from_time(t)
    elif args.x0 is not None:
        if any(c not in "01" for c in args.x0) or not args.x0:
            raise ValueError(f"bad --x0 {args.x0!r}; expected a bit string like 10100")
        y0 = args.y0
        if y0 is None:
            if transcript is None:
                raise ValueError("--x0 needs --y0 (or a forced --transcript, which ignores y0)")
            y0 = 0.1  # placeholder; a forced transcript never draws from the logistic driver
        seed = SeedSpec.explicit(tuple(int(c) for c in args.x0), y0)
    else:
        raise ValueError("seed required: --seed, --x0 with --y0, or --seed-from-time")

    config = GeneratorConfig(n_cells, m_set, seed, emit_initial=not args.no_emit_initial)
    return config, transcript


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def cmd_gen(args) -> int:
    config, transcript = _resolve_config(args)
    if args.count < 0:
        raise ValueError("--count must be non-negative")
    if args.wrap < 0:
        raise ValueError("--wrap must be non-negative")
    driver = None
    if transcript is not None:
        driver = TranscriptDriver(*transcript, cycle=args.cycle_transcript)
    sys.stderr.write(config_to_text(config))
    bits = ChaoticBitGenerator(config, driver=driver).bits(args.count)
    if args.format == "ascii":
        text = bits_to_ascii(bits, wrap=args.wrap)
        if text and not text.endswith("\n"):
            text += "\n"
        _write_text(args.out, text)
    else:
        data = pack_bits(bits)
        if args.out == "-":
            sys.stdout.buffer.write(data)
        else:
            with open(args.out, "wb") as fh:
                fh.write(data)
    return 0


def cmd_test(args) -> int:
    config, _ = _resolve_config(args)
    report = run_battery(
        config,
        args.sequences,
        args.length,
        relaxed=args.relaxed,
        block_len=args.block_len,
        serial_m=args.serial_m,
        apen_m=args.apen_m,
    )
    if args.csv:
        _write_text(args.csv, report_to_csv(report))
    sys.stdout.write(report_to_text(report))
    return 0 if report.passed else 1


def cmd_analyze(args) -> int:
    if args.max_lag < 1:
        raise ValueError("--max-lag must be at least 1")
    if args.infile:
        with open(args.infile, "r", encoding="ascii") as fh:
            bits = parse_ascii_bits(fh.read())
    else:
        config, _ = _resolve_config(args)
        bits = ChaoticBitGenerator(config).bits(args.count)
    n = len(bits)

    auto = autocorrelation(bits, args.max_lag)
    spec = power_spectrum(bits)
    bound = 4.0 / (n ** 0.5)
    tail = [v for v in auto.values[1:] if abs(v) > bound]
    print(f"length: {n}")
    print(f"autocorrelation: lag0={auto.values[0]:.6f}"
          + (" (degenerate input)" if auto.degenerate else ""))
    print(f"autocorrelation: {len(tail)} of {args.max_lag} lags exceed 4/sqrt(n)={bound:.6g}")
    rel = abs(spec.spectral_energy - spec.time_energy) / spec.time_energy
    print(f"spectrum: flatness={spec.flatness:.6g} parseval_rel_err={rel:.3g}")
    if args.acf_csv:
        _write_text(args.acf_csv, "lag,value\n" + "".join(
            f"{lag},{val!r}\n" for lag, val in zip(auto.lags, auto.values)))
    if args.spectrum_csv:
        _write_text(args.spectrum_csv, "bin,power\n" + "".join(
            f"{b},{p!r}\n" for b, p in zip(spec.bins, spec.power)))
    if args.cross_with:
        with open(args.cross_with, "r", encoding="ascii") as fh:
            other = parse_ascii_bits(fh.read())
        cross = cross_correlation(bits, other, args.max_lag)
        peak = max(abs(v) for v in cross.values)
        print(f"cross-correlation: max|r|={peak:.6g} over lags 0..{args.max_lag}"
              + (" (degenerate input)" if cross.degenerate else ""))
        if args.ccf_csv:
            _write_text(args.ccf_csv, "lag,value\n" + "".join(
                f"{lag},{val!r}\n" for lag, val in zip(cross.lags, cross.values)))
    return 0


def cmd_cycle(args) -> int:
    config, transcript = _resolve_config(args)
    if args.budget < 1:
        raise ValueError("--budget must be positive")
    result = detect_cycle(config, transcript=transcript, budget=args.budget)
    if isinstance(result, BudgetExceeded):
        print(f"no cycle confirmed within budget={result.budget} "
              f"(state steps executed: {result.steps_executed})")
        return 1
    print(f"transient_length={result.transient_length}")
    print(f"cycle_period={result.cycle_period}")
    print(f"orbit_length={result.orbit_length}")
    return 0


def _parse_bit_vector(text: str, flag: str) -> tuple[int, ...]:
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"bad {flag} {text!r}; expected a bit string like 10100")
    return tuple(int(c) for c in text)


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"bad {flag} {text!r}; expected comma-separated integers") from None


def cmd_distance(args) -> int:
    e_a = _parse_bit_vector(args.e_a, "--e-a")
    e_b = _parse_bit_vector(args.e_b, "--e-b")
    s_a = _parse_int_list(args.s_a, "--s-a")
    s_b = _parse_int_list(args.s_b, "--s-b")
    d = phase_distance(s_a, e_a, s_b, e_b, prefix_k=args.prefix_k)
    d_e = sum(1 for u, v in zip(e_a, e_b) if u != v)
    d_s = phase_distance(s_a, e_a, s_b, e_a, prefix_k=args.prefix_k)
    k_eff = min(len(s_a), len(s_b), args.prefix_k)
    print(f"d_e={d_e}")
    print(f"d_s={d_s!r}")
    print(f"d={d!r}")
    print(f"tail_bound={phase_distance_tail_bound(len(e_a), k_eff)!r}")
    return 0


def cmd_crypt(args) -> int:
    config, _ = _resolve_config(args)
    image = read_pgm(args.infile)
    write_pgm(xor_cipher(image, config), args.out)
    return 0


def cmd_histogram(args) -> int:
    image = read_pgm(args.infile)
    hist = histogram(image)
    chi2 = chi_square_uniformity(hist)
    print(f"pixels={hist.total}")
    print(f"chi_square_256={chi2!r}")
    if args.csv:
        _write_text(args.csv, "value,count\n" + "".join(
            f"{v},{c}\n" for v, c in enumerate(hist.bins)))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaosbits",
        description="Chaotic-iterations bit generator, statistical battery, orbit analysis, image cipher.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a bitstream")
    _add_generator_args(p, transcript_ok=True)
    p.add_argument("--cycle-transcript", action="store_true",
                   help="repeat a forced transcript instead of exhausting it")
    p.add_argument("--count", type=int, required=True, help="number of bits")
    p.add_argument("--format", choices=("ascii", "raw"), default="ascii")
    p.add_argument("--wrap", type=int, default=0, help="wrap ascii output at this many columns (0 = off)")
    p.add_argument("--out", default="-", help="output file ('-' = stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("test", help="run the statistical battery")
    _add_generator_args(p)
    p.add_argument("--sequences", type=int, default=10, help="number of sequences")
    p.add_argument("--length", type=int, default=100000, help="bits per sequence")
    p.add_argument("--relaxed", action="store_true",
                   help="lift recommended minimum lengths (desk-scale runs)")
    p.add_argument("--block-len", type=int, default=20000, help="block-frequency block length")
    p.add_argument("--serial-m", type=int, default=10, help="serial pattern length")
    p.add_argument("--apen-m", type=int, default=10, help="approximate-entropy pattern length")
    p.add_argument("--csv", help="also write the report as CSV to this file")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("analyze", help="autocorrelation, cross-correlation and power spectrum")
    _add_generator_args(p)
    p.add_argument("--in", dest="infile", help="read ascii bits from this file instead of generating")
    p.add_argument("--count", type=int, default=100000, help="bits to generate when not reading a file")
    p.add_argument("--max-lag", type=int, default=1000)
    p.add_argument("--acf-csv", help="write autocorrelation CSV (lag,value)")
    p.add_argument("--spectrum-csv", help="write power spectrum CSV (bin,power)")
    p.add_argument("--cross-with", help="second ascii bit file for cross-correlation")
    p.add_argument("--ccf-csv", help="write cross-correlation CSV (lag,value)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("cycle", help="detect the period of the state orbit")
    _add_generator_args(p, transcript_ok=True)
    p.add_argument("--budget", type=int, default=10 ** 8, help="state-step budget")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("distance", help="phase-space distance between two (strategy, cells) points")
    p.add_argument("--e-a", required=True, help="first cell vector as a bit string")
    p.add_argument("--e-b", required=True, help="second cell vector as a bit string")
    p.add_argument("--s-a", required=True, help="first strategy prefix, comma-separated")
    p.add_argument("--s-b", required=True, help="second strategy prefix, comma-separated")
    p.add_argument("--prefix-k", type=int, default=30, help="strategy terms compared")
    p.set_defaults(func=cmd_distance)

    for name, help_text in (("encrypt", "one-time-pad a PGM image"),
                            ("decrypt", "alias of encrypt (the cipher is an involution)")):
        p = sub.add_parser(name, help=help_text)
        _add_generator_args(p)
        p.add_argument("--in", dest="infile", required=True, help="input PGM (P5)")
        p.add_argument("--out", required=True, help="output PGM (P5)")
        p.set_defaults(func=cmd_crypt)

    p = sub.add_parser("histogram", help="256-bin histogram and uniformity chi-square of a PGM")
    p.add_argument("--in", dest="infile", required=True, help="input PGM (P5)")
    p.add_argument("--csv", help="write histogram CSV (value,count)")
    p.set_defaults(func=cmd_histogram)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateSeedError, TranscriptExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
