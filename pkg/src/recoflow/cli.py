"""Command-line verification suites.

    recoflow integrate|crn-check|gradient-check|partition-sim --config PATH
             [--seed N] [--paths N] [--out DIR] [--tol-NAME VALUE ...]

Exit codes: 0 all checks pass, 2 a mathematical invariant failed, 64 the
config is invalid (the message names the field), 65 a resource bound was hit.
Every output file records the seed and the package version, and contains no
timestamps, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import grad_free_energy, random_distribution, recombinator_product, seeded_rng
from .dynamics import (
    RecombinationRates,
    absorbing_partition,
    integrate,
    integrate_simplex,
    lyapunov_violation,
    marginal_drift,
    monitor_columns,
    reco_rhs,
    step_count,
)
from .errors import ConfigError, DegenerateInputError, IntegrationError, RecoflowError, ResourceError
from .gradient import onsager_matrix, psd_check, three_locus_reference, two_locus_reference
from .networks import (
    CoefficientSystem,
    block_count_change,
    build_partition_network,
    build_type_network,
    mass_action_rhs,
    network_to_json,
    pair_reactions,
    partition_mass_action_rhs,
    product_identity_check,
)
from .partitioning import (
    MAX_GENERATOR_SITES,
    build_generator,
    check_generator,
    eigen_multiplicities,
    integrate_master,
    jordan_example,
    mc_dual_estimate,
    monotone_gradient_matrix,
    occupancy,
    recombinator_table,
    simulate_paths,
)
from .partitions import MAX_SITES, coarsest, enumerate_partitions, is_finer, parse_partition, partition_index
from .typespace import TypeSpace

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_RESOURCE = 0, 2, 64, 65
# tuple visits allowed for the brute-force product identity in crn-check
PRODUCT_WORK_BOUND = 10**6

# name -> (default, meaning); the single source for --help, the README and --tol-* flags
TOLERANCES = {
    "lyapunov": (1e-12, "largest allowed increase of sum c log c between samples"),
    "marginal": (1e-10, "drift of one-site marginals along a trajectory"),
    "crn": (1e-10, "reaction-network RHS and product-identity deviations"),
    "gradient": (1e-10, "C(c) grad F(c) against the mass-action RHS"),
    "symmetry": (1e-12, "asymmetry of C(c)"),
    "psd": (1e-9, "negative slack for quadratic forms and Jacobi eigenvalues"),
    "fixture": (1e-9, "three-locus reference matrix RHS against the recombination RHS"),
    "monotone": (1e-12, "K(p) grad Psi against Q^T p"),
    "consistency": (1e-7, "direct, master-equation and coefficient reconstructions"),
    "sigma": (4.0, "Monte Carlo deviation in standard errors"),
}

CHECK_TIMES = (0.5, 1.0, 2.0)


@dataclass
class RunConfig:
    n: int
    alphabet_sizes: tuple
    rates: RecombinationRates
    initial_distribution: np.ndarray
    t_end: float = 1.0
    dt: float = 1e-3
    sample_every: int = 1
    seed: int = 0
    output_dir: str = "out"
    n_paths: int = 10000
    start_partition: object = None
    points: int = 100
    tolerances: dict = field(default_factory=lambda: {k: v[0] for k, v in TOLERANCES.items()})

    @property
    def space(self) -> TypeSpace:
        return TypeSpace(tuple(self.alphabet_sizes))


def _field(name, fn, *args):
    """Run a parser step and re-raise any failure as a ConfigError on ``name``."""
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (RecoflowError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{name}: {exc}", field=name) from exc


def _positive_int(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{name}: expected an integer >= {minimum}, got {value!r}", field=name)
    return value


def _positive_float(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"{name}: expected a positive number, got {value!r}", field=name)
    return float(value)


def _parse_rates(n, raw):
    if isinstance(raw, str) and raw.startswith("random:"):
        return RecombinationRates.random(n, int(raw.split(":", 1)[1]))
    if not isinstance(raw, dict):
        raise ValueError("expected an object mapping partition strings to rates, or 'random:<seed>'")
    return RecombinationRates(n, raw)


def _parse_initial(space, raw):
    if isinstance(raw, list):
        v = np.array(raw, dtype=float)
        if v.shape != (space.size,) or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
            raise ValueError(f"expected {space.size} nonnegative weights summing to 1")
        return v
    if raw == "uniform":
        return np.full(space.size, 1.0 / space.size)
    if isinstance(raw, str) and raw.startswith("dirac:"):
        v = np.zeros(space.size)
        v[space.encode(space.parse_label(raw.split(":", 1)[1]))] = 1.0
        return v
    if isinstance(raw, str) and raw.startswith("random:"):
        return random_distribution(space.size, int(raw.split(":", 1)[1]))
    raise ValueError(f"unrecognised initial distribution {raw!r}")


def parse_config(raw: dict) -> RunConfig:
    """Validate a decoded JSON config; every failure names the offending field."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", field="<root>")
    known = {"n", "alphabet_sizes", "rates", "initial_distribution", "t_end", "dt", "sample_every",
             "seed", "output_dir", "n_paths", "start_partition", "points"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown field", field=key)
    if "n" not in raw:
        raise ConfigError("n: missing", field="n")
    n = _positive_int("n", raw["n"])
    if n > MAX_SITES:
        raise ConfigError(f"n: at most {MAX_SITES} sites are supported", field="n")
    sizes = raw.get("alphabet_sizes", [2] * n)
    if not isinstance(sizes, list) or len(sizes) != n:
        raise ConfigError(f"alphabet_sizes: expected a list of {n} integers", field="alphabet_sizes")
    for s in sizes:
        _positive_int("alphabet_sizes", s)
    space = _field("alphabet_sizes", TypeSpace, tuple(sizes))
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: expected a nonnegative integer, got {seed!r}", field="seed")
    rates = _field("rates", _parse_rates, n, raw.get("rates", {}))
    initial = _field("initial_distribution", _parse_initial, space, raw.get("initial_distribution", "uniform"))
    t_end = _positive_float("t_end", raw.get("t_end", 1.0))
    dt = _positive_float("dt", raw.get("dt", 1e-3))
    _field("t_end", step_count, t_end, dt)
    start = raw.get("start_partition")
    if start is not None:
        start = _field("start_partition", parse_partition, start, n)
    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir: expected a non-empty path", field="output_dir")
    return RunConfig(
        n=n,
        alphabet_sizes=tuple(sizes),
        rates=rates,
        initial_distribution=initial,
        t_end=t_end,
        dt=dt,
        sample_every=_positive_int("sample_every", raw.get("sample_every", 1)),
        seed=seed,
        output_dir=output_dir,
        n_paths=_positive_int("n_paths", raw.get("n_paths", 10000)),
        start_partition=start,
        points=_positive_int("points", raw.get("points", 100)),
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}", field="config") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}", field="config") from exc
    return parse_config(raw)


# output helpers ---------------------------------------------------------


def _meta(cfg):
    return {"seed": cfg.seed, "version": __version__}


def _num(x) -> str:
    return format(float(x), ".17g")


def _plain(obj):
    """Numpy values to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, cfg, header, rows, row_labels=None):
    lines = [f"# recoflow {__version__} seed={cfg.seed}"]
    lines.append(",".join(([""] if row_labels is not None else []) + list(header)))
    for i, row in enumerate(rows):
        cells = [_num(x) for x in row]
        if row_labels is not None:
            cells.insert(0, row_labels[i])
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _outdir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _max_abs(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x))) if x.size else 0.0


# commands ---------------------------------------------------------------


def cmd_integrate(cfg: RunConfig) -> int:
    space, tol = cfg.space, cfg.tolerances
    try:
        traj = integrate(space, cfg.initial_distribution, cfg.rates, cfg.t_end, cfg.dt, cfg.sample_every)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    try:
        sigma = absorbing_partition(cfg.rates)
        predicted = recombinator_product(space, cfg.initial_distribution, sigma)
    except DegenerateInputError:
        sigma, predicted = None, cfg.initial_distribution
    out = _outdir(cfg)
    cols = monitor_columns(space)
    header = ["t"] + [space.label(x) for x in space.types] + cols
    rows = np.column_stack([traj.times, traj.states] + [traj.monitors[c] for c in cols])
    write_csv(out / "trajectory.csv", cfg, header, rows)
    increase = lyapunov_violation(traj)
    drift = marginal_drift(traj)
    summary = {
        **_meta(cfg),
        "final_state": traj.final,
        "predicted_equilibrium": predicted,
        "absorbing_partition": sigma.label if sigma else None,
        "final_distance_to_equilibrium": _max_abs(traj.final - predicted),
        "max_marginal_drift": drift,
        "max_lyapunov_increase": increase,
        "lyapunov_monotone": increase <= tol["lyapunov"],
        "max_renormalization": traj.max_correction,
        "steps": step_count(cfg.t_end, cfg.dt),
    }
    summary["passed"] = summary["lyapunov_monotone"] and drift <= tol["marginal"]
    write_json(out / "summary.json", summary)
    return EXIT_OK if summary["passed"] else EXIT_INVARIANT


def _points(size, cfg, stream, count):
    return [random_distribution(size, cfg.seed, stream, k) for k in range(count)]


def cmd_crn_check(cfg: RunConfig) -> int:
    space, tol = cfg.space, cfg.tolerances
    parts = enumerate_partitions(cfg.n)
    # the pair (finest, finest) alone costs |parts|^n * n; refuse before listing pairs
    if len(parts) ** cfg.n * cfg.n > PRODUCT_WORK_BOUND:
        raise ResourceError(f"product identity over {len(parts)} partitions exceeds the bound {PRODUCT_WORK_BOUND}")
    pairs = [(a, b) for b in parts for a in parts if is_finer(a, b)]
    work = sum(len(parts) ** len(b) * len(b) for _, b in pairs)
    if work > PRODUCT_WORK_BOUND:
        raise ResourceError(f"product identity needs {work} tuple visits per vector, bound {PRODUCT_WORK_BOUND}")
    vectors = min(cfg.points, 20, PRODUCT_WORK_BOUND // work)
    tnet = build_type_network(space, cfg.rates)
    pnet = build_partition_network(cfg.n, cfg.rates)
    pairing = pair_reactions(tnet)
    type_dev = max(
        (_max_abs(mass_action_rhs(tnet, c) - reco_rhs(space, c, cfg.rates)) for c in _points(space.size, cfg, 3, cfg.points)),
        default=0.0,
    )
    coeff = CoefficientSystem(cfg.n, cfg.rates)
    part_dev = max(
        (_max_abs(partition_mass_action_rhs(pnet, a) - coeff(a)) for a in _points(len(parts), cfg, 4, cfg.points)),
        default=0.0,
    )
    identity_dev = 0.0
    for a in _points(len(parts), cfg, 5, vectors):
        for pa, pb in pairs:
            lhs, rhs = product_identity_check(pa, pb, a)
            identity_dev = max(identity_dev, abs(lhs - rhs))
    changes = [block_count_change(pnet, r) for r in pnet.reactions if not r.void]
    report = {
        **_meta(cfg),
        "type_level_max_deviation": type_dev,
        "partition_level_max_deviation": part_dev,
        "product_identity_max_deviation": identity_dev,
        "product_identity_pairs": len(pairs),
        "product_identity_vectors": vectors,
        "pairing": pairing.stats(tnet),
        "type_reactions": len(tnet.reactions),
        "partition_reactions": len(pnet.reactions),
        "block_count_increases": sum(1 for d in changes if d > 0),
        "block_count_decreases": sum(1 for d in changes if d < 0),
    }
    report["passed"] = (
        max(type_dev, part_dev, identity_dev) <= tol["crn"]
        and report["pairing"]["unpaired_nonvoid"] == 0
        and report["block_count_decreases"] == 0
        and (report["block_count_increases"] > 0 or not changes)
    )
    out = _outdir(cfg)
    write_json(out / "crn_report.json", report)
    write_json(out / "type_network.json", {**_meta(cfg), "reactions": network_to_json(tnet)})
    write_json(out / "partition_network.json", {**_meta(cfg), "reactions": network_to_json(pnet)})
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


def _fixture_rates(cfg):
    """Rates for the three-locus fixture: the config's when it fits, seeded otherwise."""
    names = ["1|2,3", "1,3|2", "1,2|3"]
    if cfg.n == 3 and cfg.alphabet_sizes == (2, 2, 2):
        supported = {p.label for p in cfg.rates.support()}
        if supported and supported <= set(names):
            return [cfg.rates[parse_partition(s, 3)] for s in names]
    return list(0.5 + 1.5 * seeded_rng(cfg.seed, 6).random(3))


def cmd_gradient_check(cfg: RunConfig) -> int:
    space, tol = cfg.space, cfg.tolerances
    net = build_type_network(space, cfg.rates)
    pair_reactions(net)
    grad_dev = sym_dev = kernel_dev = 0.0
    min_form = min_eig = min_lyap = np.inf
    psd_ok = True
    first = None
    for k, c in enumerate(_points(space.size, cfg, 3, cfg.points)):
        m = onsager_matrix(net, c)
        if first is None:
            first = m
        g = grad_free_energy(c)
        grad_dev = max(grad_dev, _max_abs(m @ g - mass_action_rhs(net, c)), _max_abs(m @ g - reco_rhs(space, c, cfg.rates)))
        sym_dev = max(sym_dev, _max_abs(m - m.T))
        kernel_dev = max(kernel_dev, _max_abs(m.sum(axis=1)))
        ok, qf, ev = psd_check(m, seed=cfg.seed + k, tol=-tol["psd"], report=True)
        psd_ok &= ok
        min_form, min_eig = min(min_form, qf), min(min_eig, ev)
        min_lyap = min(min_lyap, float(g @ m @ g))

    # two-locus closed form, generic assembly on 2 x 2 types
    rho2 = 0.5 + 1.5 * float(seeded_rng(cfg.seed, 8).random())
    sp2 = TypeSpace.binary(2)
    net2 = build_type_network(sp2, RecombinationRates(2, {"1|2": rho2}))
    two_dev = max(_max_abs(onsager_matrix(net2, nu) - two_locus_reference(nu, rho2)) for nu in _points(4, cfg, 9, 20))

    # three-locus reference matrices
    r = _fixture_rates(cfg)
    sp3 = TypeSpace.binary(3)
    rates3 = RecombinationRates.two_parent_three_locus(*r)
    three_dev = typo_dev = 0.0
    ref_first = None
    for nu in _points(8, cfg, 10, 50):
        rhs = reco_rhs(sp3, nu, rates3)
        ref = three_locus_reference(nu, *r)
        ref_first = ref if ref_first is None else ref_first
        three_dev = max(three_dev, _max_abs(ref @ grad_free_energy(nu) - rhs))
        typo = three_locus_reference(nu, *r, verbatim=True)
        typo_dev = max(typo_dev, _max_abs(typo @ grad_free_energy(nu) - rhs))

    # strictly monotone chains
    q, w = jordan_example()
    jordan_dev = max(_max_abs(monotone_gradient_matrix(q, w, p) @ w - q.T @ p) for p in _points(4, cfg, 11, 50))
    alg, geo = eigen_multiplicities(q.T, -2)
    gen_dev = None
    if cfg.n <= MAX_GENERATOR_SITES:
        gen = build_generator(cfg.n, cfg.rates)
        wn = gen.block_counts()
        gen_dev = max(_max_abs(monotone_gradient_matrix(gen, wn, p) @ wn - gen.Q.T @ p) for p in _points(gen.size, cfg, 12, 50))

    report = {
        **_meta(cfg),
        "gradient_rhs_max_deviation": grad_dev,
        "symmetry_max_deviation": sym_dev,
        "kernel_max_deviation": kernel_dev,
        "psd_passed": psd_ok,
        "psd_min_quadratic_form": min_form,
        "psd_min_eigenvalue": min_eig,
        "lyapunov_min_dissipation": min_lyap,
        "two_locus_fixture_max_deviation": two_dev,
        "three_locus_rates": r,
        "three_locus_fixture_rhs_max_deviation": three_dev,
        "three_locus_verbatim_rhs_max_deviation": typo_dev,
        "jordan_monotone_gradient_max_deviation": jordan_dev,
        "jordan_algebraic_multiplicity": alg,
        "geometric_multiplicity": geo,
        "generator_monotone_gradient_max_deviation": gen_dev,
    }
    report["passed"] = bool(
        grad_dev <= tol["gradient"]
        and sym_dev <= tol["symmetry"]
        and psd_ok
        and min_lyap >= -tol["psd"]
        and two_dev == 0.0
        and three_dev <= tol["fixture"]
        and jordan_dev <= tol["monotone"]
        and (alg, geo) == (3, 2)
        and (gen_dev is None or gen_dev <= tol["monotone"])
    )
    out = _outdir(cfg)
    write_json(out / "gradient_report.json", report)
    labels = [space.label(x) for x in space.types]
    if first is not None:
        write_csv(out / "onsager_matrix.csv", cfg, labels, first, labels)
    labels3 = [sp3.label(x) for x in sp3.types]
    write_csv(out / "three_locus_reference.csv", cfg, labels3, ref_first, labels3)
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


def cmd_partition_sim(cfg: RunConfig) -> int:
    space, tol = cfg.space, cfg.tolerances
    if cfg.n > MAX_GENERATOR_SITES:
        raise ResourceError(f"the partitioning process supports at most {MAX_GENERATOR_SITES} sites")
    gen = build_generator(cfg.n, cfg.rates)
    check_generator(gen)
    parts = gen.states
    start = cfg.start_partition or coarsest(cfg.n)
    b0 = np.zeros(gen.size)
    b0[partition_index(cfg.n)[start]] = 1.0
    master = integrate_master(gen, b0, cfg.t_end, cfg.dt)
    direct = integrate(space, cfg.initial_distribution, cfg.rates, cfg.t_end, cfg.dt)
    coeff = None
    if start == coarsest(cfg.n):
        system = CoefficientSystem(cfg.n, cfg.rates)
        times, states, _ = integrate_simplex(system, b0, cfg.t_end, cfg.dt)
        coeff = (times, states)
    paths = simulate_paths(gen, start, cfg.t_end, cfg.n_paths, cfg.seed)
    table = recombinator_table(space, cfg.initial_distribution, parts)
    omega0 = cfg.initial_distribution

    checks = []
    times = sorted({t for t in CHECK_TIMES if t < cfg.t_end} | {cfg.t_end})
    for t in times:
        k = int(round(t / cfg.dt))
        if abs(k * cfg.dt - t) > 1e-9:
            continue
        target = recombinator_product(space, direct.states[k], start)
        via_master = master.states[k] @ table
        row = {"t": t, "master_vs_direct": _max_abs(via_master - target)}
        if coeff is not None:
            row["coefficients_vs_direct"] = _max_abs(coeff[1][k] @ table - target)
            row["coefficients_vs_master"] = _max_abs(coeff[1][k] - master.states[k])
        mean, err = mc_dual_estimate(space, paths, omega0, t, return_stderr=True)
        dev = np.abs(mean - target)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(err > 0, dev / err, np.where(dev <= tol["consistency"], 0.0, np.inf))
        row["monte_carlo_max_sigma"] = float(np.max(z))
        occ = occupancy(paths, t, parts)
        b = master.states[k]
        sd = np.sqrt(b * (1 - b) / len(paths))
        with np.errstate(divide="ignore", invalid="ignore"):
            zo = np.where(sd > 0, np.abs(occ - b) / sd, np.where(np.abs(occ - b) <= tol["consistency"], 0.0, np.inf))
        row["occupancy_max_sigma"] = float(np.max(zo))
        checks.append(row)

    deterministic = max(max(v for key, v in row.items() if key.endswith("direct") or key.endswith("master")) for row in checks)
    mc_worst = max(max(row["monte_carlo_max_sigma"], row["occupancy_max_sigma"]) for row in checks)
    report = {
        **_meta(cfg),
        "start_partition": start.label,
        "n_paths": cfg.n_paths,
        "checks": checks,
        "max_deterministic_deviation": deterministic,
        "max_sigma": mc_worst,
        "deterministic_within_tolerance": deterministic <= tol["consistency"],
        "monte_carlo_within_sigma": mc_worst <= tol["sigma"],
        "max_renormalization": max(master.max_correction, direct.max_correction),
    }
    report["passed"] = report["deterministic_within_tolerance"] and report["monte_carlo_within_sigma"]

    out = _outdir(cfg)
    labels = [p.label for p in parts]
    write_csv(out / "generator.csv", cfg, labels, gen.Q, labels)
    keep = np.arange(0, len(master.times), cfg.sample_every)
    if keep[-1] != len(master.times) - 1:
        keep = np.append(keep, len(master.times) - 1)
    rows = np.column_stack([master.times[keep], master.states[keep], master.monitors["N"][keep]])
    write_csv(out / "master.csv", cfg, ["t"] + labels + ["N"], rows)
    lines = [json.dumps({"meta": _meta(cfg)}, sort_keys=True)]
    for p in paths:
        lines.append(json.dumps({"index": p.index, "seed": p.seed, "jump_times": list(p.jump_times),
                                 "states": [s.label for s in p.states]}, sort_keys=True))
    (out / "paths.jsonl").write_text("\n".join(lines) + "\n")
    write_json(out / "consistency.json", report)
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


COMMANDS = {
    "integrate": cmd_integrate,
    "crn-check": cmd_crn_check,
    "gradient-check": cmd_gradient_check,
    "partition-sim": cmd_partition_sim,
}


def _tolerance_table() -> str:
    rows = ["default tolerances (override with --tol-NAME):"]
    for name, (value, meaning) in TOLERANCES.items():
        rows.append(f"  {name:<12} {value:<8g} {meaning}")
    rows.append("")
    rows.append("exit codes: 0 pass, 2 invariant failure, 64 config error, 65 resource bound")
    return "\n".join(rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recoflow",
        description="Cross-check the recombination equation against its reformulations.",
        epilog=_tolerance_table(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--paths", type=int, help="override n_paths (partition-sim)")
    parser.add_argument("--out", help="override output_dir")
    for name, (value, meaning) in TOLERANCES.items():
        parser.add_argument(f"--tol-{name}", type=float, default=value, metavar="X", help=meaning)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: expected a nonnegative integer", field="seed")
            cfg = replace(cfg, seed=args.seed)
        if args.paths is not None:
            if args.paths < 1:
                raise ConfigError(f"n_paths: expected an integer >= 1, got {args.paths}", field="n_paths")
            cfg = replace(cfg, n_paths=args.paths)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        cfg.tolerances = {name: getattr(args, f"tol_{name}") for name in TOLERANCES}
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RecoflowError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
