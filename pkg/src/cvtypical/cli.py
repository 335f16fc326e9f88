"""Command line harness.

Exit codes: 0 success, 1 usage or other error, 2 invariant violation,
3 infeasible bounding program.
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from . import analytics as an
from .ensemble import EnsembleConfig, concentration_scan, draw_sample, histogram, mdep_scan, run_ensemble
from .io import read_samples_csv, states_to_dict, write_json, write_samples_csv
from .lp import solve_entropy_bounds
from .measures import CanonicalConfig, MicrocanonicalConfig, config_from_dict
from .validation import InfeasibleProgram, InvariantViolation, check_log_base

EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_INFEASIBLE = 3

log_base_option = click.option(
    "--log-base", type=click.Choice(["2", "e"]), default="2", show_default=True
)


def _measure(measure, n, energy, temperature):
    if measure == "microcanonical":
        if energy is None:
            raise click.UsageError("--energy is required for the microcanonical measure")
        return MicrocanonicalConfig(n, energy)
    if temperature is None:
        raise click.UsageError("--temperature is required for the canonical measure")
    return CanonicalConfig(n, temperature)


def _emit(payload, out):
    text = write_json(out, payload)
    if out is None:
        click.echo(text)


def _parse_ints(text):
    """``"4-40"``, ``"4:40:4"`` or ``"4,8,16"`` to a list of ints."""
    text = text.strip()
    if ":" in text:
        start, stop, *step = (int(v) for v in text.split(":"))
        return list(range(start, stop + 1, step[0] if step else 1))
    if "-" in text and "," not in text:
        start, stop = (int(v) for v in text.split("-"))
        return list(range(start, stop + 1))
    return [int(v) for v in text.split(",") if v]


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Typical entanglement of random pure Gaussian states."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@main.command()
@click.option("--measure", type=click.Choice(["microcanonical", "canonical"]), default="microcanonical")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON {measure, n, E | T, seed}; overrides --measure/--n/--energy/--temperature/--seed.")
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--m", type=int, default=1, show_default=True)
@click.option("--energy", type=float)
@click.option("--temperature", type=float)
@click.option("--samples", type=int, default=5000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@log_base_option
@click.option("--out", type=click.Path(dir_okay=False), help="Output file (stdout summary if omitted).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--bins", type=int, default=50, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--check", type=click.Choice(["spot", "all", "none"]), default="spot", show_default=True)
@click.option("--dump-states", type=click.Path(dir_okay=False), help="Write (E, X, Y) per sample as JSON.")
def sample(measure, config_path, n, m, energy, temperature, samples, seed, log_base, out, fmt, bins,
           workers, check, dump_states):
    """Sample an ensemble and summarise the entanglement of the first m modes."""
    if config_path:
        data = json.loads(Path(config_path).read_text())
        mcfg = config_from_dict(data)
        seed = int(data.get("seed", seed))
    else:
        mcfg = _measure(measure, n, energy, temperature)
    cfg = EnsembleConfig(mcfg, m=m, samples=samples, seed=seed, base=check_log_base(log_base), check=check)
    result = run_ensemble(cfg, workers=workers, bins=bins)
    meta = {"config": cfg.to_dict(), "version": __version__, "bins": bins}
    summary = {**meta, "summary": result.summary.to_dict()}
    if out is None:
        _emit(summary, None)
    elif fmt == "csv":
        write_samples_csv(out, result)
        write_json(Path(out).with_suffix(".json"), summary)
    else:
        rows = [
            {"index": s.index, "total_energy": s.total_energy, "inv_purity": s.inv_purity,
             "entropy": s.entropy, "nu": s.nu, "invariants": s.invariants}
            for s in result.records()
        ]
        write_json(out, {**summary, "samples": rows})
    if dump_states:
        records = []
        for i in range(samples):
            _, e, u = draw_sample(cfg, i, return_state=True)
            records.append(states_to_dict(i, e, u))
        write_json(dump_states, {"config": cfg.to_dict(), "states": records})


@main.command("scan-concentration")
@click.option("--measure", type=click.Choice(["microcanonical", "canonical"]), default="microcanonical")
@click.option("--n-list", default="4-40", show_default=True, help="e.g. 4-40, 4:40:4 or 4,8,16")
@click.option("--energy-per-mode", type=float, help="Total energy is this times n (microcanonical).")
@click.option("--temperature", type=float)
@click.option("--m", type=int, default=1, show_default=True)
@click.option("--m-ratio", type=float, help="Use m = round(ratio * n) instead of a fixed m.")
@click.option("--samples", type=int, default=1500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@log_base_option
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
def scan_concentration(measure, n_list, energy_per_mode, temperature, m, m_ratio, samples, seed, log_base,
                       out, fmt, workers):
    """Variance/mean of the entropy against n, with a log-log fit."""
    if measure == "microcanonical":
        if energy_per_mode is None:
            raise click.UsageError("--energy-per-mode is required for the microcanonical measure")
        temperature = None
    elif temperature is None:
        raise click.UsageError("--temperature is required for the canonical measure")
    else:
        energy_per_mode = None
    table = concentration_scan(
        _parse_ints(n_list), energy_per_mode=energy_per_mode, temperature=temperature, m=m,
        m_ratio=m_ratio, samples=samples, seed=seed, base=check_log_base(log_base), workers=workers,
    )
    _write_table(table["rows"], {"fit": table["fit"], "version": __version__}, out, fmt)


@main.command("scan-mdep")
@click.option("--n-list", default="10,20,30", show_default=True)
@click.option("--m-list", default="1-15", show_default=True)
@click.option("--energy-per-mode", type=float, default=10.0, show_default=True)
@click.option("--samples", type=int, default=5000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@log_base_option
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
def scan_mdep(n_list, m_list, energy_per_mode, samples, seed, log_base, out, fmt, workers):
    """Mean and standard deviation of the entropy against m."""
    rows = mdep_scan(
        _parse_ints(n_list), _parse_ints(m_list), energy_per_mode=energy_per_mode, samples=samples,
        seed=seed, base=check_log_base(log_base), workers=workers,
    )
    _write_table(rows, {"version": __version__}, out, fmt)


@main.command("histogram")
@click.argument("samples_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--bins", type=int, default=50, show_default=True)
@click.option("--s-max", type=float, help="Upper edge; defaults to the sidecar S_max or the data maximum.")
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
def histogram_cmd(samples_file, bins, s_max, out, fmt):
    """Equal-width histogram of the entropies in a per-sample CSV file."""
    entropies = read_samples_csv(samples_file)
    sidecar = Path(samples_file).with_suffix(".json")
    if s_max is None and sidecar.exists():
        s_max = json.loads(sidecar.read_text()).get("summary", {}).get("s_max")
    edges, counts, density = histogram(entropies, bins=bins, s_max=s_max)
    rows = [
        {"lo": float(edges[i]), "hi": float(edges[i + 1]), "count": int(counts[i]), "density": float(density[i])}
        for i in range(len(counts))
    ]
    _write_table(rows, {"samples": int(entropies.size), "bins": bins, "s_max": s_max}, out, fmt)


FORMULAS = [
    "page", "haar", "canonical", "microcanonical", "max-inv-purity", "max-entropy",
    "asymptotic-entropy", "asymptotic-invariant", "entropy-from-purity", "concentration-distance",
]


@main.command("analytics")
@click.option("--formula", type=click.Choice(FORMULAS), required=True)
@click.option("--n", type=int)
@click.option("--m", type=int)
@click.option("--d", type=int)
@click.option("--energy", type=float, help="Total energy E.")
@click.option("--temperature", type=float)
@click.option("--mode-energies", help="Comma-separated per-mode energies (haar).")
@click.option("--mu", type=float, help="Purity (entropy-from-purity).")
@log_base_option
@click.option("--out", type=click.Path(dir_okay=False))
def analytics_cmd(formula, n, m, d, energy, temperature, mode_energies, mu, log_base, out):
    """Evaluate a closed-form expression; prints {formula, inputs, value, units}."""
    base = check_log_base(log_base)
    units = "bits" if base == 2 else "nats"
    inputs = {k: v for k, v in dict(n=n, m=m, d=d, E=energy, T=temperature, mu=mu).items() if v is not None}
    if formula == "page":
        value, units = an.page_entropy(m, n), "nats"
    elif formula in ("haar", "canonical", "microcanonical", "concentration-distance"):
        if formula == "haar":
            e = [float(v) for v in mode_energies.split(",")]
            inputs["mode_energies"] = e
            mp = an.haar_invpurity_moments(e)
        elif formula == "canonical":
            mp = an.canonical_invpurity_moments(CanonicalConfig(n, temperature))
        else:
            mp = an.microcanonical_invpurity_moments(MicrocanonicalConfig(n, energy))
        if formula == "concentration-distance":
            value = mp.distance_to(an.max_inv_purity(energy - 2 * n))
            units = "standard deviations"
        else:
            value = {"mean_a": mp.mean_a, "mean_a2": mp.mean_a2, "std": mp.std}
            units = "mu^-2"
    elif formula == "max-inv-purity":
        value, units = an.max_inv_purity(energy - 2 * n), "mu^-2"
    elif formula == "max-entropy":
        value = an.max_subsystem_entropy(m, n, energy, base=base)
    elif formula == "asymptotic-entropy":
        value = an.asymptotic_entropy(m, temperature, base=base)
    elif formula == "asymptotic-invariant":
        value, units = an.asymptotic_invariant(d, m, temperature), "Delta"
    else:
        value = float(an.entropy_from_purity(mu, base=base))
    _emit({"formula": formula, "inputs": inputs, "value": value, "units": units}, out)


@main.command("bounds")
@click.option("--n", type=int, required=True)
@click.option("--energy", type=float, required=True, help="Total energy E.")
@click.option("--M", "n_bins", type=int, default=10_000, show_default=True)
@log_base_option
@click.option("--out", type=click.Path(dir_okay=False))
def bounds_cmd(n, energy, n_bins, log_base, out):
    """LP bounds on the micro-canonical mean entropy of one mode."""
    res = solve_entropy_bounds(MicrocanonicalConfig(n, energy), n_bins=n_bins, base=check_log_base(log_base))
    payload = {**res.to_dict(), "n": n, "E": energy}
    _emit(payload, out)
    if not res.feasible:
        raise InfeasibleProgram(f"moment constraints infeasible for n={n}, E={energy}")


def _write_table(rows, meta, out, fmt):
    if out is None or fmt == "json":
        _emit({**meta, "rows": rows}, out)
        return
    import csv

    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    write_json(Path(out).with_suffix(".json"), meta)


def run(argv=None):
    """Entry point mapping domain errors onto exit codes."""
    try:
        main.main(args=argv, standalone_mode=False)
    except InvariantViolation as exc:
        click.echo(f"invariant violation: {exc}", err=True)
        return EXIT_INVARIANT
    except InfeasibleProgram as exc:
        click.echo(f"infeasible: {exc}", err=True)
        return EXIT_INFEASIBLE
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        # keep 2 reserved for invariant violations
        return EXIT_USAGE
    except click.exceptions.Abort:
        return 1
    return 0


def entry():
    sys.exit(run())


if __name__ == "__main__":
    entry()
