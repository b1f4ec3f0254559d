"""Command-line front end.

Subcommands::

    wswap ideal [--shots N --seed S] [--dump-circuit FILE]
    wswap sweep --mode {damping,purify,gate-noise} [--r ...] [--q ...] [--y2 ...] [--eta ...]
                [--grid-step STEP] [--shots N --seed S] [--out FILE] [--format {csv,json}]
    wswap verify [--grid-step STEP] [--out FILE] [--format {csv,json}]
    wswap circuit-run [--r R] [--q Q] [--y2 Y] [--eta E] [--decompose] [--circuit FILE]
                      [--shots N --seed S] [--dump-circuit FILE]

Exit codes: 0 all checks pass, 1 check or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import circuit as qc
from .channels import GateNoiseParams
from .protocol import damped_swap, full_pipeline, ideal_swap, oracle, pipeline_branches
from .qlinalg import partial_trace, pure_fidelity
from .states import w_state

VERIFY_ATOL = 1e-9

COLUMN_NOTES = {
    "fidelity_no_purification": "<W|rho|W> of a corrected eta branch; closed form 1/(1+r)",
    "fidelity_purified": "after M(q) on all three qubits; closed form 1/(1+r(1-q))",
    "g_eta": "probability of one eta outcome; closed form (1-r^2)/4",
    "p_wm": "conditional weak-measurement success; (1-q)^2(r-qr+1)/(1+r)",
    "p_total_per_outcome": "g_eta * p_wm (one eta outcome)",
    "p_total_composed": "2 * g_eta * p_wm (both eta outcomes kept)",
    "p_total_printed": "(1-q^2)(1-r)(r-qr+1)/2, the alternative printed polynomial",
    "fidelity": "average fidelity to |W> over all classical records",
    "cnot_count": "number of CNOTs the noise model acts on",
    "sampled_success": "success frequency from seeded binomial draws (shots > 0)",
}


@dataclass
class SweepConfig:
    r_grid: list[float] = field(default_factory=lambda: [0.0])
    q_grid: list[float] = field(default_factory=lambda: [0.0])
    y2_grid: list[float] = field(default_factory=lambda: [1.0])
    eta_grid: list[float] = field(default_factory=lambda: [1.0])
    shots: int = 0
    seed: int = 0
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        for name in ("r_grid", "q_grid", "y2_grid", "eta_grid"):
            grid = getattr(self, name)
            if not grid:
                raise ValueError(f"{name} is empty")
            if any(not 0 <= v <= 1 for v in grid):
                raise ValueError(f"{name} values must lie in [0, 1]")


def grid(step: float) -> list[float]:
    """0, step, 2*step, ... clipped to [0, 1] (1 included when reachable)."""
    if not 0 < step <= 0.5:
        raise ValueError("grid step must lie in (0, 0.5]")
    n = int(math.floor(1 / step + 1e-9))
    return [round(i * step, 12) for i in range(n + 1)]


# ------------------------------------------------------------------ rows


def damping_row(r: float) -> dict:
    swap = damped_swap(r)
    e = swap["eta+"]
    return {
        "r": r,
        "fidelity_no_purification": e.fidelity,
        "g_eta": e.branch.probability,
        "p_total_composed": swap.probability("eta+") + swap.probability("eta-"),
    }


def purify_row(r: float, q: float) -> dict:
    swap = damped_swap(r)
    g = swap.probability("eta+")
    branches = dict((o.label, b) for o, b in pipeline_branches(r, q))
    fid, p_total = full_pipeline(r, q)
    p_wm = branches["eta+"].probability / g if g > 0 else float("nan")
    return {
        "r": r,
        "q": q,
        "fidelity_no_purification": swap["eta+"].fidelity,
        "fidelity_purified": fid,
        "g_eta": g,
        "p_wm": p_wm,
        "p_total_per_outcome": branches["eta+"].probability,
        "p_total_composed": p_total,
        "p_total_printed": oracle(r, q).p_total_printed,
    }


def gate_noise_row(y2: float, eta: float, decompose: bool = True) -> dict:
    c = qc.swap_circuit(GateNoiseParams(y2, eta), decompose=decompose)
    res = qc.run_density(c)
    fid = pure_fidelity(w_state(), qc.reduce_branches(res, qc.SHARED_QUBITS).state)
    return {"y2": y2, "eta": eta, "fidelity": fid, "cnot_count": c.cnot_count}


def run_sweep(cfg: SweepConfig, mode: str) -> list[dict]:
    if mode == "damping":
        rows = [damping_row(r) for r in cfg.r_grid]
        key = "p_total_composed"
    elif mode == "purify":
        rows = [purify_row(r, q) for r in cfg.r_grid for q in cfg.q_grid]
        key = "p_total_composed"
    elif mode == "gate-noise":
        rows = [gate_noise_row(y, e) for y in cfg.y2_grid for e in cfg.eta_grid]
        key = None
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    if cfg.shots and key is not None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        for row in rows:
            p = row[key]
            row["sampled_success"] = rng.binomial(cfg.shots, p) / cfg.shots if p == p else float("nan")
    return rows


# ------------------------------------------------------------------ output


def format_csv(rows: list[dict], comments: list[str] = ()) -> str:
    cols = list(rows[0]) if rows else []
    lines = [f"# {c}" for c in comments]
    lines += [f"# {c} = {COLUMN_NOTES[c]}" for c in cols if c in COLUMN_NOTES]
    lines.append(",".join(cols))
    for row in rows:
        vals = []
        for c in cols:
            v = row[c]
            vals.append(str(v) if isinstance(v, int) else format(float(v), ".17g"))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def format_json(payload) -> str:
    return json.dumps(_json_safe(payload), indent=2) + "\n"


def read_csv(text: str) -> list[dict]:
    """Parse :func:`format_csv` output back into rows of floats."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    cols = lines[0].split(",")
    return [dict(zip(cols, map(float, ln.split(",")))) for ln in lines[1:]]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="\n")


# ----------------------------------------------------------------- verify


@dataclass
class VerifyReport:
    rows: list[dict]
    max_abs_error: float
    worst: dict | None
    printed_form_discrepancy: list[dict]

    @property
    def passed(self) -> bool:
        return self.max_abs_error < VERIFY_ATOL


def verify(step: float) -> VerifyReport:
    """Simulation against closed forms over the (r, q) grid.

    Quantities whose branch is empty at a grid point (r = 1 kills the eta
    outcomes, q = 1 the purified branch) are reported as nan and excluded
    from the error.
    """
    rows, disc = [], []
    max_err, worst = 0.0, None
    for r in grid(step):
        for q in grid(step):
            sim = purify_row(r, q)
            ref = oracle(r, q)
            row = {"r": r, "q": q}
            pairs = {
                "fid_ad": (sim["fidelity_no_purification"], ref.fid_ad),
                "fid_wm": (sim["fidelity_purified"], ref.fid_wm),
                "g_eta": (sim["g_eta"], ref.g_eta),
                "p_wm": (sim["p_wm"], ref.p_wm),
                "p_total_composed": (sim["p_total_composed"], ref.p_total_composed),
            }
            for name, (s, o) in pairs.items():
                err = abs(s - o) if math.isfinite(s) else float("nan")
                row[f"{name}_sim"] = s
                row[f"{name}_oracle"] = o
                row[f"{name}_abs_err"] = err
                if math.isfinite(err) and err > max_err:
                    max_err, worst = err, {"r": r, "q": q, "quantity": name}
            rows.append(row)
            disc.append(
                {
                    "r": r,
                    "q": q,
                    "p_composed": ref.p_total_composed,
                    "p_printed": ref.p_total_printed,
                    "difference": ref.p_total_printed - ref.p_total_composed,
                }
            )
    return VerifyReport(rows, max_err, worst, disc)


# -------------------------------------------------------------- commands


def cmd_ideal(args) -> int:
    swap = ideal_swap()
    ok = True
    print("outcome  bits  probability  fidelity")
    for label in ("eta+", "eta-", "xi+", "xi-"):
        e = swap[label]
        print(f"{label:<8} {e.outcome.classical_bits:<5} {e.branch.probability:.12f}  {e.fidelity:.12f}")
        ok &= abs(e.branch.probability - 0.25) < 1e-10 and abs(e.fidelity - 1) < 1e-10
    probs = swap.average_state().probabilities()
    print("final-state basis probabilities (qubits 1,2,6):")
    for i, p in enumerate(probs):
        if p > 1e-12:
            print(f"  |{i:03b}>  {p:.12f}")
    c = qc.swap_circuit(measure_output=True)
    if args.dump_circuit:
        _write_or_fail(args.dump_circuit, c.dumps())
    if args.shots:
        shots = qc.sample_shots(c, args.shots, args.seed)
        freq = shots.frequency(lambda b: b[3:6] == "001")
        sigma = math.sqrt(0.25 / args.shots)
        print(f"sampled |001> frequency ({args.shots} shots, seed {args.seed}, {shots.algorithm}): "
              f"{freq:.6f}  (expected 0.5 +- {3 * sigma:.6f})")
        ok &= abs(freq - 0.5) < 3 * sigma
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _write_or_fail(path: str, text: str) -> None:
    Path(path).write_text(text, newline="\n")


def cmd_sweep(args) -> int:
    step_grid = grid(args.grid_step) if args.grid_step else None
    cfg = SweepConfig(
        r_grid=args.r or step_grid or [0.0],
        q_grid=args.q or step_grid or [0.0],
        y2_grid=args.y2 or [1.0, 0.98, 0.96, 0.94, 0.92, 0.9],
        eta_grid=args.eta or [1.0, 0.98, 0.96, 0.94, 0.92, 0.9],
        shots=args.shots,
        seed=args.seed,
        output_path=args.out,
        format=args.format,
    )
    rows = run_sweep(cfg, args.mode)
    if cfg.format == "json":
        text = format_json({"mode": args.mode, "seed": cfg.seed, "shots": cfg.shots, "rows": rows})
    else:
        text = format_csv(rows, [f"mode={args.mode} shots={cfg.shots} seed={cfg.seed}"])
    _emit(text, cfg.output_path)
    return 0


def cmd_verify(args) -> int:
    rep = verify(args.grid_step)
    n = len(rep.rows)
    print(f"grid points: {n}  max_abs_error: {rep.max_abs_error:.3e}  tolerance: {VERIFY_ATOL:.0e}")
    print("total success probability: composed 2*p_wm*g_eta vs printed (1-q^2) polynomial")
    print(f"{'r':>6} {'q':>6} {'composed':>14} {'printed':>14} {'difference':>14}")
    for d in rep.printed_form_discrepancy:
        print(f"{d['r']:6.3f} {d['q']:6.3f} {d['p_composed']:14.10f} {d['p_printed']:14.10f} {d['difference']:14.10f}")
    if args.out:
        if args.format == "json":
            text = format_json({"max_abs_error": rep.max_abs_error, "worst": rep.worst,
                                "rows": rep.rows, "printed_form_discrepancy": rep.printed_form_discrepancy})
        else:
            text = format_csv(rep.rows, [f"max_abs_error={rep.max_abs_error!r}"])
        _emit(text, args.out)
    if not rep.passed:
        print(f"FAIL at {rep.worst}")
        return 1
    print("PASS")
    return 0


def cmd_circuit_run(args) -> int:
    if args.circuit:
        c = qc.Circuit.loads(Path(args.circuit).read_text())
    else:
        noise = GateNoiseParams(args.y2, args.eta) if (args.y2 < 1 or args.eta < 1) else None
        c = qc.swap_circuit(noise, damping=args.r, purify_q=args.q,
                            decompose=args.decompose, measure_output=args.shots > 0)
    if args.dump_circuit:
        _write_or_fail(args.dump_circuit, c.dumps())
    print(f"qubits={c.num_qubits} clbits={c.num_classical} cnot_count={c.cnot_count}")
    if args.shots:
        res = qc.sample_shots(c, args.shots, args.seed)
        print(f"shots={res.shots} seed={res.seed} prng={res.algorithm}")
        for bits in sorted(res.counts):
            print(f"{bits}  {res.counts[bits]}")
        return 0
    results = qc.run_density(c)
    w = w_state()
    print("record      probability      fidelity(1,2,6)")
    for bits, b in results:
        line = f"{bits:<10}  {b.probability:.12f}"
        if c.num_qubits >= 6 and not b.empty:
            line += f"  {pure_fidelity(w, partial_trace(b.state, qc.SHARED_QUBITS)):.12f}"
        print(line)
    return 0


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wswap", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ideal", help="noise-free swap: outcome probabilities and fidelities")
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dump-circuit")
    s.set_defaults(func=cmd_ideal)

    s = sub.add_parser("sweep", help="parameter sweep written as CSV or JSON")
    s.add_argument("--mode", choices=["damping", "purify", "gate-noise"], required=True)
    s.add_argument("--r", type=_floats)
    s.add_argument("--q", type=_floats)
    s.add_argument("--y2", type=_floats)
    s.add_argument("--eta", type=_floats)
    s.add_argument("--grid-step", type=float)
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="simulation vs closed forms over an (r, q) grid")
    s.add_argument("--grid-step", type=float, default=0.1)
    s.add_argument("--out")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("circuit-run", help="execute the gate-level swap circuit")
    s.add_argument("--r", type=float)
    s.add_argument("--q", type=float)
    s.add_argument("--y2", type=float, default=1.0)
    s.add_argument("--eta", type=float, default=1.0)
    s.add_argument("--decompose", action="store_true", help="CNOT network for the basis change")
    s.add_argument("--circuit", help="run a circuit from a text file instead")
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dump-circuit")
    s.set_defaults(func=cmd_circuit_run)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
