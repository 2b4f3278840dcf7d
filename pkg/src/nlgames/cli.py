"""Command-line front end: ``nlg compile | eval | metrics | replay``.

Every command writes ``report.txt`` (aligned columns), ``report.json`` and
``manifest.json`` into its output directory.  The manifest records the
command, its parameters and the SHA-256 of every input and output, and
``nlg replay`` re-runs it into a scratch directory and compares hashes.
"""

from __future__ import annotations

import contextlib
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from .errors import InputError, NlgError, TooLarge, Unsolved
from .gameio import dump_game, fmt, load_game, load_operators, load_strategy, read_text
from .gamecore import (
    QuantumStrategy,
    chsh_game,
    classical_value_bruteforce,
    constant_game,
    evaluate_deterministic,
    evaluate_quantum,
    monte_carlo_value,
    parity_game,
)
from .protocols.cnf import CNF, parse_dimacs
from .quantumlab import RobustTripleSpec, SubMeasurement, canned_strategies, consistency_metrics, robust_triple_metrics
from .reductions.gphi import ReductionConfig
from .reductions.manifest import STAGES, PipelineManifest, build_stage, cnf_digest, honest_strategy

EXIT_INPUT, EXIT_CAP, EXIT_SOLVER = 2, 3, 4
TABLE_CAP = 10**5
NAMED_GAMES = {
    "chsh": chsh_game,
    "parity3": lambda: parity_game(3),
    "always": lambda: constant_game(2, True),
}


# ---------------------------------------------------------------------------
# reports and manifests


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _plain(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return float(fmt(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _cell(v) -> str:
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, list):
        return "[" + ", ".join(_cell(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def write_report(out: Path, title: str, fields: dict) -> list[Path]:
    """Aligned ``key  value`` text plus a JSON sidecar with the same fields."""
    out.mkdir(parents=True, exist_ok=True)
    plain = {k: _plain(v) for k, v in fields.items()}
    width = max((len(k) for k in plain), default=0)
    lines = [title, "=" * len(title)] + [f"{k.ljust(width)}  {_cell(v)}" for k, v in plain.items()]
    txt, js = out / "report.txt", out / "report.json"
    txt.write_text("\n".join(lines) + "\n")
    js.write_text(json.dumps(plain, indent=2, sort_keys=True) + "\n")
    return [txt, js]


def write_manifest(out: Path, command: str, params: dict, inputs: list, outputs: list) -> Path:
    data = {
        "command": command,
        "parameters": params,
        "seeds": {"seed": params.get("seed", 0)},
        "inputs": {str(Path(p).resolve()): sha256_file(p) for p in inputs},
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _fail(exc: NlgError):
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, TooLarge):
        sys.exit(EXIT_CAP)
    if isinstance(exc, Unsolved):
        sys.exit(EXIT_SOLVER)
    sys.exit(EXIT_INPUT)


def guarded(fn):
    """Map library errors to exit codes 2 (input), 3 (cap) and 4 (solver)."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NlgError as exc:
            _fail(exc)
        except (OSError, ValueError, KeyError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# shared loaders


def load_cnf(path) -> CNF:
    return parse_dimacs(read_text(path))


def parse_witness(text: str, n: int) -> list[int]:
    """0/1 string or list, or DIMACS-style signed literals (``v`` and a trailing 0 allowed)."""
    text = text.strip()
    if Path(text).is_file():
        text = Path(text).read_text().strip()
    if set(text) <= {"0", "1"} and len(text) == n:
        return [int(c) for c in text]
    toks = [t for t in text.replace(",", " ").split() if t != "v"]
    try:
        vals = [int(t) for t in toks]
    except ValueError:
        raise InputError(f"cannot parse witness {text!r}") from None
    if len(vals) == n and set(vals) <= {0, 1}:
        return vals
    lits = [v for v in vals if v != 0]
    asg = [0] * n
    seen = set()
    for lit in lits:
        if abs(lit) > n:
            raise InputError(f"witness literal {lit} out of range")
        asg[abs(lit) - 1] = int(lit > 0)
        seen.add(abs(lit))
    if len(seen) != n:
        raise InputError("witness does not assign every variable")
    return asg


def config_from(opts: dict) -> ReductionConfig:
    return ReductionConfig(
        eps1=opts["eps1"],
        exponent=opts["exponent"],
        K=opts["k"],
        K2=opts["k2"],
        eps_xor=opts["eps_xor"],
        xor_K=opts["xor_k"],
        xor_K2=opts["xor_k2"],
        modulus=opts["modulus"],
    )


def cache_dir() -> Path | None:
    d = os.environ.get("NLG_CACHE_DIR")
    return Path(d) if d else None


def table_text(game, key: str) -> str | None:
    """Explicit table if enumerable under the cap; cached under NLG_CACHE_DIR."""
    cdir = cache_dir()
    if cdir is not None:
        hit = cdir / f"{key}.table"
        if hit.is_file():
            return hit.read_text()
    try:
        text = dump_game(game, cap=TABLE_CAP)
    except (TooLarge, InputError):
        return None
    if cdir is not None:
        cdir.mkdir(parents=True, exist_ok=True)
        (cdir / f"{key}.table").write_text(text)
    return text


def round_digest(game, seed: int, count: int) -> str:
    from .rng import stream

    rng = stream(seed, "compile-sample", 0)
    h = hashlib.sha256()
    for _ in range(count):
        rnd = game.sample(rng)
        h.update(repr((rnd.questions, rnd.context)).encode())
    return h.hexdigest()


def resolve_game(spec: str):
    """(game, cnf, stage, inputs) from a named game, a game table or a compiled spec."""
    if spec in NAMED_GAMES:
        return NAMED_GAMES[spec](), None, None, []
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"{spec!r} is neither a named game ({', '.join(NAMED_GAMES)}) nor a file")
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
        pm = PipelineManifest.from_dict(data["pipeline"])
        cnf_path = Path(data["cnf"])
        if not cnf_path.is_absolute():
            cnf_path = path.parent / cnf_path
        cnf = load_cnf(cnf_path)
        if cnf_digest(cnf) != pm.cnf_sha256:
            raise InputError("CNF file does not match the compiled spec")
        game, _, _ = build_stage(cnf, pm.stage, pm.config, pm.seed)
        return game, cnf, pm.stage, [path, cnf_path]
    return load_game(text), None, None, [path]


# ---------------------------------------------------------------------------
# commands


@click.group()
def main():
    """Nonlocal game compiler, evaluator and metric lab."""


def _compile_options(f):
    opts = [
        click.option("--stage", type=click.Choice(STAGES), default="xor", show_default=True),
        click.option("--out", type=click.Path(file_okay=False), default="nlg-out", show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--samples", type=int, default=64, show_default=True, help="rounds hashed into the report"),
        click.option("--eps1", type=float, default=0.1, show_default=True),
        click.option("--exponent", type=int, default=3, show_default=True),
        click.option("--k", "k", type=int, default=8, show_default=True, help="real rounds in the repeat stage"),
        click.option("--k2", "k2", type=int, default=8, show_default=True, help="confuse slots in the repeat stage"),
        click.option("--eps-xor", type=float, default=0.05, show_default=True),
        click.option("--xor-k", "xor_k", type=int, default=1, show_default=True),
        click.option("--xor-k2", "xor_k2", type=int, default=1, show_default=True),
        click.option("--modulus", type=int, default=None),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@main.command("compile")
@click.argument("cnf_path", type=click.Path())
@_compile_options
@guarded
def cmd_compile(cnf_path, **opts):
    """Compile a DIMACS CNF into the game of one pipeline stage."""
    out = Path(opts["out"])
    cnf = load_cnf(cnf_path)
    config = config_from(opts)
    game, pm, extra = build_stage(cnf, opts["stage"], config, opts["seed"])
    out.mkdir(parents=True, exist_ok=True)
    spec = {"cnf": str(Path(cnf_path).resolve()), "pipeline": pm.as_dict()}
    spec_path = out / "game.json"
    spec_path.write_text(json.dumps(spec, indent=2, sort_keys=True) + "\n")
    outputs = [spec_path]
    table = table_text(game, hashlib.sha256(json.dumps(pm.as_dict(), sort_keys=True).encode()).hexdigest())
    if table is not None:
        tpath = out / "game.table"
        tpath.write_text(table)
        outputs.append(tpath)
    alphabet = game.answer_alphabet
    fields = {
        "stage": opts["stage"],
        "game": game.name,
        "players": game.r,
        "symmetric": game.symmetric,
        "xor": game.xor,
        "answer_alphabet": "structured" if alphabet is None else len(alphabet),
        "answer_bits": "structured" if alphabet is None else max(1, (len(alphabet) - 1).bit_length()),
        "explicit_table": table is not None,
        "stages": " -> ".join(s["stage"] for s in pm.stages),
        "config": config.as_dict(),
        "samples": opts["samples"],
        "sample_digest": round_digest(game, opts["seed"], opts["samples"]),
    }
    fields.update(extra)
    outputs += write_report(out, f"compile {opts['stage']}", fields)
    params = dict(opts, cnf_path=str(Path(cnf_path).resolve()), out=str(out))
    write_manifest(out, "compile", params, [cnf_path], outputs)
    click.echo((out / "report.txt").read_text(), nl=False)


@main.command("eval")
@click.argument("game_spec")
@click.option("--strategy", "strategy_path", type=click.Path(), default=None, help="strategy file")
@click.option("--honest", is_flag=True, help="honest strategy of a compiled stage")
@click.option("--witness", default=None, help="satisfying assignment (0/1 string, literals or a file)")
@click.option("--quantum", default=None, help="canned:<name> quantum strategy")
@click.option("--brute-classical", is_flag=True, help="exact classical value by enumeration")
@click.option("--exact", is_flag=True, help="exact evaluation over all rounds")
@click.option("--rounds", type=int, default=10**4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default="nlg-out", show_default=True)
@guarded
def cmd_eval(game_spec, strategy_path, honest, witness, quantum, brute_classical, exact, rounds, seed, jobs, out):
    """Evaluate a strategy on a game (Monte Carlo or exact)."""
    out = Path(out)
    game, cnf, stage, inputs = resolve_game(game_spec)
    fields: dict = {"game": game.name, "players": game.r}
    chosen = sum(bool(x) for x in (strategy_path, honest, quantum, brute_classical))
    if chosen != 1:
        raise InputError("choose exactly one of --strategy, --honest, --quantum, --brute-classical")
    if brute_classical:
        fields["mode"] = "brute-classical"
        value = classical_value_bruteforce(game)
        fields["value"] = value
        fields["value_float"] = float(value)
    else:
        if honest:
            if cnf is None or witness is None:
                raise InputError("--honest needs a compiled spec and --witness")
            strat = honest_strategy(game, cnf, stage, parse_witness(witness, cnf.n))
            fields["strategy"] = f"honest:{stage}"
        elif quantum:
            name = quantum.split(":", 1)[1] if quantum.startswith("canned:") else quantum
            canned = canned_strategies()
            if name not in canned or not isinstance(canned[name], QuantumStrategy):
                raise InputError(f"no canned quantum strategy {quantum!r}")
            strat = canned[name]
            fields["strategy"] = f"canned:{name}"
        else:
            strat = load_strategy(read_text(strategy_path))
            inputs.append(Path(strategy_path))
            fields["strategy"] = str(strategy_path)
        if exact:
            fields["mode"] = "exact"
            if isinstance(strat, QuantumStrategy):
                v = evaluate_quantum(game, strat)
            else:
                v = evaluate_deterministic(game, strat)
            fields["value"] = v
            fields["value_float"] = float(v)
        else:
            fields["mode"] = "monte-carlo"
            res = monte_carlo_value(game, strat, rounds, seed, jobs)
            fields.update(res.as_dict())
            fields["confidence"] = 0.99
    outputs = write_report(out, "eval", fields)
    params = {
        "game_spec": game_spec if game_spec in NAMED_GAMES else str(Path(game_spec).resolve()),
        "strategy_path": str(Path(strategy_path).resolve()) if strategy_path else None,
        "honest": honest,
        "witness": witness,
        "quantum": quantum,
        "brute_classical": brute_classical,
        "exact": exact,
        "rounds": rounds,
        "seed": seed,
        "jobs": jobs,
        "out": str(out),
    }
    write_manifest(out, "eval", params, inputs, outputs)
    click.echo((out / "report.txt").read_text(), nl=False)


@main.command("metrics")
@click.argument("bundle", type=click.Path())
@click.option("--consistency", "mode", flag_value="consistency", help="δ, γ, η of family M against A")
@click.option("--robust", "mode", flag_value="robust", help="robust-triple parameters of A")
@click.option("--consolidate", "mode", flag_value="consolidate", help="consolidation SDP and its audit")
@click.option("--steps", type=int, default=8, show_default=True, help="random-walk steps for --robust")
@click.option("--tol", type=float, default=1e-7, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default="nlg-out", show_default=True)
@guarded
def cmd_metrics(bundle, mode, steps, tol, out):
    """Consistency, robust-triple and consolidation metrics on an operator bundle."""
    from .optim import consolidation_audit

    if mode is None:
        raise InputError("choose one of --consistency, --robust, --consolidate")
    out = Path(out)
    state, families, meta = load_operators(read_text(bundle))
    if "A" not in families:
        raise InputError("bundle needs a measurement family named A")
    A = families["A"]
    fields: dict = {"mode": mode, "registers": state.r, "dim": state.dim, "points": len(A)}
    if mode == "consistency":
        if "M" not in families:
            raise InputError("--consistency needs a family named M")
        M = next(iter(families["M"].values()))
        fields.update(consistency_metrics(M, A, state).as_dict())
        fields["tolerances"] = {"psd_floor": -1e-10, "completeness": 1e-10, "reality": 1e-9}
    elif mode == "robust":
        functions = meta.get("functions")
        if functions is None:
            raise InputError("--robust needs meta functions")
        vertices = list(A)
        edges = meta.get("edges")
        spec = (
            RobustTripleSpec(vertices, [tuple(e) for e in edges], A, functions)
            if edges is not None
            else RobustTripleSpec.complete_graph(vertices, A, functions)
        )
        if "R" in families:
            R = next(iter(families["R"].values()))
        else:
            R = SubMeasurement({i: np.eye(state.dim) / len(functions) for i in range(len(functions))})
        fields.update(robust_triple_metrics(spec, state, R, steps).as_dict())
        fields["walk"] = "uniform over neighbours, self excluded"
    else:
        functions = meta.get("functions")
        if functions is None:
            raise InputError("--consolidate needs meta functions")
        G = dict(enumerate(functions))
        audit = consolidation_audit(state, A, G, tol=tol)
        fields.update(audit.as_dict())
        fields.update({f"diag_{k}": v for k, v in audit.result.diagnostics.items()})
        fields["tol"] = tol
    outputs = write_report(out, f"metrics {mode}", fields)
    params = {"bundle": str(Path(bundle).resolve()), "mode": mode, "steps": steps, "tol": tol, "out": str(out)}
    write_manifest(out, "metrics", params, [bundle], outputs)
    click.echo((out / "report.txt").read_text(), nl=False)


COMMANDS = {"compile": cmd_compile, "eval": cmd_eval, "metrics": cmd_metrics}


def replay_manifest(path) -> dict:
    """Re-run a manifest into a scratch directory; {output: (recorded, replayed)} hashes."""
    data = json.loads(read_text(path))
    command = data.get("command")
    if command not in COMMANDS:
        raise InputError(f"manifest has unknown command {command!r}")
    for inp, digest in data.get("inputs", {}).items():
        if not Path(inp).is_file() or sha256_file(inp) != digest:
            raise InputError(f"input {inp} is missing or changed since the manifest was written")
    params = dict(data["parameters"])
    with tempfile.TemporaryDirectory() as tmp:
        params["out"] = tmp
        args = _argv(command, params)
        try:
            with contextlib.redirect_stdout(io.StringIO()):
                COMMANDS[command].main(args=args, standalone_mode=False)
        except SystemExit as exc:
            if exc.code:
                raise
        result = {}
        for name, digest in data["outputs"].items():
            p = Path(tmp) / name
            result[name] = (digest, sha256_file(p) if p.is_file() else None)
    return result


def _argv(command: str, params: dict) -> list[str]:
    """Rebuild the command line from recorded parameters."""
    p = dict(params)
    args: list[str] = []
    if command == "compile":
        args.append(p.pop("cnf_path"))
        for key in ("stage", "out", "seed", "samples", "eps1", "exponent", "k", "k2", "eps_xor", "xor_k", "xor_k2", "modulus"):
            val = p.get(key)
            if val is not None:
                args += [f"--{key.replace('_', '-')}", str(val)]
        return args
    if command == "eval":
        args.append(p["game_spec"])
        if p.get("strategy_path"):
            args += ["--strategy", p["strategy_path"]]
        for flag in ("honest", "brute_classical", "exact"):
            if p.get(flag):
                args.append(f"--{flag.replace('_', '-')}")
        for key in ("witness", "quantum"):
            if p.get(key):
                args += [f"--{key}", str(p[key])]
        for key in ("rounds", "seed", "jobs", "out"):
            args += [f"--{key}", str(p[key])]
        return args
    args += [p["bundle"], f"--{p['mode']}", "--steps", str(p["steps"]), "--tol", repr(p["tol"]), "--out", p["out"]]
    return args


@main.command("replay")
@click.argument("manifest", type=click.Path())
@guarded
def cmd_replay(manifest):
    """Re-run a manifest and check every output is bit-identical."""
    result = replay_manifest(manifest)
    ok = True
    width = max(len(n) for n in result)
    for name, (want, got) in result.items():
        same = want == got
        ok &= same
        click.echo(f"{name.ljust(width)}  {'identical' if same else 'DIFFERS'}  {want[:16]}")
    click.echo("replay: " + ("bit-identical" if ok else "MISMATCH"))
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
