"""Command-line front end.

Exit codes: 0 success, 2 usage/config error (click), 3 resource guard
exceeded, 4 verification/assertion failure, 5 parameter violation,
6 generation failure.

Stream files are JSON lines of the form {"x": "0101...", "label": 1}.
Scores are printed as exact rationals "P/Q"; nothing is ever rounded.
"""

from __future__ import annotations

import functools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import click

from .adversarial import HardSetParams, gen_hard_set
from .bitvec import BitVec, LabeledExample, format_rational, parse_rational
from .cnf import M2SATInstance, MonotoneCNF, count_sat
from .errors import BoolKernelError, VerificationFailure
from .kernels import KernelKind, kernel
from .perceptron import PerceptronConfig, explicit_run
from .perceptron import run as perceptron_run_stream
from .presets import PRESETS, ExperimentPreset, run_preset
from .reduction import KWPInstance, build_kwp, check_monotone_consistent, verify_inequalities, verify_trace
from .trace import Trace, emit_plotdata, summary_csv
from .winnow import (
    DEFAULT_SUPPORT_GUARD,
    ExplicitWinnow,
    LazyMonomialWinnow,
    WinnowConfig,
    kwp_score,
)


def _json_text(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BoolKernelError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _read_stream(path: str) -> list[LabeledExample]:
    examples = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            examples.append(LabeledExample(BitVec.from_text(doc["x"]), doc["label"]))
    return examples


def _parse_kind(name: str, k: int | None) -> KernelKind:
    if name in ("bounded", "bounded-monotone"):
        if k is None:
            raise click.UsageError(f"--kind {name} requires --k")
        return KernelKind(name, k)
    if k is not None:
        raise click.UsageError(f"--kind {name} does not take --k")
    return KernelKind(name)


def _write_run_artifacts(out_dir: Path, name: str, trace: Trace, header: dict) -> None:
    directory = out_dir / name
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "trace.json").write_text(trace.to_json(**header))
    (directory / "summary.csv").write_text(summary_csv(trace))
    (directory / "plotdata.csv").write_text(emit_plotdata(trace))
    from .plotting import render_cumulative_mistakes

    render_cumulative_mistakes(trace, directory / "mistakes.png", title=name)
    click.echo(f"wrote {directory}/trace.json summary.csv plotdata.csv mistakes.png")


@click.group()
@click.option("--seed", type=int, default=None, help="Master seed override.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel preset workers.")
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("runs"), show_default=True)
@click.option("--guard-override", type=int, default=None, help="Raise the support/enumeration guards.")
@click.pass_context
def main(ctx, seed, jobs, out_dir, guard_override):
    """Exact-arithmetic lab for Boolean-kernel online learners."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, jobs=jobs, out_dir=out_dir, guard=guard_override)


@main.command("kernel-eval")
@click.option("--kind", required=True, type=click.Choice(["all", "monotone", "bounded", "bounded-monotone"]))
@click.option("--k", type=int, default=None)
@click.option("--x", "x_text", required=True)
@click.option("--y", "y_text", required=True)
@_handle_errors
def kernel_eval(kind, k, x_text, y_text):
    """Exact kernel value for a pair of bit strings, printed in decimal."""
    value = kernel(_parse_kind(kind, k), BitVec.from_text(x_text), BitVec.from_text(y_text))
    click.echo(str(value))


@main.command("perceptron-run")
@click.option("--kind", required=True, type=click.Choice(["all", "monotone", "bounded", "bounded-monotone"]))
@click.option("--k", type=int, default=None)
@click.option("--theta", default="0", show_default=True)
@click.option("--rate", default="1", show_default=True)
@click.option("--bias", is_flag=True)
@click.option("--stream", "stream_path", required=True, type=click.Path(exists=True))
@click.option("--explicit", is_flag=True, help="Run the primal oracle instead of the dual form.")
@click.option("--name", default="perceptron-run", show_default=True)
@click.pass_context
@_handle_errors
def perceptron_run(ctx, kind, k, theta, rate, bias, stream_path, explicit, name):
    """Run the kernel Perceptron over a JSONL stream."""
    config = PerceptronConfig(
        _parse_kind(kind, k),
        theta=parse_rational(theta),
        learning_rate=parse_rational(rate),
        use_bias=bias,
    )
    stream = _read_stream(stream_path)
    trace = explicit_run(config, stream) if explicit else perceptron_run_stream(config, stream)
    header = {
        "command": "perceptron-run",
        "kind": config.kind.describe(),
        "theta": format_rational(config.theta),
        "rate": format_rational(config.learning_rate),
        "bias": bias,
        "explicit": explicit,
    }
    out_dir = ctx.obj["out_dir"]
    if out_dir:
        _write_run_artifacts(out_dir, name, trace, header)
    click.echo(
        _json_text(
            {**header, "summary": {"steps": len(trace.records), "mistakes": trace.mistakes,
                                    "mistake_list_size": len(getattr(trace.final_state, "mistakes", ()))}}
        ),
        nl=False,
    )


@main.command("winnow-run")
@click.option("--alpha", required=True)
@click.option("--theta", required=True)
@click.option("--mode", type=click.Choice(["explicit", "lazy"]), default="explicit", show_default=True)
@click.option("--stream", "stream_path", required=True, type=click.Path(exists=True))
@click.option("--name", default="winnow-run", show_default=True)
@click.pass_context
@_handle_errors
def winnow_run(ctx, alpha, theta, mode, stream_path, name):
    """Run Winnow over a JSONL stream, explicitly or via the lazy simulator."""
    config = WinnowConfig(parse_rational(alpha), parse_rational(theta))
    stream = _read_stream(stream_path)
    if not stream:
        click.echo(_json_text({"summary": {"steps": 0, "mistakes": 0}}), nl=False)
        return
    n = stream[0].x.n
    if mode == "explicit":
        learner = ExplicitWinnow(config, n)
    else:
        guard = ctx.obj["guard"] or DEFAULT_SUPPORT_GUARD
        learner = LazyMonomialWinnow(config, n, support_guard=guard)
    trace = learner.run(stream)
    header = {
        "command": "winnow-run",
        "mode": mode,
        "alpha": format_rational(config.alpha),
        "theta": format_rational(config.theta),
    }
    out_dir = ctx.obj["out_dir"]
    if out_dir:
        _write_run_artifacts(out_dir, name, trace, header)
    click.echo(
        _json_text({**header, "summary": {"steps": len(trace.records), "mistakes": trace.mistakes}}),
        nl=False,
    )


@main.command("kwp-decide")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--force", is_flag=True, help="Proceed despite a monotone-consistency violation.")
@click.pass_context
@_handle_errors
def kwp_decide_cmd(ctx, instance_path, force):
    """Decide whether the trained monomial-space score of z reaches theta."""
    doc = json.loads(Path(instance_path).read_text())
    if "m2sat" in doc:
        inst = KWPInstance.from_json_dict(doc)
        sequence, z = inst.sequence(), inst.z
        alpha, theta = inst.alpha, inst.theta
    else:
        sequence = [LabeledExample(BitVec.from_text(e["x"]), e["label"]) for e in doc["examples"]]
        z = BitVec.from_text(doc["z"])
        alpha, theta = parse_rational(doc["alpha"]), parse_rational(doc["theta"])
    guard = ctx.obj["guard"] or DEFAULT_SUPPORT_GUARD
    score, decision = kwp_score(sequence, z, alpha, theta, support_guard=guard, force=force)
    click.echo(_json_text({"decision": decision, "score": format_rational(score)}), nl=False)
    sys.exit(0 if decision is not None else 1)


@main.command("gen-hard-set")
@click.option("--n", required=True, type=int)
@click.option("--weight", required=True, type=int)
@click.option("--cap", required=True, type=int)
@click.option("--t", "count", required=True, type=int)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--max-attempts", type=int, default=2000, show_default=True)
@_handle_errors
def gen_hard_set_cmd(n, weight, cap, count, seed, max_attempts):
    """Sample equal-weight vectors with capped pairwise intersections."""
    hs = gen_hard_set(HardSetParams(n, weight, cap, count, seed, max_attempts))
    click.echo(
        _json_text(
            {
                "n": n,
                "weight": weight,
                "cap": cap,
                "count": count,
                "seed": seed,
                "vectors": [v.to_text() for v in hs.vectors],
            }
        ),
        nl=False,
    )


@main.command("adversarial-run")
@click.option(
    "--preset",
    "preset_kind",
    required=True,
    type=click.Choice(["mistake-forcing", "threshold-cases", "pac-error"]),
)
@click.option("--theta", default="0", show_default=True, help="Threshold for threshold-cases.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.pass_context
@_handle_errors
def adversarial_run(ctx, preset_kind, theta, seed):
    """Run one of the adversarial-stream experiments and write its artifacts."""
    if preset_kind == "mistake-forcing":
        preset = PRESETS["mistake-forcing-desk"]
    elif preset_kind == "pac-error":
        preset = PRESETS["pac-error"]
    else:
        base = PRESETS["threshold-large"]
        preset = ExperimentPreset(
            f"threshold-case-{theta.replace('/', '_')}",
            "threshold-case",
            dict(base.params, theta=theta),
            seed,
        )
    master = ctx.obj["seed"] if ctx.obj["seed"] is not None else seed
    summary = run_preset(preset, ctx.obj["out_dir"], seed=master)
    click.echo(_json_text({"preset": preset.name, "summary": summary}), nl=False)


@main.command("build-reduction")
@click.option("--n", required=True, type=int)
@click.option("--clauses", required=True, help='Semicolon-separated pairs, e.g. "1,2;1,3".')
@click.option("--k", "--K", "threshold_k", required=True, type=int)
@click.option("--alpha", default="2", show_default=True)
@click.option("--theta-exp", required=True, type=int, help="theta = 2^E.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@_handle_errors
def build_reduction(n, clauses, threshold_k, alpha, theta_exp, out_path):
    """Build the counting-reduction example sequence for an M2SAT instance."""
    parsed = []
    for chunk in clauses.split(";"):
        i1, i2 = chunk.split(",")
        parsed.append((int(i1), int(i2)))
    instance = M2SATInstance(n, tuple(parsed), threshold_k)
    kwp, params = build_kwp(instance, parse_rational(alpha), Fraction(2) ** theta_exp)
    doc = kwp.to_json_dict()
    doc["params"] = {
        "U": params.U,
        "V": params.V,
        "W": params.W,
        "m": params.m,
        "q": params.q,
        "c": params.c,
        "p": params.p,
        "gadget_reps": params.gadget_reps,
    }
    text = _json_text(doc)
    if out_path:
        out_path.write_text(text)
        click.echo(f"wrote {out_path} ({len(kwp.examples)} examples, m={params.m})")
    else:
        click.echo(text, nl=False)


@main.command("verify-reduction")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@_handle_errors
def verify_reduction(instance_path):
    """Re-check the inequality set and replay the trace of a built instance."""
    doc = json.loads(Path(instance_path).read_text())
    kwp = KWPInstance.from_json_dict(doc)
    instance = kwp.m2sat
    from .reduction import compute_params

    params = compute_params(instance.n, kwp.alpha, kwp.theta).with_count_threshold(instance.K)
    consistency = check_monotone_consistent(kwp.sequence())
    ineq = verify_inequalities(params, instance)
    tracerep = verify_trace(kwp, instance)
    report = {
        "monotone_consistent": consistency.ok,
        "inequalities": ineq.to_json_dict(),
        "trace_verification": tracerep.to_json_dict(),
    }
    click.echo(_json_text(report), nl=False)
    if not (consistency.ok and ineq.ok and tracerep.ok):
        raise VerificationFailure(0, "reduction verification failed")


@main.command("count-sat")
@click.option("--cnf", "cnf_path", required=True, type=click.Path(exists=True))
@click.pass_context
@_handle_errors
def count_sat_cmd(ctx, cnf_path):
    """Exact model count of a monotone CNF given as JSON."""
    doc = json.loads(Path(cnf_path).read_text())
    cnf = MonotoneCNF.from_json_dict(doc)
    guard = ctx.obj["guard"] or 24
    click.echo(str(count_sat(cnf, guard=guard)))


def _run_named_preset(doc: dict, out_dir: str, seed: int | None) -> tuple[str, dict]:
    preset = ExperimentPreset.from_json_dict(doc)
    return preset.name, run_preset(preset, Path(out_dir), seed=seed)


@main.command("run-preset")
@click.argument("names", nargs=-1)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.pass_context
@_handle_errors
def run_preset_cmd(ctx, names, config_path):
    """Run built-in presets by name, or a preset from a JSON config file."""
    docs = []
    for name in names:
        if name not in PRESETS:
            raise click.UsageError(
                f"unknown preset {name!r}; choices: {', '.join(sorted(PRESETS))}"
            )
        docs.append(PRESETS[name].to_json_dict())
    if config_path:
        docs.append(json.loads(Path(config_path).read_text()))
    if not docs:
        raise click.UsageError("give at least one preset name or --config")
    out_dir, seed, jobs = str(ctx.obj["out_dir"]), ctx.obj["seed"], ctx.obj["jobs"]
    if jobs > 1 and len(docs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_named_preset, docs, [out_dir] * len(docs), [seed] * len(docs)))
    else:
        results = [_run_named_preset(doc, out_dir, seed) for doc in docs]
    for name, summary in results:
        click.echo(_json_text({"preset": name, "summary": summary}), nl=False)


@main.command("list-presets")
def list_presets():
    """Names and targets of the built-in presets."""
    for name in sorted(PRESETS):
        p = PRESETS[name]
        click.echo(f"{name}\t{p.target}\tseed={p.seed}")


if __name__ == "__main__":
    main()
