"""Report rendering: JSON, delimited rank tables, and matplotlib figures."""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import __version__
from .disting import KIND_SIGMA_SECURE, DistinguishabilityReport, Verdict, Witness
from .model import AttackPattern, SwitchingSystem


def _jsonify(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def _pattern_to_dict(pattern: AttackPattern | None):
    if pattern is None:
        return None
    return {"gamma": list(pattern.gamma),
            "delta_i": list(pattern.delta_i),
            "delta_j": list(pattern.delta_j)}


def _witness_to_dict(witness: Witness | None):
    if witness is None:
        return None
    return {
        "x0": _jsonify(witness.x0),
        "gamma_i": list(witness.gamma_i),
        "gamma_j": list(witness.gamma_j),
        "wi": _jsonify(witness.wi),
        "wj": _jsonify(witness.wj),
    }


def _verdict_to_dict(v: Verdict) -> dict:
    out = {
        "kind": v.kind,
        "result": v.result,
        "checked_patterns": v.checked_patterns,
        "failing_pattern": _pattern_to_dict(v.failing_pattern),
        "witness": _witness_to_dict(v.witness),
    }
    if v.gamma_ranks is not None:
        out["gamma_ranks"] = [{"gamma": list(g), "rank": r} for g, r in v.gamma_ranks]
    return out


def report_to_dict(report: DistinguishabilityReport, sys: SwitchingSystem, *,
                   backend: str, seed: int = 0, model_path: str | None = None) -> dict:
    """JSON-serializable analysis report (schema: docs/report.schema.json)."""
    pairs: dict[tuple, list] = {}
    order: list[tuple] = []
    for v in report.verdicts:
        key = (str(v.pair[0]), str(v.pair[1]))
        if key not in pairs:
            pairs[key] = []
            order.append(key)
        pairs[key].append(_verdict_to_dict(v))
    return {
        "tool": "switchsec",
        "version": __version__,
        "model": {
            "path": model_path,
            "name": sys.name,
            "n": sys.n, "m": sys.m, "p": sys.p,
            "modes": [str(m.id) for m in sys.modes],
            "dwell": sys.dwell,
        },
        "note": sys.note,
        "backend": backend,
        "seed": seed,
        "sigma": report.sigma,
        "rho": report.rho,
        "autonomous": report.autonomous,
        "exhaustive": report.exhaustive,
        "reconstructable": report.reconstructable,
        "pairs": [
            {"i": key[0], "j": key[1], "verdicts": pairs[key]} for key in order
        ],
    }


def save_report(report_dict: dict, path) -> None:
    Path(path).write_text(json.dumps(report_dict, indent=2) + "\n")


# -- rank table (sensor-deletion test, one row per support) ------------


def rank_table(report: DistinguishabilityReport):
    """Rows (gamma, {pair_label: rank}) collected from the sensor-deletion test."""
    columns: list[str] = []
    rows: dict[tuple, dict[str, int]] = {}
    for v in report.verdicts:
        if v.kind != KIND_SIGMA_SECURE or v.gamma_ranks is None:
            continue
        label = f"{v.pair[0]},{v.pair[1]}"
        columns.append(label)
        for gamma, r in v.gamma_ranks:
            rows.setdefault(gamma, {})[label] = r
    ordered = sorted(rows.items(), key=lambda item: (len(item[0]), item[0]))
    return columns, ordered


def write_rank_csv(report: DistinguishabilityReport, path) -> None:
    columns, rows = rank_table(report)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma"] + [f"pair {c}" for c in columns])
        for gamma, by_pair in rows:
            label = "{" + ",".join(str(g) for g in gamma) + "}"
            writer.writerow([label] + [by_pair.get(c, "") for c in columns])


def render_rank_figure(report: DistinguishabilityReport, sys: SwitchingSystem, path) -> None:
    """Heatmap of the sensor-deletion rank table (full rank = 2n)."""
    columns, rows = rank_table(report)
    if not columns or not rows:
        return
    full = 2 * sys.n
    data = [[by_pair.get(c, 0) for c in columns] for _, by_pair in rows]
    fig, ax = plt.subplots(figsize=(1.8 + 1.1 * len(columns), 1.2 + 0.5 * len(rows)))
    im = ax.imshow(data, cmap="RdYlGn", vmin=0, vmax=full, aspect="auto")
    ax.set_xticks(range(len(columns)), [f"({c})" for c in columns])
    ax.set_yticks(range(len(rows)),
                  ["{" + ",".join(map(str, g)) + "}" for g, _ in rows])
    for r, row in enumerate(data):
        for c, val in enumerate(row):
            ax.text(c, r, str(val), ha="center", va="center", fontsize=11)
    ax.set_xlabel("mode pair")
    ax.set_ylabel("deleted sensors")
    ax.set_title(f"observability rank after sensor deletion (full = {full})")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_verdict_figure(report: DistinguishabilityReport, path) -> None:
    """Pass/fail matrix of every verdict kind per mode pair."""
    kinds: list[str] = []
    pair_labels: list[str] = []
    values: dict[tuple, bool] = {}
    for v in report.verdicts:
        label = f"({v.pair[0]},{v.pair[1]})"
        if label not in pair_labels:
            pair_labels.append(label)
        if v.kind not in kinds:
            kinds.append(v.kind)
        values[(v.kind, label)] = v.result
    data = [[1 if values.get((k, pl), False) else 0 for pl in pair_labels] for k in kinds]
    fig, ax = plt.subplots(figsize=(2.0 + 1.2 * len(pair_labels), 1.2 + 0.55 * len(kinds)))
    ax.imshow(data, cmap="RdYlGn", vmin=0, vmax=1, aspect="auto")
    ax.set_xticks(range(len(pair_labels)), pair_labels)
    ax.set_yticks(range(len(kinds)), kinds)
    for r, row in enumerate(data):
        for c, val in enumerate(row):
            ax.text(c, r, "yes" if val else "no", ha="center", va="center", fontsize=10)
    ax.set_title("distinguishability verdicts")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace_figure(traces, path, labels=None) -> None:
    """Overlay the output sequences of one or more traces, one panel per sensor."""
    if not traces:
        return
    p = len(traces[0].y[0])
    fig, axes = plt.subplots(p, 1, figsize=(6.0, 1.8 * p), sharex=True, squeeze=False)
    for k, trace in enumerate(traces):
        label = labels[k] if labels else f"mode {trace.mode}"
        ts = range(len(trace.y))
        for s in range(p):
            axes[s][0].plot(ts, [float(y[s]) for y in trace.y],
                            marker="o", linestyle="--" if k else "-", label=label)
    for s in range(p):
        axes[s][0].set_ylabel(f"y[{s + 1}]")
        axes[s][0].legend(fontsize=8)
    axes[-1][0].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# -- human-readable text ------------------------------------------------


def format_text(report: DistinguishabilityReport, sys: SwitchingSystem,
                seed: int = 0) -> str:
    lines = []
    name = sys.name or "switching system"
    lines.append(f"{name}: n={sys.n} m={sys.m} p={sys.p}, "
                 f"sigma={report.sigma} rho={report.rho}, seed={seed}"
                 f"{' (autonomous analysis)' if report.autonomous else ''}")
    if sys.note:
        lines.append(f"note: {sys.note}")
    lines.append("")
    by_pair: dict[tuple, list[Verdict]] = {}
    for v in report.verdicts:
        by_pair.setdefault(v.pair, []).append(v)
    for pair, verdicts in by_pair.items():
        lines.append(f"pair ({pair[0]},{pair[1]}):")
        for v in verdicts:
            status = "yes" if v.result else "NO"
            extra = ""
            if v.failing_pattern is not None:
                parts = [f"gamma={{{','.join(map(str, v.failing_pattern.gamma))}}}"]
                if v.failing_pattern.delta_i or v.failing_pattern.delta_j:
                    parts.append(f"delta_i={set(v.failing_pattern.delta_i) or '{}'}")
                    parts.append(f"delta_j={set(v.failing_pattern.delta_j) or '{}'}")
                extra = f"  [fails at {' '.join(parts)}]"
            lines.append(f"  {v.kind:<28} {status}{extra}")
    columns, rows = rank_table(report)
    if columns and rows:
        lines.append("")
        lines.append("rank of the joint observability stack after deleting sensors")
        header = f"{'gamma':<12}" + "".join(f"({c})".rjust(10) for c in columns)
        lines.append(header)
        for gamma, by_pair_rank in rows:
            label = "{" + ",".join(map(str, gamma)) + "}"
            lines.append(f"{label:<12}" + "".join(
                str(by_pair_rank.get(c, "-")).rjust(10) for c in columns))
    lines.append("")
    lines.append("initial mode reconstructable from corrupted data: "
                 + ("yes" if report.reconstructable else "NO"))
    return "\n".join(lines)
