"""Result serialization: JSON for machines, aligned text for people."""

from __future__ import annotations

import json
import os

from .model import EvalResult


def write_json(path: str | os.PathLike[str], result: EvalResult) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(result.to_json_dict(), handle, sort_keys=True, indent=2)
        handle.write("\n")


def render_text(result: EvalResult, top_features: int = 10) -> str:
    lines = [
        f"repeats: {result.repeats}  seed: {result.seed}  "
        f"features: {len(result.subset_columns)}",
        "class sizes: "
        + "  ".join(f"{c}={n}" for c, n in sorted(result.class_sizes.items())),
        "",
        "one-vs-rest ROC AUC (mean +/- std over repeats):",
    ]
    for cls, score in sorted(result.scores.items()):
        lines.append(f"  {cls:<6} {score.auc_mean:.4f} +/- {score.auc_std:.4f}")
    if result.macro is not None:
        lines.append(f"  macro  {result.macro.auc_mean:.4f} +/- {result.macro.auc_std:.4f}")
    ranked = sorted(result.importances.items(), key=lambda kv: (-kv[1], kv[0]))
    lines.append("")
    lines.append(f"top {min(top_features, len(ranked))} features by mean importance:")
    for name, value in ranked[:top_features]:
        lines.append(f"  {name:<8} {value:.4f}")
    return "\n".join(lines) + "\n"
