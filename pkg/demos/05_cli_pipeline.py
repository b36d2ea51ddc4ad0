"""Drive the full workflow through the `sk` command line.

Builds a small workspace of ATRC trace files plus a manifest, then runs
the research-question pipelines: distribution agreement per label (rq1),
rank correlation per label (rq2), and surprise-ordered accuracy (rq3).
Every subcommand writes a JSON report embedding its full configuration,
and prints a one-line JSON echo of what it wrote.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from surprisekit.trace_store import (
    DatasetManifest,
    ManifestEntry,
    write_labels,
    write_manifest,
    write_trace_matrix,
)


def sk(*args: str) -> dict:
    cmd = ["sk", *args]
    print(f"$ {' '.join(cmd)}")
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    echo = json.loads(proc.stdout.strip().splitlines()[-1])
    print(f"  -> {echo}")
    return echo


def build_workspace(root: Path) -> None:
    rng = np.random.default_rng(11)
    mixing = rng.normal(size=(8, 8)) * 0.3 + np.eye(8)
    for side in ("ref", "sur", "test"):
        (root / side).mkdir(parents=True)
        entries = []
        for ci, label in enumerate(("cat", "dog")):
            traces = rng.normal(size=(120, 8)) @ mixing + ci
            logits = rng.normal(size=(120, 2))
            logits[:, ci] += 3.0
            write_trace_matrix(traces, root / side / f"{label}.atrc")
            write_trace_matrix(logits, root / side / f"{label}_logits.atrc")
            write_labels(np.full(120, ci), root / side / f"{label}_labels.atrc")
            entries.append(ManifestEntry(
                label=label,
                class_index=ci,
                trace_path=f"{label}.atrc",
                count=120,
                logits_path=f"{label}_logits.atrc",
                true_labels_path=f"{label}_labels.atrc",
            ))
        write_manifest(DatasetManifest(name=side, entries=entries),
                       root / side / "manifest.json")


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="sk-demo-"))
    build_workspace(root)
    ref = str(root / "ref" / "manifest.json")
    sur = str(root / "sur" / "manifest.json")
    test = str(root / "test" / "manifest.json")
    out = root / "reports"

    sk("rq1", "--ref", ref, "--surrogate", sur, "--test", test,
       "--out", str(out / "rq1"))
    rq1 = json.loads((out / "rq1" / "rq1.json").read_text())
    for label, row in rq1["labels"].items():
        print(f"  {label}: jsd={row['jsd']:.4f} over {row['n_test']} test traces")

    sk("rq2", "--ref", ref, "--surrogate", sur, "--test", test,
       "--n-perm", "999", "--seed", "5", "--out", str(out / "rq2.json"))
    rq2 = json.loads((out / "rq2.json").read_text())
    for label, row in rq2["labels"].items():
        print(f"  {label}: rho={row['rho']:.3f} perm p={row['p_permutation']:.3g} "
              f"-> {row['strength']}")

    model_dir = Path(__file__).parent.parent / "tests" / "data"
    sk("rq3", "accuracy",
       "--model", str(model_dir / "toy_model.json"),
       "--train", str(model_dir / "train.atrc"),
       "--test", str(model_dir / "points.atrc"),
       "--truth", str(model_dir / "labels.atrc"),
       "--out", str(out / "rq3"))
    rq3 = json.loads((out / "rq3" / "rq3_accuracy.json").read_text())
    print(f"  rq3: overall accuracy {rq3['overall_accuracy']:.3f} "
          f"over {rq3['n']} points; curves in {out / 'rq3'}")

    print(f"all reports under {out}")


if __name__ == "__main__":
    sys.exit(main())
