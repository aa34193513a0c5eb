"""Cross-run aggregation of traversal traces."""

import numpy as np

# column order of the stacked curve panels, top to bottom
PANEL_COLUMNS = ("angle_deg", "sq_norm", "train_loss", "test_loss",
                 "test_metric")


def aggregate_traces(traces, columns=PANEL_COLUMNS):
    """Per-step mean and std of each column across runs.

    Runs are aligned by predictor index; early-stopped (shorter) runs
    truncate the aggregate at the shortest length rather than being padded.
    Returns (index, {column: (mean, std)}); std is the population standard
    deviation, zero-width for a single run.
    """
    if not traces:
        raise ValueError("need at least one trace")
    n = min(len(t["predictor_index"]) for t in traces)
    index = traces[0]["predictor_index"][:n]
    for t in traces[1:]:
        if not np.array_equal(t["predictor_index"][:n], index):
            raise ValueError("traces disagree on predictor indices")
    out = {}
    for col in columns:
        stacked = np.stack([t[col][:n] for t in traces])
        out[col] = (stacked.mean(axis=0), stacked.std(axis=0))
    return index, out
