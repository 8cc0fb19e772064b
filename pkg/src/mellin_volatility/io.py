"""CSV and manifest files.

All CSV files are UTF-8 with a header row, ``.`` as decimal separator and
``\\n`` line endings. Floats are written in shortest round-trip form, so
identical runs give byte-identical files.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import tomli_w
from numpy.typing import ArrayLike

from mellin_volatility.config import RunConfig
from mellin_volatility.estimator import SelectionDiagnostics
from mellin_volatility.evaluation import MCResult, SectionTrace
from mellin_volatility.exceptions import ObservationParseError
from mellin_volatility.types import DevelopmentPoint, ObservationSet, PathBundle

logger = logging.getLogger(__name__)

OBSERVATION_COLUMNS = ("j", "vbar1", "vbar2", "y1", "y2")
MANIFEST_NAME = "manifest.toml"


def _write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, lineterminator="\n", encoding="utf-8")
    logger.info("Wrote %s (%d rows)", target, len(frame))
    return target


def write_observations(
    path: str | Path, bundle: PathBundle, obs: ObservationSet | None = None
) -> Path:
    """Write ``j, vbar1, vbar2[, y1, y2]`` with 1-based ``j``."""
    frame = pd.DataFrame(
        {
            "j": np.arange(1, bundle.n + 1),
            "vbar1": bundle.vbar[:, 0],
            "vbar2": bundle.vbar[:, 1],
        }
    )
    if obs is not None:
        frame["y1"] = obs.rows[:, 0]
        frame["y2"] = obs.rows[:, 1]
    return _write_frame(frame, path)


def read_observations(
    path: str | Path, delta: float = 0.01, c: DevelopmentPoint | ArrayLike | None = None
) -> ObservationSet:
    """Read observations from ``y1, y2`` columns, or ``vbar1, vbar2`` if absent.

    Raises:
        ObservationParseError: On malformed content, citing the 1-based data row.
        OSError: If the file cannot be read.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ObservationParseError(f"Cannot parse observations file {path}: {exc}") from exc

    columns = next(
        (pair for pair in (("y1", "y2"), ("vbar1", "vbar2")) if set(pair) <= set(frame.columns)),
        None,
    )
    if columns is None:
        raise ObservationParseError(
            f"Observations file {path} needs columns y1,y2 or vbar1,vbar2; "
            f"found {list(frame.columns)}"
        )
    if frame.empty:
        raise ObservationParseError(f"Observations file {path} has no data rows")

    values = frame[list(columns)].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.all(np.isfinite(values) & (values > 0.0), axis=1)
    if np.any(bad):
        row = int(np.argmax(bad)) + 1
        raise ObservationParseError(
            f"Row {row} of {path}: observations must be finite positive numbers, "
            f"got {frame.loc[row - 1, list(columns)].tolist()}",
            row=row,
        )
    # to_numeric is not correctly rounded; parse the validated strings exactly
    exact = frame[list(columns)].astype(np.float64).to_numpy()
    return ObservationSet(exact, delta, DevelopmentPoint.of(c))


def write_surface(
    path: str | Path, x_axis: ArrayLike, y_axis: ArrayLike, columns: Mapping[str, ArrayLike]
) -> Path:
    """Write surfaces on ``x_axis x y_axis`` as long-format ``x, y, <columns>``."""
    x = np.asarray(x_axis, dtype=np.float64)
    y = np.asarray(y_axis, dtype=np.float64)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    data: dict[str, Any] = {"x": xx.ravel(), "y": yy.ravel()}
    for name, values in columns.items():
        data[name] = np.asarray(values, dtype=np.float64).reshape(xx.shape).ravel()
    return _write_frame(pd.DataFrame(data), path)


def write_diagnostics(path: str | Path, diagnostics: SelectionDiagnostics) -> Path:
    """Write ``k1, k2, norm_sq, pen, contrast, chosen`` per candidate."""
    frame = pd.DataFrame(
        [
            {
                "k1": s.k.k1,
                "k2": s.k.k2,
                "norm_sq": s.norm_sq,
                "pen": s.pen,
                "contrast": s.contrast,
                "chosen": int(s.k == diagnostics.selected),
            }
            for s in diagnostics.candidates
        ]
    )
    return _write_frame(frame, path)


def write_summary(path: str | Path, result: MCResult) -> Path:
    """Write one row per replication."""
    frame = pd.DataFrame(
        [
            {
                "replication": r.index,
                "k1_hat": r.k_noisy.k1,
                "k2_hat": r.k_noisy.k2,
                "ise_noisy": r.ise_noisy,
                "ise_oracle": r.ise_oracle,
                "k1_oracle": r.k_oracle.k1,
                "k2_oracle": r.k_oracle.k2,
            }
            for r in result.replications
        ]
    )
    return _write_frame(frame, path)


def write_section(
    path: str | Path,
    estimate: SectionTrace,
    truth: SectionTrace,
    oracle: SectionTrace | None = None,
) -> Path:
    """Write ``coordinate, estimate_median, truth[, oracle_median]`` along the free axis."""
    frame = pd.DataFrame(
        {
            "coordinate": estimate.nodes,
            "estimate_median": estimate.values,
            "truth": truth.values,
        }
    )
    if oracle is not None:
        frame["oracle_median"] = oracle.values
    return _write_frame(frame, path)


def write_mc_outputs(out_dir: str | Path, result: MCResult) -> list[Path]:
    """Summary, median surface and both sections of one study, suffixed by ``n``."""
    out = Path(out_dir)
    n = result.config.path.n
    probe = result.probe
    written = [
        write_summary(out / f"summary_n{n}.csv", result),
        write_surface(
            out / f"surface_n{n}.csv",
            probe,
            probe,
            {
                "median_estimate": result.median_surface("noisy"),
                "truth": result.truth_surface,
                "median_oracle": result.median_surface("oracle"),
            },
        ),
    ]
    for axis, name in ((0, "x"), (1, "y")):
        written.append(
            write_section(
                out / f"section_{name}_n{n}.csv",
                result.section(axis, "noisy"),
                result.section(axis, "truth"),
                result.section(axis, "oracle"),
            )
        )
    return written


def write_manifest(out_dir: str | Path, config: RunConfig) -> Path:
    """Write the fully resolved configuration as ``manifest.toml``."""
    target = Path(out_dir) / MANIFEST_NAME
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "wb") as f:
        tomli_w.dump(config.to_manifest(), f)
    logger.info("Wrote %s", target)
    return target
