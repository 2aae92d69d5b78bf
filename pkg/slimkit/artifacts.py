"""JSON and CSV artifact files.

Every JSON artifact is an envelope ``{"schema_version", "kind", "seed", ...}``
around a body. Files are written with sorted keys and a two-space indent so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
from typing import TYPE_CHECKING, Any, Final

from slimkit import errors

if TYPE_CHECKING:
    import pathlib
    from collections.abc import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

SCHEMA_VERSION: Final[int] = 1
ENVELOPE_KEYS: Final[frozenset[str]] = frozenset({"schema_version", "kind", "seed"})


class ArtifactKind(enum.StrEnum):
    """Kinds of JSON artifact."""

    TOPOLOGY = "topology"
    LAYERS = "layers"
    LIDS = "lids"
    LFTS = "lfts"
    VL_ASSIGNMENT = "vl_assignment"
    CABLING_PLAN = "cabling_plan"
    MAT = "mat"
    REPORT = "report"


HISTOGRAM_HEADER: Final[tuple[str, ...]] = ("bin_lo", "bin_hi", "count")
LID_MAP_HEADER: Final[tuple[str, ...]] = ("entity", "kind", "base_lid", "lmc_block")
PORT_TABLE_HEADER: Final[tuple[str, ...]] = ("layer", "switch", "dest", "out_port")
SL2VL_HEADER: Final[tuple[str, ...]] = ("switch", "in_class", "out_class", "sl", "vl")


def write_json(
    path: pathlib.Path,
    kind: ArtifactKind,
    body: Mapping[str, Any],
    seed: int | None = None,
) -> pathlib.Path:
    """Write a JSON artifact, creating parent directories.

    Args:
        path: Destination file.
        kind: Artifact kind recorded in the envelope.
        body: Payload fields; must not use the envelope keys.
        seed: Seed recorded in the envelope when randomness was involved.

    Returns:
        The path written.

    Raises:
        SchemaError: If the body uses an envelope key.
    """
    clashes = sorted(ENVELOPE_KEYS.intersection(body))
    if clashes:
        msg = f"{kind.value} body uses envelope keys: {', '.join(clashes)}"
        raise errors.SchemaError(msg)
    document: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "kind": kind.value}
    if seed is not None:
        document["seed"] = seed
    document.update(body)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n")
    logger.debug("wrote %s artifact %s", kind.value, path)
    return path


def read_json(path: pathlib.Path, kind: ArtifactKind) -> dict[str, Any]:
    """Read a JSON artifact and check its envelope.

    Args:
        path: File to read.
        kind: Expected artifact kind.

    Returns:
        The whole document, envelope included.

    Raises:
        SchemaError: If the file is missing, not JSON, of another kind, or
            of another schema version.
    """
    try:
        document = json.loads(path.read_text())
    except OSError as exc:
        msg = f"cannot read {path}: {exc.strerror}"
        raise errors.SchemaError(msg) from exc
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc.msg}"
        raise errors.SchemaError(msg) from exc
    if not isinstance(document, dict):
        msg = f"{path} does not hold a JSON object"
        raise errors.SchemaError(msg)
    if document.get("kind") != kind.value:
        found = document.get("kind")
        msg = f"{path} holds a {found!r} artifact, expected {kind.value!r}"
        raise errors.SchemaError(msg)
    if document.get("schema_version") != SCHEMA_VERSION:
        msg = (
            f"{path} has schema version {document.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION}"
        )
        raise errors.SchemaError(msg)
    return document


def write_csv(
    path: pathlib.Path, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> pathlib.Path:
    """Write a CSV file with a fixed header row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug("wrote %s", path)
    return path


def histogram_rows(bins: Iterable[Any]) -> list[tuple[float, float, int]]:
    """Rows of HISTOGRAM_HEADER from histogram bins."""
    return [(bin_.lo, bin_.hi, bin_.count) for bin_ in bins]
