"""Load slimkit run settings from pyproject.toml, run files and price tables."""

from __future__ import annotations

import dataclasses
import logging
import os
import pathlib
import tomllib
from typing import TYPE_CHECKING, Any, Final

from slimkit import errors
from slimkit.topology import costs

if TYPE_CHECKING:
    from collections.abc import Mapping

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV: Final[str] = "SLIMKIT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR: Final[str] = "slimkit-out"
SCHEMES: Final[frozenset[str]] = frozenset({"coloring", "dfsssp"})


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved run settings.

    Attributes:
        seed: Seed for every random choice.
        algorithm: Registry name of the routing algorithm.
        layers: Number of routing layers.
        rues_fraction: Link fraction RUES keeps per layer.
        lmc: LID mask control for fabric tables.
        vls: Virtual lanes available for deadlock avoidance.
        sls: Service levels available to the coloring scheme.
        scheme: Deadlock scheme, ``coloring`` or ``dfsssp``.
        output_dir: Directory artifacts are written to.
        prices: Price table file; built-in prices when absent.
    """

    seed: int = 0
    algorithm: str = "lnmp"
    layers: int = 4
    rues_fraction: float = 0.6
    lmc: int = 3
    vls: int = 8
    sls: int = 8
    scheme: str = "coloring"
    output_dir: pathlib.Path = pathlib.Path(DEFAULT_OUTPUT_DIR)
    prices: pathlib.Path | None = None

    def merged(self, **overrides: Any) -> RunConfig:  # noqa: ANN401
        """Return a copy with every override that is not None applied."""
        present = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **present)

    def require_fabric(self) -> None:
        """Check that every layer gets its own LID offset.

        Raises:
            ConfigError: If layers exceeds ``2**lmc``.
        """
        if self.layers > 1 << self.lmc:
            msg = f"{self.layers} layers need lmc >= {(self.layers - 1).bit_length()}"
            raise errors.ConfigError(msg)


_FIELD_TYPES: Final[dict[str, tuple[type, ...]]] = {
    "seed": (int,),
    "algorithm": (str,),
    "layers": (int,),
    "rues_fraction": (float, int),
    "lmc": (int,),
    "vls": (int,),
    "sls": (int,),
    "scheme": (str,),
    "output_dir": (str,),
    "prices": (str,),
}


def _settings(
    section: Mapping[str, Any], source: pathlib.Path, *, strict: bool
) -> dict[str, Any]:
    """Convert a TOML table into RunConfig fields.

    Raises:
        ConfigError: If strict and a key is unknown or a value mistyped, or if
            the scheme is not one of SCHEMES.
    """
    settings: dict[str, Any] = {}
    for key, value in section.items():
        expected = _FIELD_TYPES.get(key)
        is_valid = expected is not None and not isinstance(value, bool)
        if not is_valid or not isinstance(value, expected):
            problem = "unknown key" if expected is None else "mistyped value for"
            if strict:
                msg = f"{source}: {problem} {key!r}"
                raise errors.ConfigError(msg)
            logger.warning("%s: ignoring %s %r", source, problem, key)
            continue
        if key in {"output_dir", "prices"}:
            value = (source.parent / value).resolve()  # noqa: PLW2901
        settings[key] = float(value) if key == "rues_fraction" else value
    if settings.get("scheme", "coloring") not in SCHEMES:
        msg = f"{source}: scheme must be one of {sorted(SCHEMES)}"
        raise errors.ConfigError(msg)
    return settings


def default_config() -> RunConfig:
    """Return built-in defaults, output directory from SLIMKIT_OUTPUT_DIR if set."""
    output_dir = os.environ.get(OUTPUT_DIR_ENV)
    if output_dir:
        return RunConfig(output_dir=pathlib.Path(output_dir))
    return RunConfig()


def _find_pyproject(start: pathlib.Path) -> pathlib.Path | None:
    """Walk up from *start* to find the nearest pyproject.toml."""
    for directory in [start, *start.parents]:
        candidate = directory / "pyproject.toml"
        if candidate.is_file():
            return candidate
    return None


def load_config(start: pathlib.Path | None = None) -> RunConfig:
    """Return the RunConfig from the nearest pyproject.toml, or defaults.

    Reads ``[tool.slimkit]`` from the first ``pyproject.toml`` found by
    walking up from *start* (defaults to ``Path.cwd()``). Unknown keys and
    mistyped values are skipped with a warning.

    Args:
        start: Directory to begin the upward search. Defaults to cwd.

    Returns:
        Defaults overridden by the section, if present.

    Raises:
        ConfigError: If the section names an unknown scheme.
    """
    search_root = start if start is not None else pathlib.Path.cwd()
    pyproject = _find_pyproject(search_root)
    if pyproject is None:
        return default_config()

    try:
        with pyproject.open("rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError):
        return default_config()

    section = data.get("tool", {}).get("slimkit", {})
    return default_config().merged(**_settings(section, pyproject, strict=False))


def load_config_file(path: pathlib.Path, base: RunConfig | None = None) -> RunConfig:
    """Overlay a standalone TOML run file on *base*.

    Keys may sit at the top level or under ``[tool.slimkit]``.

    Args:
        path: The run file.
        base: Settings to overlay; defaults when omitted.

    Returns:
        The combined settings.

    Raises:
        ConfigError: If the file cannot be read or parsed, or holds an
            unknown key or a mistyped value.
    """
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        msg = f"cannot read run file {path}: {exc.strerror}"
        raise errors.ConfigError(msg) from exc
    except tomllib.TOMLDecodeError as exc:
        msg = f"invalid TOML in {path}: {exc}"
        raise errors.ConfigError(msg) from exc
    section = data.get("tool", {}).get("slimkit", data)
    settings = _settings(section, path, strict=True)
    return (base or default_config()).merged(**settings)


def load_prices(path: pathlib.Path | None) -> costs.PriceTable:
    """Read a flat ``key = number`` price table, or the built-in prices.

    Raises:
        ConfigError: If the file is unreadable, or a price is missing or not
            a number.
    """
    if path is None:
        return costs.DEFAULT_PRICES
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        msg = f"cannot load price table {path}: {exc}"
        raise errors.ConfigError(msg) from exc
    missing = [key for key in costs.PRICE_KEYS if key not in data]
    if missing:
        msg = f"price table {path} is missing {', '.join(missing)}"
        raise errors.ConfigError(msg)
    prices = {key: data[key] for key in costs.PRICE_KEYS}
    for key, value in prices.items():
        if isinstance(value, bool) or not isinstance(value, int | float):
            msg = f"price {key!r} in {path} is not a number"
            raise errors.ConfigError(msg)
    return costs.PriceTable(**{key: float(value) for key, value in prices.items()})
