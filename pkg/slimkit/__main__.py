"""Entry point: slimkit [topo | route | tables | deadlock | analyze | mat | ...]."""

import contextlib
import logging
import pathlib
import sys
from collections.abc import Callable, Iterator
from typing import Annotated, Final, TypeVar

import typer

from slimkit import artifacts, errors
from slimkit import config as slimkit_config
from slimkit.routing import base as routing_base
from slimkit.topology import base as topology_base

app = typer.Typer(no_args_is_help=True)

_T = TypeVar("_T")

logger = logging.getLogger(__name__)

_LOG_FORMAT: Final[str] = "%(levelname)s %(name)s: %(message)s"

TOPOLOGY_FILE: Final[str] = "topology.json"
LAYERS_FILE: Final[str] = "layers.json"
LIDS_FILE: Final[str] = "lids.json"
LID_MAP_FILE: Final[str] = "lid_map.csv"
LFTS_FILE: Final[str] = "lfts.json"
LFT_DUMP_FILE: Final[str] = "lfts.txt"
PORT_TABLE_FILE: Final[str] = "port_table.csv"
VL_FILE: Final[str] = "vl_assignment.json"
SL2VL_FILE: Final[str] = "sl2vl.csv"
PATH_AVG_FILE: Final[str] = "path_length_avg.csv"
PATH_MAX_FILE: Final[str] = "path_length_max.csv"
LINK_LOAD_FILE: Final[str] = "link_load.csv"
DISJOINT_FILE: Final[str] = "disjoint_paths.csv"
ANALYSIS_FILE: Final[str] = "analysis.json"
MAT_FILE: Final[str] = "mat.json"
PLAN_FILE: Final[str] = "cabling_plan.json"
PLAN_CSV_FILE: Final[str] = "cabling_plan.csv"
BINDING_FILE: Final[str] = "binding.csv"
DUMP_FILE: Final[str] = "discovery.txt"
VERIFY_FILE: Final[str] = "verify_report.json"
SWEEP_FILE: Final[str] = "sweep.csv"
SCALE_FILE: Final[str] = "scalability.csv"
COSTS_FILE: Final[str] = "costs.csv"

SWEEP_HEADER: Final[tuple[str, ...]] = (
    "algorithm",
    "layers",
    "load",
    "theta",
    "disjoint_3_fraction",
    "link_load_cv",
)
SCALE_HEADER: Final[tuple[str, ...]] = (
    "ports",
    "lmc",
    "q",
    "switches",
    "endpoints",
    "net_radix",
    "concentration",
    "lids_used",
)
COSTS_HEADER: Final[tuple[str, ...]] = (
    "topology",
    "radix",
    "endpoints",
    "switches",
    "links",
    "copper_links",
    "optical_links",
    "total_cost",
    "cost_per_endpoint",
)

_DISJOINT_TARGET: Final[int] = 3


@contextlib.contextmanager
def _exit_on_error() -> Iterator[None]:
    """Report a SlimkitError on stderr and exit with its code."""
    try:
        yield
    except errors.SlimkitError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=exc.exit_code) from exc


def _run_config(ctx: typer.Context) -> slimkit_config.RunConfig:
    run: slimkit_config.RunConfig = ctx.obj
    return run


def _parse_list(text: str, convert: Callable[[str], _T], option: str) -> list[_T]:
    """Split a comma-separated option value.

    Raises:
        ConfigError: If an item does not convert or the list is empty.
    """
    try:
        values = [convert(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        msg = f"{option} expects a comma-separated list, got {text!r}"
        raise errors.ConfigError(msg) from exc
    if not values:
        msg = f"{option} needs at least one value"
        raise errors.ConfigError(msg)
    return values


def _load_topology(path: pathlib.Path) -> topology_base.Topology:
    document = artifacts.read_json(path, artifacts.ArtifactKind.TOPOLOGY)
    return topology_base.Topology.from_dict(document)


def _load_layers(
    path: pathlib.Path, topology: topology_base.Topology
) -> routing_base.LayerSet:
    """Read a layers artifact and check it routes the topology.

    Raises:
        SchemaError: If the file is not a layers artifact, was built for a
            topology of another size, or holds an incomplete or invalid layer.
    """
    document = artifacts.read_json(path, artifacts.ArtifactKind.LAYERS)
    seed = int(document.get("seed", 0))
    layers = routing_base.LayerSet.from_dict(document, seed=seed)
    if layers.n_switches != topology.n_switches:
        msg = (
            f"{path} routes {layers.n_switches} switches, "
            f"topology has {topology.n_switches}"
        )
        raise errors.SchemaError(msg)
    try:
        layers.check_consistency(topology)
    except errors.LayerGenerationError as exc:
        msg = f"{path} does not route the topology: {exc}"
        raise errors.SchemaError(msg) from exc
    return layers


def _build_layers(
    topology: topology_base.Topology,
    run: slimkit_config.RunConfig,
    algorithm: str,
    n_layers: int,
) -> routing_base.LayerSet:
    from slimkit import routing  # noqa: PLC0415

    builder = routing.get_builder(algorithm).configure(
        {"rues_fraction": run.rues_fraction}
    )
    return builder.build(topology, n_layers, run.seed)


def _summary(topology: topology_base.Topology) -> str:
    net_radix = max(topology.degree(switch) for switch in range(topology.n_switches))
    concentration = max(switch.endpoints for switch in topology.switches)
    return (
        f"{topology.kind}: {topology.n_switches} switches, "
        f"{topology.n_endpoints} endpoints, {topology.n_links} links, "
        f"k'={net_radix}, p={concentration}, diameter {topology.diameter}"
    )


# ---------------------------------------------------------------------------
# Global options
# ---------------------------------------------------------------------------


@app.callback()
def settings(
    ctx: typer.Context,
    config: Annotated[
        pathlib.Path | None,
        typer.Option("--config", help="TOML run file overriding pyproject settings."),
    ] = None,
    output_dir: Annotated[
        pathlib.Path | None,
        typer.Option("--output-dir", help="Directory artifacts are read and written."),
    ] = None,
    seed: Annotated[
        int | None, typer.Option("--seed", help="Seed for every random choice.")
    ] = None,
    verbose: Annotated[
        bool, typer.Option("--verbose", help="Log debug messages to stderr.")
    ] = False,
) -> None:
    """Slim Fly topologies, routing layers, forwarding tables and cabling."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=_LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
    with _exit_on_error():
        run = slimkit_config.load_config()
        if config is not None:
            run = slimkit_config.load_config_file(config, run)
    ctx.obj = run.merged(output_dir=output_dir, seed=seed)
    logger.debug("run settings: %s", ctx.obj)


# ---------------------------------------------------------------------------
# Topology
# ---------------------------------------------------------------------------


@app.command()
def topo(
    ctx: typer.Context,
    slimfly_q: Annotated[
        int | None, typer.Option("--slimfly-q", help="Slim Fly for a prime power q.")
    ] = None,
    near_nodes: Annotated[
        int | None,
        typer.Option("--near-nodes", help="Slim Fly closest to this endpoint count."),
    ] = None,
    fattree2: Annotated[
        int | None, typer.Option("--fattree2", help="Two-level fat tree radix.")
    ] = None,
    oversub: Annotated[
        str, typer.Option("--oversub", help="Fat tree oversubscription, 1:1 or 3:1.")
    ] = "1:1",
    fattree3: Annotated[
        int | None, typer.Option("--fattree3", help="Three-level fat tree radix.")
    ] = None,
    hyperx2: Annotated[
        int | None, typer.Option("--hyperx2", help="Two-dimensional HyperX radix.")
    ] = None,
    output: Annotated[
        pathlib.Path | None, typer.Option("--output", help="Topology JSON file.")
    ] = None,
) -> None:
    """Build one topology, write its JSON and print a summary.

    Raises:
        typer.Exit: With code 2 if the choice or its parameters are invalid.
    """
    from slimkit.topology import fattree, hyperx, slimfly  # noqa: PLC0415

    run = _run_config(ctx)
    chosen = {
        name: value
        for name, value in (
            ("slimfly_q", slimfly_q),
            ("near_nodes", near_nodes),
            ("fattree2", fattree2),
            ("fattree3", fattree3),
            ("hyperx2", hyperx2),
        )
        if value is not None
    }
    with _exit_on_error():
        if len(chosen) != 1:
            msg = (
                "choose exactly one of --slimfly-q, --near-nodes, --fattree2, "
                "--fattree3, --hyperx2"
            )
            raise errors.ConfigError(msg)
        ((name, value),) = chosen.items()
        if name == "slimfly_q":
            topology = slimfly.build_slim_fly(
                slimfly.derive_sf_params(value, strict=True)
            )
        elif name == "near_nodes":
            topology = slimfly.build_slim_fly(slimfly.find_sf_near(value))
        elif name == "fattree2":
            try:
                mode = fattree.Oversubscription(oversub)
            except ValueError as exc:
                msg = f"--oversub must be 1:1 or 3:1, got {oversub!r}"
                raise errors.ConfigError(msg) from exc
            topology = fattree.build_fat_tree2(value, mode)
        elif name == "fattree3":
            topology = fattree.build_fat_tree3(value)
        else:
            topology = hyperx.build_hyperx2(value)
        path = artifacts.write_json(
            output or run.output_dir / TOPOLOGY_FILE,
            artifacts.ArtifactKind.TOPOLOGY,
            topology.to_dict(),
        )
    typer.echo(_summary(topology))
    typer.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# Routing, fabric tables and deadlock
# ---------------------------------------------------------------------------


@app.command()
def route(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    algorithm: Annotated[
        str | None,
        typer.Option("--algorithm", help="lnmp, rues, acyclic or minimal."),
    ] = None,
    layers: Annotated[
        int | None, typer.Option("--layers", help="Number of routing layers.")
    ] = None,
    rues_fraction: Annotated[
        float | None,
        typer.Option("--rues-fraction", help="Link fraction RUES keeps per layer."),
    ] = None,
    output: Annotated[
        pathlib.Path | None, typer.Option("--output", help="Layers JSON file.")
    ] = None,
) -> None:
    """Generate routing layers for a topology.

    Raises:
        typer.Exit: With the error's code if the layers cannot be built.
    """
    run = _run_config(ctx).merged(
        algorithm=algorithm, layers=layers, rues_fraction=rues_fraction
    )
    with _exit_on_error():
        topology = _load_topology(topology_file or run.output_dir / TOPOLOGY_FILE)
        layer_set = _build_layers(topology, run, run.algorithm, run.layers)
        path = artifacts.write_json(
            output or run.output_dir / LAYERS_FILE,
            artifacts.ArtifactKind.LAYERS,
            layer_set.to_dict(),
            seed=run.seed,
        )
    typer.echo(
        f"{layer_set.algorithm}: {layer_set.n_layers} layers, "
        f"longest path {layer_set.max_length} hops"
    )
    typer.echo(f"wrote {path}")


@app.command()
def tables(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    layers_file: Annotated[
        pathlib.Path | None, typer.Option("--layers", help="Layers JSON file.")
    ] = None,
    lmc: Annotated[
        int | None, typer.Option("--lmc", help="LID mask control, 0 to 7.")
    ] = None,
    check: Annotated[
        bool,
        typer.Option("--check", help="Walk every route through the built tables."),
    ] = False,
) -> None:
    """Assign LIDs and fill forwarding tables from routing layers.

    Raises:
        typer.Exit: With code 1 if a route walk disagrees with its layer.
    """
    from slimkit import fabric  # noqa: PLC0415

    run = _run_config(ctx).merged(lmc=lmc)
    out = run.output_dir
    with _exit_on_error():
        topology = _load_topology(topology_file or out / TOPOLOGY_FILE)
        layer_set = _load_layers(layers_file or out / LAYERS_FILE, topology)
        run.merged(layers=layer_set.n_layers).require_fabric()
        lids = fabric.assign_lids(topology, run.lmc)
        lfts = fabric.populate_lfts(layer_set, lids, topology)
        artifacts.write_json(
            out / LIDS_FILE, artifacts.ArtifactKind.LIDS, lids.to_dict()
        )
        artifacts.write_csv(out / LID_MAP_FILE, artifacts.LID_MAP_HEADER, lids.rows())
        artifacts.write_json(
            out / LFTS_FILE, artifacts.ArtifactKind.LFTS, lfts.to_dict()
        )
        (out / LFT_DUMP_FILE).write_text(lfts.dump_text())
        artifacts.write_csv(
            out / PORT_TABLE_FILE,
            artifacts.PORT_TABLE_HEADER,
            fabric.layer_port_rows(layer_set, topology),
        )
        typer.echo(f"{lids.n_assigned} LIDs assigned, highest {lids.max_lid:#06x}")
        if check:
            walks = fabric.verify_tables(layer_set, lfts, topology)
            typer.echo(f"route walks match layers: {walks} checked")


@app.command()
def deadlock(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    layers_file: Annotated[
        pathlib.Path | None, typer.Option("--layers", help="Layers JSON file.")
    ] = None,
    scheme: Annotated[
        str | None, typer.Option("--scheme", help="coloring or dfsssp.")
    ] = None,
    vls: Annotated[
        int | None, typer.Option("--vls", help="Data VLs available.")
    ] = None,
    sls: Annotated[
        int | None, typer.Option("--sls", help="SLs available for coloring.")
    ] = None,
) -> None:
    """Assign VLs to the routing layers and check deadlock freedom.

    Raises:
        typer.Exit: With code 1 if the scheme fails or a dependency cycle
            remains; with code 2 on an unknown scheme.
    """
    from slimkit.deadlock import cdg, coloring, dfsssp  # noqa: PLC0415

    run = _run_config(ctx).merged(scheme=scheme, vls=vls, sls=sls)
    out = run.output_dir
    with _exit_on_error():
        if run.scheme not in slimkit_config.SCHEMES:
            msg = f"--scheme must be one of {sorted(slimkit_config.SCHEMES)}"
            raise errors.ConfigError(msg)
        topology = _load_topology(topology_file or out / TOPOLOGY_FILE)
        layer_set = _load_layers(layers_file or out / LAYERS_FILE, topology)
        if run.scheme == "coloring":
            switch_colors = coloring.color_switches(topology, run.sls)
            assignment, sl2vl = coloring.assign_vls_coloring(
                layer_set, topology, switch_colors, run.vls
            )
            artifacts.write_csv(out / SL2VL_FILE, artifacts.SL2VL_HEADER, sl2vl.rows())
        else:
            assignment = dfsssp.assign_vls_dfsssp(layer_set, topology, run.vls)
        verdict = cdg.verify_deadlock_free(layer_set, assignment, topology)
        artifacts.write_json(
            out / VL_FILE,
            artifacts.ArtifactKind.VL_ASSIGNMENT,
            {**assignment.to_dict(), "verdict": verdict.to_dict()},
            seed=layer_set.seed,
        )
    typer.echo(f"{run.scheme}: {assignment.vls_used} of {run.vls} VLs used")
    if not verdict.is_deadlock_free:
        typer.echo(f"dependency cycle over {len(verdict.cycle)} channels", err=True)
        raise typer.Exit(code=1)
    typer.echo("channel dependency graph is acyclic")


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------


@app.command()
def analyze(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    layers_file: Annotated[
        pathlib.Path | None, typer.Option("--layers", help="Layers JSON file.")
    ] = None,
) -> None:
    """Write path-length, link-load and disjoint-path histograms.

    Raises:
        typer.Exit: With the error's code if an artifact cannot be read.
    """
    from slimkit.analysis import paths  # noqa: PLC0415

    run = _run_config(ctx)
    out = run.output_dir
    with _exit_on_error():
        topology = _load_topology(topology_file or out / TOPOLOGY_FILE)
        layer_set = _load_layers(layers_file or out / LAYERS_FILE, topology)
        stats = paths.path_length_stats(layer_set)
        loads = paths.link_crossing_counts(layer_set, topology)
        header = artifacts.HISTOGRAM_HEADER
        artifacts.write_csv(
            out / PATH_AVG_FILE,
            header,
            artifacts.histogram_rows(stats.average_histogram()),
        )
        artifacts.write_csv(
            out / PATH_MAX_FILE,
            header,
            artifacts.histogram_rows(stats.maximum_histogram()),
        )
        artifacts.write_csv(
            out / LINK_LOAD_FILE, header, artifacts.histogram_rows(loads.histogram())
        )
        summary: dict[str, object] = {
            "algorithm": layer_set.algorithm,
            "n_layers": layer_set.n_layers,
            "max_length_at_most_3": stats.fraction_at_most(3),
            "link_load_total": loads.total,
            "link_load_cv": loads.coefficient_of_variation(),
        }
        if layer_set.n_layers <= paths.MAX_DISJOINT_LAYERS:
            counts = paths.disjoint_path_counts(layer_set)
            artifacts.write_csv(
                out / DISJOINT_FILE,
                header,
                artifacts.histogram_rows(paths.histogram(counts.values(), 1)),
            )
            summary["disjoint_3_fraction"] = paths.fraction_with_at_least(
                counts, _DISJOINT_TARGET
            )
        else:
            logger.warning(
                "skipping disjoint paths: %d layers exceed %d",
                layer_set.n_layers,
                paths.MAX_DISJOINT_LAYERS,
            )
        artifacts.write_json(
            out / ANALYSIS_FILE,
            artifacts.ArtifactKind.REPORT,
            summary,
            seed=layer_set.seed,
        )
    for key, value in summary.items():
        typer.echo(f"{key}: {value}")


@app.command()
def mat(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    layers_file: Annotated[
        pathlib.Path | None, typer.Option("--layers", help="Layers JSON file.")
    ] = None,
    loads: Annotated[
        str, typer.Option("--loads", help="Comma-separated load fractions.")
    ] = "0.1,0.2,0.4",
) -> None:
    """Solve maximum achievable throughput under adversarial traffic.

    Raises:
        typer.Exit: With the error's code if a demand cannot be routed.
    """
    from slimkit.analysis import throughput  # noqa: PLC0415

    run = _run_config(ctx)
    out = run.output_dir
    with _exit_on_error():
        load_values = _parse_list(loads, float, "--loads")
        topology = _load_topology(topology_file or out / TOPOLOGY_FILE)
        layer_set = _load_layers(layers_file or out / LAYERS_FILE, topology)
        results = []
        for load in load_values:
            demand = throughput.adversarial_traffic(topology, load, run.seed)
            result = throughput.max_achievable_throughput(layer_set, demand, topology)
            results.append({"load": load, **result.to_dict()})
            typer.echo(
                f"{layer_set.algorithm} {layer_set.n_layers} layers, "
                f"load {load}: theta {result.theta:.4f}"
            )
        artifacts.write_json(
            out / MAT_FILE,
            artifacts.ArtifactKind.MAT,
            {
                "algorithm": layer_set.algorithm,
                "n_layers": layer_set.n_layers,
                "results": results,
            },
            seed=run.seed,
        )


@app.command()
def sweep(
    ctx: typer.Context,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
    algorithms: Annotated[
        str, typer.Option("--algorithms", help="Comma-separated algorithm names.")
    ] = "lnmp,rues",
    layers: Annotated[
        str, typer.Option("--layers", help="Comma-separated layer counts.")
    ] = "1,2,4,8",
    loads: Annotated[
        str, typer.Option("--loads", help="Comma-separated load fractions.")
    ] = "0.1,0.2,0.4",
) -> None:
    """Run every algorithm, layer count and load and tabulate the results.

    Raises:
        typer.Exit: With the error's code if a combination fails.
    """
    from slimkit.analysis import paths, throughput  # noqa: PLC0415

    run = _run_config(ctx)
    rows: list[tuple[str, int, float, float, float | str, float]] = []
    with _exit_on_error():
        names = _parse_list(algorithms, str, "--algorithms")
        layer_counts = _parse_list(layers, int, "--layers")
        load_values = _parse_list(loads, float, "--loads")
        topology = _load_topology(topology_file or run.output_dir / TOPOLOGY_FILE)
        demands = {
            load: throughput.adversarial_traffic(topology, load, run.seed)
            for load in load_values
        }
        for name in names:
            for n_layers in layer_counts:
                layer_set = _build_layers(topology, run, name, n_layers)
                disjoint: float | str = ""
                if n_layers <= paths.MAX_DISJOINT_LAYERS:
                    disjoint = paths.fraction_with_at_least(
                        paths.disjoint_path_counts(layer_set), _DISJOINT_TARGET
                    )
                cv = paths.link_crossing_counts(
                    layer_set, topology
                ).coefficient_of_variation()
                for load, demand in demands.items():
                    result = throughput.max_achievable_throughput(
                        layer_set, demand, topology
                    )
                    logger.info(
                        "%s %d layers load %s: theta %.4f",
                        name,
                        n_layers,
                        load,
                        result.theta,
                    )
                    rows.append((name, n_layers, load, result.theta, disjoint, cv))
        path = artifacts.write_csv(run.output_dir / SWEEP_FILE, SWEEP_HEADER, rows)
    typer.echo(f"{len(rows)} combinations written to {path}")


# ---------------------------------------------------------------------------
# Cabling
# ---------------------------------------------------------------------------


@app.command()
def cabling(
    ctx: typer.Context,
    slimfly_q: Annotated[
        int | None,
        typer.Option("--slimfly-q", help="Slim Fly q; defaults to the topology's."),
    ] = None,
    topology_file: Annotated[
        pathlib.Path | None, typer.Option("--topology", help="Topology JSON file.")
    ] = None,
) -> None:
    """Write the rack cabling plan, a GUID binding and the expected dump.

    Raises:
        typer.Exit: With code 2 if no Slim Fly is given.
    """
    from slimkit.cabling import discovery, plan  # noqa: PLC0415
    from slimkit.topology import slimfly  # noqa: PLC0415

    run = _run_config(ctx)
    out = run.output_dir
    with _exit_on_error():
        if slimfly_q is None:
            topology = _load_topology(topology_file or out / TOPOLOGY_FILE)
            if topology.kind != topology_base.TopologyKind.SLIMFLY:
                msg = f"cabling plans need a Slim Fly, topology is {topology.kind}"
                raise errors.ConfigError(msg)
            slimfly_q = int(topology.params["q"])
        layout = plan.generate_plan(slimfly.derive_sf_params(slimfly_q, strict=True))
        binding = discovery.default_binding(layout)
        artifacts.write_json(
            out / PLAN_FILE, artifacts.ArtifactKind.CABLING_PLAN, layout.to_dict()
        )
        artifacts.write_csv(out / PLAN_CSV_FILE, plan.CSV_HEADER, layout.rows())
        (out / BINDING_FILE).write_text(binding.to_csv(layout))
        (out / DUMP_FILE).write_text(discovery.render_dump(layout, binding).to_text())
    counts = layout.step_counts()
    typer.echo(
        f"{len(layout.racks)} racks, {len(layout.cables)} cables: "
        + ", ".join(f"step {step} {count}" for step, count in sorted(counts.items()))
    )


@app.command()
def verify(
    ctx: typer.Context,
    dump: Annotated[
        pathlib.Path | None, typer.Option("--dump", help="Discovery dump text file.")
    ] = None,
    plan_file: Annotated[
        pathlib.Path | None, typer.Option("--plan", help="Cabling plan JSON file.")
    ] = None,
    binding_file: Annotated[
        pathlib.Path | None, typer.Option("--binding", help="guid,label CSV file.")
    ] = None,
    partial: Annotated[
        bool,
        typer.Option("--partial", help="Do not report cables not yet plugged."),
    ] = False,
) -> None:
    """Compare a discovery dump against the cabling plan.

    Raises:
        typer.Exit: With code 1 if the fabric differs from the plan, or with
            code 2 if an input cannot be read.
    """
    from slimkit.cabling import discovery, plan  # noqa: PLC0415
    from slimkit.cabling import verify as cabling_verify  # noqa: PLC0415

    run = _run_config(ctx)
    out = run.output_dir
    with _exit_on_error():
        document = artifacts.read_json(
            plan_file or out / PLAN_FILE, artifacts.ArtifactKind.CABLING_PLAN
        )
        layout = plan.CablingPlan.from_dict(document)
        binding_path = binding_file or out / BINDING_FILE
        dump_path = dump or out / DUMP_FILE
        try:
            binding_text = binding_path.read_text()
            dump_text = dump_path.read_text()
        except OSError as exc:
            msg = f"cannot read {exc.filename}: {exc.strerror}"
            raise errors.ConfigError(msg) from exc
        binding = discovery.parse_binding(binding_text, layout)
        report = cabling_verify.verify_cabling(
            layout, discovery.parse_discovery_dump(dump_text), binding, partial=partial
        )
        artifacts.write_json(
            out / VERIFY_FILE, artifacts.ArtifactKind.REPORT, report.to_dict(layout)
        )
    if report.is_clean():
        typer.echo("cabling matches the plan")
        return
    for line in report.instructions(layout):
        typer.echo(line)
    raise typer.Exit(code=1)


# ---------------------------------------------------------------------------
# Sizing and cost
# ---------------------------------------------------------------------------


@app.command()
def scale(
    ctx: typer.Context,
    ports: Annotated[
        str, typer.Option("--ports", help="Comma-separated switch port counts.")
    ] = "36,48,64",
    prime_power_only: Annotated[
        bool,
        typer.Option("--prime-power-only", help="Only q with an MMS graph."),
    ] = False,
) -> None:
    """Tabulate the largest Slim Fly per port count and LMC."""
    from slimkit.topology import scalability  # noqa: PLC0415

    run = _run_config(ctx)
    with _exit_on_error():
        port_counts = _parse_list(ports, int, "--ports")
    rows = scalability.scalability_table(
        port_counts, prime_power_only=prime_power_only
    )
    artifacts.write_csv(
        run.output_dir / SCALE_FILE,
        SCALE_HEADER,
        [
            (
                row.ports,
                row.lmc,
                row.q,
                row.n_switches,
                row.n_endpoints,
                row.net_radix,
                row.concentration,
                row.lids_used,
            )
            for row in rows
        ],
    )
    for row in rows:
        typer.echo(
            f"{row.ports} ports, LMC {row.lmc}: q={row.q}, "
            f"{row.n_switches} switches, {row.n_endpoints} endpoints"
        )


@app.command()
def costs(
    ctx: typer.Context,
    radix: Annotated[
        int | None, typer.Option("--radix", help="Compare topologies at this radix.")
    ] = None,
    endpoints: Annotated[
        int | None,
        typer.Option("--endpoints", help="Compare topologies near this size."),
    ] = None,
    prices: Annotated[
        pathlib.Path | None, typer.Option("--prices", help="TOML price table.")
    ] = None,
) -> None:
    """Compare topology counts and costs.

    Raises:
        typer.Exit: With code 2 unless exactly one of --radix and --endpoints
            is given, or if the price table is invalid.
    """
    from slimkit.topology import costs as topology_costs  # noqa: PLC0415

    run = _run_config(ctx).merged(prices=prices)
    with _exit_on_error():
        if (radix is None) == (endpoints is None):
            msg = "choose exactly one of --radix and --endpoints"
            raise errors.ConfigError(msg)
        table = slimkit_config.load_prices(run.prices)
        if radix is not None:
            rows = topology_costs.comparison_table(radix, table)
        else:
            assert endpoints is not None  # noqa: S101
            rows = topology_costs.fixed_size_table(endpoints, table)
    artifacts.write_csv(
        run.output_dir / COSTS_FILE,
        COSTS_HEADER,
        [
            (
                row.topology,
                row.radix,
                row.cost.endpoints,
                row.cost.switches,
                row.cost.links,
                row.cost.copper_links,
                row.cost.optical_links,
                round(row.cost.total_cost, 2),
                round(row.cost.cost_per_endpoint, 2),
            )
            for row in rows
        ],
    )
    for row in rows:
        typer.echo(
            f"{row.topology}: {row.cost.endpoints} endpoints, "
            f"{row.cost.switches} switches, {row.cost.links} links, "
            f"cost {row.cost.total_cost:.0f}, "
            f"{row.cost.cost_per_endpoint:.0f} per endpoint"
        )


def main() -> None:
    """Dispatch to a slimkit command."""
    app()


if __name__ == "__main__":
    main()
