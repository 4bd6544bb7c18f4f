#!/usr/bin/env python3
"""
Spin Ptolemy toolkit

Command-line access to the spin Ptolemy group action on marked Farey
tessellations, its piecewise SL(2,Z) realization and the fatgraph spin
calculus. Exit codes: 0 success/true, 1 false, 2 error.
"""

import sys
import logging
import argparse
from typing import List, Optional

import config
import state_store
from farey import minkowski_q
from fatgraph_spin import (
    SAMPLE_FATGRAPHS,
    canonical_orientation,
    orientation_class_count,
    orientation_classes,
    quadratic_form,
    ramond_punctures,
    spin_flip,
    surface_data,
)
from modular_arithmetic import ExtRational
from piecewise_maps import PiecewiseMap, PiecewiseSL2Map, projectivize
from spin_ptolemy import (
    RELATORS,
    characteristic_map,
    evaluate_word,
    lift_to_spin,
    parse_word,
    verify_relator,
    word_to_map,
)
from suites import run_suite
from svg_render import RenderSpec, render_svg
from tessellation_state import MarkedTessellation, states_equal

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2


def setup_logging(level: str = "INFO"):
    """Configure logging for the application."""
    log_level = getattr(logging, level.upper(), logging.INFO)

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Spin Ptolemy group toolkit")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=config.LOG_LEVEL,
        help="Logging level",
    )
    parser.add_argument("--seed", type=int, default=config.SPIN_SEED, help="Seed for randomized checks")
    parser.add_argument("--json", action="store_true", help="Machine-readable output")
    parser.add_argument("--depth", type=int, default=None, help="Farey backdrop depth for rendering")

    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("eval", help="Evaluate a word in alpha, beta, t on the base state")
    p.add_argument("word")
    p.add_argument("-o", "--output", help="Save the state to this file")
    p = commands.add_parser("map", help="Piecewise SL(2,Z) map of a word")
    p.add_argument("word")
    p.add_argument("-o", "--output", help="Save the map to this file")
    p = commands.add_parser("charmap", help="Characteristic map of a state file")
    p.add_argument("state")
    p.add_argument("-o", "--output", help="Save the map to this file")
    p = commands.add_parser("compose", help="Compose two maps or states (first after second)")
    p.add_argument("first", help="Map file, or state file standing for its spin lift")
    p.add_argument("second", help="Map file, or state file standing for its spin lift")
    p.add_argument("-o", "--output", help="Save the composite to this file")
    commands.add_parser("verify-relators", help="Evaluate the built-in relators")
    p = commands.add_parser("equiv", help="Decide equality of two states in Tess+")
    p.add_argument("first")
    p.add_argument("second")
    p = commands.add_parser("render", help="Render a state file as SVG")
    p.add_argument("state")
    p.add_argument("-o", "--output", required=True)
    p = commands.add_parser("minkowski", help="Minkowski question-mark function of p/q")
    p.add_argument("value")
    p = commands.add_parser("fatgraph", help="Fatgraph spin calculus")
    p.add_argument("action", choices=["classes", "flip", "qform", "ramond"])
    p.add_argument("graph", help=f"Fatgraph JSON file or sample name ({', '.join(SAMPLE_FATGRAPHS)})")
    p.add_argument("--edge", type=int, default=0, help="Edge to flip")
    p = commands.add_parser("suite", help="Run a property suite")
    p.add_argument("name", choices=["relations", "homomorphism", "equivalence", "fatgraph", "all"])
    return parser


def emit(data) -> None:
    print(state_store.dumps(data))


def load_graph(ref: str):
    if ref in SAMPLE_FATGRAPHS:
        graph = SAMPLE_FATGRAPHS[ref]
        return graph, (0,) * graph.num_edges
    return state_store.load_fatgraph(ref)


def as_map(document) -> PiecewiseMap:
    if isinstance(document, MarkedTessellation):
        return lift_to_spin(document)
    return document


def compose_documents(first, second) -> PiecewiseMap:
    f, g = as_map(first), as_map(second)
    if isinstance(f, PiecewiseSL2Map) and not isinstance(g, PiecewiseSL2Map):
        f = projectivize(f)
    elif isinstance(g, PiecewiseSL2Map) and not isinstance(f, PiecewiseSL2Map):
        g = projectivize(g)
    return f.compose(g)


def emit_or_save(args, data, save) -> None:
    if args.output:
        save(args.output)
    else:
        emit(data)


def render_spec(args) -> RenderSpec:
    if config.RENDER_CONFIG_PATH:
        loaded = config.load_render_config(config.RENDER_CONFIG_PATH)
        spec = RenderSpec(size=loaded["size"], stroke_width=loaded["stroke_width"], depth=loaded["depth"])
    else:
        spec = RenderSpec(depth=config.SPIN_DEPTH)
    if args.depth is not None:
        spec = RenderSpec(size=spec.size, stroke_width=spec.stroke_width, depth=args.depth)
    return spec


def run_fatgraph(args) -> int:
    graph, orient = load_graph(args.graph)
    v, e, s, genus = surface_data(graph)
    if args.action == "classes":
        classes = orientation_classes(graph)
        emit(
            {
                "V": v,
                "E": e,
                "s": s,
                "g": genus,
                "count": orientation_class_count(graph),
                "classes": [list(c) for c in classes],
                "class_of_input": list(canonical_orientation(graph, orient)),
            }
        )
    elif args.action == "flip":
        flipped, moved = spin_flip(graph, orient, args.edge)
        emit(flipped.to_json(moved))
    elif args.action == "qform":
        emit(quadratic_form(graph, orient).to_json())
    else:
        flags = ramond_punctures(graph, orient)
        emit([{"face": list(f), "ramond": r} for f, r in zip(graph.faces, flags)])
    return EXIT_TRUE


def dispatch(args) -> int:
    if args.command == "eval":
        state = evaluate_word(parse_word(args.word))
        emit_or_save(args, state.to_json(), lambda path: state_store.save_state(path, state))
    elif args.command in ("map", "charmap", "compose"):
        if args.command == "map":
            phi = word_to_map(parse_word(args.word))
        elif args.command == "charmap":
            phi = characteristic_map(state_store.load_state(args.state))
        else:
            phi = compose_documents(state_store.load_document(args.first), state_store.load_document(args.second))
        emit_or_save(args, phi.to_json(), lambda path: state_store.save_map(path, phi))
    elif args.command == "verify-relators":
        reports = [verify_relator(word) for word in RELATORS.values()]
        emit([r.to_json() for r in reports])
        return EXIT_TRUE if all(r.charmap_identity for r in reports) else EXIT_FALSE
    elif args.command == "equiv":
        equal = states_equal(state_store.load_state(args.first), state_store.load_state(args.second))
        emit({"equal": equal} if args.json else equal)
        return EXIT_TRUE if equal else EXIT_FALSE
    elif args.command == "render":
        state_store.write_text(args.output, render_svg(state_store.load_state(args.state), render_spec(args)))
    elif args.command == "minkowski":
        value = minkowski_q(ExtRational.parse(args.value))
        emit({"x": args.value, "q": str(value)} if args.json else str(value))
    elif args.command == "fatgraph":
        return run_fatgraph(args)
    elif args.command == "suite":
        reports = run_suite(args.name, seed=args.seed)
        emit([r.to_json() for r in reports])
        return EXIT_TRUE if all(r.passed for r in reports) else EXIT_FALSE
    return EXIT_TRUE


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the spin Ptolemy toolkit."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Setup logging
    setup_logging(args.log_level)
    logger = logging.getLogger(__name__)

    logger.info("=" * 60)
    logger.info(f"Spin Ptolemy toolkit: {args.command}")
    logger.info(f"Seed: {args.seed}")
    logger.info("=" * 60)

    try:
        return dispatch(args)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_TRUE
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"Error: {e}")
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
