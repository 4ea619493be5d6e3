from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn, TextIO

from zastava import conf

if TYPE_CHECKING:
    from collections.abc import Sequence

    from zastava.quiver import DimVector, Quiver, SymMatrix

__all__ = [
    "EXIT_FAILURE",
    "EXIT_INPUT",
    "EXIT_NOT_QUIVER",
    "EXIT_OK",
    "build_parser",
    "export_presentation",
    "main",
    "run",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILURE = 2
EXIT_NOT_QUIVER = 3


class InputError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, "%s: error: %s\n" % (self.prog, message))


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="zastava",
        description="Verify and present compactified Coulomb branches of quivers.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiver", help="path to a quiver file")
    common.add_argument("--kappa", help="path to a symmetric matrix file")
    common.add_argument("--dim", required=True, help="dimension vector, e.g. 1=2,2=1")
    common.add_argument("--seed", type=int, help="seed for every random choice")
    common.add_argument("--threads", type=int, help="worker processes for verify")
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr (repeat for debug output)",
    )

    verify = subparsers.add_parser(
        "verify", parents=[common], help="check the identity for all subset pairs"
    )
    verify.add_argument("--format", choices=("json", "text"), default="json")

    present = subparsers.add_parser(
        "present", parents=[common], help="list generators and relations"
    )
    present.add_argument("--side", choices=("coulomb", "local"), default="local")
    present.add_argument("--format", choices=("json", "text"), default="json")

    fiber = subparsers.add_parser(
        "fiber", parents=[common], help="specialize relations at a point"
    )
    fiber.add_argument("--point", required=True, help="coordinates, e.g. v:1=0,v:2=1")
    fiber.add_argument("--format", choices=("json", "text"), default="json")

    export = subparsers.add_parser(
        "export", parents=[common], help="emit input for a computer algebra system"
    )
    export.add_argument("--side", choices=("coulomb", "local"), default="local")
    export.add_argument("--format", choices=("json", "m2", "singular"), default="m2")
    export.add_argument("--base", choices=("poly", "frac"))
    return parser


def _configure_logging(verbosity: int) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger = logging.getLogger("zastava")
    package_logger.handlers[:] = [handler]
    levels = (logging.WARNING, logging.INFO, logging.DEBUG)
    package_logger.setLevel(levels[min(verbosity, 2)])


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError("Cannot read %s: %s" % (path, exc.strerror)) from None


def _load_source(config: dict[str, Any]) -> Quiver | SymMatrix:
    from zastava.quiver import parse_kappa, parse_quiver

    if config["quiver"] is not None:
        return parse_quiver(_read(config["quiver"]))
    return parse_kappa(_read(config["kappa"]))


def _align(source: Quiver | SymMatrix, dim: dict[str, int]) -> DimVector:
    from zastava.quiver import DimVector

    try:
        return DimVector.for_quiver(source, dim)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _require_quiver(source: Quiver | SymMatrix) -> Quiver:
    from zastava.quiver import SymMatrix, quiver_of_kappa

    if isinstance(source, SymMatrix):
        return quiver_of_kappa(source)
    return source


def _dump(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def _generators(alpha: DimVector) -> list[dict[str, Any]]:
    from zastava.divisorbase import subsets_of

    return [{"index": s.mask, "subset": s.to_json()} for s in subsets_of(alpha)]


def export_presentation(
    side: str,
    fmt: str,
    source: Quiver | SymMatrix,
    alpha: DimVector,
    *,
    base: str | None = None,
) -> str:
    """
    Render the relations of one side in the requested format. The Coulomb
    side needs a quiver; a matrix is converted when it is of quiver type.
    """
    from zastava.coulomb import coulomb_relations, multiplication_table
    from zastava.exactalg import poly_to_text
    from zastava.export import to_m2, to_singular
    from zastava.localspace import locality_relations
    from zastava.serializers import RelationSerializer

    if side not in ("coulomb", "local") or fmt not in ("json", "m2", "singular"):
        raise ValueError("Unsupported export: side=%s format=%s" % (side, fmt))
    if side == "coulomb":
        quiver = _require_quiver(source)
        relations = coulomb_relations(quiver, alpha)
        title = "Coulomb branch of %s with dimension %s" % (
            " ".join("%s->%s" % e for e in quiver.edges) or "an edge-free quiver",
            alpha,
        )
    else:
        relations = locality_relations(source, alpha)
        title = "local space with dimension %s" % alpha

    if fmt == "m2":
        return to_m2(relations, alpha, base=base, title=title)  # type: ignore[arg-type]
    if fmt == "singular":
        return to_singular(relations, alpha, base=base, title=title)  # type: ignore[arg-type]

    data: dict[str, Any] = {
        "side": side,
        "alpha": dict(alpha.entries),
        "generators": _generators(alpha),
        "relations": RelationSerializer(relations, many=True).data,
    }
    if side == "coulomb":
        data["multiplication"] = [
            [poly_to_text(fc) for fc in row]
            for row in multiplication_table(_require_quiver(source), alpha)
        ]
    return _dump(data)


def _verify(
    config: dict[str, Any], alpha: DimVector, source: Quiver | SymMatrix, out: TextIO
) -> int:
    from zastava.identify import verify_all
    from zastava.serializers import IdentityReportSerializer

    quiver = _require_quiver(source)
    report = verify_all(quiver, alpha, threads=config["threads"], diagnose=True)
    if config["format"] == "json":
        out.write(_dump(IdentityReportSerializer(report).data))
    else:
        verdict = "pass" if report.passed else "fail"
        failures = len(report.failures)
        out.write("%s: %d pairs, %d failures\n" % (verdict, report.pairs, failures))
        for failure in report.failures:
            out.write(
                "  %s %s: %s != %s\n" % (failure.A, failure.B, failure.lhs, failure.rhs)
            )
        if report.repair:
            out.write("repair: %s\n" % report.repair)
    return EXIT_OK if report.passed else EXIT_FAILURE


def _present(
    config: dict[str, Any], alpha: DimVector, source: Quiver | SymMatrix, out: TextIO
) -> int:
    from zastava.coulomb import coulomb_relations, localized_class
    from zastava.divisorbase import subsets_of
    from zastava.export import quadric_text
    from zastava.localspace import locality_relations
    from zastava.serializers import CoulombTermSerializer, RelationSerializer, terms_of

    if config["side"] == "coulomb":
        quiver = _require_quiver(source)
        relations = coulomb_relations(quiver, alpha)
        sizes = sorted({s.size for s in subsets_of(alpha)}, key=lambda d: d.entries)
        classes = {
            str(beta): CoulombTermSerializer(
                terms_of(localized_class(quiver, alpha, beta)), many=True
            ).data
            for beta in sizes
        }
    else:
        relations = locality_relations(source, alpha)
        classes = None

    if config["format"] == "json":
        data: dict[str, Any] = {
            "side": config["side"],
            "alpha": dict(alpha.entries),
            "generators": _generators(alpha),
            "relations": RelationSerializer(relations, many=True).data,
        }
        if classes is not None:
            data["classes"] = classes
        out.write(_dump(data))
        return EXIT_OK

    letter = "x" if config["side"] == "coulomb" else "s"
    for subset in subsets_of(alpha):
        out.write("z_%d = %s^%s\n" % (subset.mask, letter, subset))
    for relation in relations:
        out.write("%s = 0\n" % quadric_text(relation, lambda m: "z_%d" % m))
    return EXIT_OK


def _fiber(
    config: dict[str, Any], alpha: DimVector, source: Quiver | SymMatrix, out: TextIO
) -> int:
    from zastava.identify import segre_scaling, specialize_fiber
    from zastava.localspace import locality_relations
    from zastava.serializers import FiberRelationSerializer

    point = config["point"]
    missing = [v.name for v in alpha.variables() if v not in point]
    unknown = [v.name for v in point if v not in alpha.ambient()]
    if missing or unknown:
        raise InputError(
            "Point must assign exactly the coordinates %s"
            % ", ".join(v.name for v in alpha.variables())
        )
    fibers = specialize_fiber(locality_relations(source, alpha), point)
    verdict = segre_scaling(fibers, alpha.total)
    if config["format"] == "json":
        out.write(
            _dump(
                {
                    "relations": FiberRelationSerializer(fibers, many=True).data,
                    "segre": verdict.accepted,
                    "scaling": {
                        str(m): str(u) for m, u in sorted(verdict.scaling.items())
                    },
                    "reason": verdict.reason or None,
                }
            )
        )
    else:
        for fiber in fibers:
            a, b, u, i = fiber.relation.generators()
            flag = " (degenerate)" if fiber.degenerate else ""
            line = "%s*z_%d*z_%d = %s*z_%d*z_%d" % (fiber.lhs, a, b, fiber.rhs, u, i)
            out.write(line + flag + "\n")
        out.write("segre: %s\n" % ("true" if verdict.accepted else "false"))
        if verdict.reason:
            out.write("reason: %s\n" % verdict.reason)
    return EXIT_OK


def run(
    config: dict[str, Any], out: TextIO | None = None, err: TextIO | None = None
) -> int:
    """
    Execute a validated run configuration.

    :param config: Validated data of :class:`zastava.serializers.RunConfigSerializer`.
    :return: The exit status.
    """
    from django.test.utils import override_settings

    from zastava.quiver import NotQuiverType, QuiverSyntaxError

    out = out or sys.stdout
    err = err or sys.stderr
    try:
        source = _load_source(config)
        alpha = _align(source, config["dim"])
        logger.info("Running %s for %s", config["command"], alpha)
        with override_settings(ZASTAVA={**conf.snapshot(), "SEED": config["seed"]}):
            command = config["command"]
            if command == "verify":
                return _verify(config, alpha, source, out)
            if command == "present":
                return _present(config, alpha, source, out)
            if command == "fiber":
                return _fiber(config, alpha, source, out)
            out.write(
                export_presentation(
                    config["side"], config["format"], source, alpha, base=config["base"]
                )
            )
            return EXIT_OK
    except NotQuiverType as exc:
        err.write("error: %s\n" % exc)
        return EXIT_NOT_QUIVER
    except (InputError, QuiverSyntaxError) as exc:
        err.write("error: %s\n" % exc)
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    conf.configure()
    _configure_logging(args.verbose)

    from zastava.serializers import RunConfigSerializer

    options = {
        key: value
        for key, value in vars(args).items()
        if key != "verbose" and value is not None
    }
    serializer = RunConfigSerializer(data=options)
    if not serializer.is_valid():
        sys.stderr.write(_dump(serializer.errors))
        return EXIT_INPUT
    return run(serializer.validated_data)


if __name__ == "__main__":
    sys.exit(main())
