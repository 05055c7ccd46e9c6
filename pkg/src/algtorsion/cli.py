"""Batch front end: parse a model document, run one analysis, emit a
deterministic report.

Exit codes: 0 success, 2 validation or schema failure, 3 no result at the
declared truncation (solver refusal), 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import documents
from .algebra import (
    AlgebraElement,
    Truncation,
    bracket,
    verify_square_zero,
)
from .cylinders import (
    CoefficientConfig,
    assemble_sft_differential,
    automatic_transversality_check,
    count_index1_positive_only,
    enumerate_cylinders,
)
from .ech import ech_lower_bound_certificate, survival_report
from .errors import AlgTorsionError, InvariantBreach, ValidationError
from .orbits import generate_orbits
from .primitives import solve_primitive
from .surface import enumerate_flow_lines, morse_homology
from .torsion import (
    UNTWISTED,
    PlanarTorsionDescriptor,
    default_descriptor_truncation,
    descriptor_generators,
    lower_bound_certificate,
    planar_torsion_differential,
    torsion_upper_bound,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_REFUSAL = 3
EXIT_BREACH = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="algtorsion",
        description="Torsion-order and ECH survival analyses on model documents.",
    )
    parser.add_argument(
        "--input",
        required=True,
        help="path to a JSON document, or bundled:<name> for the shipped corpus",
    )
    parser.add_argument(
        "--command",
        required=True,
        choices=["validate", "torsion", "ech-f", "enumerate", "morse"],
    )
    parser.add_argument("--action-bound", help="override the truncation action bound")
    parser.add_argument("--hbar-bound", type=int, help="override the hbar bound")
    parser.add_argument("--cover-max", type=int, help="override the cover bound")
    parser.add_argument(
        "--omega", help="comma separated rationals overriding the omega functional"
    )
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--seed", type=int, default=0, help="seed for property sampling")
    parser.add_argument(
        "--report", help="previously emitted JSON report whose witnesses to replay"
    )
    return parser


def load(args):
    if args.input.startswith("bundled:"):
        doc, raw = documents.load_bundled(args.input[len("bundled:"):])
    else:
        doc, raw = documents.load_document(args.input)
    truncation = doc.truncation
    overrides = {}
    if args.action_bound is not None:
        overrides["action_bound"] = documents.parse_fraction(args.action_bound, "--action-bound")
    if args.hbar_bound is not None:
        overrides["hbar_bound"] = args.hbar_bound
    if args.cover_max is not None:
        overrides["cover_max"] = args.cover_max
    if overrides:
        truncation = Truncation(
            action_bound=overrides.get("action_bound", truncation.action_bound),
            hbar_bound=overrides.get("hbar_bound", truncation.hbar_bound),
            cover_max=overrides.get("cover_max", truncation.cover_max),
            exponent_box=truncation.exponent_box,
        )
        doc = documents.Document(doc.kind, doc.payload, truncation, doc.coefficients, doc.raw)
    if args.omega is not None:
        omega = tuple(
            documents.parse_fraction(v.strip(), "--omega") for v in args.omega.split(",")
        )
        coeffs = documents.Coefficients(doc.coefficients.mode, omega, doc.coefficients.rank)
        if doc.kind == "planar_torsion":
            payload = PlanarTorsionDescriptor(
                m=doc.payload.m,
                n=doc.payload.n,
                r=doc.payload.r,
                lattice_rank=doc.payload.lattice_rank,
                page_class=doc.payload.page_class,
                torus_classes=doc.payload.torus_classes,
                omega=omega,
            )
        else:
            payload = doc.payload
        doc = documents.Document(doc.kind, payload, doc.truncation, coeffs, doc.raw)
    return doc, raw


def surface_pipeline(doc):
    """Orbits, cylinders and the assembled differential of a surface model.

    Twisted runs read the crossing lines' h2 classes: the omega functional
    collapses them to a rank-one exponent lattice, fully twisted keeps the
    declared rank.  Untwisted runs drop all classes.
    """
    ds = doc.payload
    tr = doc.truncation
    coeffs = doc.coefficients
    orbits = generate_orbits(ds, tr.cover_max)

    assignment = None
    rank = 0
    if coeffs.mode == "twisted" and coeffs.omega:
        rank = 1
        assignment = {}
        for line in ds.crossing_flow_lines:
            value = sum(
                (a * b for a, b in zip(coeffs.omega, line.h2_class)), 0
            )
            if getattr(value, "denominator", 1) != 1:
                raise ValidationError(
                    f"omega is not integral on the class of {line.id}; rescale it"
                )
            assignment[line.id] = (int(value),)
    elif coeffs.mode == "fully_twisted" and coeffs.rank:
        rank = coeffs.rank
        assignment = {
            line.id: tuple(line.h2_class) or (0,) * rank
            for line in ds.crossing_flow_lines
        }

    cylinders = enumerate_cylinders(ds, orbits, tr.cover_max, assignment)
    operator = assemble_sft_differential(
        ds, orbits, cylinders, CoefficientConfig(rank=rank)
    )
    generators = [o.generator() for o in orbits]
    return ds, orbits, cylinders, operator, generators


def derivable_planar_descriptors(ds):
    """Planar torsion orders readable off the surface combinatorics.

    Any genus-zero component of the cut surface is the page of a candidate
    planar piece of order (#boundary circles - 1), provided the summed open
    book is not symmetric (exactly two components with pages of equal
    type).  Twisting data is not derivable, so this is untwisted only.
    """
    comps = [(c.genus, len(c.boundary_circles)) for c in ds.plus.components]
    comps += [(c.genus, len(c.boundary_circles)) for c in ds.minus.components]
    if len(comps) == 2 and comps[0] == comps[1]:
        return []
    orders = sorted(
        circles - 1 for genus, circles in comps if genus == 0
    )
    return [PlanarTorsionDescriptor(m=0, n=n + 1, r=0) for n in orders]


def run_torsion(doc, seed):
    tr = doc.truncation
    results = {"kind": doc.kind}
    if doc.kind == "planar_torsion":
        desc = doc.payload
        operator, f = planar_torsion_differential(desc, doc.coefficients.mode)
        gens = list(descriptor_generators(desc).values())
        sq = verify_square_zero(operator, gens, tr.action_bound, tr.hbar_bound)
        if not sq.ok:
            raise InvariantBreach(f"descriptor differential does not square to zero: {sq.residual!r}")
        upper = torsion_upper_bound(operator, gens, tr)
        results["descriptor"] = {"m": desc.m, "n": desc.n, "r": desc.r, "order": desc.order}
        results["distinguished_monomial"] = documents.element_to_json(f)
        results["d_of_monomial"] = documents.element_to_json(operator.apply(f))
        results["order_upper"] = _upper_json(upper)
        results["order_lower"] = None
        if upper is None:
            probe = solve_primitive(
                operator, AlgebraElement.hbar(min(1, tr.hbar_bound), operator.rank), gens, tr
            )
            if probe.box_limited:
                results["diagnostics"] = [
                    "no primitive inside the declared exponent box "
                    f"+-{tr.exponent_box}; a solution outside it is not excluded"
                ]
        status = "ok" if upper else "refused"
        return results, status

    ds, orbits, cylinders, operator, gens = surface_pipeline(doc)
    sq = verify_square_zero(operator, gens, tr.action_bound, tr.hbar_bound)
    if not sq.ok:
        raise InvariantBreach(f"assembled differential does not square to zero on {sq.monomial!r}")
    upper_model = torsion_upper_bound(operator, gens, tr)

    upper_desc = None
    desc_order = None
    if doc.coefficients.mode == UNTWISTED:
        for desc in derivable_planar_descriptors(ds):
            dd, ff = planar_torsion_differential(desc)
            dtr = default_descriptor_truncation(desc)
            candidate = torsion_upper_bound(dd, list(descriptor_generators(desc).values()), dtr)
            if candidate and (upper_desc is None or candidate.order < upper_desc.order):
                upper_desc = candidate
                desc_order = desc.order

    best = None
    source = ""
    for candidate, name in ((upper_model, "model"), (upper_desc, "planar_descriptor")):
        if candidate and (best is None or candidate.order < best.order):
            best, source = candidate, name

    lower = None
    start = best.order - 1 if best else tr.hbar_bound
    for k in range(start, -1, -1):
        cert = lower_bound_certificate(ds, orbits, cylinders, operator, gens, k, tr)
        if cert.granted:
            lower = cert
            break
        if lower is None:
            lower = cert  # remember the outermost refusal

    results["order_upper"] = _upper_json(best, source)
    if desc_order is not None:
        results["derived_planar_order"] = desc_order
    results["order_lower"] = _lower_json(lower)
    results["property_samples"] = _sample_properties(operator, gens, tr, seed)
    status = "ok" if (best or (lower and lower.granted)) else "refused"
    return results, status


def _upper_json(upper, source=""):
    if upper is None:
        return None
    data = {
        "order": upper.order,
        "witness": documents.element_to_json(upper.witness),
        "witness_text": documents.element_to_text(upper.witness),
    }
    if source:
        data["source"] = source
    return data


def _lower_json(cert):
    if cert is None:
        return None
    return {
        "granted": cert.granted,
        "order": cert.order,
        "refusal_reason": cert.refusal_reason,
        "gamma_rank": cert.gamma_rank,
        "gamma_rank_expected": cert.gamma_rank_expected,
        "nullspace_is_ones": cert.nullspace_is_ones,
        "solver_cross_check": cert.solver_cross_check,
        "counts": _counts_json(cert.count_rows),
        "notes": list(cert.notes),
    }


def _counts_json(table):
    rows = []
    for (g, r), entries in sorted(table.items()):
        for key, data in sorted(entries.items()):
            rows.append(
                {
                    "genus": g,
                    "positive_ends": r,
                    "orbits": list(key),
                    "by_cover": {str(n): v for n, v in data["by_cover"].items()},
                    "total": data["total"],
                }
            )
    return rows


def _sample_properties(operator, gens, tr, seed, samples=20):
    """Randomized spot checks of the algebra invariants on this model."""
    rng = random.Random(seed)
    checked = 0
    for _ in range(samples):
        word1 = tuple(rng.sample(gens, min(2, len(gens))))
        word2 = tuple(rng.sample(gens, min(2, len(gens))))
        x = AlgebraElement.from_generators(word1, rank=operator.rank)
        y = AlgebraElement.from_generators(word2, rank=operator.rank)
        if x.is_zero() or y.is_zero():
            continue
        parity = x.parity()
        lhs = operator.apply(bracket(operator, x, y, tr.hbar_bound), tr.hbar_bound)
        rhs = -bracket(operator, operator.apply(x, tr.hbar_bound), y, tr.hbar_bound) - bracket(
            operator, x, operator.apply(y, tr.hbar_bound), tr.hbar_bound
        ).scale((-1) ** parity)
        if lhs != rhs:
            raise InvariantBreach("bracket derivation identity failed on a sample")
        checked += 1
    return {"bracket_derivation_identity": checked}


def run_morse(doc):
    if doc.kind != "surface":
        raise ValidationError("morse requires a surface document")
    b0, b1, b2 = morse_homology(doc.payload)
    return {
        "betti": [b0, b1, b2],
        "euler_characteristic": doc.payload.euler_characteristic(),
        "genus": doc.payload.genus(),
    }, "ok"


def run_enumerate(doc):
    if doc.kind != "surface":
        raise ValidationError("enumerate requires a surface document")
    ds, orbits, cylinders, operator, _ = surface_pipeline(doc)
    counts = count_index1_positive_only(
        ds, orbits, cylinders, max_g_plus_r=2, action_bound=doc.truncation.action_bound
    )
    return {
        "orbits": [
            {
                "critical_point": o.critical_point,
                "cover": o.cover,
                "cz": o.cz_index,
                "parity": o.parity,
                "kind": o.orbit_kind,
                "action": documents.format_fraction(o.action),
            }
            for o in orbits
        ],
        "cylinders": [
            {
                "flow_line": str(c.flow_line),
                "cover": c.cover,
                "type": str(c.cyl_type),
                "index": c.fredholm_index,
                "sign": c.sign,
                "positive_ends": [o.name for o in c.positive_ends],
                "negative_ends": [o.name for o in c.negative_ends],
                "automatic_transversality": automatic_transversality_check(c),
            }
            for c in cylinders
        ],
        "flow_lines": [
            {
                "id": r.id,
                "from": r.start,
                "to": r.end,
                "sign": r.sign,
                "crosses_gamma": r.crosses_gamma,
                "endpoint_indices": [r.start_index, r.end_index],
            }
            for r in enumerate_flow_lines(ds)
        ],
        "differential": repr(operator),
        "counts": _counts_json(counts),
    }, "ok"


def run_ech(doc):
    if doc.kind != "ech_complex":
        raise ValidationError("ech-f requires an ech_complex document")
    cx = doc.payload
    bound = doc.truncation.action_bound
    report = survival_report(cx, bound)
    simple = survival_report(cx, bound, simple_only=True)
    results = {
        "f": _inf_json(report.f),
        "f_sufficient": _inf_json(report.f_sufficient),
        "f_simple": _inf_json(simple.f),
        "agree": report.agree,
        "generators": report.generators,
    }
    if report.f != report.f_sufficient:
        # Higher-page death through correction chains that the one-shot
        # solve cannot see; reported, never silently resolved.
        results["diagnostics"] = [
            "spectral-sequence survival and the sufficient-condition solve "
            f"disagree: f = {_inf_json(report.f)}, "
            f"sufficient <= {_inf_json(report.f_sufficient)}"
        ]
    # A vanishing-count certificate is informative for f >= 1 only.
    k = 1 if report.f == float("inf") else int(report.f)
    if k >= 1:
        cert = ech_lower_bound_certificate(cx, bound, k)
        results["lower_bound"] = {
            "k": cert.k,
            "granted": cert.granted,
            "refusal_reason": cert.refusal_reason,
            "f_computed": _inf_json(cert.f_computed),
        }
    return results, "ok"


def _inf_json(value):
    return "infinity" if value == float("inf") else int(value)


def run_validate(doc, raw, seed, report_path):
    results = {"kind": doc.kind, "valid": True}
    if doc.kind == "surface":
        _, status = run_morse(doc)
        _, _, _, operator, gens = surface_pipeline(doc)
        sq = verify_square_zero(
            operator, gens, doc.truncation.action_bound, doc.truncation.hbar_bound
        )
        if not sq.ok:
            raise InvariantBreach("assembled differential does not square to zero")
        results["square_zero"] = True
        results["property_samples"] = _sample_properties(operator, gens, doc.truncation, seed)
    if report_path:
        with open(report_path, encoding="utf-8") as fh:
            report = json.load(fh)
        results["witness_replayed"] = replay_witnesses(doc, report)
    return results, "ok"


def replay_witnesses(doc, report):
    """Re-verify every witness embedded in a previously emitted report."""
    replayed = 0
    upper = (report.get("results") or {}).get("order_upper")
    if not upper:
        return replayed
    tr = doc.truncation
    if doc.kind == "surface" and upper.get("source") == "model":
        _, _, _, operator, gens = surface_pipeline(doc)
    elif doc.kind == "surface" and upper.get("source") == "planar_descriptor":
        order = upper["order"]
        match = next(
            (d for d in derivable_planar_descriptors(doc.payload) if d.order == order),
            None,
        )
        if match is None:
            raise InvariantBreach("report names a planar order this surface cannot derive")
        operator, _ = planar_torsion_differential(match)
        gens = list(descriptor_generators(match).values())
        tr = default_descriptor_truncation(match)
    elif doc.kind == "planar_torsion":
        operator, _ = planar_torsion_differential(doc.payload, doc.coefficients.mode)
        gens = list(descriptor_generators(doc.payload).values())
    else:
        return replayed
    table = {g.name: g for g in gens}
    witness = documents.element_from_json(upper["witness"], table, operator.rank)
    k = upper["order"]
    expected = AlgebraElement.hbar(k, operator.rank) if k else AlgebraElement.one(operator.rank)
    if operator.apply(witness, tr.hbar_bound) != expected:
        raise InvariantBreach("stored witness failed replay")
    return replayed + 1


def render_text(report):
    lines = [f"algtorsion {report['command']} :: {report['status']}"]
    lines.append(f"document sha256  {report['document_sha256'][:16]}...")
    results = report.get("results", {})
    for key in sorted(results):
        value = results[key]
        if key == "order_upper" and value:
            lines.append(
                f"upper bound      k = {value['order']}"
                + (f"  (via {value['source']})" if value.get("source") else "")
            )
            lines.append(f"  witness        {value['witness_text']}")
        elif key == "order_lower" and value:
            verdict = "granted" if value["granted"] else f"refused: {value['refusal_reason']}"
            lines.append(f"lower bound      K = {value['order']}  {verdict}")
            for row in value["counts"]:
                lines.append(
                    f"  count (g={row['genus']}, r={row['positive_ends']}) "
                    f"{row['orbits']}: {row['total']}"
                )
            for note in value["notes"]:
                lines.append(f"  note           {note}")
        elif key == "betti":
            lines.append(f"betti numbers    {tuple(value)}")
        else:
            lines.append(f"{key:<16} {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc, raw = load(args)
        if args.command == "torsion":
            results, status = run_torsion(doc, args.seed)
        elif args.command == "morse":
            results, status = run_morse(doc)
        elif args.command == "enumerate":
            results, status = run_enumerate(doc)
        elif args.command == "ech-f":
            results, status = run_ech(doc)
        else:
            results, status = run_validate(doc, raw, args.seed, args.report)
    except ValidationError as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantBreach as err:
        print(f"invariant breach: {err}", file=sys.stderr)
        return EXIT_BREACH
    except AlgTorsionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as err:
        print(f"cannot read input: {err}", file=sys.stderr)
        return EXIT_VALIDATION

    report = {
        "command": args.command,
        "status": status,
        "document_sha256": documents.document_digest(raw),
        "truncation": {
            "action_bound": documents.format_fraction(doc.truncation.action_bound),
            "hbar_bound": doc.truncation.hbar_bound,
            "cover_max": doc.truncation.cover_max,
            "exponent_box": doc.truncation.exponent_box,
        },
        "coefficients": {
            "mode": doc.coefficients.mode,
            "omega": [documents.format_fraction(v) for v in doc.coefficients.omega],
        },
        "results": results,
    }
    if args.format == "json":
        sys.stdout.write(documents.dumps_report(report))
    else:
        sys.stdout.write(render_text(report))
    return EXIT_OK if status == "ok" else EXIT_REFUSAL


if __name__ == "__main__":
    sys.exit(main())
