"""Domain-definition DSL: parser, serializer, sidecar configs, bundle loader."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from .parser import (
    ERROR,
    WARNING,
    Diagnostic,
    DomainDefinition,
    ParseResult,
    parse_domain,
    serialize_domain,
    validate_domain,
)
from .sidecars import (
    SamplingWeights,
    Shape,
    ShapeModel,
    SpawnRules,
    parse_rules,
    parse_shapes,
    parse_weights,
)

__all__ = [
    "Diagnostic",
    "DomainDefinition",
    "ParseResult",
    "parse_domain",
    "serialize_domain",
    "validate_domain",
    "SamplingWeights",
    "Shape",
    "ShapeModel",
    "SpawnRules",
    "parse_weights",
    "parse_shapes",
    "parse_rules",
    "Bundle",
    "load_bundle",
    "domain_hash",
    "ERROR",
    "WARNING",
]


def domain_hash(domain: DomainDefinition) -> str:
    """Stable identity of a domain: hash of its canonical serialization."""
    return hashlib.sha256(serialize_domain(domain).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Bundle:
    """A domain plus its sidecars, parsed and cross-validated."""

    domain: DomainDefinition
    weights: SamplingWeights
    shapes: ShapeModel
    rules: SpawnRules
    domain_text: str
    hash: str


def _fail(path: Path, diags) -> ConfigError:
    msgs = "; ".join(str(d) for d in diags if d.severity == ERROR)
    return ConfigError(f"{path}: {msgs or 'parse failed'}")


def load_bundle(
    domain_path: str | Path,
    weights_path: str | Path | None = None,
    shapes_path: str | Path | None = None,
    rules_path: str | Path | None = None,
) -> Bundle:
    """Load and cross-validate a domain and its sidecar files.

    Missing sidecars fall back to all-default weights, an empty shape table,
    and no spawn rules. Raises ConfigError on the first file that fails.
    """
    domain_path = Path(domain_path)
    text = domain_path.read_text(encoding="utf-8")
    result = parse_domain(text)
    if not result.ok:
        raise _fail(domain_path, result.diagnostics)
    dom = result.domain

    rules = SpawnRules()
    if rules_path is not None:
        rules_text = Path(rules_path).read_text(encoding="utf-8")
        parsed_rules, diags = parse_rules(rules_text, dom)
        if parsed_rules is None:
            raise _fail(Path(rules_path), diags)
        rules = parsed_rules
        # Re-parse with predicate kinds now that the rules are known.
        dom = parse_domain(text, kinds=rules.kinds()).raise_on_error()

    weights = SamplingWeights()
    if weights_path is not None:
        wtext = Path(weights_path).read_text(encoding="utf-8")
        parsed_w, diags = parse_weights(wtext, dom)
        if parsed_w is None:
            raise _fail(Path(weights_path), diags)
        weights = parsed_w

    shapes = ShapeModel()
    if shapes_path is not None:
        stext = Path(shapes_path).read_text(encoding="utf-8")
        parsed_s, diags = parse_shapes(stext, dom)
        if parsed_s is None:
            raise _fail(Path(shapes_path), diags)
        shapes = parsed_s

    return Bundle(dom, weights, shapes, rules, text, domain_hash(dom))
