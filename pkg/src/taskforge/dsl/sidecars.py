"""Sidecar config files: sampling weights, shapes, spawn rules.

These ride alongside the domain file in a line-oriented key-value format so
the domain stays consumable by standard planners:

    weights:  action <name> <w> | pair <name> <name> <w>
              | entity <class> <w> | reuse_prob <p>
    shapes:   shape <class> box <dx> <dy> <dz> | shape <class> sphere <r>
    rules:    rule <predicate> <template>

``#`` starts a comment. Unspecified weights default to 1.0 (reuse_prob 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError, DomainError
from .parser import ERROR, Diagnostic, DomainDefinition

# Spatial templates understood by the physical validator; "attach" marks a
# binding predicate (holder pins the object), everything else is spatial.
SPATIAL_TEMPLATES = ("ontop", "inside", "leftof", "rightof", "infront", "behind", "near")
ATTACH_TEMPLATE = "attach"


@dataclass(frozen=True)
class SamplingWeights:
    """Generation biases: per action, per (predecessor, successor) pair, and
    per entity class, plus the probability of reusing an existing entity."""

    action_w: dict[str, float] = field(default_factory=dict)
    pair_w: dict[tuple[str, str], float] = field(default_factory=dict)
    entity_w: dict[str, float] = field(default_factory=dict)
    reuse_prob: float = 0.5

    def action_weight(self, name: str) -> float:
        return self.action_w.get(name, 1.0)

    def pair_weight(self, prev: str | None, name: str) -> float:
        if prev is None:
            return 1.0
        return self.pair_w.get((prev, name), 1.0)

    def entity_weight(self, cls: str) -> float:
        return self.entity_w.get(cls, 1.0)


@dataclass(frozen=True)
class Shape:
    """Upright box (half-dims derived from full extents) or sphere, meters."""

    kind: str  # "box" | "sphere"
    dims: tuple[float, ...]  # box: (dx, dy, dz); sphere: (r,)

    def half_extents(self) -> tuple[float, float, float]:
        if self.kind == "box":
            return (self.dims[0] / 2.0, self.dims[1] / 2.0, self.dims[2] / 2.0)
        r = self.dims[0]
        return (r, r, r)


@dataclass(frozen=True)
class ShapeModel:
    """Per-class shapes. Lookup walks the class chain so a shape declared on
    an ancestor covers its subclasses."""

    by_class: dict[str, Shape] = field(default_factory=dict)

    def lookup(self, domain: DomainDefinition, cls: str) -> Shape:
        for anc in domain.hierarchy.ancestors(cls):
            if anc in self.by_class:
                return self.by_class[anc]
        raise ConfigError(f"no shape defined for class {cls}")

    def covers(self, domain: DomainDefinition, cls: str) -> bool:
        try:
            self.lookup(domain, cls)
            return True
        except (ConfigError, DomainError):
            return False


@dataclass(frozen=True)
class SpawnRules:
    """Predicate name -> volume template. Predicates without a rule have no
    geometric meaning (kind "unary-state")."""

    templates: dict[str, str] = field(default_factory=dict)

    def template_for(self, pred_name: str) -> str | None:
        return self.templates.get(pred_name)

    def kinds(self) -> dict[str, str]:
        out = {}
        for pred, tpl in self.templates.items():
            out[pred] = "binding" if tpl == ATTACH_TEMPLATE else "spatial"
        return out


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _number(token: str, lineno: int, diags: list[Diagnostic], what: str) -> float | None:
    try:
        value = float(token)
    except ValueError:
        diags.append(Diagnostic(ERROR, "number", f"bad {what}: {token!r}", lineno, 1))
        return None
    if value < 0:
        diags.append(Diagnostic(ERROR, "number", f"{what} must be nonnegative", lineno, 1))
        return None
    return value


def parse_weights(
    text: str, domain: DomainDefinition
) -> tuple[SamplingWeights | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    action_w: dict[str, float] = {}
    pair_w: dict[tuple[str, str], float] = {}
    entity_w: dict[str, float] = {}
    reuse_prob = 0.5
    action_names = {a.name for a in domain.actions}

    for lineno, parts in _lines(text):
        key = parts[0]
        if key == "action" and len(parts) == 3:
            if parts[1] not in action_names:
                diags.append(Diagnostic(ERROR, "unknown-action", f"unknown action {parts[1]}", lineno, 1))
                continue
            w = _number(parts[2], lineno, diags, "action weight")
            if w is not None:
                action_w[parts[1]] = w
        elif key == "pair" and len(parts) == 4:
            bad = [p for p in parts[1:3] if p not in action_names]
            if bad:
                diags.append(Diagnostic(ERROR, "unknown-action", f"unknown action {bad[0]}", lineno, 1))
                continue
            w = _number(parts[3], lineno, diags, "pair weight")
            if w is not None:
                pair_w[(parts[1], parts[2])] = w
        elif key == "entity" and len(parts) == 3:
            if not domain.hierarchy.has(parts[1]):
                diags.append(Diagnostic(ERROR, "unknown-class", f"unknown class {parts[1]}", lineno, 1))
                continue
            w = _number(parts[2], lineno, diags, "entity weight")
            if w is not None:
                entity_w[parts[1]] = w
        elif key == "reuse_prob" and len(parts) == 2:
            p = _number(parts[1], lineno, diags, "reuse_prob")
            if p is None:
                continue
            if p > 1.0:
                diags.append(Diagnostic(ERROR, "number", "reuse_prob must be in [0, 1]", lineno, 1))
                continue
            reuse_prob = p
        else:
            diags.append(Diagnostic(ERROR, "syntax", f"unrecognized weights line: {' '.join(parts)}", lineno, 1))

    if domain.actions and all(action_w.get(a.name, 1.0) <= 0.0 for a in domain.actions):
        diags.append(Diagnostic(ERROR, "degenerate", "no action has positive weight", 0, 0))

    if any(d.severity == ERROR for d in diags):
        return None, diags
    return SamplingWeights(action_w, pair_w, entity_w, reuse_prob), diags


def parse_shapes(
    text: str, domain: DomainDefinition
) -> tuple[ShapeModel | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    by_class: dict[str, Shape] = {}
    for lineno, parts in _lines(text):
        if parts[0] != "shape" or len(parts) < 4:
            diags.append(Diagnostic(ERROR, "syntax", f"unrecognized shapes line: {' '.join(parts)}", lineno, 1))
            continue
        cls, kind = parts[1], parts[2]
        if not domain.hierarchy.has(cls):
            diags.append(Diagnostic(ERROR, "unknown-class", f"unknown class {cls}", lineno, 1))
            continue
        if cls in by_class:
            diags.append(Diagnostic(ERROR, "duplicate", f"duplicate shape for {cls}", lineno, 1))
            continue
        want = {"box": 3, "sphere": 1}.get(kind)
        if want is None or len(parts) != 3 + want:
            diags.append(Diagnostic(ERROR, "syntax", f"bad shape declaration for {cls}", lineno, 1))
            continue
        dims = []
        for tok in parts[3:]:
            v = _number(tok, lineno, diags, "shape dimension")
            if v is None or v <= 0:
                if v is not None:
                    diags.append(Diagnostic(ERROR, "number", "shape dimensions must be positive", lineno, 1))
                dims = None
                break
            dims.append(v)
        if dims is not None:
            by_class[cls] = Shape(kind, tuple(dims))
    if any(d.severity == ERROR for d in diags):
        return None, diags
    return ShapeModel(by_class), diags


def parse_rules(
    text: str, domain: DomainDefinition
) -> tuple[SpawnRules | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    templates: dict[str, str] = {}
    pred_names = {p.name: p for p in domain.predicates}
    known = set(SPATIAL_TEMPLATES) | {ATTACH_TEMPLATE}
    for lineno, parts in _lines(text):
        if parts[0] != "rule" or len(parts) != 3:
            diags.append(Diagnostic(ERROR, "syntax", f"unrecognized rules line: {' '.join(parts)}", lineno, 1))
            continue
        pred, tpl = parts[1], parts[2]
        if pred not in pred_names:
            diags.append(Diagnostic(ERROR, "unknown-predicate", f"unknown predicate {pred}", lineno, 1))
            continue
        if tpl not in known:
            diags.append(Diagnostic(ERROR, "unknown-template", f"unknown volume template {tpl}", lineno, 1))
            continue
        if pred_names[pred].arity < 2:
            diags.append(
                Diagnostic(ERROR, "arity", f"template {tpl} needs a binary predicate, {pred} is unary", lineno, 1)
            )
            continue
        if pred in templates:
            diags.append(Diagnostic(ERROR, "duplicate", f"duplicate rule for {pred}", lineno, 1))
            continue
        templates[pred] = tpl
    if any(d.severity == ERROR for d in diags):
        return None, diags
    return SpawnRules(templates), diags
