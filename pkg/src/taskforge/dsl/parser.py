"""Domain-definition parser: a strict STRIPS subset with typing and
negative preconditions.

Accepted grammar (symbols are lowercased on read):

    (define (domain NAME)
      (:requirements :strips :typing :negative-preconditions)   ; optional
      (:types child ... - parent ...)                           ; optional
      (:predicates (name ?v - class ...) ...)                   ; optional
      (:action name
         :parameters (?x - class ...)
         :precondition (and LIT ...)      ; LIT = (pred ?v ...) | (not (pred ?v ...))
         :effect (and LIT ...))
      ...)

Parsing never raises on bad input; it returns diagnostics with source spans.
Domains are normalized on construction (types, predicates, actions sorted by
name) so that parse(serialize(d)) == d structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DomainError
from ..model import (
    ROOT_CLASS,
    ActionSchema,
    ClassHierarchy,
    LiftedAtom,
    LiftedLiteral,
    PredicateSchema,
)
from .sexpr import Atom, ReadError, SList, read_forms

SUPPORTED_REQUIREMENTS = {":strips", ":typing", ":negative-preconditions"}

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}[{self.code}]: {self.message}"


@dataclass(frozen=True)
class DomainDefinition:
    """Parsed, validated, normalized domain."""

    name: str
    hierarchy: ClassHierarchy
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    # decl name -> (line, col); diagnostics only, excluded from equality
    spans: dict = field(default_factory=dict, compare=False, repr=False)

    def predicate(self, name: str) -> PredicateSchema:
        for p in self.predicates:
            if p.name == name:
                return p
        raise DomainError(f"unknown predicate: {name}")

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise DomainError(f"unknown action: {name}")


@dataclass
class ParseResult:
    domain: DomainDefinition | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.domain is not None and not any(d.severity == ERROR for d in self.diagnostics)

    def raise_on_error(self) -> DomainDefinition:
        if not self.ok:
            msgs = "; ".join(str(d) for d in self.diagnostics if d.severity == ERROR)
            raise DomainError(f"domain rejected: {msgs or 'no domain form found'}")
        assert self.domain is not None
        return self.domain


class _Collector:
    def __init__(self) -> None:
        self.items: list[Diagnostic] = []

    def error(self, code: str, message: str, node) -> None:
        self.items.append(Diagnostic(ERROR, code, message, node.line, node.col))

    def warning(self, code: str, message: str, node) -> None:
        self.items.append(Diagnostic(WARNING, code, message, node.line, node.col))

    @property
    def has_errors(self) -> bool:
        return any(d.severity == ERROR for d in self.items)


def _is_key(node, name: str) -> bool:
    return isinstance(node, Atom) and node.value.lower() == name


def _parse_typed_names(items, diags: _Collector, what: str) -> list[tuple[Atom, str]]:
    """Parse a ``name ... - type ...`` sequence into (name atom, type) pairs.

    Names without a trailing type group default to the root class / "object".
    """
    out: list[tuple[Atom, str]] = []
    pending: list[Atom] = []
    i = 0
    while i < len(items):
        node = items[i]
        if not isinstance(node, Atom):
            diags.error("syntax", f"expected a name in {what}", node)
            i += 1
            continue
        if node.value == "-":
            if i + 1 >= len(items) or not isinstance(items[i + 1], Atom):
                diags.error("syntax", f"dangling '-' in {what}", node)
                return out
            typ = items[i + 1].value.lower()
            out.extend((p, typ) for p in pending)
            pending = []
            i += 2
        else:
            pending.append(node)
            i += 1
    out.extend((p, ROOT_CLASS) for p in pending)
    return out


def _parse_literal_list(node, diags: _Collector, what: str) -> list[tuple[SList, bool]]:
    """Flatten a goal description into (predicate form, positive) pairs."""
    if isinstance(node, SList) and not node.items:
        return []  # () = empty conjunction
    if isinstance(node, SList) and node.items and _is_key(node.items[0], "and"):
        inner = node.items[1:]
    else:
        inner = (node,)
    out: list[tuple[SList, bool]] = []
    for lit in inner:
        if not isinstance(lit, SList) or not lit.items or not isinstance(lit.items[0], Atom):
            diags.error("syntax", f"malformed literal in {what}", lit if lit else node)
            continue
        head = lit.items[0].value.lower()
        if head == "not":
            if len(lit.items) != 2 or not isinstance(lit.items[1], SList):
                diags.error("syntax", f"malformed (not ...) in {what}", lit)
                continue
            out.append((lit.items[1], False))
        else:
            out.append((lit, True))
    return out


def parse_domain(text: str, kinds: dict[str, str] | None = None) -> ParseResult:
    """Parse a domain definition. ``kinds`` optionally assigns predicate kinds
    (they come from the spawn-rules sidecar, not from the domain text)."""
    diags = _Collector()
    try:
        forms = read_forms(text)
    except ReadError as e:
        code = "parens" if "(" in e.message or ")" in e.message else "lex"
        diags.items.append(Diagnostic(ERROR, code, e.message, e.line, e.col))
        return ParseResult(None, diags.items)

    if len(forms) != 1 or not isinstance(forms[0], SList):
        anchor = forms[1] if len(forms) > 1 else Atom("", 1, 1)
        diags.items.append(
            Diagnostic(ERROR, "syntax", "expected exactly one (define ...) form", anchor.line, anchor.col)
        )
        return ParseResult(None, diags.items)

    top = forms[0]
    items = top.items
    if (
        len(items) < 2
        or not _is_key(items[0], "define")
        or not isinstance(items[1], SList)
        or len(items[1].items) != 2
        or not _is_key(items[1].items[0], "domain")
        or not isinstance(items[1].items[1], Atom)
    ):
        diags.error("syntax", "expected (define (domain NAME) ...)", top)
        return ParseResult(None, diags.items)
    domain_name = items[1].items[1].value.lower()

    parent_map: dict[str, str] = {}
    spans: dict[str, tuple[int, int]] = {}
    pred_forms: list[SList] = []
    action_forms: list[SList] = []

    for section in items[2:]:
        if not isinstance(section, SList) or not section.items or not isinstance(section.items[0], Atom):
            diags.error("syntax", "expected a (:section ...) form", section)
            continue
        key = section.items[0].value.lower()
        if key == ":requirements":
            for req in section.items[1:]:
                if not isinstance(req, Atom) or req.value.lower() not in SUPPORTED_REQUIREMENTS:
                    name = req.value if isinstance(req, Atom) else "?"
                    diags.error("requirement", f"unsupported requirement {name}", req)
        elif key == ":types":
            for name_atom, parent in _parse_typed_names(list(section.items[1:]), diags, ":types"):
                cls = name_atom.value.lower()
                if cls == ROOT_CLASS:
                    diags.error("duplicate", "cannot redeclare the root class", name_atom)
                    continue
                if cls in parent_map:
                    diags.error("duplicate", f"duplicate type declaration: {cls}", name_atom)
                    continue
                parent_map[cls] = parent
                spans[f"type:{cls}"] = (name_atom.line, name_atom.col)
        elif key == ":predicates":
            pred_forms.extend(p for p in section.items[1:] if isinstance(p, SList))
            for p in section.items[1:]:
                if not isinstance(p, SList):
                    diags.error("syntax", "predicate declaration must be a list", p)
        elif key == ":action":
            action_forms.append(section)
        else:
            diags.error("syntax", f"unknown section {key}", section)

    # Implicit classes: parents referenced but never declared get the root parent.
    for parent in list(parent_map.values()):
        if parent != ROOT_CLASS and parent not in parent_map:
            parent_map[parent] = ROOT_CLASS

    try:
        hierarchy = ClassHierarchy.build(parent_map)
    except DomainError as e:
        diags.items.append(Diagnostic(ERROR, "hierarchy", str(e), top.line, top.col))
        return ParseResult(None, diags.items)

    predicates: dict[str, PredicateSchema] = {}
    for form in pred_forms:
        if not form.items or not isinstance(form.items[0], Atom):
            diags.error("syntax", "predicate declaration needs a name", form)
            continue
        pname = form.items[0].value.lower()
        if pname in predicates:
            diags.error("duplicate", f"duplicate predicate: {pname}", form.items[0])
            continue
        classes = []
        ok = True
        for var_atom, cls in _parse_typed_names(list(form.items[1:]), diags, f"predicate {pname}"):
            if not var_atom.value.startswith("?"):
                diags.error("syntax", f"predicate parameter {var_atom.value} must start with '?'", var_atom)
                ok = False
            if not hierarchy.has(cls):
                diags.error("unknown-class", f"unknown class {cls} in predicate {pname}", var_atom)
                ok = False
            classes.append(cls)
        if ok:
            kind = (kinds or {}).get(pname, "unary-state")
            predicates[pname] = PredicateSchema(pname, tuple(classes), kind)
            spans[f"predicate:{pname}"] = (form.line, form.col)

    actions: dict[str, ActionSchema] = {}
    for form in action_forms:
        schema = _parse_action(form, hierarchy, predicates, diags, spans)
        if schema is not None:
            if schema.name in actions:
                diags.error("duplicate", f"duplicate action: {schema.name}", form)
            else:
                actions[schema.name] = schema

    if diags.has_errors:
        return ParseResult(None, diags.items)

    domain = DomainDefinition(
        name=domain_name,
        hierarchy=hierarchy,
        predicates=tuple(sorted(predicates.values(), key=lambda p: p.name)),
        actions=tuple(sorted(actions.values(), key=lambda a: a.name)),
        spans=spans,
    )
    return ParseResult(domain, diags.items)


def _parse_action(
    form: SList,
    hierarchy: ClassHierarchy,
    predicates: dict[str, PredicateSchema],
    diags: _Collector,
    spans: dict,
) -> ActionSchema | None:
    if len(form.items) < 2 or not isinstance(form.items[1], Atom):
        diags.error("syntax", "action needs a name", form)
        return None
    aname = form.items[1].value.lower()
    spans[f"action:{aname}"] = (form.line, form.col)

    sections: dict[str, object] = {}
    i = 2
    while i < len(form.items):
        key_node = form.items[i]
        if not isinstance(key_node, Atom) or not key_node.value.startswith(":"):
            diags.error("syntax", f"expected :keyword in action {aname}", key_node)
            return None
        if i + 1 >= len(form.items):
            diags.error("syntax", f"missing value for {key_node.value} in action {aname}", key_node)
            return None
        key = key_node.value.lower()
        if key not in (":parameters", ":precondition", ":effect"):
            diags.error("syntax", f"unknown action key {key}", key_node)
            return None
        if key in sections:
            diags.error("duplicate", f"duplicate {key} in action {aname}", key_node)
            return None
        sections[key] = form.items[i + 1]
        i += 2

    params: list[tuple[str, str]] = []
    param_classes: dict[str, str] = {}
    params_node = sections.get(":parameters")
    if params_node is not None:
        if not isinstance(params_node, SList):
            diags.error("syntax", f"parameters of {aname} must be a list", params_node)
            return None
        for var_atom, cls in _parse_typed_names(list(params_node.items), diags, f"action {aname}"):
            var = var_atom.value.lower()
            if not var.startswith("?"):
                diags.error("syntax", f"parameter {var} must start with '?'", var_atom)
                continue
            if var in param_classes:
                diags.error("duplicate", f"duplicate parameter {var} in {aname}", var_atom)
                continue
            if not hierarchy.has(cls):
                diags.error("unknown-class", f"unknown class {cls} in action {aname}", var_atom)
                continue
            params.append((var, cls))
            param_classes[var] = cls

    def build_atoms(node, what: str) -> list[tuple[LiftedAtom, bool]] | None:
        if node is None:
            return []
        built: list[tuple[LiftedAtom, bool]] = []
        for lit_form, positive in _parse_literal_list(node, diags, f"{what} of {aname}"):
            head = lit_form.items[0]
            pname = head.value.lower()
            if pname not in predicates:
                diags.error("unknown-predicate", f"undeclared predicate {pname}", head)
                continue
            schema = predicates[pname]
            args = []
            well_formed = True
            for term in lit_form.items[1:]:
                if not isinstance(term, Atom) or not term.value.startswith("?"):
                    diags.error("syntax", f"only variables allowed in {what} of {aname}", term)
                    well_formed = False
                    continue
                var = term.value.lower()
                if var not in param_classes:
                    diags.error("unbound-var", f"variable {var} not in parameters of {aname}", term)
                    well_formed = False
                    continue
                args.append(var)
            if not well_formed:
                continue
            if len(args) != schema.arity:
                diags.error(
                    "arity",
                    f"{pname} expects {schema.arity} arguments, got {len(args)}",
                    head,
                )
                continue
            built.append((LiftedAtom(schema, tuple(args)), positive))
        return built

    pre = build_atoms(sections.get(":precondition"), "precondition")
    eff = build_atoms(sections.get(":effect"), "effect")
    if pre is None or eff is None or diags.has_errors:
        # Keep collecting other actions' diagnostics; this one is dropped at the end.
        pass

    preconditions = tuple(LiftedLiteral(a, pos) for a, pos in (pre or []))
    add_list = tuple(a for a, pos in (eff or []) if pos)
    delete_list = tuple(a for a, pos in (eff or []) if not pos)
    conflict = set(add_list) & set(delete_list)
    if conflict:
        names = ", ".join(sorted(a.schema.name for a in conflict))
        diags.error("effect-conflict", f"{aname}: {names} in both add and delete lists", form)

    return ActionSchema(aname, tuple(params), preconditions, add_list, delete_list)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _typed_list(pairs: list[tuple[str, str]]) -> str:
    return " ".join(f"{n} - {c}" for n, c in pairs)


def _literal_str(atom: LiftedAtom, positive: bool) -> str:
    body = f"({atom.schema.name}{''.join(' ' + a for a in atom.args)})"
    return body if positive else f"(not {body})"


def serialize_domain(domain: DomainDefinition) -> str:
    """Canonical text form; parse_domain(serialize_domain(d)) == d."""
    lines = [f"(define (domain {domain.name})"]
    lines.append("  (:requirements :strips :typing :negative-preconditions)")

    by_parent: dict[str, list[str]] = {}
    for cls in sorted(domain.hierarchy.classes):
        if cls == ROOT_CLASS:
            continue
        by_parent.setdefault(domain.hierarchy.parent.get(cls, ROOT_CLASS), []).append(cls)
    if by_parent:
        lines.append("  (:types")
        for parent in sorted(by_parent):
            lines.append(f"    {' '.join(sorted(by_parent[parent]))} - {parent}")
        lines.append("  )")

    if domain.predicates:
        lines.append("  (:predicates")
        for p in domain.predicates:
            args = _typed_list([(f"?a{i}", c) for i, c in enumerate(p.param_classes)])
            lines.append(f"    ({p.name}{' ' + args if args else ''})")
        lines.append("  )")

    for a in domain.actions:
        lines.append(f"  (:action {a.name}")
        lines.append(f"    :parameters ({_typed_list(list(a.params))})")
        pre = " ".join(_literal_str(l.atom, l.positive) for l in a.preconditions)
        lines.append(f"    :precondition (and{' ' + pre if pre else ''})")
        eff_parts = [_literal_str(at, True) for at in a.add_list]
        eff_parts += [_literal_str(at, False) for at in a.delete_list]
        eff = " ".join(eff_parts)
        lines.append(f"    :effect (and{' ' + eff if eff else ''})")
        lines.append("  )")

    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Semantic lint
# ---------------------------------------------------------------------------


def validate_domain(
    domain: DomainDefinition,
    weights=None,
    seed_predicates: tuple[str, ...] = ("free",),
) -> list[Diagnostic]:
    """Semantic checks beyond the grammar. Errors only arise from weight
    cross-references; everything else is a warning stream.

    ``seed_predicates`` names predicates the generator can seed into initial
    states (its initial vocabulary), used by the reachability heuristic.
    """
    diags: list[Diagnostic] = []

    def span(key: str) -> tuple[int, int]:
        return domain.spans.get(key, (0, 0))

    used = {a.schema.name for act in domain.actions for l in act.preconditions for a in [l.atom]}
    used |= {a.schema.name for act in domain.actions for a in act.add_list + act.delete_list}
    for p in domain.predicates:
        if p.name not in used:
            line, col = span(f"predicate:{p.name}")
            diags.append(Diagnostic(WARNING, "unused-predicate", f"predicate {p.name} is never used", line, col))

    achievable = {a.schema.name for act in domain.actions for a in act.add_list}
    achievable |= set(seed_predicates)
    for act in domain.actions:
        missing = sorted(
            {l.atom.schema.name for l in act.preconditions if l.positive} - achievable
        )
        if missing:
            line, col = span(f"action:{act.name}")
            diags.append(
                Diagnostic(
                    WARNING,
                    "unreachable-action",
                    f"action {act.name} requires {', '.join(missing)} which nothing can achieve",
                    line,
                    col,
                )
            )

    if weights is not None:
        action_names = {a.name for a in domain.actions}
        for name in sorted(weights.action_w):
            if name not in action_names:
                diags.append(Diagnostic(ERROR, "unknown-action", f"weight for unknown action {name}"))
        for prev, nxt in sorted(weights.pair_w):
            for name in (prev, nxt):
                if name not in action_names:
                    diags.append(
                        Diagnostic(ERROR, "unknown-action", f"pair weight references unknown action {name}")
                    )
        for cls in sorted(weights.entity_w):
            if not domain.hierarchy.has(cls):
                diags.append(Diagnostic(ERROR, "unknown-class", f"entity weight for unknown class {cls}"))
            elif cls not in domain.hierarchy.concrete:
                diags.append(
                    Diagnostic(
                        WARNING,
                        "abstract-entity-weight",
                        f"entity weight on non-concrete class {cls} has no effect",
                    )
                )
    return diags
