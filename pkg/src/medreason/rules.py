"""Horn-rule language: parser, builtins, fact store, forward chaining, traces.

Rule files are UTF-8, one rule per line (or several separated by `;`), with
`#` comments. Grammar:

    rule := atom ( ("^"|"∧") atom )* "->" atom ( ("^"|"∧") atom )*
    atom := NAME "(" term ("," term)* ")"
    term := "?"NAME | "true" | "false" | NUMBER | STRING [ "^^" NAME ]

Predicates prefixed `swrlb:` are builtins, evaluated over bound values
instead of matched against the store, and may appear only in bodies.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator

from .errors import (
    BuiltinError,
    ExplanationError,
    RuleSafetyError,
    RuleSyntaxError,
)

if TYPE_CHECKING:
    from .kb import SymptomVocabulary
    from .patients import PatientRecord

log = logging.getLogger(__name__)

BUILTIN_PREFIX = "swrlb:"
TYPE_PREDICATE = "@type"  # marker for unary (category) assertions in supports

Value = bool | int | float | str


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"?{self.name}"


Term = Var | bool | int | float | str


@dataclass(frozen=True)
class Atom:
    predicate: str
    terms: tuple[Term, ...]

    @property
    def is_builtin(self) -> bool:
        return self.predicate.startswith(BUILTIN_PREFIX)

    def variables(self) -> set[str]:
        return {t.name for t in self.terms if isinstance(t, Var)}

    def __str__(self):
        return f"{self.predicate}({', '.join(format_term(t) for t in self.terms)})"


@dataclass(frozen=True)
class Rule:
    id: str
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]

    def __str__(self):
        body = " ^ ".join(str(a) for a in self.body)
        head = " ^ ".join(str(a) for a in self.head)
        return f"{body} -> {head}"


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    return format_value(term)


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return f'"{value}"'


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_SPEC = [
    ("ARROW", r"->"),
    ("TYPEOP", r"\^\^"),
    ("AND", r"[\^∧]"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("SEMI", r";"),
    ("NUMBER", r"-?\d+(?:\.\d+)?"),
    ("STRING", r'"[^"\n]*"'),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z_][A-Za-z0-9_]*)?"),
    ("VAR", r"\?[A-Za-z_][A-Za-z0-9_]*"),
    ("SKIP", r"[ \t\r]+"),
    ("COMMENT", r"#[^\n]*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{v})" for k, v in _TOKEN_SPEC))

_ID_DIRECTIVE = re.compile(r"^#\s*@id:\s*(\S+)\s*$")
_INT_RE = re.compile(r"-?\d+$")
_FLOAT_RE = re.compile(r"-?\d+(\.\d+)?([eE][-+]?\d+)?$|-?\.\d+([eE][-+]?\d+)?$")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize_line(line: str, lineno: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise RuleSyntaxError(
                f"unexpected character {line[pos]!r}", lineno, pos + 1, line[pos])
        kind = m.lastgroup
        if kind == "COMMENT":
            break
        if kind != "SKIP":
            tokens.append(_Token(kind, m.group(), lineno, m.start() + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], lineno: int, line_len: int):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.line_len = line_len

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str) -> RuleSyntaxError:
        tok = self.peek()
        if tok is None:
            return RuleSyntaxError(message, self.lineno, self.line_len + 1)
        return RuleSyntaxError(message, tok.line, tok.column, tok.text)

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(f"expected {kind}")
        self.pos += 1
        return tok

    def accept(self, kind: str) -> _Token | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.pos += 1
            return tok
        return None

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a term")
        if tok.kind == "VAR":
            self.pos += 1
            return Var(tok.text[1:])
        if tok.kind == "NUMBER":
            self.pos += 1
            return _parse_number(tok.text)
        if tok.kind == "STRING":
            self.pos += 1
            content = tok.text[1:-1]
            if self.accept("TYPEOP"):
                self.expect("NAME")  # datatype name is recorded nowhere; value rules
                return _coerce_literal(content)
            return content
        if tok.kind == "NAME":
            if tok.text == "true":
                self.pos += 1
                return True
            if tok.text == "false":
                self.pos += 1
                return False
            raise self.error(f"bare name {tok.text!r} is not a term (quote it?)")
        raise self.error(f"expected a term, found {tok.text!r}")

    def parse_atom(self) -> Atom:
        name = self.expect("NAME")
        self.expect("LPAREN")
        terms = [self.parse_term()]
        while self.accept("COMMA"):
            terms.append(self.parse_term())
        self.expect("RPAREN")
        atom = Atom(name.text, tuple(terms))
        self._check_atom(atom, name)
        return atom

    def _check_atom(self, atom: Atom, tok: _Token) -> None:
        if atom.is_builtin:
            local = atom.predicate[len(BUILTIN_PREFIX):]
            if local not in BUILTINS:
                raise BuiltinError(
                    f"unknown builtin {atom.predicate!r} at line {tok.line}")
            if len(atom.terms) != 2:
                raise BuiltinError(
                    f"{atom.predicate} expects 2 arguments, got {len(atom.terms)}"
                    f" at line {tok.line}")
        elif len(atom.terms) > 2:
            raise RuleSyntaxError(
                f"{atom.predicate} takes at most 2 terms",
                tok.line, tok.column, tok.text)

    def parse_rule(self) -> tuple[tuple[Atom, ...], tuple[Atom, ...]]:
        body = [self.parse_atom()]
        while self.accept("AND"):
            body.append(self.parse_atom())
        self.expect("ARROW")
        head_start = self.peek()
        head = [self.parse_atom()]
        while self.accept("AND"):
            head.append(self.parse_atom())
        for atom in head:
            if atom.is_builtin:
                raise RuleSyntaxError(
                    f"builtin {atom.predicate} not allowed in rule head",
                    head_start.line, head_start.column, atom.predicate)
        return tuple(body), tuple(head)


def _parse_number(text: str) -> int | float:
    return int(text) if _INT_RE.match(text) else float(text)


def _coerce_literal(content: str) -> Value:
    """Typed string literal: numbers compare numerically, so parse them."""
    if _INT_RE.match(content):
        return int(content)
    if _FLOAT_RE.match(content):
        return float(content)
    if content == "true":
        return True
    if content == "false":
        return False
    return content


def _check_safety(rule_id: str, body: tuple[Atom, ...], head: tuple[Atom, ...]) -> None:
    bound = set()
    for atom in body:
        if not atom.is_builtin:
            bound |= atom.variables()
    for atom in head:
        for name in sorted(atom.variables() - bound):
            raise RuleSafetyError(
                f"rule {rule_id}: head variable ?{name} is not bound by any"
                " non-builtin body atom")
    for atom in body:
        if atom.is_builtin:
            for name in sorted(atom.variables() - bound):
                raise RuleSafetyError(
                    f"rule {rule_id}: builtin argument ?{name} is not bound by"
                    " any non-builtin body atom")


def parse_rules(source: str) -> list[Rule]:
    """Parse rule text into Rules with ids rule_0001... in source order.

    A pure comment line `# @id: <name>` overrides the next rule's id.
    """
    rules: list[Rule] = []
    pending_id: str | None = None
    counter = 0
    for lineno, raw in enumerate(source.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = _ID_DIRECTIVE.match(stripped)
            if m:
                pending_id = m.group(1)
            continue
        tokens = _tokenize_line(raw, lineno)
        if not tokens:
            continue
        # `;` separates rules within a line; a trailing `;` is allowed
        groups: list[list[_Token]] = [[]]
        for tok in tokens:
            if tok.kind == "SEMI":
                groups.append([])
            else:
                groups[-1].append(tok)
        for group in groups:
            if not group:
                continue
            parser = _Parser(group, lineno, len(raw))
            body, head = parser.parse_rule()
            if parser.peek() is not None:
                raise parser.error("unexpected trailing input")
            counter += 1
            rule_id = pending_id if pending_id else f"rule_{counter:04d}"
            pending_id = None
            _check_safety(rule_id, body, head)
            rules.append(Rule(rule_id, body, head))
    return rules


def bundled_core_rules_text() -> str:
    """The nine published diagnostic rules shipped inside the package."""
    from importlib import resources

    return (resources.files("medreason") / "data" / "core.swrlx").read_text("utf-8")


def bundled_rules_text() -> str:
    """Full shipped corpus: published rules plus labeled synthetic extras."""
    from importlib import resources

    data = resources.files("medreason") / "data"
    core = (data / "core.swrlx").read_text("utf-8")
    synthetic = (data / "synthetic.swrlx").read_text("utf-8")
    return core.rstrip("\n") + "\n" + synthetic


# ---------------------------------------------------------------------------
# builtins

def _ordering_key(value: Value):
    """Numbers (and numeric strings) compare numerically, rest as text."""
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(value)
    except ValueError:
        return None


BUILTINS = {
    "greaterThan": lambda a, b: a > b,
    "lessThan": lambda a, b: a < b,
    "greaterThanOrEqual": lambda a, b: a >= b,
    "lessThanOrEqual": lambda a, b: a <= b,
    "equal": lambda a, b: a == b,
    "notEqual": lambda a, b: a != b,
}


def evaluate_builtin(name: str, args: Iterable[Value]) -> bool:
    """Evaluate one swrlb comparison over fully bound arguments."""
    local = name[len(BUILTIN_PREFIX):] if name.startswith(BUILTIN_PREFIX) else name
    op = BUILTINS.get(local)
    if op is None:
        raise BuiltinError(f"unknown builtin {name!r}")
    args = list(args)
    if len(args) != 2:
        raise BuiltinError(f"{name} expects 2 arguments, got {len(args)}")
    ka, kb = _ordering_key(args[0]), _ordering_key(args[1])
    if ka is not None and kb is not None:
        return op(ka, kb)
    sa = args[0] if isinstance(args[0], str) else format_value(args[0]).strip('"')
    sb = args[1] if isinstance(args[1], str) else format_value(args[1]).strip('"')
    return op(sa, sb)


# ---------------------------------------------------------------------------
# fact store

def _value_key(value: Value):
    """Canonical identity: booleans are their own kind, ints/floats unify."""
    if isinstance(value, bool):
        return ("b", value)
    if isinstance(value, (int, float)):
        return ("n", float(value))
    if isinstance(value, str):
        return ("s", value)
    raise ValueError(f"unsupported fact value {value!r} ({type(value).__name__})")


def values_match(a: Value, b: Value) -> bool:
    """Constant-vs-stored comparison: bools never cross into numbers."""
    try:
        return _value_key(a) == _value_key(b)
    except ValueError:
        return False


class FactStore:
    """Working memory: (individual, predicate, value) triples + type pairs.

    Set semantics with deterministic insertion order; duplicate adds are
    no-ops and report False.
    """

    def __init__(self):
        self._data: dict[tuple, tuple[str, str, Value]] = {}
        self._types: dict[tuple[str, str], None] = {}
        self._by_pred: dict[str, list[tuple[str, str, Value]]] = {}
        self._by_cat: dict[str, list[str]] = {}

    def add(self, individual: str, predicate: str, value: Value) -> bool:
        key = (individual, predicate, _value_key(value))
        if key in self._data:
            return False
        triple = (individual, predicate, value)
        self._data[key] = triple
        self._by_pred.setdefault(predicate, []).append(triple)
        return True

    def add_type(self, individual: str, category: str) -> bool:
        key = (individual, category)
        if key in self._types:
            return False
        self._types[key] = None
        self._by_cat.setdefault(category, []).append(individual)
        return True

    def has(self, individual: str, predicate: str, value: Value) -> bool:
        return (individual, predicate, _value_key(value)) in self._data

    def has_type(self, individual: str, category: str) -> bool:
        return (individual, category) in self._types

    @property
    def assertions(self) -> tuple[tuple[str, str, Value], ...]:
        return tuple(self._data.values())

    @property
    def type_assertions(self) -> tuple[tuple[str, str], ...]:
        return tuple(self._types)

    def by_predicate(self, predicate: str) -> tuple[tuple[str, str, Value], ...]:
        return tuple(self._by_pred.get(predicate, ()))

    def individuals_of(self, category: str) -> tuple[str, ...]:
        return tuple(self._by_cat.get(category, ()))

    def copy(self) -> "FactStore":
        clone = FactStore()
        for ind, pred, value in self._data.values():
            clone.add(ind, pred, value)
        for ind, cat in self._types:
            clone.add_type(ind, cat)
        return clone

    def __len__(self):
        return len(self._data) + len(self._types)

    def __eq__(self, other):
        if not isinstance(other, FactStore):
            return NotImplemented
        return set(self._data) == set(other._data) and set(self._types) == set(other._types)


# ---------------------------------------------------------------------------
# forward chaining

@dataclass(frozen=True)
class InferenceTrace:
    """Provenance for one derived assertion.

    `support` lists the matched body facts; unary matches appear as
    (individual, "@type", category) entries.
    """

    derived: tuple[str, str, Value]
    rule_id: str
    bindings: dict[str, Value] = field(default_factory=dict)
    support: tuple[tuple[str, str, Value], ...] = ()


def _substitute(term: Term, bindings: dict[str, Value]):
    if isinstance(term, Var):
        return bindings.get(term.name, term)
    return term


def _match_atom_against(
    atom: Atom,
    facts: Iterable,
    bindings: dict[str, Value],
) -> Iterator[tuple[dict[str, Value], tuple[str, str, Value]]]:
    """Extend bindings by matching one non-builtin atom against given facts."""
    if len(atom.terms) == 1:
        t = _substitute(atom.terms[0], bindings)
        for ind, cat in facts:
            if cat != atom.predicate:
                continue
            if isinstance(t, Var):
                yield {**bindings, t.name: ind}, (ind, TYPE_PREDICATE, cat)
            elif isinstance(t, str) and t == ind:
                yield bindings, (ind, TYPE_PREDICATE, cat)
    else:
        t1 = _substitute(atom.terms[0], bindings)
        t2 = _substitute(atom.terms[1], bindings)
        for ind, pred, value in facts:
            if pred != atom.predicate:
                continue
            if isinstance(t1, Var):
                new = {t1.name: ind}
            elif isinstance(t1, str) and t1 == ind:
                new = {}
            else:
                continue
            if isinstance(t2, Var):
                if t2.name in new:  # same var twice: has_x(?a, ?a)
                    if not (isinstance(value, str) and values_match(new[t2.name], value)):
                        continue
                else:
                    new = {**new, t2.name: value}
            elif not values_match(t2, value):
                continue
            yield {**bindings, **new}, (ind, pred, value)


def _facts_for(atom: Atom, store: FactStore):
    if len(atom.terms) == 1:
        return [(i, atom.predicate) for i in store.individuals_of(atom.predicate)]
    return store.by_predicate(atom.predicate)


def _match_body(
    rule: Rule,
    store: FactStore,
    delta_slot: int | None,
    delta_data: list[tuple[str, str, Value]],
    delta_types: list[tuple[str, str]],
) -> Iterator[tuple[dict[str, Value], tuple]]:
    """Join the rule body; slot i (if given) matches the delta only.

    Builtins run last, once every data atom has bound its variables.
    """
    data_atoms = [a for a in rule.body if not a.is_builtin]
    builtins = [a for a in rule.body if a.is_builtin]
    if delta_slot is not None and not data_atoms:
        return
    states: list[tuple[dict[str, Value], tuple]] = [({}, ())]
    for i, atom in enumerate(data_atoms):
        if i == delta_slot:
            facts = delta_types if len(atom.terms) == 1 else delta_data
        else:
            facts = _facts_for(atom, store)
        next_states = []
        for bindings, support in states:
            for new_bindings, fact in _match_atom_against(atom, facts, bindings):
                next_states.append((new_bindings, support + (fact,)))
        states = next_states
        if not states:
            return
    for bindings, support in states:
        ok = True
        for b in builtins:
            args = [_substitute(t, bindings) for t in b.terms]
            if not evaluate_builtin(b.predicate, args):
                ok = False
                break
        if ok:
            yield bindings, support


def forward_chain(
    store: FactStore, rules: Iterable[Rule]
) -> tuple[FactStore, list[InferenceTrace]]:
    """Semi-naive chaining to fixpoint; the input store is not mutated.

    Returns the augmented store and one trace per newly derived assertion.
    Terminates because heads introduce no new individuals or values beyond
    those in the store and the rule text.
    """
    rules = list(rules)
    result = store.copy()
    traces: list[InferenceTrace] = []
    delta_data: list[tuple[str, str, Value]] = []
    delta_types: list[tuple[str, str]] = []

    def fire(rule: Rule, bindings: dict[str, Value], support: tuple) -> None:
        for atom in rule.head:
            terms = [_substitute(t, bindings) for t in atom.terms]
            if len(terms) == 1:
                ind = terms[0]
                if result.add_type(ind, atom.predicate):
                    delta_types.append((ind, atom.predicate))
                    traces.append(InferenceTrace(
                        (ind, TYPE_PREDICATE, atom.predicate),
                        rule.id, dict(bindings), support))
            else:
                ind, value = terms
                if result.add(ind, atom.predicate, value):
                    fact = (ind, atom.predicate, value)
                    delta_data.append(fact)
                    traces.append(InferenceTrace(fact, rule.id, dict(bindings), support))

    # first pass: plain join over the whole store
    for rule in rules:
        for bindings, support in _match_body(rule, result, None, [], []):
            fire(rule, bindings, support)
    # subsequent passes: at least one atom must match a fresh fact
    while delta_data or delta_types:
        cur_data, cur_types = delta_data, delta_types
        delta_data, delta_types = [], []
        for rule in rules:
            n_data = sum(1 for a in rule.body if not a.is_builtin)
            for slot in range(n_data):
                for bindings, support in _match_body(rule, result, slot, cur_data, cur_types):
                    fire(rule, bindings, support)
    log.debug("forward chaining derived %d new assertions", len(traces))
    return result, traces


def verify_trace(trace: InferenceTrace, rules: Iterable[Rule], store: FactStore) -> bool:
    """Replay: substituted body atoms must hold in the store, builtins pass."""
    rule = next((r for r in rules if r.id == trace.rule_id), None)
    if rule is None:
        return False
    for atom in rule.body:
        terms = [_substitute(t, trace.bindings) for t in atom.terms]
        if any(isinstance(t, Var) for t in terms):
            return False
        if atom.is_builtin:
            if not evaluate_builtin(atom.predicate, terms):
                return False
        elif len(terms) == 1:
            if not store.has_type(terms[0], atom.predicate):
                return False
        elif not store.has(terms[0], atom.predicate, terms[1]):
            return False
    return True


# ---------------------------------------------------------------------------
# explanations

def _format_fact(fact: tuple[str, str, Value]) -> str:
    ind, pred, value = fact
    if pred == TYPE_PREDICATE:
        return f"{value}({ind})"
    return f"{pred}({ind}, {format_value(value)})"


def explain(
    assertion: tuple[str, str, Value],
    store: FactStore,
    traces: Iterable[InferenceTrace],
) -> str:
    """Render the derivation of one assertion, or 'asserted' for base facts."""
    ind, pred, value = assertion
    header = _format_fact(assertion)
    for trace in traces:
        if trace.derived == assertion:
            lines = [header]
            binds = ", ".join(
                f"?{k} = {format_value(v) if not isinstance(v, str) else v}"
                for k, v in trace.bindings.items())
            lines.append(f"  derived by {trace.rule_id}" + (f" with {binds}" if binds else ""))
            lines.append("  from:")
            for fact in trace.support:
                lines.append(f"    - {_format_fact(fact)}")
            return "\n".join(lines)
    present = (store.has_type(ind, value) if pred == TYPE_PREDICATE
               else store.has(ind, pred, value))
    if present:
        return f"{header}\n  asserted"
    raise ExplanationError(f"{header} is not in the store")


# ---------------------------------------------------------------------------
# patient bridge

def patient_to_facts(
    patient: "PatientRecord", vocabulary: "SymptomVocabulary"
) -> tuple[FactStore, list[str]]:
    """Project a patient record into working memory.

    Returns the store and the list of symptom phrases that resolved to no
    vocabulary entry (skipped, reported, never silently dropped).
    """
    from .match import suggest_symptoms

    store = FactStore()
    store.add_type(patient.id, "Patient")
    store.add(patient.id, "hasAge", patient.age)
    store.add(patient.id, "hasSex", patient.sex)
    if patient.blood_group:
        store.add(patient.id, "hasBloodGroup", patient.blood_group)
    if patient.height:
        store.add(patient.id, "hasHeight", patient.height)
    if patient.weight:
        store.add(patient.id, "hasWeight", patient.weight)
    unresolved = []
    for phrase in patient.symptoms:
        ranked = suggest_symptoms(phrase, vocabulary, top_n=1)
        if not ranked:
            unresolved.append(phrase)
            log.warning("symptom phrase %r resolved to nothing; skipped", phrase)
            continue
        store.add(patient.id, "has" + ranked[0][0], True)
    for key, value in patient.lab_facts.items():
        store.add(patient.id, key, value)
    return store, unresolved
