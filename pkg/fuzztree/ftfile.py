"""
Galileo-style fault tree files

    toplevel "System";
    "System" and "Pump" "Valves";
    "Valves" or "V1" "V2";
    "Pump" prob=0.8;
    "V1" prob=0.1 tri=0.05,0.1,0.15;
    V2 gauss=0.4,0.02;

Names may be quoted or bare identifiers; `//` and `/* */` comments are skipped.
A basic event carries `prob=` and/or one fuzzy annotation (tri, trap, interval,
gauss); without `prob=` the annotation's centre is the crisp probability.
"""
import logging
import re
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from .errors import InvalidFaultTreeError, ParseError, ShapeError
from .ft_model import (
    Diagnostic, DiagnosticRule, FaultTree, FaultTreeBuilder, NodeKind, require_valid,
)
from .fuzzy_core import (
    AlphaFuzzy, check_probability_shape, discretize, make_shape, shape_center, shape_parameters,
)
from .fuzzy_unreliability import FuzzyProbVector

logger = logging.getLogger(__name__)

ANNOTATIONS = ('tri', 'trap', 'interval', 'gauss')
NUMBER_FORMAT = '.17g'

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*)
  | (?P<string>"[^"\n]*")
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.\-]*)
  | (?P<punct>[=,;])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


class ParsedFaultTree(NamedTuple):
    """Validated fault tree, crisp probabilities and optional fuzzy annotations"""
    tree: FaultTree
    probs: tuple
    shapes: tuple

    @property
    def is_fuzzy(self) -> bool:
        return any(s is not None for s in self.shapes)

    def fuzzy_probs(self, n_cuts: int) -> FuzzyProbVector:
        """Annotated basic events discretized, the rest as crisp numbers"""
        return _fuzzy_vector(self.probs, self.shapes, n_cuts)


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        end = m.end()
        if kind == 'block_comment':
            close = text.find('*/', end)
            if close < 0:
                raise ParseError("unterminated block comment", line, column)
            end = close + 2
        chunk = text[pos:end]
        if kind in ('string', 'number', 'ident', 'punct'):
            value = chunk[1:-1] if kind == 'string' else chunk
            tokens.append(Token(kind, value, line, column))
        newlines = chunk.count('\n')
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind('\n') + 1
        pos = end
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset=0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind, text=None) -> Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            wanted = repr(text) if text is not None else kind
            found = repr(tok.text) if tok.kind != 'eof' else 'end of file'
            raise ParseError(f"expected {wanted}, found {found}", tok.line, tok.column)
        return tok

    def name(self) -> Token:
        tok = self.next()
        if tok.kind not in ('string', 'ident'):
            raise ParseError(f"expected a name, found {tok.text!r}", tok.line, tok.column)
        return tok

    def numbers(self) -> list:
        values = [float(self.expect('number').text)]
        while self.peek().kind == 'punct' and self.peek().text == ',':
            self.next()
            values.append(float(self.expect('number').text))
        return values


def _statement_open(p: _Parser) -> bool:
    tok = p.peek()
    return tok.kind != 'eof' and not (tok.kind == 'punct' and tok.text == ';')


def _fail(message, tok: Token, cause=None):
    raise ParseError(message, tok.line, tok.column) from cause


def _parse_event(p: _Parser, name: Token) -> tuple:
    prob = None
    shape = None
    seen = set()
    while _statement_open(p):
        key = p.next()
        if key.kind != 'ident':
            _fail(f"expected an attribute, found {key.text!r}", key)
        attr = key.text.lower()
        if attr in seen:
            _fail(f"attribute '{attr}' given twice for '{name.text}'", key)
        seen.add(attr)
        p.expect('punct', '=')
        values = p.numbers()
        if attr == 'prob':
            if len(values) != 1:
                _fail("prob takes a single value", key)
            prob = values[0]
            if not 0.0 <= prob <= 1.0:
                _fail(f"probability {prob} of '{name.text}' lies outside [0, 1]", key)
        elif attr in ANNOTATIONS:
            if shape is not None:
                _fail(f"'{name.text}' has more than one fuzzy annotation", key)
            try:
                shape = make_shape(attr, *values)
                check_probability_shape(shape)
            except (ShapeError, ValueError) as e:
                _fail(f"bad {attr} annotation for '{name.text}': {e}", key, e)
        else:
            _fail(f"unknown attribute '{key.text}'", key)
    if prob is None and shape is None:
        _fail(f"basic event '{name.text}' needs prob= or a fuzzy annotation", name)
    if prob is None:
        prob = shape_center(shape)
    return prob, shape


def parse(text: str) -> ParsedFaultTree:
    """Parse and validate a fault tree file"""
    p = _Parser(tokenize(text))
    builder = FaultTreeBuilder()
    top = None
    definitions = {}
    references = []
    events = {}

    while p.peek().kind != 'eof':
        head = p.peek()
        if head.kind == 'ident' and head.text.lower() == 'toplevel':
            p.next()
            if top is not None:
                _fail("toplevel declared twice", head)
            top = p.name()
            p.expect('punct', ';')
            continue

        name = p.name()
        if name.text in definitions:
            first = definitions[name.text]
            _fail(f"'{name.text}' already defined at line {first.line}", name)
        definitions[name.text] = name
        word = p.peek()
        if word.kind == 'ident' and word.text.lower() in ('and', 'or'):
            p.next()
            children = []
            while _statement_open(p):
                child = p.name()
                references.append(child)
                children.append(child.text)
            if not children:
                _fail(f"gate '{name.text}' has no children", name)
            builder.add_gate(name.text, word.text.lower(), children)
        elif word.kind == 'ident' and word.text.lower() not in ('prob',) + ANNOTATIONS \
                and p.peek(1).kind != 'punct':
            _fail(f"unsupported gate type '{word.text}'", word)
        else:
            events[name.text] = _parse_event(p, name)
            builder.add_basic_event(name.text)
        p.expect('punct', ';')

    if top is None:
        raise ParseError("missing toplevel declaration", p.peek().line, p.peek().column)
    for ref in references:
        if ref.text not in definitions:
            _fail(f"undefined name '{ref.text}'", ref)
    if top.text not in definitions:
        _fail(f"toplevel names undefined '{top.text}'", top)

    tree = require_valid(builder.build(top.text))
    probs = tuple(events[tree.name(v)][0] for v in tree.basic_events)
    shapes = tuple(events[tree.name(v)][1] for v in tree.basic_events)
    logger.debug("parsed %d nodes (%d basic events, %d annotated)",
                 tree.node_count, tree.n_basic_events, sum(s is not None for s in shapes))
    return ParsedFaultTree(tree, probs, shapes)


def _fuzzy_vector(probs, shapes, n_cuts) -> FuzzyProbVector:
    return FuzzyProbVector(
        discretize(s, n_cuts) if s is not None else AlphaFuzzy.crisp(x, n_cuts)
        for x, s in zip(probs, shapes))


def _number(x: float) -> str:
    return format(float(x), NUMBER_FORMAT)


def _quote(name: str) -> str:
    if '"' in name or '\n' in name:
        raise ValueError(f"name {name!r} cannot be written to a fault tree file")
    return f'"{name}"'


def serialize(tree: FaultTree, probs: Sequence[float], shapes: Optional[Sequence] = None) -> str:
    """File text listing nodes in id order, so parse() restores the same ids"""
    require_valid(tree)
    if len(set(tree.names)) != tree.node_count:
        raise InvalidFaultTreeError([Diagnostic(
            rule=DiagnosticRule.DUPLICATE_NAME, message="node names must be unique to serialize")])
    shapes = shapes or [None] * tree.n_basic_events
    lines = [f"toplevel {_quote(tree.name(tree.root))};"]
    for v in range(tree.node_count):
        kind = tree.kind(v)
        if kind is NodeKind.BE:
            i = tree.be_position(v)
            parts = [_quote(tree.name(v)), f"prob={_number(probs[i])}"]
            if shapes[i] is not None:
                params = ','.join(_number(x) for x in shape_parameters(shapes[i]))
                parts.append(f"{shapes[i].kind}={params}")
        else:
            parts = [_quote(tree.name(v)), kind.value]
            parts += [_quote(tree.name(w)) for w in tree.children[v]]
        lines.append(' '.join(parts) + ';')
    return '\n'.join(lines) + '\n'


def read_ft_file(path) -> ParsedFaultTree:
    data = Path(path).read_bytes()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data.count(b'\n', 0, e.start) + 1
        column = e.start - (data.rfind(b'\n', 0, e.start) + 1) + 1
        raise ParseError(f"invalid UTF-8 byte 0x{data[e.start]:02x}", line, column) from e
    return parse(text)


def write_ft_file(path, tree: FaultTree, probs, shapes=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(tree, probs, shapes), encoding='utf-8')
    logger.info("wrote fault tree file %s", path)
