"""Reader for the Prolog subset: clauses, table/dynamic directives, DCG rules."""
from __future__ import annotations

from dataclasses import dataclass, field

from .terms import NIL, Atom, Cons, Functor, Struct, Var, functor, intern_atom, make_list

INFIX = {
    ":-": (1200, "xfx"),
    "-->": (1200, "xfx"),
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "@<": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "=:=": (700, "xfx"),
    "is": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "//": (400, "yfx"),
}
PREFIX = {"-": (200, "fy")}

SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
SOLO = set("(),[]|")


class PrologSyntaxError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.lineno = line
        self.offset = col
        self.line = line
        self.col = col


class UnknownDirective(Exception):
    pass


@dataclass
class Token:
    kind: str  # name, qname, var, int, punct, end, eof
    text: str
    line: int
    col: int
    pre_ws: bool  # whitespace before this token


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i = 0
    n = len(text)
    line = 1
    line_start = 0
    ws = True
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
            ws = True
            continue
        if c.isspace():
            i += 1
            ws = True
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            ws = True
            continue
        col = i - line_start + 1
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col, ws))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if (c.isupper() or c == "_") else "name"
            toks.append(Token(kind, word, line, col, ws))
            i = j
        elif c == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise PrologSyntaxError("unterminated quoted atom", line, col)
                d = text[j]
                if d == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                elif d == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                    else:
                        j += 1
                        break
                else:
                    if d == "\n":
                        raise PrologSyntaxError("newline in quoted atom", line, col)
                    buf.append(d)
                    j += 1
            toks.append(Token("qname", "".join(buf), line, col, ws))
            i = j
        elif c in ";!":
            toks.append(Token("name", c, line, col, ws))
            i += 1
        elif c in SOLO:
            toks.append(Token("punct", c, line, col, ws))
            i += 1
        elif c in SYMBOL_CHARS:
            if c == "." and (i + 1 >= n or text[i + 1].isspace() or text[i + 1] == "%"):
                toks.append(Token("end", ".", line, col, ws))
                i += 1
            else:
                j = i
                while j < n and text[j] in SYMBOL_CHARS:
                    j += 1
                toks.append(Token("name", text[i:j], line, col, ws))
                i = j
        else:
            raise PrologSyntaxError(f"unexpected character {c!r}", line, col)
        ws = False
    toks.append(Token("eof", "", line, i - line_start + 1, ws))
    return toks


def _starts_term(tok: Token) -> bool:
    if tok.kind in ("int", "var", "qname"):
        return True
    if tok.kind == "name":
        return tok.text not in INFIX or tok.text in PREFIX
    return tok.kind == "punct" and tok.text in "(["


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.varmap: dict[str, Var] = {}

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        shown = tok.text or tok.kind
        raise PrologSyntaxError(f"{msg} (found {shown!r})", tok.line, tok.col)

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.error(f"expected {text or kind}")
        return self.advance()

    def new_clause(self):
        self.varmap = {}

    def parse(self, maxp: int):
        left, lp = self.primary(maxp)
        while True:
            t = self.tok
            if t.kind == "name" or (t.kind == "punct" and t.text == ","):
                op = INFIX.get(t.text)
            else:
                op = None
            if op is None:
                break
            p, typ = op
            la = p if typ[0] == "y" else p - 1
            ra = p if typ[2] == "y" else p - 1
            if p > maxp or lp > la:
                break
            self.advance()
            right = self.parse(ra)
            left = Struct(functor(t.text, 2), (left, right))
            lp = p
        return left

    def primary(self, maxp: int):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return int(t.text), 0
        if t.kind == "var":
            self.advance()
            if t.text == "_":
                return Var("_"), 0
            v = self.varmap.get(t.text)
            if v is None:
                v = self.varmap[t.text] = Var(t.text)
            return v, 0
        if t.kind == "punct":
            if t.text == "(":
                self.advance()
                x = self.parse(1200)
                self.expect("punct", ")")
                return x, 0
            if t.text == "[":
                return self.list_tail(), 0
            self.error("unexpected token")
        if t.kind in ("name", "qname"):
            nxt = self.peek()
            # signed integer literal
            if t.kind == "name" and t.text in ("-", "+") and nxt.kind == "int" and not nxt.pre_ws:
                self.advance()
                self.advance()
                v = int(nxt.text)
                return (-v if t.text == "-" else v), 0
            if nxt.kind == "punct" and nxt.text == "(" and not nxt.pre_ws:
                self.advance()
                self.advance()
                args = [self.parse(999)]
                while self.tok.kind == "punct" and self.tok.text == ",":
                    self.advance()
                    args.append(self.parse(999))
                self.expect("punct", ")")
                return Struct(functor(t.text, len(args)), tuple(args)), 0
            if t.kind == "name" and t.text in PREFIX and _starts_term(nxt):
                p, typ = PREFIX[t.text]
                if p <= maxp:
                    self.advance()
                    arg = self.parse(p if typ[1] == "y" else p - 1)
                    return Struct(functor(t.text, 1), (arg,)), p
            self.advance()
            prec = 0
            if t.kind == "name" and (t.text in INFIX or t.text in PREFIX):
                prec = max(INFIX.get(t.text, (0,))[0], PREFIX.get(t.text, (0,))[0])
                prec = prec if prec <= maxp else 0
            return intern_atom(t.text), prec
        if t.kind == "end":
            self.error("unexpected end of clause")
        self.error("unexpected token")

    def list_tail(self):
        self.expect("punct", "[")
        if self.tok.kind == "punct" and self.tok.text == "]":
            self.advance()
            return NIL
        items = [self.parse(999)]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.advance()
            items.append(self.parse(999))
        tail = NIL
        if self.tok.kind == "punct" and self.tok.text == "|":
            self.advance()
            tail = self.parse(999)
        self.expect("punct", "]")
        return make_list(items, tail)


@dataclass
class Clause:
    head: object
    body: tuple = ()

    def __post_init__(self):
        if type(self.head) not in (Atom, Struct):
            raise TypeError(f"clause head must be an atom or compound, got {self.head!r}")


def predicate_of(t) -> Functor:
    if type(t) is Atom:
        return functor(t, 0)
    if type(t) is Struct:
        return t.functor
    raise TypeError(f"not callable: {t!r}")


@dataclass
class Program:
    clauses: dict = field(default_factory=dict)  # Functor -> list[Clause]
    table_decls: dict = field(default_factory=dict)  # Functor -> 'plain' | 'intern'
    dynamic_decls: dict = field(default_factory=dict)

    def add_clause(self, clause: Clause):
        self.clauses.setdefault(predicate_of(clause.head), []).append(clause)

    def declare(self, kind: str, pred: Functor, mode: str):
        other = self.dynamic_decls if kind == "table" else self.table_decls
        if pred in other:
            raise ValueError(f"{pred} cannot be both tabled and dynamic")
        (self.table_decls if kind == "table" else self.dynamic_decls)[pred] = mode


COMMA = functor(",", 2)
NECK = functor(":-", 2)
DCG_ARROW = functor("-->", 2)
DIRECTIVE = functor(":-", 1)
EQ = functor("=", 2)


def conjuncts(t) -> list:
    out = []
    stack = [t]
    while stack:
        x = stack.pop()
        if type(x) is Struct and x.functor is COMMA:
            stack.append(x.args[1])
            stack.append(x.args[0])
        else:
            out.append(x)
    return out


def dcg_translate(head, body) -> Clause:
    """Translate ``head --> body`` into a clause threading S0..S."""
    if type(head) not in (Atom, Struct):
        raise PrologSyntaxError(f"bad DCG head {head!r}", 0, 0)
    s0 = Var("S0")
    cur = s0
    goals = []
    items = conjuncts(body) if body is not None else []
    for item in items:
        if item is NIL:
            continue
        if type(item) is Cons:
            nxt = Var()
            goals.append(Struct(EQ, (cur, _append_tail(item, nxt))))
            cur = nxt
        elif type(item) in (Atom, Struct) and not (type(item) is Struct and item.functor.name.name in (";", "->", "{}")):
            nxt = Var()
            goals.append(_extend(item, cur, nxt))
            cur = nxt
        else:
            raise PrologSyntaxError(f"cannot translate DCG body item {item!r}", 0, 0)
    return Clause(_extend(head, s0, cur), tuple(goals))


def _append_tail(lst, tail):
    items = []
    t = lst
    while type(t) is Cons:
        items.append(t.head)
        t = t.tail
    if t is not NIL:
        raise PrologSyntaxError("partial list as DCG terminal", 0, 0)
    return make_list(items, tail)


def _extend(t, a, b):
    if type(t) is Atom:
        return Struct(functor(t, 2), (a, b))
    return Struct(functor(t.functor.name, t.functor.arity + 2), tuple(t.args) + (a, b))


def _read_clause_term(p: Parser):
    p.new_clause()
    t = p.parse(1200)
    if p.tok.kind != "end":
        p.error("expected end of clause")
    p.advance()
    return t


def _parse_directive(p: Parser, prog: Program):
    start = p.tok
    if start.kind != "name":
        p.error("unknown directive")
    kind = start.text
    if kind == "import":
        while p.tok.kind not in ("end", "eof"):
            p.advance()
        p.expect("end")
        return
    if kind not in ("table", "dynamic"):
        raise UnknownDirective(f"unknown directive {kind!r} at line {start.line}")
    p.advance()
    preds = []
    while True:
        name = p.tok
        if name.kind not in ("name", "qname"):
            p.error("expected predicate name")
        p.advance()
        if p.tok.kind != "name" or p.tok.text != "/":
            p.error("expected '/'")
        p.advance()
        ar = p.expect("int")
        preds.append(functor(name.text, int(ar.text)))
        if p.tok.kind == "punct" and p.tok.text == ",":
            p.advance()
            continue
        break
    mode = "plain"
    if p.tok.kind == "name" and p.tok.text == "as":
        p.advance()
        m = p.expect("name")
        if m.text != "intern":
            p.error("expected 'intern'", m)
        mode = "intern"
    p.expect("end")
    for f in preds:
        try:
            prog.declare(kind, f, mode)
        except ValueError as e:
            raise PrologSyntaxError(str(e), start.line, start.col) from None


def parse_program(text: str) -> Program:
    p = Parser(tokenize(text))
    prog = Program()
    while p.tok.kind != "eof":
        if p.tok.kind == "name" and p.tok.text == ":-" and p.peek().kind != "end":
            p.advance()
            p.new_clause()
            _parse_directive(p, prog)
            continue
        first = p.tok
        t = _read_clause_term(p)
        try:
            if type(t) is Struct and t.functor is DCG_ARROW:
                clause = dcg_translate(t.args[0], t.args[1])
            elif type(t) is Struct and t.functor is NECK:
                clause = Clause(t.args[0], tuple(conjuncts(t.args[1])))
            else:
                clause = Clause(t)
        except TypeError as e:
            raise PrologSyntaxError(str(e), first.line, first.col) from None
        except PrologSyntaxError as e:
            raise PrologSyntaxError(e.msg.split(" at line")[0], first.line, first.col) from None
        prog.add_clause(clause)
    return prog


def parse_query(text: str):
    """Parse one term; returns (term, {name: Var}) for the named variables."""
    p = Parser(tokenize(text))
    t = p.parse(1200)
    if p.tok.kind == "end":
        p.advance()
    if p.tok.kind != "eof":
        p.error("expected end of input")
    return t, dict(p.varmap)


def parse_term(text: str):
    return parse_query(text)[0]
