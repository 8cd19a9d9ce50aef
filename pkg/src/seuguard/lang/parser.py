"""Recursive-descent parser and validator for CtrlC."""

from __future__ import annotations

from .ast import (
    Assign, Binary, BoolLit, Decl, If, Input, IntLit, Output, Print, Program,
    Return, Span, Unary, Var, While, walk,
)
from .diagnostics import Diagnostic, ParseError
from .lexer import Token, tokenize
from ..values import INT_MAX

TYPES = ("int", "bool")
_ASSIGN_OPS = ("=", "++", "--", "+=", "-=")
MAX_DEPTH = 200

# binary operator precedence, loosest first
_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.next_sid = 1
        self.depth = 0

    # -- token plumbing --

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError([Diagnostic("error", f"syntax error: {msg}, found {found}", tok.span)])

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        t = self.tok
        self.i += 1
        return t

    def sid(self) -> int:
        s = self.next_sid
        self.next_sid += 1
        return s

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError([Diagnostic("error", "syntax error: nesting too deep", self.tok.span)])

    # -- grammar --

    def program(self):
        span = self.tok.span
        if not (self.at("int") or self.at("bool") or self.at("void")):
            self.error("expected function return type")
        ret = self.tok.text
        self.i += 1
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptok = self.tok
                if not (self.at("int") or self.at("bool")):
                    self.error("expected parameter type")
                self.i += 1
                params.append((self.ident().text, ptok.text, ptok.span))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.block()
        if self.tok.kind != "eof":
            self.error("expected end of input after function body")
        return name, ret, params, body, span

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("expected '}'")
            stmts.append(self.statement())
        self.i += 1
        return tuple(stmts)

    def body(self) -> tuple:
        if self.at("{"):
            return self.block()
        return (self.statement(),)

    def statement(self):
        self.enter()
        try:
            return self._statement()
        finally:
            self.depth -= 1

    def _statement(self):
        t = self.tok
        span = t.span
        if self.at("int") or self.at("bool"):
            sid = self.sid()
            self.i += 1
            name = self.ident().text
            self.expect("=")
            init = self.expr()
            self.expect(";")
            return Decl(sid, name, t.text, init, span)
        if self.accept("if"):
            sid = self.sid()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.body()
            orelse = ()
            if self.accept("else"):
                orelse = self.body()
            return If(sid, cond, then, orelse, span)
        if self.accept("while"):
            sid = self.sid()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(sid, cond, self.body(), (), span)
        if t.kind == "ident" and t.text == "output" and self.toks[self.i + 1].text not in _ASSIGN_OPS:
            self.i += 1
            sid = self.sid()
            e = self.expr()
            self.expect(";")
            return Output(sid, e, span)
        for kw, cls in (("return", Return), ("print", Print)):
            if self.accept(kw):
                sid = self.sid()
                e = self.expr()
                self.expect(";")
                return cls(sid, e, span)
        if t.kind == "ident":
            sid = self.sid()
            self.i += 1
            target = Var(t.text, span)
            if self.accept("++"):
                e = Binary("+", target, IntLit(1, span), span)
            elif self.accept("--"):
                e = Binary("-", target, IntLit(1, span), span)
            elif self.accept("+="):
                e = Binary("+", target, self.expr(), span)
            elif self.accept("-="):
                e = Binary("-", target, self.expr(), span)
            else:
                self.expect("=")
                e = self.expr()
            self.expect(";")
            return Assign(sid, t.text, e, span)
        self.error("expected statement")

    def expr(self, level: int = 0):
        if level == len(_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in _LEVELS[level]:
            op = self.tok
            self.i += 1
            right = self.expr(level + 1)
            left = Binary(op.text, left, right, op.span)
        return left

    def unary(self):
        t = self.tok
        if self.at("-") or self.at("!"):
            nxt = self.toks[self.i + 1]
            if t.text == "-" and nxt.kind == "num" and nxt.text == str(INT_MAX + 1):
                self.i += 2
                return IntLit(-(2**31), t.span)
            self.enter()
            self.i += 1
            operand = self.unary()
            self.depth -= 1
            return Unary(t.text, operand, t.span)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            v = int(t.text) if len(t.text) <= 20 else INT_MAX + 1
            if v > INT_MAX:
                raise ParseError([Diagnostic("error", f"integer literal {v} out of 32-bit range", t.span)])
            return IntLit(v, t.span)
        if self.accept("true"):
            return BoolLit(True, t.span)
        if self.accept("false"):
            return BoolLit(False, t.span)
        if self.accept("input"):
            self.expect("(")
            self.expect(")")
            return Input(t.span)
        if t.kind == "ident":
            self.i += 1
            return Var(t.text, t.span)
        if self.accept("("):
            self.enter()
            e = self.expr()
            self.depth -= 1
            self.expect(")")
            return e
        self.error("expected expression")


# -- validation --------------------------------------------------------------


class _Checker:
    def __init__(self, params, ret_type):
        self.diags: list[Diagnostic] = []
        self.scopes: list[dict] = [{}]
        self.declared: set = set()
        self.locals: list = []
        self.ret_type = ret_type
        for name, typ, span in params:
            self.declare(name, typ, span)

    def err(self, msg, span):
        self.diags.append(Diagnostic("error", msg, span))

    def declare(self, name, typ, span):
        if name in self.declared:
            self.err(f"duplicate declaration of {name!r}", span)
            return
        self.declared.add(name)
        self.scopes[-1][name] = typ

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def expr_type(self, e, allow_input=False):
        if isinstance(e, IntLit):
            return "int"
        if isinstance(e, BoolLit):
            return "bool"
        if isinstance(e, Input):
            if not allow_input:
                self.err("input() may only appear as the entire right-hand side of an assignment", e.span)
            return "int"
        if isinstance(e, Var):
            t = self.lookup(e.name)
            if t is None:
                self.err(f"use before declaration of {e.name!r}", e.span)
            return t
        if isinstance(e, Unary):
            t = self.expr_type(e.operand)
            want = "int" if e.op == "-" else "bool"
            if t is not None and t != want:
                self.err(f"type mismatch: operator {e.op!r} expects {want}, got {t}", e.span)
            return want
        if isinstance(e, Binary):
            lt = self.expr_type(e.left)
            rt = self.expr_type(e.right)
            if e.op in ("+", "-", "*", "/", "%", "<", "<=", ">", ">="):
                for t in (lt, rt):
                    if t is not None and t != "int":
                        self.err(f"type mismatch: operator {e.op!r} expects int operands, got {t}", e.span)
                        break
                return "int" if e.op in "+-*/%" else "bool"
            if e.op in ("&&", "||"):
                for t in (lt, rt):
                    if t is not None and t != "bool":
                        self.err(f"type mismatch: operator {e.op!r} expects bool operands, got {t}", e.span)
                        break
                return "bool"
            if lt is not None and rt is not None and lt != rt:
                self.err(f"type mismatch: cannot compare {lt} with {rt}", e.span)
            return "bool"
        raise AssertionError(e)

    def cond(self, e):
        t = self.expr_type(e)
        if t is not None and t != "bool":
            self.err(f"type mismatch: condition must be bool, got {t}", e.span)

    def block(self, stmts):
        """Check a statement list; returns False when control cannot fall off its end."""
        self.scopes.append({})
        falls = True
        for s in stmts:
            if not falls:
                self.err("unreachable statement", s.span)
                break
            falls = self.stmt(s)
        self.scopes.pop()
        return falls

    def stmt(self, s):
        if isinstance(s, Decl):
            t = self.expr_type(s.init, allow_input=True)
            if t is not None and t != s.type:
                self.err(f"type mismatch: {s.name!r} is {s.type}, initializer is {t}", s.span)
            self.declare(s.name, s.type, s.span)
            self.locals.append((s.name, s.type, s.init))
            return True
        if isinstance(s, Assign):
            vt = self.lookup(s.name)
            if vt is None:
                self.err(f"use before declaration of {s.name!r}", s.span)
            t = self.expr_type(s.expr, allow_input=True)
            if vt is not None and t is not None and t != vt:
                self.err(f"type mismatch: {s.name!r} is {vt}, value is {t}", s.span)
            return True
        if isinstance(s, If):
            self.cond(s.cond)
            a = self.block(s.then)
            b = self.block(s.orelse)
            return a or b
        if isinstance(s, While):
            self.cond(s.cond)
            self.block(s.body)
            # there is no break, so while (true) is only left by return
            return s.cond != BoolLit(True)
        if isinstance(s, Return):
            t = self.expr_type(s.expr)
            if self.ret_type == "void":
                self.err("return with a value in a void function", s.span)
            elif t is not None and t != self.ret_type:
                self.err(f"type mismatch: function returns {self.ret_type}, got {t}", s.span)
            return False
        if isinstance(s, (Output, Print)):
            self.expr_type(s.expr)
            return True
        raise AssertionError(s)


def parse(source) -> Program:
    """Parse and validate CtrlC source.

    Raises ParseError carrying at least one error Diagnostic on failure. Any
    input (including arbitrary bytes) either parses or raises ParseError.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(
                [Diagnostic("error", f"lexical error: invalid UTF-8 at byte {exc.start}", Span(1, 1))]
            ) from None
    tokens = tokenize(source)
    p = _Parser(tokens)
    try:
        name, ret, params, body, span = p.program()
    except RecursionError:
        raise ParseError([Diagnostic("error", "syntax error: nesting too deep", p.tok.span)]) from None

    chk = _Checker(params, ret)
    try:
        falls = chk.block(body)
    except RecursionError:
        raise ParseError([Diagnostic("error", "expression nesting too deep", Span(1, 1))]) from None
    has_output = any(isinstance(s, Output) for s in walk(body))
    if falls and not has_output:
        end = tokens[-1].span
        chk.err("missing output construct: a path reaches the end without return or output", end)
    if chk.diags:
        raise ParseError(chk.diags)
    return Program(
        name=name,
        ret_type=ret,
        params=tuple((n, t) for n, t, _ in params),
        locals=tuple(chk.locals),
        body=body,
    )


def parse_file(path) -> Program:
    with open(path, "rb") as fh:
        return parse(fh.read())
