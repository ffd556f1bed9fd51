"""Pluggable grammar support for the code-aware similarity metric.

A provider exposes, per supported language: a deterministic parse into a
generic syntax tree, the language's keyword set, and a variable-use edge
extractor for data-flow matching. Unsupported languages are reported, never
guessed. Two providers ship here: a hand-written parser for a C-like subset
and an adapter over Python's own ``ast`` module.
"""

from __future__ import annotations

import ast as python_ast
import keyword as python_keyword
import re
from dataclasses import dataclass
from typing import Iterable, Protocol, runtime_checkable


class GrammarError(ValueError):
    pass


class UnsupportedLanguage(GrammarError):
    def __init__(self, language: str):
        super().__init__(f"unsupported language: {language!r}")
        self.language = language


class ParseFailure(GrammarError):
    pass


# Leaf kinds whose concrete value (a name or literal) is ignored when
# comparing structure, so renaming variables preserves subtree identity.
VALUE_LEAF_KINDS = frozenset({"identifier", "number", "string", "char"})


@dataclass(frozen=True)
class Node:
    kind: str
    children: tuple["Node", ...] = ()
    value: str | None = None

    def walk(self) -> Iterable["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()


def signature(node: Node) -> str:
    """Structural fingerprint of the subtree rooted at ``node``.

    Identifier and literal leaves contribute only their kind; operator kinds
    keep their concrete value so ``a + b`` and ``a - b`` stay distinct.
    """
    if node.kind in VALUE_LEAF_KINDS:
        return f"({node.kind})"
    label = node.kind if node.value is None else f"{node.kind}:{node.value}"
    if not node.children:
        return f"({label})"
    inner = " ".join(signature(child) for child in node.children)
    return f"({label} {inner})"


def subtree_signatures(root: Node) -> list[str]:
    """Signatures of every internal node (leaves excluded)."""
    return [signature(node) for node in root.walk() if node.children]


@runtime_checkable
class GrammarProvider(Protocol):
    def supported_languages(self) -> frozenset[str]: ...

    def parse(self, code: str, language: str) -> Node: ...

    def keywords(self, language: str) -> frozenset[str]: ...

    def dataflow(self, tree: Node) -> frozenset[tuple[str, str]]: ...


# --- C-like subset ----------------------------------------------------------

C_KEYWORDS = frozenset(
    """auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while""".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<char>'(?:[^'\\\n]|\\.)*')
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?[uUlLfF]*)
  | (?P<identifier>[A-Za-z_]\w*)
  | (?P<op><<=|>>=|\+\+|--|->|<<|>>|<=|>=|==|!=|&&|\|\||[+\-*/%&|^!~]=?|=|<|>|[()\[\]{};,?:.])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # identifier | number | string | char | op
    text: str


def _tokenize_c(code: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(code):
        match = _TOKEN_RE.match(code, pos)
        if not match:
            raise ParseFailure(f"unexpected character {code[pos]!r} at offset {pos}")
        pos = match.end()
        kind = match.lastgroup
        if kind in ("ws", "line_comment", "block_comment"):
            continue
        tokens.append(_Token(kind, match.group()))
    return tokens


_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
_TYPE_QUALIFIERS = {"const", "unsigned", "signed", "static", "struct", "long", "short"}
_STATEMENT_KEYWORDS = {
    "return", "if", "else", "while", "for", "do", "switch", "case",
    "default", "break", "continue", "goto", "sizeof",
}


class _CParser:
    """Recursive-descent parser for a statement/expression subset of C.

    Covers functions, declarations, assignments, calls, control flow
    (if/while/for/return) and the usual operator precedence ladder; enough
    to parse self-contained snippets deterministically.
    """

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> _Token | None:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def next(self) -> _Token:
        token = self.peek()
        if token is None:
            raise ParseFailure("unexpected end of input")
        self.pos += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.next()
        if token.text != text:
            raise ParseFailure(f"expected {text!r}, got {token.text!r}")
        return token

    def at(self, text: str) -> bool:
        token = self.peek()
        return token is not None and token.text == text

    def parse_program(self) -> Node:
        items = []
        while self.peek() is not None:
            items.append(self.parse_external())
        return Node("program", tuple(items))

    def parse_external(self) -> Node:
        if self._looks_like_declaration():
            return self.parse_declaration_or_function()
        return self.parse_statement()

    def _looks_like_declaration(self) -> bool:
        token = self.peek()
        if token is None or token.kind != "identifier":
            return False
        if token.text in _STATEMENT_KEYWORDS:
            return False
        if token.text in _TYPE_QUALIFIERS:
            return True
        offset = 1
        while True:
            after = self.peek(offset)
            if after is None:
                return False
            if after.text == "*":
                offset += 1
                continue
            return after.kind == "identifier" and after.text not in C_KEYWORDS
        return False

    def parse_type(self) -> Node:
        parts: list[str] = []
        while True:
            token = self.peek()
            if token is None or token.kind != "identifier":
                break
            if token.text in _TYPE_QUALIFIERS:
                parts.append(self.next().text)
                continue
            # A base type name is consumed only when something else follows
            # that could be the declarator; otherwise this identifier IS the
            # declarator of an all-qualifier type like "unsigned x".
            following = self.peek(1)
            if not parts or (
                following is not None
                and (following.text == "*" or following.kind == "identifier")
            ):
                parts.append(self.next().text)
            break
        stars = 0
        while self.at("*"):
            self.next()
            stars += 1
        if not parts:
            raise ParseFailure("expected a type name")
        return Node("type", value=" ".join(parts) + "*" * stars)

    def parse_declaration_or_function(self) -> Node:
        type_node = self.parse_type()
        name = self.next()
        if name.kind != "identifier":
            raise ParseFailure(f"expected a name, got {name.text!r}")
        if self.at("("):
            return self.parse_function(type_node, name.text)
        return self.parse_declaration_tail(type_node, name.text)

    def parse_function(self, type_node: Node, name: str) -> Node:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                if self.at("void") and self.peek(1) is not None and self.peek(1).text == ")":
                    self.next()
                    break
                param_type = self.parse_type()
                param_name = None
                token = self.peek()
                if token is not None and token.kind == "identifier":
                    param_name = self.next().text
                children = (param_type,) + (
                    (Node("identifier", value=param_name),) if param_name else ()
                )
                params.append(Node("param", children))
                if self.at(","):
                    self.next()
                    continue
                break
        self.expect(")")
        body = self.parse_block()
        return Node(
            "function",
            (type_node, Node("identifier", value=name), Node("params", tuple(params)), body),
        )

    def parse_declaration_tail(self, type_node: Node, first_name: str) -> Node:
        declarators = [self._declarator(first_name)]
        while self.at(","):
            self.next()
            name = self.next()
            if name.kind != "identifier":
                raise ParseFailure(f"expected a name, got {name.text!r}")
            declarators.append(self._declarator(name.text))
        self.expect(";")
        return Node("decl", (type_node, *declarators))

    def _declarator(self, name: str) -> Node:
        children: tuple[Node, ...] = (Node("identifier", value=name),)
        if self.at("["):
            self.next()
            if not self.at("]"):
                children += (self.parse_expression(),)
            self.expect("]")
            children = (Node("array", children),)
        if self.at("="):
            self.next()
            children += (self.parse_assignment(),)
        return Node("declarator", children)

    def parse_block(self) -> Node:
        self.expect("{")
        statements = []
        while not self.at("}"):
            if self.peek() is None:
                raise ParseFailure("unterminated block")
            statements.append(self.parse_external())
        self.expect("}")
        return Node("block", tuple(statements))

    def parse_statement(self) -> Node:
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            self.next()
            self.expect("(")
            condition = self.parse_expression()
            self.expect(")")
            then_branch = self.parse_statement()
            if self.at("else"):
                self.next()
                return Node("if", (condition, then_branch, self.parse_statement()))
            return Node("if", (condition, then_branch))
        if self.at("while"):
            self.next()
            self.expect("(")
            condition = self.parse_expression()
            self.expect(")")
            return Node("while", (condition, self.parse_statement()))
        if self.at("for"):
            self.next()
            self.expect("(")
            init = Node("empty")
            if not self.at(";"):
                if self._looks_like_declaration():
                    type_node = self.parse_type()
                    name = self.next()
                    init = self.parse_declaration_tail(type_node, name.text)
                else:
                    init = Node("expr_stmt", (self.parse_expression(),))
                    self.expect(";")
            else:
                self.next()
            condition = Node("empty") if self.at(";") else self.parse_expression()
            self.expect(";")
            step = Node("empty") if self.at(")") else self.parse_expression()
            self.expect(")")
            return Node("for", (init, condition, step, self.parse_statement()))
        if self.at("return"):
            self.next()
            if self.at(";"):
                self.next()
                return Node("return")
            value = self.parse_expression()
            self.expect(";")
            return Node("return", (value,))
        if self.at("break") or self.at("continue"):
            kind = self.next().text
            self.expect(";")
            return Node(kind)
        if self.at(";"):
            self.next()
            return Node("empty")
        expression = self.parse_expression()
        self.expect(";")
        return Node("expr_stmt", (expression,))

    def parse_expression(self) -> Node:
        expression = self.parse_assignment()
        while self.at(","):
            self.next()
            expression = Node("comma", (expression, self.parse_assignment()))
        return expression

    def parse_assignment(self) -> Node:
        left = self.parse_ternary()
        token = self.peek()
        if token is not None and token.text in _ASSIGN_OPS:
            op = self.next().text
            right = self.parse_assignment()
            return Node("assign", (left, right), value=op)
        return left

    def parse_ternary(self) -> Node:
        condition = self.parse_binary(0)
        if self.at("?"):
            self.next()
            then_value = self.parse_expression()
            self.expect(":")
            else_value = self.parse_assignment()
            return Node("ternary", (condition, then_value, else_value))
        return condition

    _PRECEDENCE = [
        ("||",),
        ("&&",),
        ("|",),
        ("^",),
        ("&",),
        ("==", "!="),
        ("<", ">", "<=", ">="),
        ("<<", ">>"),
        ("+", "-"),
        ("*", "/", "%"),
    ]

    def parse_binary(self, level: int) -> Node:
        if level >= len(self._PRECEDENCE):
            return self.parse_unary()
        ops = self._PRECEDENCE[level]
        left = self.parse_binary(level + 1)
        while True:
            token = self.peek()
            if token is None or token.text not in ops:
                return left
            op = self.next().text
            right = self.parse_binary(level + 1)
            left = Node("binary", (left, right), value=op)

    def parse_unary(self) -> Node:
        token = self.peek()
        if token is not None and token.text in ("!", "-", "+", "~", "*", "&", "++", "--"):
            op = self.next().text
            return Node("unary", (self.parse_unary(),), value=op)
        return self.parse_postfix()

    def parse_postfix(self) -> Node:
        node = self.parse_primary()
        while True:
            if self.at("("):
                self.next()
                arguments = []
                if not self.at(")"):
                    arguments.append(self.parse_assignment())
                    while self.at(","):
                        self.next()
                        arguments.append(self.parse_assignment())
                self.expect(")")
                node = Node("call", (node, Node("args", tuple(arguments))))
            elif self.at("["):
                self.next()
                index = self.parse_expression()
                self.expect("]")
                node = Node("index", (node, index))
            elif self.at(".") or self.at("->"):
                op = self.next().text
                member = self.next()
                if member.kind != "identifier":
                    raise ParseFailure(f"expected member name, got {member.text!r}")
                node = Node("member", (node, Node("identifier", value=member.text)), value=op)
            elif self.at("++") or self.at("--"):
                op = self.next().text
                node = Node("postfix", (node,), value=op)
            else:
                return node

    def parse_primary(self) -> Node:
        token = self.next()
        if token.text == "(":
            inner = self.parse_expression()
            self.expect(")")
            return Node("paren", (inner,))
        if token.kind == "identifier":
            if token.text in C_KEYWORDS:
                raise ParseFailure(f"unexpected keyword {token.text!r}")
            return Node("identifier", value=token.text)
        if token.kind in ("number", "string", "char"):
            return Node(token.kind, value=token.text)
        raise ParseFailure(f"unexpected token {token.text!r}")


def _c_dataflow(tree: Node) -> frozenset[tuple[str, str]]:
    """(source, target) variable edges from assignments and initializers."""
    edges: set[tuple[str, str]] = set()

    def identifiers(node: Node) -> Iterable[str]:
        for item in node.walk():
            if item.kind == "identifier" and item.value is not None:
                yield item.value

    def target_name(node: Node) -> str | None:
        # Unwrap index/member/paren accesses down to the base identifier.
        while node.kind in ("index", "member", "paren", "array", "unary", "postfix"):
            node = node.children[0]
        if node.kind == "identifier":
            return node.value
        return None

    for node in tree.walk():
        if node.kind == "assign":
            target = target_name(node.children[0])
            if target is None:
                continue
            sources = set(identifiers(node.children[1]))
            if node.value != "=":
                sources.add(target)  # compound assignment also reads the target
            edges.update((source, target) for source in sources)
        elif node.kind == "declarator" and len(node.children) == 2:
            target = target_name(node.children[0])
            if target is None:
                continue
            edges.update((source, target) for source in set(identifiers(node.children[1])))
    return frozenset(edges)


class CLikeGrammar:
    """Bundled end-to-end grammar for the ``c`` language tag."""

    def supported_languages(self) -> frozenset[str]:
        return frozenset({"c"})

    def parse(self, code: str, language: str) -> Node:
        if language not in self.supported_languages():
            raise UnsupportedLanguage(language)
        tokens = _tokenize_c(code)
        if not tokens:
            raise ParseFailure("empty source")
        parser = _CParser(tokens)
        return parser.parse_program()

    def keywords(self, language: str) -> frozenset[str]:
        if language not in self.supported_languages():
            raise UnsupportedLanguage(language)
        return C_KEYWORDS

    def dataflow(self, tree: Node) -> frozenset[tuple[str, str]]:
        return _c_dataflow(tree)


# --- Python via the stdlib parser -------------------------------------------


def _convert_python(node: python_ast.AST) -> Node:
    kind = type(node).__name__
    children = tuple(_convert_python(child) for child in python_ast.iter_child_nodes(node))
    if isinstance(node, python_ast.Name):
        return Node("identifier", children, value=node.id)
    if isinstance(node, python_ast.Constant):
        return Node("number" if isinstance(node.value, (int, float)) else "string", ())
    if isinstance(node, (python_ast.arg,)):
        return Node("identifier", children, value=node.arg)
    return Node(kind, children)


class PythonGrammar:
    """Grammar provider backed by Python's own parser."""

    def supported_languages(self) -> frozenset[str]:
        return frozenset({"python"})

    def parse(self, code: str, language: str) -> Node:
        if language not in self.supported_languages():
            raise UnsupportedLanguage(language)
        try:
            tree = python_ast.parse(code)
        except (SyntaxError, ValueError) as exc:
            raise ParseFailure(f"python parse failed: {exc}") from exc
        return _convert_python(tree)

    def keywords(self, language: str) -> frozenset[str]:
        if language not in self.supported_languages():
            raise UnsupportedLanguage(language)
        return frozenset(python_keyword.kwlist)

    def dataflow(self, tree: Node) -> frozenset[tuple[str, str]]:
        edges: set[tuple[str, str]] = set()

        def identifiers(node: Node) -> Iterable[str]:
            for item in node.walk():
                if item.kind == "identifier" and item.value is not None:
                    yield item.value

        for node in tree.walk():
            if node.kind in ("Assign", "AugAssign", "AnnAssign") and node.children:
                *targets, value = node.children
                if node.kind == "AnnAssign" and len(node.children) < 3:
                    continue  # bare annotation, no value
                sources = set(identifiers(value))
                for target in targets:
                    for name in identifiers(target):
                        if node.kind == "AugAssign":
                            sources_with_self = sources | {name}
                            edges.update((src, name) for src in sources_with_self)
                        else:
                            edges.update((src, name) for src in sources)
        return frozenset(edges)


class CompositeProvider:
    """Dispatches to the first provider claiming the language."""

    def __init__(self, providers: tuple = ()):
        self.providers = providers or (CLikeGrammar(), PythonGrammar())

    def supported_languages(self) -> frozenset[str]:
        supported: set[str] = set()
        for provider in self.providers:
            supported |= provider.supported_languages()
        return frozenset(supported)

    def _provider_for(self, language: str):
        for provider in self.providers:
            if language in provider.supported_languages():
                return provider
        raise UnsupportedLanguage(language)

    def parse(self, code: str, language: str) -> Node:
        return self._provider_for(language).parse(code, language)

    def keywords(self, language: str) -> frozenset[str]:
        return self._provider_for(language).keywords(language)

    def dataflow(self, tree: Node) -> frozenset[tuple[str, str]]:
        # Extractors key on disjoint node kinds, so the union is exact
        # whichever provider produced the tree.
        edges: set[tuple[str, str]] = set()
        for provider in self.providers:
            edges |= provider.dataflow(tree)
        return frozenset(edges)


def default_provider() -> CompositeProvider:
    return CompositeProvider()
