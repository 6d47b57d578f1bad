"""Hand-rolled tokenizer. Keywords are case-insensitive, identifiers are not."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import QuerySyntaxError

KEYWORDS = {
    "MATCH",
    "WHERE",
    "RETURN",
    "DISTINCT",
    "ORDER",
    "BY",
    "LIMIT",
    "AS",
    "AND",
    "OR",
    "NOT",
    "TRUE",
    "FALSE",
    "NULL",
    "ASC",
    "DESC",
    "COUNT",
    "SUM",
    "AVG",
    "MIN",
    "MAX",
}

# longest first so e.g. "<-[" wins over "<"
SYMBOLS = [
    "<-[",
    "]->",
    "-[",
    "]-",
    "<>",
    "<=",
    ">=",
    "(",
    ")",
    "{",
    "}",
    ":",
    ",",
    ".",
    "=",
    "<",
    ">",
    "-",
    "*",
    "|",
]


@dataclass(frozen=True)
class Token:
    kind: str  # KEYWORD | IDENT | INT | REAL | STRING | SYMBOL | EOF
    value: object
    line: int
    column: int

    def describe(self):
        if self.kind == "EOF":
            return "end of input"
        return repr(self.value)


def tokenize(text):
    tokens = []
    line, col = 1, 0
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 0
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c in "\"'":
            quote = c
            j = i + 1
            buf = []
            while j < n and text[j] != quote:
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    buf.append({"n": "\n", "t": "\t", "\\": "\\", quote: quote}.get(esc, esc))
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise QuerySyntaxError("unterminated string literal", line, col)
            tokens.append(Token("STRING", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            seen_exp = False
            while j < n and (
                text[j].isdigit()
                or (text[j] == "." and not seen_dot and not seen_exp)
                or (text[j] in "eE" and not seen_exp and j > i)
                or (text[j] in "+-" and j > i and text[j - 1] in "eE")
            ):
                if text[j] == ".":
                    # a dot followed by a letter is property access, not a real
                    if j + 1 < n and not text[j + 1].isdigit():
                        break
                    seen_dot = True
                if text[j] in "eE":
                    seen_exp = True
                j += 1
            word = text[i:j]
            if seen_dot or seen_exp:
                tokens.append(Token("REAL", float(word), line, col))
            else:
                tokens.append(Token("INT", int(word), line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            upper = word.upper()
            if upper in KEYWORDS:
                tokens.append(Token("KEYWORD", upper, line, col))
            else:
                tokens.append(Token("IDENT", word, line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYMBOL", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise QuerySyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", None, line, col))
    return tokens
