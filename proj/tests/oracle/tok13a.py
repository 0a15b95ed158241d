"""Reference 13a tokenizer used to produce tests/data/tok13a_cases.json.

Applies the rule table with Python's re module, independently of the C++
scanner. Run: python3 tests/oracle/tok13a.py > tests/data/tok13a_cases.json
"""
import json
import re
import sys


def tok13a(line: str) -> list:
    line = line.replace("&quot;", '"').replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">")
    line = line.replace("\r", " ").replace("\n", " ")
    line = re.sub(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])", r" \1 ", line)
    line = re.sub(r"([^0-9])([\.,])", r"\1 \2 ", line)
    line = re.sub(r"([\.,])([^0-9])", r" \1 \2", line)
    line = re.sub(r"([0-9])(-)", r"\1 \2 ", line)
    return line.split()


CASES = [
    # punctuation
    "Hello, world!",
    "abc",
    "Wait... what?!",
    "(parenthesized) [bracketed] {braced}",
    "a/b\\c|d",
    "\"quoted\" 'single'",
    "semi;colon:colon",
    "x=y+z*w",
    "tab\tseparated",
    "#hash @at $dollar %percent ^caret ~tilde `tick",
    "end.",
    ".start",
    "a,b,c",
    # digit-period
    "3.14",
    "pi is 3.14.",
    "1,000,000 people",
    "v1.2.3",
    "version 2.0, released",
    "5. item",
    "x.5",
    # digit-dash
    "1990-2000",
    "state-of-the-art",
    "-5 degrees",
    "a-1",
    "10--20",
    # entities
    "&quot;hi&quot;",
    "fish &amp; chips",
    "&lt;tag&gt;",
    "&amp;quot;",
    # non-ASCII
    "ಕನ್ನಡ, ತುಳು.",
    "  spaced   out  ",
    "line\r\nbreak",
]

if __name__ == "__main__":
    json.dump([{"input": c, "tokens": tok13a(c)} for c in CASES], sys.stdout, ensure_ascii=False, indent=1)
    sys.stdout.write("\n")
