"""
LP text format writer and reader

Sections: objective, Subject To, Bounds, Binaries, End. Numbers are written
with 17 significant digits, rows and variables in declaration order, so a
written problem reads back equal to the original.
"""
import io
import math
import os
import re
from typing import Dict, IO, Iterable, List, Optional, Tuple, Union

from ..exceptions import DataFormatError, ExportError, NamingError
from .problem import (
    EQ, GE, LE, MAXIMIZE, MINIMIZE, Constraint, MilpProblem, Variable, check_name
)

NUMBER_FORMAT = '%.17g'
LINE_WIDTH = 200

_SECTIONS = {
    'minimize': 'min', 'minimum': 'min', 'min': 'min',
    'maximize': 'max', 'maximum': 'max', 'max': 'max',
    'subject to': 'rows', 'such that': 'rows', 'st': 'rows', 's.t.': 'rows',
    'bounds': 'bounds', 'bound': 'bounds',
    'binaries': 'binaries', 'binary': 'binaries', 'bin': 'binaries',
    'end': 'end',
}
_RELATIONS = {'<=': LE, '=<': LE, '<': LE, '>=': GE, '=>': GE, '>': GE, '=': EQ}
_NUMBER = re.compile(r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$')
_TOKEN = re.compile(
    r'[<>=]+|[+-]|:|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[A-Za-z_][A-Za-z0-9_.\[\]]*|\S'
)


def format_number(value: float) -> str:
    if math.isinf(value):
        return '+inf' if value > 0 else '-inf'
    return NUMBER_FORMAT % value


class LpTextBuilder:
    """Helper class for building LP text fragments"""

    @staticmethod
    def header(problem: MilpProblem) -> str:
        return f"\\ Problem: {problem.name}"

    @staticmethod
    def sense(sense: str) -> str:
        return 'Minimize' if sense == MINIMIZE else 'Maximize'

    @staticmethod
    def linear_expression(coefs: Dict[str, float]) -> str:
        """
        Linear expression such as "2 x1 - 0.5 y"

        Raises:
            NamingError: If a term has no valid variable name
        """
        parts = []
        for name, coef in coefs.items():
            if not name:
                raise NamingError("Cannot write a term without a variable name")
            check_name(name)
            sign = '-' if math.copysign(1.0, coef) < 0 else '+'
            number = format_number(abs(coef))
            if parts:
                parts.append(f"{sign} {number} {name}")
            else:
                parts.append(f"{'- ' if sign == '-' else ''}{number} {name}")
        return ' '.join(parts)

    @staticmethod
    def row(label: str, expression: str, relation: str, rhs: Optional[float] = None) -> str:
        text = f" {label}: {expression}"
        if rhs is not None:
            text += f" {relation} {format_number(rhs)}"
        return text

    @staticmethod
    def bound(variable: Variable) -> str:
        if math.isinf(variable.lower) and math.isinf(variable.upper):
            return f" {variable.name} free"
        return (f" {format_number(variable.lower)} <= {variable.name} "
                f"<= {format_number(variable.upper)}")

    @staticmethod
    def wrap(line: str, width: int = LINE_WIDTH) -> List[str]:
        """Split a long row at term boundaries; continuation lines start with blanks"""
        if len(line) <= width:
            return [line]
        lines, current = [], ''
        for word in line.split(' '):
            if current and len(current) + 1 + len(word) > width and word in ('+', '-'):
                lines.append(current)
                current = '   ' + word
            else:
                current = f"{current} {word}" if current else word
        lines.append(current)
        return [lines[0] if lines[0].startswith(' ') else ' ' + lines[0]] + lines[1:]


class LpTextWriter:
    """
    Line writer over a text stream that keeps byte and line counts
    """

    def __init__(self, outfile: IO[str]):
        self.outfile = outfile
        self.bytes_written = 0
        self.lines_written = 0

    def write(self, line: str) -> int:
        self.outfile.write(line + '\n')
        count = len(line.encode('utf-8')) + 1
        self.bytes_written += count
        self.lines_written += 1
        return count

    def write_all(self, lines: Iterable[str]):
        for line in lines:
            self.write(line)

    def flush(self):
        if hasattr(self.outfile, 'flush'):
            self.outfile.flush()

    @property
    def stats(self) -> Dict[str, int]:
        return {'bytes_written': self.bytes_written, 'lines_written': self.lines_written}

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.flush()
        return False


def problem_lines(problem: MilpProblem) -> List[str]:
    problem.validate()
    builder = LpTextBuilder
    lines = [builder.header(problem), builder.sense(problem.sense)]
    lines += builder.wrap(builder.row('obj', builder.linear_expression(problem.objective), ''))
    lines.append('Subject To')
    fallback = problem.variable_names[:1]
    for constraint in problem.constraints:
        coefs = constraint.coefs or {name: 0.0 for name in fallback}
        if not coefs:
            raise ExportError(f"Row {constraint.name} has no terms and the problem no variables")
        lines += builder.wrap(builder.row(constraint.name, builder.linear_expression(coefs),
                                          constraint.relation, constraint.rhs))
    lines.append('Bounds')
    lines += [builder.bound(v) for v in problem.continuous_vars]
    if problem.binary_vars:
        lines.append('Binaries')
        lines += [f" {v.name}" for v in problem.binary_vars]
    lines.append('End')
    return lines


def export_lp(problem: MilpProblem, destination: Union[str, os.PathLike, IO[str], None] = None
              ) -> str:
    """
    Write a problem in LP format

    Args:
        problem: Problem to write
        destination: Path or text stream (only the text is returned if None)

    Returns:
        The LP document

    Raises:
        ExportError: If writing fails
        NamingError: On invalid names
    """
    lines = problem_lines(problem)
    text = '\n'.join(lines) + '\n'
    if destination is None:
        return text
    try:
        if hasattr(destination, 'write'):
            LpTextWriter(destination).write_all(lines)
        else:
            with open(destination, 'w', encoding='utf-8') as handle, \
                    LpTextWriter(handle) as writer:
                writer.write_all(lines)
    except OSError as e:
        raise ExportError(f"Failed to write LP file {destination}: {e}")
    return text


def _strip_comment(line: str) -> str:
    index = line.find('\\')
    return line if index < 0 else line[:index]


def _section_of(line: str) -> Optional[str]:
    key = ' '.join(line.strip().lower().split())
    return _SECTIONS.get(key)


def _parse_terms(tokens: List[str], where: str) -> Dict[str, float]:
    terms: Dict[str, float] = {}
    sign, coef = 1.0, None
    for token in tokens:
        if token in ('+', '-'):
            sign = sign * (-1.0 if token == '-' else 1.0)
            continue
        if _NUMBER.match(token):
            coef = float(token)
            continue
        name = token
        try:
            check_name(name)
        except NamingError:
            raise DataFormatError(f"{where}: invalid variable name {name!r}")
        value = sign * (1.0 if coef is None else coef)
        terms[name] = terms.get(name, 0.0) + value if name in terms else value
        sign, coef = 1.0, None
    if coef is not None:
        raise DataFormatError(f"{where}: constants are not supported in expressions")
    return terms


def _split_label(tokens: List[str], default: str) -> Tuple[str, List[str]]:
    if tokens and tokens[0].endswith(':'):
        return tokens[0][:-1], tokens[1:]
    if len(tokens) > 1 and tokens[1] == ':':
        return tokens[0], tokens[2:]
    return default, tokens


def _parse_rows(text: str) -> List[Constraint]:
    tokens = _TOKEN.findall(text)
    rows: List[Constraint] = []
    current: List[str] = []
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if token in _RELATIONS:
            if index + 1 >= len(tokens):
                raise DataFormatError("Row without right-hand side")
            rhs_tokens = [tokens[index + 1]]
            index += 2
            if rhs_tokens[0] in ('+', '-') and index < len(tokens):
                rhs_tokens.append(tokens[index])
                index += 1
            try:
                rhs = float(''.join(rhs_tokens))
            except ValueError:
                raise DataFormatError(f"Invalid right-hand side {' '.join(rhs_tokens)!r}")
            name, body = _split_label(current, f"R{len(rows) + 1}")
            rows.append(Constraint(name, _parse_terms(body, f"Row {name}"),
                                   _RELATIONS[token], rhs))
            current = []
            continue
        current.append(token)
        index += 1
    if current:
        raise DataFormatError("Row without relation at the end of Subject To")
    return rows


def _parse_bound(line: str, bounds: Dict[str, List[float]]):
    tokens = line.split()
    lowered = [t.lower() for t in tokens]
    if len(tokens) == 2 and lowered[1] == 'free':
        bounds.setdefault(tokens[0], [0.0, math.inf])[:] = [-math.inf, math.inf]
        return
    try:
        if len(tokens) == 5 and tokens[1] in _RELATIONS and tokens[3] in _RELATIONS:
            lo, name, hi = float(tokens[0]), tokens[2], float(tokens[4])
            bounds.setdefault(name, [0.0, math.inf])[:] = [lo, hi]
            return
        if len(tokens) == 3 and tokens[1] in _RELATIONS:
            relation = _RELATIONS[tokens[1]]
            try:
                value, name = float(tokens[2]), tokens[0]
            except ValueError:
                value, name = float(tokens[0]), tokens[2]
                relation = {LE: GE, GE: LE, EQ: EQ}[relation]
            entry = bounds.setdefault(name, [0.0, math.inf])
            if relation in (GE, EQ):
                entry[0] = value
            if relation in (LE, EQ):
                entry[1] = value
            return
    except ValueError:
        pass
    raise DataFormatError(f"Cannot parse bound {line.strip()!r}")


def parse_lp(text: str) -> MilpProblem:
    """
    Parse an LP document written by export_lp (or a compatible subset)

    Raises:
        DataFormatError: On unknown sections or malformed rows
    """
    name = 'problem'
    sense = None
    sections: Dict[str, List[str]] = {'obj': [], 'rows': [], 'bounds': [], 'binaries': []}
    current = None
    ended = False
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith('\\') and stripped[1:].strip().lower().startswith('problem:'):
            name = stripped.split(':', 1)[1].strip() or name
            continue
        line = _strip_comment(raw)
        if not line.strip():
            continue
        section = _section_of(line)
        if section is not None:
            if section == 'end':
                ended = True
                break
            if section in ('min', 'max'):
                sense = MINIMIZE if section == 'min' else MAXIMIZE
                current = 'obj'
            else:
                current = section
            continue
        if current is None:
            raise DataFormatError(f"Line {number}: content before the objective section")
        sections[current].append(line)
    if sense is None:
        raise DataFormatError("LP document has no Minimize/Maximize section")
    if not ended:
        raise DataFormatError("LP document is truncated (missing End)")

    objective_tokens = _TOKEN.findall(' '.join(sections['obj']))
    _, objective_body = _split_label(objective_tokens, 'obj')
    objective = _parse_terms(objective_body, 'Objective')
    rows = _parse_rows(' '.join(sections['rows']))

    bounds: Dict[str, List[float]] = {}
    for line in sections['bounds']:
        _parse_bound(line, bounds)
    binaries: List[str] = []
    for line in sections['binaries']:
        binaries += line.split()

    try:
        problem = MilpProblem(name=name)
        problem.sense = sense
        for var_name, (lo, hi) in bounds.items():
            if var_name not in binaries:
                problem.add_variable(Variable(var_name, lo, hi))
        for var_name in binaries:
            problem.add_variable(Variable(var_name, binary=True))
        referenced = list(objective) + [v for row in rows for v in row.coefs]
        for var_name in referenced:
            if not problem.has_variable(var_name):
                problem.add_variable(Variable(var_name))
        for row in rows:
            problem.add_constraint(row)
        problem.objective = objective
        return problem.validate()
    except NamingError as e:
        raise DataFormatError(f"Invalid LP document: {e}")


def read_lp(source: Union[str, os.PathLike, IO[str]]) -> MilpProblem:
    """Read an LP document from a path or text stream"""
    if hasattr(source, 'read'):
        return parse_lp(source.read())
    try:
        with open(source, 'r', encoding='utf-8') as handle:
            return parse_lp(handle.read())
    except OSError as e:
        raise DataFormatError(f"Cannot read LP file {source}: {e}")


def lp_round_trip(problem: MilpProblem) -> MilpProblem:
    buffer = io.StringIO()
    export_lp(problem, buffer)
    return parse_lp(buffer.getvalue())
