import io
import math

import pytest

from pwca_milp.exceptions import DataFormatError, ExportError
from pwca_milp.milp.lp_format import (
    LpTextBuilder, export_lp, format_number, lp_round_trip, parse_lp, read_lp
)
from pwca_milp.milp.problem import (
    EQ, GE, LE, MAXIMIZE, Constraint, MilpProblem, Variable
)


@pytest.fixture
def problem():
    p = MilpProblem(name='toy')
    p.add_variable(Variable('x1', -1.0, 2.5))
    p.add_variable(Variable('y', -math.inf, math.inf))
    p.add_variable(Variable('z', 0.0, math.inf))
    p.add_variable(Variable('t', binary=True))
    p.add_constraint(Constraint('c1', {'x1': 1.0, 'y': -0.1, 't': 3e-12}, LE, -0.25))
    p.add_constraint(Constraint('c2', {'y': 2.0, 'z': 1.0}, GE, 1e6))
    p.add_constraint(Constraint('c3', {'x1': 1.0, 't': -1.0}, EQ, 0.0))
    p.set_objective({'y': 1.0, 'z': -0.3333333333333333}, MAXIMIZE)
    return p


class TestFormatNumber:
    def test_infinities(self):
        assert format_number(math.inf) == '+inf'
        assert format_number(-math.inf) == '-inf'

    def test_round_trips_exactly(self):
        value = 0.1 + 0.2
        assert float(format_number(value)) == value


class TestExport:
    def test_sections(self, problem):
        text = export_lp(problem)
        lines = text.splitlines()
        assert lines[0] == '\\ Problem: toy'
        assert lines[1] == 'Maximize'
        for section in ('Subject To', 'Bounds', 'Binaries', 'End'):
            assert section in lines
        assert ' y free' in lines
        assert ' 0 <= z <= +inf' in lines

    def test_write_to_path(self, problem, tmp_path):
        path = tmp_path / 'toy.lp'
        text = export_lp(problem, path)
        assert path.read_text(encoding='utf-8') == text

    def test_write_to_stream(self, problem):
        buffer = io.StringIO()
        export_lp(problem, buffer)
        assert buffer.getvalue() == export_lp(problem)

    def test_unwritable_path(self, problem, tmp_path):
        with pytest.raises(ExportError):
            export_lp(problem, tmp_path / 'missing' / 'toy.lp')


class TestRoundTrip:
    def test_equal_after_parse(self, problem):
        parsed = lp_round_trip(problem)
        assert parsed.name == 'toy'
        assert parsed.sense == MAXIMIZE
        assert parsed.objective == problem.objective
        assert parsed.variables == problem.variables
        assert parsed.constraints == problem.constraints

    def test_read_lp_from_file(self, problem, tmp_path):
        path = tmp_path / 'toy.lp'
        export_lp(problem, path)
        assert read_lp(path).constraints == problem.constraints


class TestParse:
    def test_hand_written(self):
        text = """
\\ a comment line
Minimize
 obj: x + 2 y
Subject To
 c1: x + y >= 1
 x - y <= 3
Bounds
 x <= 4
 -1 <= y <= 1
End
"""
        problem = parse_lp(text)
        assert problem.objective == {'x': 1.0, 'y': 2.0}
        assert [c.name for c in problem.constraints] == ['c1', 'R2']
        assert problem.variable('x').upper == 4.0
        assert problem.variable('y').lower == -1.0

    @pytest.mark.parametrize('text', [
        'Subject To\n c: x >= 1\nEnd\n',
        'Minimize\n obj: x\nSubject To\n c: x >= 1\n',
        'Minimize\n obj: x\nSubject To\n c: x + 1\nEnd\n',
        'Minimize\n obj: x\nBounds\n x between 0 and 1\nEnd\n',
        'Minimize\n obj: 3\nEnd\n',
    ])
    def test_malformed(self, text):
        with pytest.raises(DataFormatError):
            parse_lp(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            read_lp(tmp_path / 'nope.lp')


class TestWrap:
    def test_short_line_untouched(self):
        assert LpTextBuilder.wrap(' c: 1 x <= 2') == [' c: 1 x <= 2']

    def test_long_line_split_at_signs(self):
        expression = LpTextBuilder.linear_expression({f"x{i}": 1.5 for i in range(60)})
        line = LpTextBuilder.row('long', expression, LE, 1.0)
        lines = LpTextBuilder.wrap(line, width=80)
        assert len(lines) > 1
        assert all(len(part) <= 100 for part in lines)
        assert all(part.lstrip().startswith('+') for part in lines[1:])

    def test_wrapped_rows_parse(self):
        problem = MilpProblem(name='wide')
        for i in range(80):
            problem.add_variable(Variable(f"x{i}", 0.0, 1.0))
        problem.add_constraint(Constraint('sum', {f"x{i}": 0.125 for i in range(80)}, LE, 5.0))
        assert lp_round_trip(problem).constraints == problem.constraints
