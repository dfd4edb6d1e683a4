"""
MILP problem data structures
"""
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Set, Tuple

from ..exceptions import NamingError, ParameterError

LE = '<='
GE = '>='
EQ = '='
RELATIONS = (LE, GE, EQ)

MINIMIZE = 'min'
MAXIMIZE = 'max'
SENSES = (MINIMIZE, MAXIMIZE)

NAME_PATTERN = re.compile(r'^[A-Za-z_][A-Za-z0-9_.\[\]]*$')


def check_name(name: str) -> str:
    if not isinstance(name, str) or not NAME_PATTERN.match(name):
        raise NamingError(f"Invalid name {name!r}")
    return name


def check_sense(sense: str) -> str:
    if sense not in SENSES:
        raise ParameterError(f"Sense must be one of {SENSES}, got {sense!r}")
    return sense


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    binary: bool = False

    def __post_init__(self):
        check_name(self.name)
        if self.binary:
            object.__setattr__(self, 'lower', 0.0)
            object.__setattr__(self, 'upper', 1.0)
        if self.lower > self.upper:
            raise ParameterError(f"Variable {self.name} has lower bound above upper bound")

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def renamed(self, name: str) -> 'Variable':
        return Variable(name, self.lower, self.upper, self.binary)


@dataclass(frozen=True)
class Constraint:
    """sum(coefs[v] * v) <relation> rhs"""
    name: str
    coefs: Dict[str, float]
    relation: str
    rhs: float = 0.0

    def __post_init__(self):
        check_name(self.name)
        if self.relation not in RELATIONS:
            raise ParameterError(f"Relation must be one of {RELATIONS}, got {self.relation!r}")
        coefs = {check_name(k): float(v) for k, v in dict(self.coefs).items()}
        object.__setattr__(self, 'coefs', coefs)
        object.__setattr__(self, 'rhs', float(self.rhs))

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.coefs.items())

    def violation(self, values: Mapping[str, float]) -> float:
        """Amount by which `values` violate the row (0 when satisfied)"""
        lhs = self.activity(values)
        if self.relation == LE:
            return max(lhs - self.rhs, 0.0)
        if self.relation == GE:
            return max(self.rhs - lhs, 0.0)
        return abs(lhs - self.rhs)

    def renamed(self, name: str, mapping: Mapping[str, str]) -> 'Constraint':
        return Constraint(name, {mapping.get(k, k): v for k, v in self.coefs.items()},
                          self.relation, self.rhs)


@dataclass(frozen=True)
class VarNames:
    """Names of the model's inputs and output, plus a prefix for auxiliary variables"""
    inputs: Tuple[str, ...]
    output: str = 'y'
    aux_prefix: str = ''

    def __post_init__(self):
        inputs = tuple(self.inputs)
        for name in inputs + (self.output,):
            check_name(name)
        if len(set(inputs + (self.output,))) != len(inputs) + 1:
            raise NamingError("Input and output names must be distinct")
        object.__setattr__(self, 'inputs', inputs)

    @classmethod
    def default(cls, n_inputs: int, aux_prefix: str = '') -> 'VarNames':
        return cls(tuple(f"x{j + 1}" for j in range(n_inputs)), 'y', aux_prefix)

    @property
    def model_variables(self) -> Tuple[str, ...]:
        return self.inputs + (self.output,)

    def aux(self, name: str) -> str:
        return check_name(f"{self.aux_prefix}{name}")


@dataclass
class ConstraintBlock:
    """
    Variables and rows that represent one model

    `variables` lists the model variables (inputs and output, with their
    bounds) first and the auxiliary variables after them; counts refer to
    the auxiliary variables only.
    """
    names: VarNames
    variables: List[Variable]
    constraints: List[Constraint]
    kind: str = ''

    @property
    def auxiliary(self) -> List[Variable]:
        model = set(self.names.model_variables)
        return [v for v in self.variables if v.name not in model]

    @property
    def n_binaries(self) -> int:
        return sum(1 for v in self.auxiliary if v.binary)

    @property
    def n_aux_continuous(self) -> int:
        return sum(1 for v in self.auxiliary if not v.binary)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def counts(self) -> Dict[str, int]:
        return {'binaries': self.n_binaries, 'continuous': self.n_aux_continuous,
                'constraints': self.n_constraints}

    def __str__(self):
        return (f"ConstraintBlock({self.kind}: {self.n_binaries} binaries, "
                f"{self.n_aux_continuous} auxiliary continuous, {self.n_constraints} rows)")


@dataclass
class MilpProblem:
    """Linear objective, bounded continuous variables, binaries and linear rows"""
    name: str = 'problem'
    continuous_vars: List[Variable] = field(default_factory=list)
    binary_vars: List[Variable] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Dict[str, float] = field(default_factory=dict)
    sense: str = MINIMIZE
    _variable_index: Dict[str, Variable] = field(default_factory=dict, init=False, repr=False)
    _row_names: Set[str] = field(default_factory=set, init=False, repr=False)

    def __post_init__(self):
        for variable in self.variables:
            self._variable_index.setdefault(variable.name, variable)
        self._row_names.update(c.name for c in self.constraints)

    @classmethod
    def from_block(cls, block: ConstraintBlock, name: str = 'problem') -> 'MilpProblem':
        problem = cls(name=name)
        problem.add_block(block)
        return problem

    @property
    def variables(self) -> List[Variable]:
        return self.continuous_vars + self.binary_vars

    @property
    def variable_names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def n_binaries(self) -> int:
        return len(self.binary_vars)

    @property
    def n_continuous(self) -> int:
        return len(self.continuous_vars)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def variable(self, name: str) -> Variable:
        try:
            return self._variable_index[name]
        except KeyError:
            raise NamingError(f"Unknown variable {name!r}")

    def has_variable(self, name: str) -> bool:
        return name in self._variable_index

    def add_variable(self, variable: Variable) -> Variable:
        if self.has_variable(variable.name):
            raise NamingError(f"Variable {variable.name!r} declared twice")
        (self.binary_vars if variable.binary else self.continuous_vars).append(variable)
        self._variable_index[variable.name] = variable
        return variable

    def add_constraint(self, constraint: Constraint) -> Constraint:
        if constraint.name in self._row_names:
            raise NamingError(f"Constraint {constraint.name!r} declared twice")
        self.constraints.append(constraint)
        self._row_names.add(constraint.name)
        return constraint

    def add_block(self, block: ConstraintBlock):
        for variable in block.variables:
            self.add_variable(variable)
        for constraint in block.constraints:
            self.add_constraint(constraint)

    def set_objective(self, coefs: Mapping[str, float], sense: str = MINIMIZE):
        self.objective = {check_name(k): float(v) for k, v in coefs.items()}
        self.sense = check_sense(sense)

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.objective.items())

    def validate(self) -> 'MilpProblem':
        """
        Check names, duplicates and references

        Raises:
            NamingError: On duplicate or undeclared names
        """
        check_sense(self.sense)
        names = self.variable_names
        if len(set(names)) != len(names):
            raise NamingError("Duplicate variable names")
        row_names = [c.name for c in self.constraints]
        if len(set(row_names)) != len(row_names):
            raise NamingError("Duplicate constraint names")
        declared = set(names)
        for c in self.constraints:
            unknown = set(c.coefs) - declared
            if unknown:
                raise NamingError(f"Constraint {c.name} uses undeclared {sorted(unknown)}")
        unknown = set(self.objective) - declared
        if unknown:
            raise NamingError(f"Objective uses undeclared {sorted(unknown)}")
        return self

    def max_violation(self, values: Mapping[str, float]) -> float:
        worst = 0.0
        for v in self.variables:
            x = values[v.name]
            worst = max(worst, v.lower - x, x - v.upper)
        for c in self.constraints:
            worst = max(worst, c.violation(values))
        return worst

    def __str__(self):
        return (f"MilpProblem({self.name}: {self.n_continuous} continuous, "
                f"{self.n_binaries} binaries, {self.n_constraints} rows)")


def _suffixed(name: str, copy: int) -> str:
    return check_name(f"{name}_{copy}")


def replicate(block: ConstraintBlock, count: int, name: str = 'replicated') -> MilpProblem:
    """
    Problem holding `count` disjoint copies of a block

    With count == 1 the block is used as is; otherwise every variable and
    row name of copy k (1-based) gets the suffix `_k`.

    Raises:
        NamingError: If renamed copies collide
    """
    if count < 1:
        raise ParameterError(f"Replication count must be >= 1, got {count}")
    problem = MilpProblem(name=name)
    if count == 1:
        problem.add_block(block)
        return problem

    for copy in range(1, count + 1):
        mapping = {v.name: _suffixed(v.name, copy) for v in block.variables}
        for variable in block.variables:
            problem.add_variable(variable.renamed(mapping[variable.name]))
        for constraint in block.constraints:
            problem.add_constraint(
                constraint.renamed(_suffixed(constraint.name, copy), mapping)
            )
    return problem


def copy_names(names: VarNames, count: int) -> List[VarNames]:
    """Model-variable names of each copy made by replicate()"""
    if count == 1:
        return [names]
    return [
        VarNames(tuple(_suffixed(x, k) for x in names.inputs), _suffixed(names.output, k),
                 names.aux_prefix)
        for k in range(1, count + 1)
    ]


def fix_variables(problem: MilpProblem, values: Mapping[str, float],
                  prefix: str = 'fix') -> MilpProblem:
    """Add one equality row per entry of `values`"""
    for variable, value in values.items():
        problem.variable(variable)
        problem.add_constraint(Constraint(f"{prefix}_{variable}", {variable: 1.0}, EQ, value))
    return problem


def block_variables(names: VarNames, box_lower: Sequence[float],
                    box_upper: Sequence[float]) -> List[Variable]:
    """Bounded model variables for a block over the (x, y) box"""
    return [Variable(name, float(lo), float(hi))
            for name, lo, hi in zip(names.model_variables, box_lower, box_upper)]
