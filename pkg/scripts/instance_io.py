import json
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, BeforeValidator, ValidationError, model_validator

from avvi.exact_linalg import Matrix, Vector
from avvi.model import UNCONSTRAINED, AffineOperator, AvviProblem, Polyhedron
from avvi.utils import atomic_write_text, canonical_json, format_rational, to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class InstanceFormatError(ValueError):
    pass


def _ratstr(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValueError(f"expected an integer or a 'num/den' string, got {value!r}")
    try:
        return format_rational(to_rational(value))
    except (TypeError, ZeroDivisionError) as e:
        raise ValueError(str(e)) from e


RatStr = Annotated[str, BeforeValidator(_ratstr)]


class OperatorModel(BaseModel):
    M: List[List[RatStr]]
    q: List[RatStr]


class ConstraintModel(BaseModel):
    A: List[List[RatStr]]
    b: List[RatStr]

    @model_validator(mode="after")
    def check_rows(self):
        if len(self.A) != len(self.b):
            raise ValueError(f"A has {len(self.A)} rows but b has {len(self.b)} entries")
        if not self.A:
            raise ValueError("use null constraints for an unconstrained problem")
        return self


class InstanceFile(BaseModel):
    n: int
    m: int
    operators: List[OperatorModel]
    constraints: Optional[ConstraintModel] = None
    meta: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_dimensions(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")
        if len(self.operators) != self.m:
            raise ValueError(f"m={self.m} but {len(self.operators)} operators given")
        for k, op in enumerate(self.operators):
            if len(op.M) != self.n or any(len(row) != self.n for row in op.M):
                raise ValueError(f"operator {k}: M must be {self.n}x{self.n}")
            if len(op.q) != self.n:
                raise ValueError(f"operator {k}: q must have length {self.n}")
        if self.constraints is not None and any(len(row) != self.n for row in self.constraints.A):
            raise ValueError(f"constraint rows must have length {self.n}")
        return self

    def to_problem(self) -> AvviProblem:

        operators = tuple(
            AffineOperator(Matrix.from_rows([[to_rational(x) for x in row] for row in op.M]), Vector(tuple(to_rational(x) for x in op.q)))
            for op in self.operators
        )
        constraint = UNCONSTRAINED
        if self.constraints is not None:
            constraint = Polyhedron(
                Matrix.from_rows([[to_rational(x) for x in row] for row in self.constraints.A]),
                Vector(tuple(to_rational(x) for x in self.constraints.b)),
            )
        return AvviProblem(operators, constraint, meta=dict(self.meta))

    @classmethod
    def from_problem(cls, problem: AvviProblem) -> "InstanceFile":

        constraints = None
        if not problem.is_unconstrained:
            constraints = {"A": problem.constraint.A.to_list(), "b": problem.constraint.b.to_list()}
        return cls(
            n=problem.n,
            m=problem.m,
            operators=[{"M": op.M.to_list(), "q": op.q.to_list()} for op in problem.operators],
            constraints=constraints,
            meta=dict(problem.meta),
        )


def parse_instance(text: str) -> AvviProblem:

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"instance is not valid JSON: {e}") from e
    try:
        return InstanceFile.model_validate(data).to_problem()
    except ValidationError as e:
        raise InstanceFormatError(f"invalid instance file: {e}") from e


def load_instance(path) -> AvviProblem:

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError(f"cannot read {path}: {e}") from e
    problem = parse_instance(text)
    logger.info(f"Loaded instance {path} (n={problem.n}, m={problem.m}, p={problem.p})")
    return problem


def dumps_instance(problem: AvviProblem) -> str:
    return canonical_json(InstanceFile.from_problem(problem).model_dump())


def save_instance(problem: AvviProblem, path) -> Path:
    return atomic_write_text(path, dumps_instance(problem))
