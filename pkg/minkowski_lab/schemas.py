from typing import Annotated, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    StringConstraints,
    model_validator,
)

from minkowski_lab.utils.enums import (
    ContentTarget,
    DilationMode,
    DistanceMethod,
    FieldFormat,
    Functional,
    Subject,
)

NameStr = Annotated[
    str, StringConstraints(min_length=1, max_length=64, strip_whitespace=True)
]
Vector = list[float]


class Base(BaseModel):
    model_config = ConfigDict(extra="forbid", from_attributes=True)


class BodyDescription(Base):
    id: NameStr
    kind: Literal["ball", "polytope", "interval", "box"]
    dimension: Optional[int] = Field(default=None, ge=1)
    radius: Optional[PositiveFloat] = None
    vertices: Optional[list[Vector]] = None
    interval: Optional[tuple[float, float]] = None
    lo: Optional[Vector] = None
    hi: Optional[Vector] = None

    @model_validator(mode="after")
    def check_payload(self) -> "BodyDescription":
        if self.kind == "ball" and (self.radius is None or self.dimension is None):
            raise ValueError("a ball needs 'radius' and 'dimension'")
        if self.kind == "polytope" and not self.vertices:
            raise ValueError("a polytope needs 'vertices'")
        if self.kind == "interval" and self.interval is None:
            raise ValueError("an interval body needs 'interval'")
        if self.kind == "box" and (
            self.lo is None or self.hi is None or len(self.lo) != len(self.hi)
        ):
            raise ValueError("a box needs 'lo' and 'hi' of equal length")
        return self

    @property
    def resolved_dimension(self) -> int:
        if self.kind == "ball":
            return int(self.dimension)
        if self.kind == "interval":
            return 1
        if self.kind == "box":
            return len(self.lo)
        return len(self.vertices[0])


class IntervalDescription(Base):
    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = True

    @model_validator(mode="after")
    def check_order(self) -> "IntervalDescription":
        if self.lo > self.hi:
            raise ValueError("'lo' must not exceed 'hi'")
        if self.lo == self.hi and not (self.closed_lo and self.closed_hi):
            raise ValueError("a degenerate interval must be closed")
        return self


class BallShape(Base):
    op: Literal["ball"]
    center: Vector
    radius: PositiveFloat


class BoxShape(Base):
    op: Literal["box"]
    lo: Vector
    hi: Vector


class PolygonShape(Base):
    op: Literal["polygon"]
    vertices: list[Annotated[Vector, Field(min_length=2, max_length=2)]] = Field(
        min_length=3
    )


class PointsShape(Base):
    op: Literal["points"]
    points: list[Vector] = Field(min_length=1)


class SegmentsShape(Base):
    op: Literal["segments"]
    segments: list[tuple[Vector, Vector]] = Field(min_length=1)


class IntervalsShape(Base):
    op: Literal["intervals"]
    intervals: list[IntervalDescription] = Field(min_length=1)


class WholeShape(Base):
    op: Literal["whole"]
    dimension: int = Field(ge=1, le=3)


class UnionShape(Base):
    op: Literal["union"]
    operands: list["ShapeDescription"] = Field(min_length=1)


class IntersectionShape(Base):
    op: Literal["intersection"]
    operands: list["ShapeDescription"] = Field(min_length=1)


class DifferenceShape(Base):
    op: Literal["difference"]
    left: "ShapeDescription"
    right: "ShapeDescription"


ShapeDescription = Annotated[
    Union[
        BallShape,
        BoxShape,
        PolygonShape,
        PointsShape,
        SegmentsShape,
        IntervalsShape,
        WholeShape,
        UnionShape,
        IntersectionShape,
        DifferenceShape,
    ],
    Field(discriminator="op"),
]

UnionShape.model_rebuild()
IntersectionShape.model_rebuild()
DifferenceShape.model_rebuild()


class WindowDescription(Base):
    lo: Vector
    hi: Vector

    @model_validator(mode="after")
    def check_extent(self) -> "WindowDescription":
        if len(self.lo) != len(self.hi):
            raise ValueError("'lo' and 'hi' must have the same length")
        if any(low >= high for low, high in zip(self.lo, self.hi)):
            raise ValueError("the window must have positive extent on every axis")
        return self


class DomainDescription(Base):
    region: Optional[ShapeDescription] = None
    window: WindowDescription


class LadderDescription(Base):
    eps_max: Optional[PositiveFloat] = None
    points: Optional[int] = Field(default=None, ge=3, le=12)
    values: Optional[list[PositiveFloat]] = Field(default=None, min_length=3)


class ToleranceDescription(Base):
    rel_tol: Optional[PositiveFloat] = None
    bracket_tol: Optional[PositiveFloat] = None
    lower_bound_tol: Optional[PositiveFloat] = None
    abs_floor_factor: Optional[PositiveFloat] = None


class FunctionalRequest(Base):
    functional: Functional
    target: ContentTarget = ContentTarget.SET
    subject: Subject = Subject.E

    @model_validator(mode="after")
    def check_target(self) -> "FunctionalRequest":
        one_sided = (Functional.SM, Functional.SCRIPT_M)
        if self.functional in one_sided and self.target != ContentTarget.SET:
            raise ValueError(f"{self.functional.value} is only defined on sets")
        return self


class OutputDescription(Base):
    directory: str = "reports"
    ladder_csv: str = "ladder.csv"
    summary_csv: str = "summary.csv"
    record_json: str = "report.json"


class Scenario(Base):
    name: NameStr
    dimension: int = Field(ge=1, le=3)
    domain: DomainDescription
    shape: ShapeDescription
    bodies: list[BodyDescription] = Field(min_length=1)
    functionals: list[FunctionalRequest] = []
    relations: bool = True
    grid: Optional[int] = Field(default=None, ge=8)
    ladder: LadderDescription = LadderDescription()
    tolerances: ToleranceDescription = ToleranceDescription()
    output: OutputDescription = OutputDescription()
    dilation_mode: Optional[DilationMode] = None

    @model_validator(mode="after")
    def check_references(self) -> "Scenario":
        ids = [body.id for body in self.bodies]
        if len(ids) != len(set(ids)):
            raise ValueError("body ids must be unique")
        if len(self.domain.window.lo) != self.dimension:
            raise ValueError("window dimension does not match the scenario")
        for body in self.bodies:
            if body.resolved_dimension != self.dimension:
                raise ValueError(f"body '{body.id}' has the wrong dimension")
        return self

    def body(self, body_id: str) -> BodyDescription:
        for body in self.bodies:
            if body.id == body_id:
                return body
        raise KeyError(body_id)


class EstimateRecord(Base):
    value: float
    slope: float
    residual: float
    lower: float
    upper: float
    limit_lower: float
    limit_upper: float
    converged: bool


class CurveRecord(Base):
    functional: Functional
    target: ContentTarget
    subject: Subject
    body: str
    spacing: Optional[float]
    ladder: list[float]
    values: list[float]
    estimate: EstimateRecord
    target_value: float
    exists: bool

    @property
    def target_label(self) -> str:
        if self.subject == Subject.E:
            return self.target.value
        return f"{self.target.value}:{self.subject.value}"


class BodyRelations(Base):
    body: str
    perimeter_outward: float
    perimeter_inward: float
    half_sum: float
    lower_bound_outer: bool
    lower_bound_boundary: bool
    chain_holds: bool
    coincidence: Optional[bool] = None
    outer_formula: Optional[bool] = None
    representative_minimum: Optional[bool] = None


class SandwichRecord(Base):
    functional: Functional
    inner_body: str
    outer_body: str
    lower_factor: float
    upper_factor: float
    eps: float
    holds: Optional[bool]


class RelationReport(Base):
    curves: list[CurveRecord]
    bodies: list[BodyRelations]
    agreement: dict[str, bool]
    closure_inside: bool
    sandwiches: list[SandwichRecord] = []


class LadderRow(Base):
    scenario: str
    functional: str
    target: str
    body: str
    h: Optional[float]
    eps: float
    value: float


class SummaryRow(Base):
    scenario: str
    functional: str
    target: str
    body: str
    estimate: float
    lower: float
    upper: float
    target_value: float
    exists_flag: bool


class Report(Base):
    scenario: dict
    curves: list[CurveRecord]
    relations: Optional[RelationReport] = None


class FieldHeader(Base):
    dimension: int
    counts: list[int]
    origin: list[float]
    spacing: float
    body: str
    method: DistanceMethod
    format: FieldFormat = FieldFormat.BINARY


class CheckResult(Base):
    module: str
    name: str
    passed: bool
    detail: str = ""


class SuiteReport(Base):
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


class RunOptions(Base):
    """Command-line overrides applied on top of a scenario."""

    grid: Optional[int] = Field(default=None, ge=8)
    eps_max: Optional[PositiveFloat] = None
    eps_points: Optional[int] = Field(default=None, ge=3, le=12)
    rel_tol: Optional[PositiveFloat] = None
    out: Optional[str] = None
