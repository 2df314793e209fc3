"""
Stability report of the Lorenz equilibria and its serializations.
"""
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel

from lorenz.equilibria import equilibria, rho_crit
from lorenz.models import EquilibriumAnalysis, LorenzParams

from .export import dumps_json

MAX_LINEAR_EIGENVALUES = 3


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        return cls(re=value.real, im=value.imag)


class ParamsEcho(BaseModel):
    sigma: float
    rho: float
    beta: float


class EquilibriumRecord(BaseModel):
    kind: str
    x: float
    y: float
    z: float
    p11: float
    p12: float
    p21: float
    p22: float
    lambda_plus: ComplexValue
    lambda_minus: ComplexValue
    kappa: float
    theta: ComplexValue
    trace: float
    det: float
    condition1: float
    condition2: float
    jacobi: str
    jacobi_stable: bool
    marginal: bool
    linear_tau: float
    linear_delta: float
    linear_label: str
    linear_stable: bool
    linear_eigenvalues: List[ComplexValue]

    @classmethod
    def from_analysis(cls, analysis: EquilibriumAnalysis) -> "EquilibriumRecord":
        spectrum = analysis.spectrum
        location = analysis.location
        (p11, p12), (p21, p22) = analysis.p_matrix.tolist()
        return cls(
            kind=analysis.kind.value,
            x=location.x,
            y=location.y,
            z=location.z,
            p11=p11,
            p12=p12,
            p21=p21,
            p22=p22,
            lambda_plus=ComplexValue.of(spectrum.lambda_plus),
            lambda_minus=ComplexValue.of(spectrum.lambda_minus),
            kappa=spectrum.kappa,
            theta=ComplexValue.of(spectrum.theta),
            trace=spectrum.trace_condition,
            det=spectrum.det_condition,
            condition1=analysis.theorem_condition1,
            condition2=analysis.theorem_condition2,
            jacobi=analysis.jacobi_label,
            jacobi_stable=spectrum.jacobi_stable,
            marginal=analysis.marginal,
            linear_tau=analysis.linear_tau,
            linear_delta=analysis.linear_delta,
            linear_label=analysis.linear_label,
            linear_stable=analysis.linearly_stable,
            linear_eigenvalues=[ComplexValue.of(v) for v in analysis.linear_eigenvalues],
        )


class StabilityReport(BaseModel):
    params: ParamsEcho
    rho_crit: Optional[float]
    rho_regime: str
    equilibria: List[EquilibriumRecord]


def build_report(p: LorenzParams) -> StabilityReport:
    p.require_reducible()
    return StabilityReport(
        params=ParamsEcho(sigma=p.sigma, rho=p.rho, beta=p.beta),
        rho_crit=rho_crit(p),
        rho_regime="rho<=1: origin only" if p.rho <= 1.0 else "rho>1: origin and S±",
        equilibria=[EquilibriumRecord.from_analysis(a) for a in equilibria(p)],
    )


def report_to_json(report: StabilityReport) -> str:
    return dumps_json(report.model_dump())


REPORT_COLUMNS = [
    "sigma", "rho", "beta", "rho_crit", "kind", "x", "y", "z",
    "p11", "p12", "p21", "p22",
    "lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im",
    "kappa", "theta_re", "theta_im", "trace", "det", "condition1", "condition2",
    "jacobi", "jacobi_stable", "marginal",
    "linear_tau", "linear_delta", "linear_label", "linear_stable",
] + [
    f"linear_lambda{k}_{part}" for k in range(1, MAX_LINEAR_EIGENVALUES + 1) for part in ("re", "im")
]


def report_rows(report: StabilityReport) -> Tuple[List[str], List[List[Any]]]:
    """One flat row per equilibrium, in REPORT_COLUMNS order."""
    rows = []
    for record in report.equilibria:
        eigen: List[Any] = []
        for k in range(MAX_LINEAR_EIGENVALUES):
            if k < len(record.linear_eigenvalues):
                eigen += [record.linear_eigenvalues[k].re, record.linear_eigenvalues[k].im]
            else:
                eigen += [None, None]
        rows.append([
            report.params.sigma, report.params.rho, report.params.beta, report.rho_crit,
            record.kind, record.x, record.y, record.z,
            record.p11, record.p12, record.p21, record.p22,
            record.lambda_plus.re, record.lambda_plus.im,
            record.lambda_minus.re, record.lambda_minus.im,
            record.kappa, record.theta.re, record.theta.im,
            record.trace, record.det, record.condition1, record.condition2,
            record.jacobi, record.jacobi_stable, record.marginal,
            record.linear_tau, record.linear_delta, record.linear_label, record.linear_stable,
        ] + eigen)
    return REPORT_COLUMNS, rows
