"""
Volume growth experiments: entropy, isoperimetric inequality, spectrum bottom and Margulis function
"""

import numpy as np

from experiments.base_experiment import BaseExperiment, param, tag_tables
from experiments.model_space_experiments import closed_form_tau
from geometry.asymptotics import (
    default_entropy_window, entropy_estimate, isoperimetric_check, margulis, margulis_rate_check,
    sphere_constant, spectrum_bottom, volume_curve,
)
from geometry.curvature_profiles import is_constant_curvature, manifold_params
from geometry.jacobi_riccati import default_radius
from models.data_models import CheckRecord, CurvatureProfile, ExperimentConfig, ExperimentKind, Report, Table


class EntropyExperiment(BaseExperiment):
    """E = nh by regression, the isoperimetric inequality and lambda_0 = E^2/4"""

    kinds = (ExperimentKind.ENTROPY,)

    def __init__(self):
        super().__init__("entropy")

    def build_report(self, config: ExperimentConfig) -> Report:
        report = Report(name=config.name, kind=config.kind.value)
        for p in self.resolve_profiles(config):
            report.extend(self.profile_checks(p, config))
        return report

    def profile_checks(self, p: CurvatureProfile, config: ExperimentConfig) -> Report:
        report = Report(name=f"entropy-{p.name}", kind="entropy")
        entropy_tol = config.tolerance('entropy_relative', 1e-2)
        slack = config.tolerance('isoperimetric_slack', 1e-8)
        params = manifold_params(p)
        n, h = params.n, params.h
        nh = params.E

        window = tuple(param(config, 'window', default_entropy_window(p.a)))
        radii = np.linspace(0.1, window[1], int(param(config, 'count', 301)))
        vc = volume_curve(p, radii)
        slope, rms = entropy_estimate(vc, window)
        rel = abs(slope / nh - 1.0)
        self.logger.info(f"{p.name}: entropy slope {slope:.10g} against nh = {nh:.10g} (rms {rms:.2e})")
        report.add(CheckRecord(name=f"{p.name}: entropy slope on [{window[0]:g}, {window[1]:g}] = nh",
                               group="entropy", computed=slope, oracle=nh, residual=rel, bound=entropy_tol,
                               certificate=rms, passed=rel <= entropy_tol))

        bottom = spectrum_bottom(params)
        regressed = slope * slope / 4.0
        spectrum_tol = 2.0 * entropy_tol + entropy_tol ** 2
        rel = abs(regressed / bottom - 1.0)
        report.add(CheckRecord(name=f"{p.name}: lambda_0 = n^2h^2/4 = E^2/4", group="spectrum", computed=regressed,
                               oracle=bottom, residual=rel, bound=spectrum_tol, passed=rel <= spectrum_tol))
        if is_constant_curvature(p):
            closed = (n * p.a) ** 2 / 4.0
            rel = abs(bottom / closed - 1.0)
            report.add(CheckRecord(name=f"{p.name}: lambda_0 = n^2a^2/4 on constant curvature", group="spectrum",
                                   computed=bottom, oracle=closed, residual=rel, bound=1e-9, passed=rel <= 1e-9))

        report.extend(isoperimetric_check(vc, h, slack))
        normalized = vc.normalized(nh)
        report.tables.append(Table(f"volume_{p.name}", ["r", "log_sphere_vol", "log_ball_vol", "normalized"],
                                   [[float(r), float(s), float(b), float(v)] for r, s, b, v in
                                    zip(vc.radii, vc.log_sphere_vol, vc.log_ball_vol, normalized)]))
        return report


class MargulisExperiment(BaseExperiment):
    """m(x) as a limit and as the integral of tau, its ball limit and convergence rate"""

    kinds = (ExperimentKind.MARGULIS,)

    def __init__(self):
        super().__init__("margulis")

    def build_report(self, config: ExperimentConfig) -> Report:
        report = Report(name=config.name, kind=config.kind.value)
        rows = []
        for p in self.resolve_profiles(config):
            report.extend(self.profile_checks(p, config, rows))
        report.tables.append(Table("margulis", ["profile", "m", "m_quadrature", "ball_limit", "certificate"], rows))
        return report

    def profile_checks(self, p: CurvatureProfile, config: ExperimentConfig, rows: list) -> Report:
        report = Report(name=f"margulis-{p.name}", kind="margulis")
        oracle_tol = config.tolerance('pi', 1e-6)
        ball_tol = config.tolerance('ball_limit', 1e-6)
        rate_slack = config.tolerance('rate_slack', 1e-10)
        params = manifold_params(p)
        n, h, nh = params.n, params.h, params.E

        value = margulis(p, h)
        rows.append([p.name, value.m, value.m_quadrature, value.ball_limit, value.certificate])
        rel = abs(value.m / value.m_quadrature - 1.0)
        report.add(CheckRecord(name=f"{p.name}: lim v(r)e^(-nhr) = integral of tau", group="margulis",
                               computed=value.m, oracle=value.m_quadrature, residual=rel,
                               bound=value.certificate / value.m_quadrature, certificate=value.certificate,
                               passed=rel <= value.certificate / value.m_quadrature + 1e-10))

        tau = closed_form_tau(p)
        if tau is not None:
            oracle = sphere_constant(n) * tau
            rel = abs(value.m / oracle - 1.0)
            report.add(CheckRecord(name=f"{p.name}: m = vol(S^{n}) tau", group="margulis", computed=value.m,
                                   oracle=oracle, residual=rel, bound=oracle_tol, passed=rel <= oracle_tol))

        r_max = default_radius(p)
        radii = np.linspace(min(1.0, 0.5 * r_max), r_max, int(param(config, 'count', 161)))
        vc = volume_curve(p, radii)
        ball = float(vc.normalized_ball(nh)[-1])
        rel = abs(ball / value.ball_limit - 1.0)
        report.add(CheckRecord(name=f"{p.name}: lim V(r)e^(-nhr) = m/(nh)", group="margulis", computed=ball,
                               oracle=value.ball_limit, residual=rel, bound=ball_tol, passed=rel <= ball_tol))
        report.extend(tag_tables(margulis_rate_check(vc, h, value.m, p.a, rate_slack), p.name))
        return report
