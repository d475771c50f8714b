"""End-to-end driver: weak normality, gamma_*, vector selection, perturbation."""

from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import diagonal_oracle, matpoly, perturbation, svcurve, vector_selector
from .matpoly import WeakNormalityWitness
from .perturbation import PerturbationReport
from .svcurve import GammaStarResult
from .vector_selector import CombinationProblem, CombinedSingularPair
from .problem import ProblemSpec, cmatrix, cpair

CASE2_NOTICE = ("construction out of scope: gamma_* = 0 (maximum at the left end of the "
                "search interval) needs a separate perturbation method that is not "
                "implemented; only (gamma_*, s_*) are reported")


@dataclass
class PipelineResult:
    spec: ProblemSpec
    witness: WeakNormalityWitness
    gamma: GammaStarResult
    Pprime_mu: np.ndarray
    oracle: Optional[tuple] = None
    naive_residuals: Optional[tuple] = None
    combination: Optional[CombinationProblem] = None
    pair: Optional[CombinedSingularPair] = None
    perturbation: Optional[PerturbationReport] = None
    notices: List[str] = field(default_factory=list)

    @property
    def partial(self):
        return self.perturbation is None

    @property
    def lemma_ok(self):
        if self.pair is None:
            return None
        t = self.spec.tolerances
        return vector_selector.lemma_ok(self.pair.residual_prop1, self.pair.residual_prop2,
                                        self.Pprime_mu, t.lemma_tol1, t.lemma_tol2)


def run_pipeline(spec):
    """Run every stage for ``spec``; stops after ``gamma_*`` in the tied case."""
    P, mu, t = spec.polynomial, complex(spec.mu), spec.tolerances
    witness = matpoly.is_weakly_normal(P, t.tol_weak, seed=t.seed)
    Pp_mu = matpoly.evaluate(matpoly.derivative(P), mu)
    gs = svcurve.maximize_s2nm1(P, mu, tol_mult=t.tol_mult, tol_zero=t.tol_zero,
                                tol_sing=t.tol_sing, grid_size=t.grid_size,
                                gamma_max=t.gamma_max, expand=t.expand_gamma_max)
    res = PipelineResult(spec, witness, gs, Pp_mu)
    if gs.at_search_boundary:
        res.notices.append("maximizer lies at the expanding gamma search boundary")
    if witness.is_weakly_normal and P.n >= 2:
        bd = diagonal_oracle.block_data(P, mu, witness.diagonalizer, t.tol_sing)
        res.oracle = diagonal_oracle.oracle_gamma_star(bd, t.tol_eq)
    if gs.is_case2:
        res.notices.append(CASE2_NOTICE)
        return res
    res.naive_residuals = vector_selector.lemma_residuals(
        gs.left_basis[:, 0], gs.right_basis[:, 0], Pp_mu)
    cp, pair = vector_selector.select_pair(gs.left_basis, gs.right_basis, Pp_mu,
                                           t.tol_herm, t.tol_def, t.tol_comb)
    res.combination, res.pair = cp, pair
    if not res.lemma_ok:
        res.notices.append("orthogonality residuals of the selected pair exceed thresholds")
    res.perturbation = perturbation.construct(P, mu, spec.weights, gs.s_star, gs.gamma_star,
                                              pair, t.tol_eig, spec.lower_bound)
    return res


def _vec(v):
    return [cpair(z) for z in np.asarray(v).ravel()]


def report_dict(res):
    """Structured report of a pipeline run (JSON-ready)."""
    spec, gs, t = res.spec, res.gamma, res.spec.tolerances
    P = spec.polynomial
    out = {
        "problem": {"n": P.n, "degree": P.m, "mu": cpair(spec.mu),
                    "weights": list(spec.weights.weights)},
        "tolerances": asdict(t),
        "weak_normality": {
            "is_weakly_normal": res.witness.is_weakly_normal,
            "residual": None if np.isnan(res.witness.residual) else res.witness.residual,
            "normality_defect": res.witness.normality_defect,
            "commutator_defect": res.witness.commutator_defect,
        },
        "gamma_star": gs.gamma_star,
        "s_star": gs.s_star,
        "multiplicity_r": gs.multiplicity_r,
        "case2": gs.is_case2,
        "at_search_boundary": gs.at_search_boundary,
        "singular_values": list(gs.singular_values),
    }
    if res.oracle is not None:
        g, s, kappa, c2 = res.oracle
        out["oracle"] = {"gamma_star": g, "s_star": s, "kappa": kappa, "case2": c2}
    if res.partial:
        out["status"] = "partial"
        out["notices"] = list(res.notices)
        if spec.lower_bound is not None:
            out["lower_bound_user_supplied"] = spec.lower_bound
        return out
    cp, pair, rep = res.combination, res.pair, res.perturbation
    out["naive_pair_residuals"] = {"prop1": res.naive_residuals[0],
                                   "prop2": res.naive_residuals[1]}
    out["combination"] = {"M": cmatrix(cp.M), "eigenvalues": list(cp.eigvals),
                          "hermitian_residual": cp.hermitian_residual,
                          "alpha": _vec(pair.alpha)}
    out["selected_pair"] = {"u": _vec(pair.u_tilde), "v": _vec(pair.v_tilde),
                            "residual_prop1": pair.residual_prop1,
                            "residual_prop2": pair.residual_prop2,
                            "lemma_ok": res.lemma_ok}
    out["phi"] = cpair(rep.phi)
    out["epsilon"] = rep.epsilon
    if rep.lower_bound is not None:
        out["lower_bound_user_supplied"] = rep.lower_bound
    out["delta_core"] = cmatrix(rep.delta_core)
    out["Q_coefficients"] = [cmatrix(A) for A in rep.Q.coeffs]
    out["boundary_residuals"] = list(rep.boundary_residuals)
    out["spectrum_Q"] = _vec(rep.spectrum_Q)
    out["eigs_near_mu"] = _vec(rep.eigs_near_mu)
    out["mult_eig_gap"] = rep.mult_eig_gap
    out["tol_eig_coupled"] = rep.tol_eig_coupled
    out["multiple_eigenvalue_verified"] = rep.success
    out["status"] = "success" if rep.success else "verification_failed"
    out["notices"] = list(res.notices)
    return out
