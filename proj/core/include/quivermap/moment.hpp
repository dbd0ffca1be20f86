#pragma once

#include "quivermap/symmetric.hpp"

namespace qm {

/// Stability parameter, one real per vertex. In solvability contexts the
/// trace constraint sum_i tau_i n_i = 0 is required; in structured contexts
/// additionally tau[sigma(i)] = -tau[i] with zeros at sigma-fixed vertices.
struct ParameterVector {
    std::vector<double> tau;
};

ValidationReport validate_tau_trace(const Quiver& q, const DimensionVector& d,
                                    const ParameterVector& tau, double tolerance = 1e-12);
ValidationReport validate_tau_structured(const Quiver& q, const SymmetricStructure& s,
                                         const ParameterVector& tau, double tolerance = 1e-12);

/// The slope functional theta_tau(U) = sum_i tau_i dim U_i.
double theta(const ParameterVector& tau, const std::vector<Mat>& subspaces);

/// Hermitian moment-map components
///   H_i = sum_{h(a)=i} phi_a phi_a^* - sum_{t(a)=i} Tr_M(phi_a^* phi_a),
/// the tail term being the partial trace over the twist factor. Satisfies
/// H_i = H_i^* and sum_i tr H_i = 0 up to roundoff.
std::vector<Mat> moment_map(const Representation& r);

/// sqrt(sum_i ||H_i - tau_i I||_F^2), the distance to the gauge equation.
double gauge_residual(const Representation& r, const ParameterVector& tau);

struct SolveOptions {
    double tol = tol::solver;
    int max_iter = 100000;
    double step = 0.1;
    bool keep_trace = true;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_trace;
    std::vector<double> step_trace;
    double final_residual = 0.0;
    bool converged = false;
    double step_size_used = 0.0;
    /// Witness of orbit membership: output = gauge_act(accumulated_gauge, input).
    GaugeElement accumulated_gauge;
};

/// Downward Kempf-Ness flow r <- exp(-step (H(r) - tau)) . r with Armijo
/// backtracking on the squared residual. Throws TraceObstruction when
/// sum tau_i n_i != 0; non-convergence is reported, not thrown.
std::pair<Representation, SolveReport> solve_gauge_equation(const Representation& r,
                                                            const ParameterVector& tau,
                                                            const SolveOptions& opts = {});

/// lambda_t = sum_i < H_i(exp(t s) . r) - tau_i I, s_i > for a hermitian
/// direction s per vertex; nondecreasing in t.
double finite_time_weight(const Representation& r, const std::vector<Mat>& direction,
                          const ParameterVector& tau, double t);

/// Rational one-parameter subgroup: per vertex a unitary frame Q_i and
/// integer weights, realizing chi_i = Q_i diag(w_i) Q_i^*.
struct OnePS {
    std::vector<Mat> frame;
    std::vector<std::vector<int>> weights;

    Mat endomorphism(int vertex) const;
    static OnePS diagonal(const Quiver& q, const DimensionVector& d,
                          std::vector<std::vector<int>> weights);
};

/// Central means the induced weight pattern acts trivially on the whole
/// representation space: constant weights per vertex, equal across every
/// arrow's endpoints.
bool oneps_is_central(const Quiver& q, const OnePS& chi);

ValidationReport validate_oneps(const Quiver& q, const DimensionVector& d, const OnePS& chi,
                                bool allow_central = false);

struct MaximalWeight {
    bool finite = true;
    double value = 0.0;  // meaningful only when finite
};

/// Exact maximal weight: +infinity when some strictly positive chi-weight
/// component of phi exceeds component_tol, else -sum_i tau_i tr(chi_i).
MaximalWeight maximal_weight(const Representation& r, const OnePS& chi,
                             const ParameterVector& tau, double component_tol = 1e-10);

/// The flag induced by chi: per level k the span of frame columns of weight
/// <= levels[k], over the globally sorted distinct weights.
struct WeightFiltration {
    std::vector<int> levels;
    std::vector<std::vector<Mat>> steps;  // steps[k][vertex]
};

WeightFiltration weight_filtration(const Quiver& q, const DimensionVector& d, const OnePS& chi);

/// True iff every filtration step is an invariant subspace tuple of r.
bool filtration_invariance(const Representation& r, const OnePS& chi,
                           double tolerance = tol::invariance);

/// Maximal weight of a chi in the structured Lie algebra, with the finite
/// value computed as -sum_{paired orbits} 2 tau_i tr(psi_i) from the
/// unstarred components. Throws StructureError when chi is not structured.
MaximalWeight orthogonal_weight(const Representation& r, const OnePS& chi,
                                const ParameterVector& tau, const SymmetricStructure& s,
                                const BlockForm& c, double component_tol = 1e-10,
                                double structured_tol = 1e-8);

/// Kempf-Ness functional Psi(r, g) with the central shift tau, evaluated by
/// composite-Simpson quadrature of the finite-time weight along the polar
/// path of g. Psi(r, 1) = 0 exactly; the cocycle law holds to quadrature
/// accuracy.
double kempf_ness(const Representation& r, const GaugeElement& g, const ParameterVector& tau,
                  int intervals = 1024);

}  // namespace qm
