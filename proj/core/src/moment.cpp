#include "quivermap/moment.hpp"

#include <algorithm>
#include <cmath>

namespace qm {

ValidationReport validate_tau_trace(const Quiver& q, const DimensionVector& d,
                                    const ParameterVector& tau, double tolerance) {
    ValidationReport rep;
    if (tau.tau.size() != q.vertices.size()) {
        rep.add("tau has wrong length");
        return rep;
    }
    double sum = 0.0, scale = 1.0;
    for (size_t i = 0; i < tau.tau.size(); ++i) {
        sum += tau.tau[i] * d.n[i];
        scale = std::max(scale, std::abs(tau.tau[i] * d.n[i]));
    }
    if (std::abs(sum) > tolerance * scale)
        rep.add("trace obstruction: sum tau_i n_i = " + std::to_string(sum));
    return rep;
}

ValidationReport validate_tau_structured(const Quiver& q, const SymmetricStructure& s,
                                         const ParameterVector& tau, double tolerance) {
    ValidationReport rep;
    if (tau.tau.size() != q.vertices.size()) {
        rep.add("tau has wrong length");
        return rep;
    }
    for (size_t i = 0; i < tau.tau.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (static_cast<int>(i) == si) {
            if (std::abs(tau.tau[i]) > tolerance)
                rep.add("tau must vanish at sigma-fixed vertex '" + q.vertices[i] + "'");
        } else if (std::abs(tau.tau[i] + tau.tau[si]) > tolerance) {
            rep.add("tau[sigma(i)] != -tau[i] at vertex '" + q.vertices[i] + "'");
        }
    }
    return rep;
}

double theta(const ParameterVector& tau, const std::vector<Mat>& subspaces) {
    double out = 0.0;
    for (size_t i = 0; i < subspaces.size(); ++i)
        out += tau.tau[i] * static_cast<double>(subspaces[i].cols());
    return out;
}

std::vector<Mat> moment_map(const Representation& r) {
    const Quiver& q = *r.quiver;
    std::vector<Mat> h(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i) h[i] = Mat::Zero(r.dims.n[i], r.dims.n[i]);
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int head = q.head_of(a), tail = q.tail_of(a);
        const Mat& phi = r.phi[a];
        h[head] += phi * phi.adjoint();
        // Partial trace of phi^* phi over the twist factor.
        const int m = r.dims.m[a];
        const int nt = r.dims.n[tail];
        Mat big = phi.adjoint() * phi;  // (nt*m) x (nt*m)
        Mat pt = Mat::Zero(nt, nt);
        for (int aidx = 0; aidx < nt; ++aidx)
            for (int bidx = 0; bidx < nt; ++bidx)
                for (int k = 0; k < m; ++k) pt(aidx, bidx) += big(aidx * m + k, bidx * m + k);
        h[tail] -= pt;
    }
    for (auto& hi : h) hi = hermitian_part(hi);
    return h;
}

double gauge_residual(const Representation& r, const ParameterVector& tau) {
    auto h = moment_map(r);
    double sq = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        Mat diff = h[i] - tau.tau[i] * Mat::Identity(h[i].rows(), h[i].cols());
        sq += diff.squaredNorm();
    }
    return std::sqrt(sq);
}

namespace {

double squared_residual(const std::vector<Mat>& h, const ParameterVector& tau) {
    double sq = 0.0;
    for (size_t i = 0; i < h.size(); ++i)
        sq += (h[i] - tau.tau[i] * Mat::Identity(h[i].rows(), h[i].cols())).squaredNorm();
    return sq;
}

std::vector<Mat> shifted_moment(const Representation& r, const ParameterVector& tau) {
    auto h = moment_map(r);
    for (size_t i = 0; i < h.size(); ++i)
        h[i] -= tau.tau[i] * Mat::Identity(h[i].rows(), h[i].cols());
    return h;
}

/// || X_u(phi) ||_F^2 for the infinitesimal action
/// (X_u phi)_a = u_head phi_a - phi_a (u_tail (x) I).
double action_field_sq(const Representation& r, const std::vector<Mat>& u) {
    const Quiver& q = *r.quiver;
    double sq = 0.0;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int m = r.dims.m[a];
        Mat x = u[q.head_of(a)] * r.phi[a] -
                r.phi[a] * kron(u[q.tail_of(a)], Mat::Identity(m, m));
        sq += x.squaredNorm();
    }
    return sq;
}

Representation flow_step(const Representation& r, const std::vector<Mat>& u, double step,
                         GaugeElement* out_gauge) {
    GaugeElement g = GaugeElement::identity(*r.quiver, r.dims);
    for (size_t i = 0; i < u.size(); ++i) g.g[i] = hermitian_exp(Mat(-step * u[i]));
    if (out_gauge) *out_gauge = g;
    return gauge_act(g, r);
}

}  // namespace

std::pair<Representation, SolveReport> solve_gauge_equation(const Representation& r,
                                                            const ParameterVector& tau,
                                                            const SolveOptions& opts) {
    const Quiver& q = *r.quiver;
    auto trace_check = validate_tau_trace(q, r.dims, tau, 1e-9);
    if (!trace_check.ok()) throw TraceObstruction(trace_check.joined());

    SolveReport report;
    report.accumulated_gauge = GaugeElement::identity(q, r.dims);
    Representation cur = r;
    auto h = shifted_moment(cur, tau);
    double f = 0.0;
    for (const auto& hi : h) f += hi.squaredNorm();
    if (opts.keep_trace) {
        report.residual_trace.push_back(std::sqrt(f));
        report.step_trace.push_back(0.0);
    }

    double step = opts.step;
    constexpr double armijo_c = 1e-4;
    constexpr double min_step = 1e-16;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (std::sqrt(f) <= opts.tol) break;

        const double grad_sq = action_field_sq(cur, h);  // -f'(0)/4 along the flow
        double phi_scale = 0.0;
        for (const auto& p : cur.phi) phi_scale = std::max(phi_scale, p.squaredNorm());
        double h_scale = 0.0;
        for (const auto& hi : h) h_scale = std::max(h_scale, hi.squaredNorm());
        if (grad_sq <= 1e-28 * std::max(1.0, phi_scale * h_scale)) break;  // flow stalled

        // Cap the exponent so exp(-step*u) stays representable.
        double unorm = 0.0;
        for (const auto& hi : h) unorm = std::max(unorm, hi.norm());
        const double step_cap = unorm > 0 ? 200.0 / unorm : 1e12;

        bool accepted = false;
        while (step >= min_step) {
            const double trial = std::min(step, step_cap);
            GaugeElement g_step;
            Representation next = flow_step(cur, h, trial, &g_step);
            auto h_next = shifted_moment(next, tau);
            double f_next = 0.0;
            for (const auto& hi : h_next) f_next += hi.squaredNorm();
            if (f_next <= f - armijo_c * trial * 4.0 * grad_sq) {
                cur = std::move(next);
                h = std::move(h_next);
                f = f_next;
                report.accumulated_gauge = gauge_compose(g_step, report.accumulated_gauge);
                report.step_size_used = trial;
                if (opts.keep_trace) {
                    report.residual_trace.push_back(std::sqrt(f));
                    report.step_trace.push_back(trial);
                }
                accepted = true;
                step = std::min(step * 1.2, step_cap);
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    report.iterations = it;
    report.final_residual = std::sqrt(f);
    report.converged = report.final_residual <= opts.tol;
    return {std::move(cur), std::move(report)};
}

double finite_time_weight(const Representation& r, const std::vector<Mat>& direction,
                          const ParameterVector& tau, double t) {
    GaugeElement g = GaugeElement::identity(*r.quiver, r.dims);
    for (size_t i = 0; i < direction.size(); ++i) g.g[i] = hermitian_exp(Mat(t * direction[i]));
    auto h = shifted_moment(gauge_act(g, r), tau);
    double out = 0.0;
    for (size_t i = 0; i < h.size(); ++i) out += frob_inner(h[i], direction[i]);
    return out;
}

Mat OnePS::endomorphism(int vertex) const {
    const Mat& q = frame[vertex];
    Eigen::VectorXd w(weights[vertex].size());
    for (size_t k = 0; k < weights[vertex].size(); ++k) w(k) = weights[vertex][k];
    return q * w.asDiagonal() * q.adjoint();
}

OnePS OnePS::diagonal(const Quiver& q, const DimensionVector& d,
                      std::vector<std::vector<int>> weights) {
    OnePS chi;
    for (size_t i = 0; i < q.vertices.size(); ++i)
        chi.frame.push_back(Mat::Identity(d.n[i], d.n[i]));
    chi.weights = std::move(weights);
    return chi;
}

bool oneps_is_central(const Quiver& q, const OnePS& chi) {
    std::vector<int> constant(q.vertices.size(), 0);
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const auto& w = chi.weights[i];
        if (w.empty()) continue;
        if (!std::all_of(w.begin(), w.end(), [&](int x) { return x == w[0]; })) return false;
        constant[i] = w[0];
    }
    for (const auto& arrow : q.arrows) {
        const int t = q.vertex_index(arrow.tail), h = q.vertex_index(arrow.head);
        if (chi.weights[t].empty() || chi.weights[h].empty()) continue;
        if (constant[t] != constant[h]) return false;
    }
    return true;
}

ValidationReport validate_oneps(const Quiver& q, const DimensionVector& d, const OnePS& chi,
                                bool allow_central) {
    ValidationReport rep;
    if (chi.frame.size() != q.vertices.size() || chi.weights.size() != q.vertices.size()) {
        rep.add("one-parameter subgroup has wrong length");
        return rep;
    }
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        if (chi.frame[i].rows() != d.n[i] || chi.frame[i].cols() != d.n[i] ||
            static_cast<int>(chi.weights[i].size()) != d.n[i]) {
            rep.add("vertex '" + q.vertices[i] + "': shape mismatch");
            continue;
        }
        if (d.n[i] > 0 &&
            (chi.frame[i].adjoint() * chi.frame[i] - Mat::Identity(d.n[i], d.n[i])).norm() >
                tol::orthonormal)
            rep.add("vertex '" + q.vertices[i] + "': frame not unitary");
    }
    if (!allow_central && rep.ok() && oneps_is_central(q, chi))
        rep.add("one-parameter subgroup is central (acts trivially)");
    return rep;
}

MaximalWeight maximal_weight(const Representation& r, const OnePS& chi,
                             const ParameterVector& tau, double component_tol) {
    const Quiver& q = *r.quiver;
    double positive_mass_sq = 0.0;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int t = q.tail_of(a), h = q.head_of(a);
        const int m = r.dims.m[a];
        if (r.dims.n[t] == 0 || r.dims.n[h] == 0) continue;
        Mat transformed = chi.frame[h].adjoint() * r.phi[a] *
                          kron(chi.frame[t], Mat::Identity(m, m));
        for (Eigen::Index row = 0; row < transformed.rows(); ++row)
            for (Eigen::Index col = 0; col < transformed.cols(); ++col) {
                const int wt = chi.weights[h][row] - chi.weights[t][col / m];
                if (wt > 0) positive_mass_sq += std::norm(transformed(row, col));
            }
    }
    if (std::sqrt(positive_mass_sq) > component_tol) return {false, 0.0};
    double value = 0.0;
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        long tr = 0;
        for (int w : chi.weights[i]) tr += w;
        value -= tau.tau[i] * static_cast<double>(tr);
    }
    return {true, value};
}

WeightFiltration weight_filtration(const Quiver& q, const DimensionVector& d, const OnePS& chi) {
    WeightFiltration out;
    std::vector<int> levels;
    for (const auto& w : chi.weights) levels.insert(levels.end(), w.begin(), w.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    out.levels = levels;
    for (int level : levels) {
        std::vector<Mat> step(q.vertices.size());
        for (size_t i = 0; i < q.vertices.size(); ++i) {
            std::vector<Eigen::Index> cols;
            for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(chi.weights[i].size()); ++k)
                if (chi.weights[i][k] <= level) cols.push_back(k);
            Mat u(d.n[i], static_cast<Eigen::Index>(cols.size()));
            for (size_t c = 0; c < cols.size(); ++c) u.col(c) = chi.frame[i].col(cols[c]);
            step[i] = std::move(u);
        }
        out.steps.push_back(std::move(step));
    }
    return out;
}

bool filtration_invariance(const Representation& r, const OnePS& chi, double tolerance) {
    auto flag = weight_filtration(*r.quiver, r.dims, chi);
    for (const auto& step : flag.steps)
        if (invariance_residual(r, step) > tolerance) return false;
    return true;
}

MaximalWeight orthogonal_weight(const Representation& r, const OnePS& chi,
                                const ParameterVector& tau, const SymmetricStructure& s,
                                const BlockForm& c, double component_tol,
                                double structured_tol) {
    const Quiver& q = *r.quiver;
    // chi must lie in the structured Lie algebra: X_{sigma(i)} = -X_i^t at
    // exchanged pairs, C-alternating at fixed vertices.
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        if (r.dims.n[i] == 0) continue;
        Mat x = chi.endomorphism(static_cast<int>(i));
        const int si = s.sigma_v[static_cast<int>(i)];
        const double scale = std::max(1.0, x.norm());
        if (static_cast<int>(i) == si) {
            if ((x.transpose() * c.block[i] + c.block[i] * x).norm() > structured_tol * scale)
                throw StructureError("chi is not C-alternating at fixed vertex '" +
                                     q.vertices[i] + "'");
        } else {
            Mat xs = chi.endomorphism(si);
            if ((xs + c_adjoint_vertex(x, static_cast<int>(i), s, c)).norm() >
                structured_tol * scale)
                throw StructureError("chi[sigma(i)] != -chi[i]^t at vertex '" + q.vertices[i] +
                                     "'");
        }
    }
    MaximalWeight mw = maximal_weight(r, chi, ParameterVector{std::vector<double>(
                                             q.vertices.size(), 0.0)},
                                      component_tol);
    if (!mw.finite) return mw;
    double value = 0.0;
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (static_cast<int>(i) >= si) continue;  // unstarred orbit representative
        long tr = 0;
        for (int w : chi.weights[i]) tr += w;
        value -= 2.0 * tau.tau[i] * static_cast<double>(tr);
    }
    return {true, value};
}

double kempf_ness(const Representation& r, const GaugeElement& g, const ParameterVector& tau,
                  int intervals) {
    // Polar part of g: s_i = (1/2) log(g_i^* g_i); left-unitary factors do
    // not change the functional.
    std::vector<Mat> s(g.g.size());
    for (size_t i = 0; i < g.g.size(); ++i) {
        if (g.g[i].rows() == 0) {
            s[i] = g.g[i];
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(g.g[i].adjoint() * g.g[i]));
        if (es.eigenvalues().minCoeff() <= 0)
            throw InvalidInput("gauge element is singular");
        s[i] = es.eigenvectors() * (0.5 * es.eigenvalues().array().log()).matrix().asDiagonal() *
               es.eigenvectors().adjoint();
    }
    // Composite Simpson over [0, 1].
    if (intervals % 2 != 0) ++intervals;
    const double h = 1.0 / intervals;
    double acc = 0.0;
    for (int k = 0; k <= intervals; ++k) {
        const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += weight * finite_time_weight(r, s, tau, k * h);
    }
    return acc * h / 3.0;
}

}  // namespace qm
