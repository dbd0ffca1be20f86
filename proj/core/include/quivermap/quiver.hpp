#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "quivermap/linalg.hpp"

namespace qm {

/// Finite directed graph with named vertices and arrows. Values are immutable
/// after construction; representations hold a shared pointer to their quiver.
struct Quiver {
    struct Arrow {
        std::string id;
        std::string tail;
        std::string head;
    };

    std::vector<std::string> vertices;
    std::vector<Arrow> arrows;

    int vertex_index(const std::string& id) const;
    int arrow_index(const std::string& id) const;
    /// Tail/head as vertex indices; -1 for undeclared vertices.
    int tail_of(int arrow) const { return vertex_index(arrows[arrow].tail); }
    int head_of(int arrow) const { return vertex_index(arrows[arrow].head); }
};

using QuiverPtr = std::shared_ptr<const Quiver>;

/// Per-vertex dimensions n and per-arrow twist dimensions m, stored in the
/// declaration order of the quiver.
struct DimensionVector {
    std::vector<int> n;
    std::vector<int> m;

    static DimensionVector make(const Quiver& q, std::vector<int> n, std::vector<int> m = {});
};

ValidationReport validate_quiver(const Quiver& q, const DimensionVector& d);

/// Complex dimension of the representation space:
/// sum over arrows of n[head] * n[tail] * m[arrow].
long representation_dimension(const Quiver& q, const DimensionVector& d);

/// Point of the twisted representation space: one n[h] x (n[t]*m) matrix per
/// arrow, columns in (tail index, twist index) order so that the gauge action
/// on the source is the literal Kronecker factor g_tail (x) g_twist.
struct Representation {
    QuiverPtr quiver;
    DimensionVector dims;
    std::vector<Mat> phi;

    int num_arrows() const { return static_cast<int>(phi.size()); }
    /// max_alpha Frobenius distance, 0 for identical shapes and values.
    double distance(const Representation& other) const;
};

Representation make_representation(QuiverPtr q, DimensionVector d, std::vector<Mat> phi);
Representation zero_representation(QuiverPtr q, DimensionVector d);

/// Seeded i.i.d. standard-complex-gaussian entries; per-arrow streams, so the
/// result does not depend on arrow iteration order.
Representation random_representation(QuiverPtr q, DimensionVector d, std::uint64_t seed);

/// Change of basis at each vertex (and optionally each twist space). The
/// twist factors default to identities and never enter stability data.
struct GaugeElement {
    std::vector<Mat> g;
    std::vector<Mat> g_tw;

    static GaugeElement identity(const Quiver& q, const DimensionVector& d);
};

/// phi_alpha -> g[head] phi_alpha (g[tail] (x) g_tw[alpha])^{-1}.
Representation gauge_act(const GaugeElement& g, const Representation& r);

GaugeElement gauge_compose(const GaugeElement& a, const GaugeElement& b);

/// Tuple of subspaces, one orthonormal column basis per vertex, together with
/// the measured invariance defect of the representation it came from.
struct SubrepCandidate {
    std::vector<Mat> basis;
    double invariance_residual = 0.0;

    int dim_at(int vertex) const { return static_cast<int>(basis[vertex].cols()); }
    int total_dim() const;
    bool is_zero() const { return total_dim() == 0; }
    bool is_full(const DimensionVector& d) const;
};

/// max over arrows of ||(I - P_head) phi (P_tail (x) I_m)||_F for the
/// projectors P onto the candidate subspaces.
double invariance_residual(const Representation& r, const std::vector<Mat>& basis);

/// Smallest subspace tuple containing the seed vectors and closed under
/// v |-> phi_alpha(v (x) e_k) for every arrow and twist basis vector.
SubrepCandidate generated_subrep(const Representation& r,
                                 const std::vector<std::pair<int, Vec>>& seeds);

/// Blockwise direct sum; dimensions add per vertex, twists must agree.
Representation direct_sum(const Representation& a, const Representation& b);

/// Representation induced on an invariant subspace tuple (orthonormal column
/// bases): phi restricted to U_head^* phi (U_tail (x) I_m). Throws when the
/// tuple is not invariant within `tolerance`.
Representation restrict_representation(const Representation& r, const std::vector<Mat>& basis,
                                       double tolerance = tol::invariance);

}  // namespace qm
