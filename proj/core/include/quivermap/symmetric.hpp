#pragma once

#include "quivermap/quiver.hpp"

namespace qm {

/// Involution data of a symmetric (or supermixed) quiver: sigma on vertices
/// and arrows, the global form sign (+1 orthogonal, -1 symplectic), and the
/// supermixed signs eps (identically +1 for plain symmetric quivers).
struct SymmetricStructure {
    std::vector<int> sigma_v;
    std::vector<int> sigma_a;
    int form_sign = +1;
    std::vector<int> eps_v;
    std::vector<int> eps_a;

    bool vertex_fixed(int i) const { return sigma_v[i] == i; }
    bool arrow_fixed(int a) const { return sigma_a[a] == a; }
    /// Symmetry sign of the form block carried by the orbit of vertex i:
    /// C_{sigma(i),i} = block_sign(i) * C_{i,sigma(i)}^T.
    int block_sign(int i) const { return form_sign * eps_v[i]; }

    /// All-plus signs; convenience for plain symmetric quivers.
    static SymmetricStructure plain(const Quiver& q, std::vector<int> sigma_v,
                                    std::vector<int> sigma_a, int form_sign);
};

ValidationReport validate_symmetric(const Quiver& q, const DimensionVector& d,
                                    const SymmetricStructure& s);

/// Block quadratic form on the total space: block[i] = C_{i,sigma(i)} of shape
/// n_i x n_{sigma(i)}; the assembled form vanishes on V_i x V_j for
/// j != sigma(i).
struct BlockForm {
    std::vector<Mat> block;
    int form_sign = +1;
};

/// Identity pairings on exchanged pairs; identity (block sign +1) or the
/// standard antisymmetric J (block sign -1, even dimension required) at
/// fixed vertices.
BlockForm standard_form(const Quiver& q, const DimensionVector& d, const SymmetricStructure& s);

ValidationReport validate_block_form(const Quiver& q, const DimensionVector& d,
                                     const SymmetricStructure& s, const BlockForm& c);

/// C-transpose of the arrow-alpha component: the unique map for sigma(alpha)
/// with C(phi(v (x) m), w) = C(v, phi^t(w (x) m)). Computed per twist slice as
/// C_{t,sigma(t)}^{-1} * slice^T * C_{h,sigma(h)}.
Mat c_transpose_arrow(const Representation& r, int arrow, const SymmetricStructure& s,
                      const BlockForm& c);

/// C-adjoint of a vertex endomorphism u: V_i -> V_i, acting on V_{sigma(i)}:
/// u^t = C_{i,sigma(i)}^{-1} u^T C_{i,sigma(i)}.
Mat c_adjoint_vertex(const Mat& u, int vertex, const SymmetricStructure& s, const BlockForm& c);

/// The linear involution whose fixed points are the structured
/// representations: component at alpha is -eps_a[alpha] * (phi_{sigma(alpha)})^t.
Representation sigma_transpose(const Representation& r, const SymmetricStructure& s,
                               const BlockForm& c);

/// Residual max_alpha ||phi_{sigma(alpha)} + eps_a[alpha] * phi_alpha^t||_F
/// and the thresholded verdict.
std::pair<bool, double> is_structured_rep(const Representation& r, const SymmetricStructure& s,
                                          const BlockForm& c, double tolerance = tol::structured);

/// Idempotent projection onto the structured subspace: (r + sigma_transpose(r))/2.
Representation project_structured(const Representation& r, const SymmetricStructure& s,
                                  const BlockForm& c);

/// Per-vertex C-orthogonal complement of a subspace tuple:
/// U^perp_i = { x in V_i : C(x, u) = 0 for all u in U_{sigma(i)} }.
std::vector<Mat> orthogonal_complement(const std::vector<Mat>& u, const Quiver& q,
                                       const DimensionVector& d, const SymmetricStructure& s,
                                       const BlockForm& c);

/// True iff C vanishes on U x U, i.e. U is contained in U^perp.
bool is_isotropic(const std::vector<Mat>& u, const Quiver& q, const SymmetricStructure& s,
                  const BlockForm& c, double tolerance = tol::invariance);

/// Deviation of a gauge element from the structured group: for every vertex,
/// || g_i^T C_{i,sigma(i)} g_{sigma(i)} - C_{i,sigma(i)} ||_F. Zero means the
/// assembled gauge preserves the form.
double structured_gauge_residual(const GaugeElement& g, const Quiver& q,
                                 const SymmetricStructure& s, const BlockForm& c);

/// Seeded random element of the structured gauge group: free invertible
/// factors at orbit representatives with the starred factor (g^t)^{-1}, and
/// exponentials of C-alternating matrices at fixed vertices.
GaugeElement random_structured_gauge(const Quiver& q, const DimensionVector& d,
                                     const SymmetricStructure& s, const BlockForm& c,
                                     std::uint64_t seed, double spread = 0.4);

}  // namespace qm
