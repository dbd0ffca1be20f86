#pragma once

#include <quivermap/decompose.hpp>
#include <quivermap/generalized.hpp>
#include <quivermap/io.hpp>
#include <quivermap/moment.hpp>

namespace qmtest {

using namespace qm;

inline QuiverPtr a2_quiver() {
    auto q = std::make_shared<Quiver>();
    q->vertices = {"v1", "v2"};
    q->arrows = {{"a", "v1", "v2"}};
    return q;
}

inline QuiverPtr kronecker2_quiver() {
    auto q = std::make_shared<Quiver>();
    q->vertices = {"v1", "v2"};
    q->arrows = {{"a", "v1", "v2"}, {"b", "v1", "v2"}};
    return q;
}

inline QuiverPtr jordan_quiver() {
    auto q = std::make_shared<Quiver>();
    q->vertices = {"v"};
    q->arrows = {{"a", "v", "v"}};
    return q;
}

inline Mat scalar(cplx z) {
    Mat m(1, 1);
    m(0, 0) = z;
    return m;
}

inline Mat mat2(cplx a, cplx b, cplx c, cplx d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Representation a2_rep(cplx phi, int n1 = 1, int n2 = 1) {
    auto q = a2_quiver();
    auto d = DimensionVector::make(*q, {n1, n2});
    std::vector<Mat> m{Mat::Constant(n2, n1, phi)};
    return make_representation(q, d, std::move(m));
}

/// Loops g: q -> q and g*: q* -> q* on an exchanged vertex pair; the E_i
/// pattern of the Derksen-Weyman table.
struct EndPattern {
    QuiverPtr quiver;
    DimensionVector dims;
    SymmetricStructure structure;
    BlockForm form;
};

inline EndPattern end_pattern(int n, int form_sign = +1) {
    auto q = std::make_shared<Quiver>();
    q->vertices = {"q", "q*"};
    q->arrows = {{"g", "q", "q"}, {"g*", "q*", "q*"}};
    EndPattern p;
    p.quiver = q;
    p.dims = DimensionVector::make(*q, {n, n});
    p.structure = SymmetricStructure::plain(*q, {1, 0}, {1, 0}, form_sign);
    p.form = standard_form(*q, p.dims, p.structure);
    return p;
}

inline Representation end_pattern_rep(const EndPattern& p, const Mat& a, const Mat& astar) {
    return make_representation(p.quiver, p.dims, {a, astar});
}

inline Mat random_unitary(Rng& rng, int n) {
    if (n == 0) return Mat(0, 0);
    Mat g = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    return q;
}

inline GaugeElement random_gauge(const Quiver& q, const DimensionVector& d, std::uint64_t seed,
                                 double spread = 0.5) {
    GaugeElement g = GaugeElement::identity(q, d);
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        Rng rng = Rng::derive(seed, i);
        if (d.n[i] == 0) continue;
        g.g[i] = Mat::Identity(d.n[i], d.n[i]) + spread * gaussian_matrix(rng, d.n[i], d.n[i]);
    }
    return g;
}

inline GaugeElement random_unitary_gauge(const Quiver& q, const DimensionVector& d,
                                         std::uint64_t seed, bool twist_too = false) {
    GaugeElement g = GaugeElement::identity(q, d);
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        Rng rng = Rng::derive(seed, i);
        g.g[i] = random_unitary(rng, d.n[i]);
    }
    if (twist_too)
        for (size_t a = 0; a < q.arrows.size(); ++a) {
            Rng rng = Rng::derive(seed ^ 0xabcdef, a);
            g.g_tw[a] = random_unitary(rng, d.m[a]);
        }
    return g;
}

/// Direct evaluation of the alternating identity
/// C(phi_a(v (x) m), w) + eps_a C(v, phi_{sigma(a)}(w (x) m)) over basis triples.
inline double alternating_identity_max(const Representation& r, const SymmetricStructure& s,
                                       const BlockForm& c) {
    const Quiver& q = *r.quiver;
    double worst = 0.0;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int t = q.tail_of(a), h = q.head_of(a);
        const int sh = s.sigma_v[h];
        const int m = r.dims.m[a];
        for (int k = 0; k < m; ++k) {
            Mat slice = twist_slice(r.phi[a], k, m);
            Mat sslice = twist_slice(r.phi[s.sigma_a[a]], k, m);
            for (int vb = 0; vb < r.dims.n[t]; ++vb)
                for (int wb = 0; wb < r.dims.n[sh]; ++wb) {
                    // C(phi(e_vb (x) e_k), e_wb), pairing V_h with V_{sigma(h)}.
                    cplx first = (slice.col(vb).transpose() * c.block[h]).coeff(0, wb);
                    // C(e_vb, phi_sigma(e_wb (x) e_k)), pairing V_t with V_{sigma(t)}.
                    cplx second = (c.block[t] * sslice.col(wb)).coeff(vb, 0);
                    worst = std::max(worst,
                                     std::abs(first + static_cast<double>(s.eps_a[a]) * second));
                }
        }
    }
    return worst;
}

}  // namespace qmtest
