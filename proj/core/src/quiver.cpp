#include "quivermap/quiver.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace qm {

int Quiver::vertex_index(const std::string& id) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == id) return static_cast<int>(i);
    return -1;
}

int Quiver::arrow_index(const std::string& id) const {
    for (size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].id == id) return static_cast<int>(i);
    return -1;
}

DimensionVector DimensionVector::make(const Quiver& q, std::vector<int> n, std::vector<int> m) {
    DimensionVector d;
    d.n = std::move(n);
    if (m.empty()) m.assign(q.arrows.size(), 1);
    d.m = std::move(m);
    return d;
}

ValidationReport validate_quiver(const Quiver& q, const DimensionVector& d) {
    ValidationReport rep;
    std::set<std::string> vs(q.vertices.begin(), q.vertices.end());
    if (vs.size() != q.vertices.size()) rep.add("duplicate vertex id");
    std::set<std::string> as;
    for (const auto& a : q.arrows) {
        if (!as.insert(a.id).second) rep.add("duplicate arrow id '" + a.id + "'");
        if (!vs.count(a.tail)) rep.add("arrow '" + a.id + "': unknown vertex '" + a.tail + "'");
        if (!vs.count(a.head)) rep.add("arrow '" + a.id + "': unknown vertex '" + a.head + "'");
    }
    if (d.n.size() != q.vertices.size())
        rep.add("dimension vector n has wrong length");
    if (d.m.size() != q.arrows.size())
        rep.add("twist vector m has wrong length");
    for (size_t i = 0; i < d.n.size() && i < q.vertices.size(); ++i)
        if (d.n[i] < 0) rep.add("vertex '" + q.vertices[i] + "': negative dimension");
    for (size_t a = 0; a < d.m.size() && a < q.arrows.size(); ++a)
        if (d.m[a] <= 0)
            rep.add("arrow '" + q.arrows[a].id + "': twisting dimension must be positive");
    return rep;
}

namespace {

void require_valid(const Quiver& q, const DimensionVector& d) {
    auto rep = validate_quiver(q, d);
    if (!rep.ok()) throw InvalidInput("invalid quiver/dims: " + rep.joined());
}

void require_shape(const Representation& r) {
    const Quiver& q = *r.quiver;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const auto nh = r.dims.n[q.head_of(a)];
        const auto nt = r.dims.n[q.tail_of(a)];
        const auto m = r.dims.m[a];
        if (r.phi[a].rows() != nh || r.phi[a].cols() != static_cast<Eigen::Index>(nt) * m)
            throw InvalidInput("arrow '" + q.arrows[a].id + "': matrix shape mismatch");
    }
}

}  // namespace

long representation_dimension(const Quiver& q, const DimensionVector& d) {
    require_valid(q, d);
    long total = 0;
    for (size_t a = 0; a < q.arrows.size(); ++a)
        total += static_cast<long>(d.n[q.head_of(static_cast<int>(a))]) *
                 d.n[q.tail_of(static_cast<int>(a))] * d.m[a];
    return total;
}

Representation make_representation(QuiverPtr q, DimensionVector d, std::vector<Mat> phi) {
    Representation r{std::move(q), std::move(d), std::move(phi)};
    require_valid(*r.quiver, r.dims);
    if (r.phi.size() != r.quiver->arrows.size())
        throw InvalidInput("expected one matrix per arrow");
    require_shape(r);
    return r;
}

Representation zero_representation(QuiverPtr q, DimensionVector d) {
    std::vector<Mat> phi;
    for (size_t a = 0; a < q->arrows.size(); ++a) {
        const auto nh = d.n[q->head_of(static_cast<int>(a))];
        const auto nt = d.n[q->tail_of(static_cast<int>(a))];
        phi.push_back(Mat::Zero(nh, static_cast<Eigen::Index>(nt) * d.m[a]));
    }
    return make_representation(std::move(q), std::move(d), std::move(phi));
}

Representation random_representation(QuiverPtr q, DimensionVector d, std::uint64_t seed) {
    require_valid(*q, d);
    std::vector<Mat> phi;
    for (size_t a = 0; a < q->arrows.size(); ++a) {
        Rng rng = Rng::derive(seed, a);
        const auto nh = d.n[q->head_of(static_cast<int>(a))];
        const auto nt = d.n[q->tail_of(static_cast<int>(a))];
        phi.push_back(gaussian_matrix(rng, nh, static_cast<Eigen::Index>(nt) * d.m[a]));
    }
    return make_representation(std::move(q), std::move(d), std::move(phi));
}

double Representation::distance(const Representation& other) const {
    double worst = 0.0;
    if (phi.size() != other.phi.size()) return std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < phi.size(); ++a) {
        if (phi[a].rows() != other.phi[a].rows() || phi[a].cols() != other.phi[a].cols())
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, (phi[a] - other.phi[a]).norm());
    }
    return worst;
}

GaugeElement GaugeElement::identity(const Quiver& q, const DimensionVector& d) {
    GaugeElement g;
    for (size_t i = 0; i < q.vertices.size(); ++i) g.g.push_back(Mat::Identity(d.n[i], d.n[i]));
    for (size_t a = 0; a < q.arrows.size(); ++a) g.g_tw.push_back(Mat::Identity(d.m[a], d.m[a]));
    return g;
}

namespace {

Mat checked_inverse(const Mat& m, const std::string& what) {
    if (m.rows() == 0) return m;
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw InvalidInput(what + ": gauge matrix not invertible");
    return lu.inverse();
}

}  // namespace

Representation gauge_act(const GaugeElement& g, const Representation& r) {
    const Quiver& q = *r.quiver;
    if (g.g.size() != q.vertices.size())
        throw InvalidInput("gauge element has wrong number of vertex factors");
    for (size_t i = 0; i < q.vertices.size(); ++i)
        if (g.g[i].rows() != r.dims.n[i] || g.g[i].cols() != r.dims.n[i])
            throw InvalidInput("gauge factor at '" + q.vertices[i] + "': shape mismatch");
    std::vector<Mat> out(r.phi.size());
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int m = r.dims.m[a];
        Mat tl_inv = checked_inverse(g.g[q.tail_of(a)], "tail of '" + q.arrows[a].id + "'");
        Mat rhs;
        if (!g.g_tw.empty() && g.g_tw[a].rows() == m && !g.g_tw[a].isIdentity(0.0)) {
            Mat tw_inv = checked_inverse(g.g_tw[a], "twist of '" + q.arrows[a].id + "'");
            rhs = kron(tl_inv, tw_inv);
        } else {
            rhs = kron(tl_inv, Mat::Identity(m, m));
        }
        out[a] = g.g[q.head_of(a)] * r.phi[a] * rhs;
    }
    Representation res = r;
    res.phi = std::move(out);
    return res;
}

GaugeElement gauge_compose(const GaugeElement& a, const GaugeElement& b) {
    GaugeElement out;
    out.g.resize(a.g.size());
    for (size_t i = 0; i < a.g.size(); ++i) out.g[i] = a.g[i] * b.g[i];
    out.g_tw.resize(std::min(a.g_tw.size(), b.g_tw.size()));
    for (size_t i = 0; i < out.g_tw.size(); ++i) out.g_tw[i] = a.g_tw[i] * b.g_tw[i];
    return out;
}

int SubrepCandidate::total_dim() const {
    int total = 0;
    for (const auto& b : basis) total += static_cast<int>(b.cols());
    return total;
}

bool SubrepCandidate::is_full(const DimensionVector& d) const {
    for (size_t i = 0; i < basis.size(); ++i)
        if (basis[i].cols() != d.n[i]) return false;
    return true;
}

double invariance_residual(const Representation& r, const std::vector<Mat>& basis) {
    const Quiver& q = *r.quiver;
    double worst = 0.0;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const Mat& ut = basis[q.tail_of(a)];
        const Mat& uh = basis[q.head_of(a)];
        if (ut.cols() == 0) continue;
        const int m = r.dims.m[a];
        Mat image = r.phi[a] * kron(ut, Mat::Identity(m, m));
        Mat defect = image - uh * (uh.adjoint() * image);
        worst = std::max(worst, defect.norm());
    }
    return worst;
}

SubrepCandidate generated_subrep(const Representation& r,
                                 const std::vector<std::pair<int, Vec>>& seeds) {
    const Quiver& q = *r.quiver;
    const int nv = static_cast<int>(q.vertices.size());
    std::vector<Mat> basis(nv);
    for (int i = 0; i < nv; ++i) basis[i] = Mat(r.dims.n[i], 0);

    // Orthonormal growth: keep the component orthogonal to the current span.
    auto grow = [&](int vertex, const Vec& v) -> bool {
        if (v.size() != r.dims.n[vertex])
            throw InvalidInput("seed vector has wrong length at vertex index " +
                               std::to_string(vertex));
        Vec w = v;
        for (int pass = 0; pass < 2; ++pass)
            if (basis[vertex].cols() > 0) w -= basis[vertex] * (basis[vertex].adjoint() * w);
        const double scale = std::max(1.0, v.norm());
        if (w.norm() <= 1e-12 * scale) return false;
        basis[vertex].conservativeResize(Eigen::NoChange, basis[vertex].cols() + 1);
        basis[vertex].col(basis[vertex].cols() - 1) = w / w.norm();
        return true;
    };

    std::vector<std::pair<int, Vec>> work = seeds;
    while (!work.empty()) {
        auto [vertex, v] = work.back();
        work.pop_back();
        if (!grow(vertex, v)) continue;
        const Vec u = basis[vertex].col(basis[vertex].cols() - 1);
        for (int a = 0; a < r.num_arrows(); ++a) {
            if (q.tail_of(a) != vertex) continue;
            const int m = r.dims.m[a];
            for (int k = 0; k < m; ++k) {
                Vec image = twist_slice(r.phi[a], k, m) * u;
                if (image.norm() > 0.0) work.emplace_back(q.head_of(a), image);
            }
        }
    }

    SubrepCandidate out;
    out.basis = std::move(basis);
    out.invariance_residual = invariance_residual(r, out.basis);
    return out;
}

Representation restrict_representation(const Representation& r, const std::vector<Mat>& basis,
                                       double tolerance) {
    const Quiver& q = *r.quiver;
    double scale = 1.0;
    for (const auto& p : r.phi) scale = std::max(scale, p.norm());
    if (invariance_residual(r, basis) > tolerance * scale)
        throw InvalidInput("restrict_representation: subspace tuple is not invariant");
    DimensionVector d = r.dims;
    for (size_t i = 0; i < basis.size(); ++i) d.n[i] = static_cast<int>(basis[i].cols());
    std::vector<Mat> phi;
    for (int a = 0; a < r.num_arrows(); ++a) {
        const int m = r.dims.m[a];
        phi.push_back(basis[q.head_of(a)].adjoint() * r.phi[a] *
                      kron(basis[q.tail_of(a)], Mat::Identity(m, m)));
    }
    return make_representation(r.quiver, std::move(d), std::move(phi));
}

Representation direct_sum(const Representation& a, const Representation& b) {
    const Quiver& q = *a.quiver;
    if (b.quiver->vertices != q.vertices)
        throw InvalidInput("direct_sum: quiver mismatch");
    for (size_t k = 0; k < q.arrows.size(); ++k) {
        if (b.quiver->arrows[k].id != q.arrows[k].id)
            throw InvalidInput("direct_sum: quiver mismatch");
        if (a.dims.m[k] != b.dims.m[k])
            throw InvalidInput("direct_sum: twist dimension mismatch");
    }
    DimensionVector d = a.dims;
    for (size_t i = 0; i < d.n.size(); ++i) d.n[i] += b.dims.n[i];
    std::vector<Mat> phi;
    for (int arr = 0; arr < a.num_arrows(); ++arr) {
        const int m = a.dims.m[arr];
        const int nh = d.n[q.head_of(arr)];
        const int nt = d.n[q.tail_of(arr)];
        const int nha = a.dims.n[q.head_of(arr)];
        const int nta = a.dims.n[q.tail_of(arr)];
        Mat block = Mat::Zero(nh, static_cast<Eigen::Index>(nt) * m);
        for (int k = 0; k < m; ++k) {
            Mat slice = Mat::Zero(nh, nt);
            slice.topLeftCorner(nha, nta) = twist_slice(a.phi[arr], k, m);
            slice.bottomRightCorner(nh - nha, nt - nta) = twist_slice(b.phi[arr], k, m);
            set_twist_slice(block, k, m, slice);
        }
        phi.push_back(std::move(block));
    }
    return make_representation(a.quiver, std::move(d), std::move(phi));
}

}  // namespace qm
