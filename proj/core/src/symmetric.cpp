#include "quivermap/symmetric.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>

namespace qm {

SymmetricStructure SymmetricStructure::plain(const Quiver& q, std::vector<int> sv,
                                             std::vector<int> sa, int form_sign) {
    SymmetricStructure s;
    s.sigma_v = std::move(sv);
    s.sigma_a = std::move(sa);
    s.form_sign = form_sign;
    s.eps_v.assign(q.vertices.size(), +1);
    s.eps_a.assign(q.arrows.size(), +1);
    return s;
}

ValidationReport validate_symmetric(const Quiver& q, const DimensionVector& d,
                                    const SymmetricStructure& s) {
    ValidationReport rep = validate_quiver(q, d);
    const int nv = static_cast<int>(q.vertices.size());
    const int na = static_cast<int>(q.arrows.size());
    if (static_cast<int>(s.sigma_v.size()) != nv || static_cast<int>(s.sigma_a.size()) != na) {
        rep.add("sigma has wrong length");
        return rep;
    }
    if (static_cast<int>(s.eps_v.size()) != nv || static_cast<int>(s.eps_a.size()) != na) {
        rep.add("eps has wrong length");
        return rep;
    }
    if (s.form_sign != 1 && s.form_sign != -1) rep.add("form_sign must be +1 or -1");

    auto in_range = [](const std::vector<int>& f, int n) {
        return std::all_of(f.begin(), f.end(), [n](int x) { return 0 <= x && x < n; });
    };
    if (!in_range(s.sigma_v, nv) || !in_range(s.sigma_a, na)) {
        rep.add("sigma out of range");
        return rep;
    }
    for (int i = 0; i < nv; ++i)
        if (s.sigma_v[s.sigma_v[i]] != i) {
            rep.add("sigma_v is not an involution");
            break;
        }
    for (int a = 0; a < na; ++a)
        if (s.sigma_a[s.sigma_a[a]] != a) {
            rep.add("sigma_a is not an involution");
            break;
        }

    for (int a = 0; a < na; ++a) {
        const int t = q.tail_of(a), h = q.head_of(a);
        const int sa = s.sigma_a[a];
        if (s.sigma_v[t] != q.head_of(sa) || s.sigma_v[h] != q.tail_of(sa))
            rep.add("arrow '" + q.arrows[a].id + "': sigma t(a) != h(sigma a)");
        if (t == s.sigma_v[h] && sa != a)
            rep.add("arrow '" + q.arrows[a].id + "': t(a) = sigma h(a) forces sigma(a) = a");
    }
    for (int i = 0; i < nv; ++i)
        if (d.n[i] != d.n[s.sigma_v[i]])
            rep.add("vertex '" + q.vertices[i] + "': dimension not sigma-compatible");
    for (int a = 0; a < na; ++a)
        if (d.m[a] != d.m[s.sigma_a[a]])
            rep.add("arrow '" + q.arrows[a].id + "': twist not sigma-compatible");

    auto pm = [](const std::vector<int>& e) {
        return std::all_of(e.begin(), e.end(), [](int x) { return x == 1 || x == -1; });
    };
    if (!pm(s.eps_v) || !pm(s.eps_a)) rep.add("eps values must be +1 or -1");
    for (int i = 0; i < nv; ++i)
        if (s.eps_v[i] * s.eps_v[s.sigma_v[i]] != 1) {
            rep.add("eps_v[i] * eps_v[sigma(i)] != 1");
            break;
        }
    for (int a = 0; a < na; ++a)
        if (s.eps_a[a] * s.eps_a[s.sigma_a[a]] != 1) {
            rep.add("eps_a[a] * eps_a[sigma(a)] != 1");
            break;
        }

    // The structured condition phi_{sigma(a)} = -eps_a phi_a^t is consistent
    // only when the two ends of an arrow carry form blocks of equal symmetry
    // sign: the double C-transpose scales by block_sign(t) * block_sign(h).
    for (int a = 0; a < na; ++a)
        if (s.block_sign(q.tail_of(a)) != s.block_sign(q.head_of(a)))
            rep.add("arrow '" + q.arrows[a].id + "': endpoints carry blocks of opposite symmetry");
    return rep;
}

namespace {

Mat standard_j(int n) {
    Mat j = Mat::Zero(n, n);
    const int half = n / 2;
    j.topRightCorner(half, half) = Mat::Identity(half, half);
    j.bottomLeftCorner(half, half) = -Mat::Identity(half, half);
    return j;
}

void require_symmetric(const Quiver& q, const DimensionVector& d, const SymmetricStructure& s) {
    auto rep = validate_symmetric(q, d, s);
    if (!rep.ok()) throw StructureError("invalid symmetric structure: " + rep.joined());
}

}  // namespace

BlockForm standard_form(const Quiver& q, const DimensionVector& d, const SymmetricStructure& s) {
    require_symmetric(q, d, s);
    BlockForm c;
    c.form_sign = s.form_sign;
    c.block.resize(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        const int n = d.n[i];
        const int sign = s.block_sign(static_cast<int>(i));
        if (static_cast<int>(i) == si) {
            if (sign == 1) {
                c.block[i] = Mat::Identity(n, n);
            } else {
                if (n % 2 != 0)
                    throw StructureError("vertex '" + q.vertices[i] +
                                         "': antisymmetric form needs even dimension");
                c.block[i] = standard_j(n);
            }
        } else if (static_cast<int>(i) < si) {
            c.block[i] = Mat::Identity(n, n);
        } else {
            c.block[i] = static_cast<double>(sign) * Mat::Identity(n, n);
        }
    }
    return c;
}

ValidationReport validate_block_form(const Quiver& q, const DimensionVector& d,
                                     const SymmetricStructure& s, const BlockForm& c) {
    ValidationReport rep;
    if (c.block.size() != q.vertices.size()) {
        rep.add("block form has wrong number of blocks");
        return rep;
    }
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        const Mat& b = c.block[i];
        if (b.rows() != d.n[i] || b.cols() != d.n[si]) {
            rep.add("block at '" + q.vertices[i] + "': shape mismatch");
            continue;
        }
        if (b.rows() > 0) {
            Eigen::JacobiSVD<Mat> svd(b);
            const auto& sv = svd.singularValues();
            if (sv(sv.size() - 1) <= 1e-12 * sv(0))
                rep.add("block at '" + q.vertices[i] + "': degenerate");
        }
        const double sign = static_cast<double>(s.block_sign(static_cast<int>(i)));
        if ((c.block[si] - sign * b.transpose()).norm() > 1e-10 * std::max(1.0, b.norm()))
            rep.add("block at '" + q.vertices[i] + "': symmetry inconsistent with sign");
    }
    if (c.form_sign != s.form_sign) rep.add("form_sign mismatch");
    return rep;
}

Mat c_transpose_arrow(const Representation& r, int arrow, const SymmetricStructure& s,
                      const BlockForm& c) {
    const Quiver& q = *r.quiver;
    const int t = q.tail_of(arrow), h = q.head_of(arrow);
    const int st = s.sigma_v[t], sh = s.sigma_v[h];
    const int m = r.dims.m[arrow];
    Mat ct_inv;
    if (r.dims.n[t] > 0) ct_inv = c.block[t].inverse();
    Mat out(r.dims.n[st], static_cast<Eigen::Index>(r.dims.n[sh]) * m);
    for (int k = 0; k < m; ++k) {
        Mat slice = twist_slice(r.phi[arrow], k, m);
        Mat tslice = r.dims.n[t] > 0 && r.dims.n[h] > 0
                         ? Mat(ct_inv * slice.transpose() * c.block[h])
                         : Mat::Zero(r.dims.n[st], r.dims.n[sh]);
        set_twist_slice(out, k, m, tslice);
    }
    return out;
}

Mat c_adjoint_vertex(const Mat& u, int vertex, const SymmetricStructure& s, const BlockForm& c) {
    if (u.rows() == 0) return u;
    (void)s;
    return c.block[vertex].inverse() * u.transpose() * c.block[vertex];
}

Representation sigma_transpose(const Representation& r, const SymmetricStructure& s,
                               const BlockForm& c) {
    const Quiver& q = *r.quiver;
    require_symmetric(q, r.dims, s);
    Representation out = r;
    for (int a = 0; a < r.num_arrows(); ++a)
        out.phi[a] = -static_cast<double>(s.eps_a[a]) * c_transpose_arrow(r, s.sigma_a[a], s, c);
    return out;
}

std::pair<bool, double> is_structured_rep(const Representation& r, const SymmetricStructure& s,
                                          const BlockForm& c, double tolerance) {
    double worst = 0.0;
    for (int a = 0; a < r.num_arrows(); ++a) {
        Mat t = c_transpose_arrow(r, a, s, c);
        worst = std::max(worst,
                         (r.phi[s.sigma_a[a]] + static_cast<double>(s.eps_a[a]) * t).norm());
    }
    return {worst <= tolerance, worst};
}

Representation project_structured(const Representation& r, const SymmetricStructure& s,
                                  const BlockForm& c) {
    Representation t = sigma_transpose(r, s, c);
    Representation out = r;
    for (int a = 0; a < r.num_arrows(); ++a) out.phi[a] = 0.5 * (r.phi[a] + t.phi[a]);
    return out;
}

std::vector<Mat> orthogonal_complement(const std::vector<Mat>& u, const Quiver& q,
                                       const DimensionVector& d, const SymmetricStructure& s,
                                       const BlockForm& c) {
    std::vector<Mat> out(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (d.n[i] == 0) {
            out[i] = Mat(0, 0);
            continue;
        }
        // x in V_i with x^T C_{i,sigma(i)} U_{sigma(i)} = 0.
        Mat constraints = (c.block[i] * u[si]).transpose();
        out[i] = kernel_basis(constraints);
    }
    return out;
}

bool is_isotropic(const std::vector<Mat>& u, const Quiver& q, const SymmetricStructure& s,
                  const BlockForm& c, double tolerance) {
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (u[i].cols() == 0 || u[si].cols() == 0) continue;
        if ((u[i].transpose() * c.block[i] * u[si]).norm() > tolerance) return false;
    }
    return true;
}

double structured_gauge_residual(const GaugeElement& g, const Quiver& q,
                                 const SymmetricStructure& s, const BlockForm& c) {
    double worst = 0.0;
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (g.g[i].rows() == 0) continue;
        worst = std::max(
            worst, (g.g[i].transpose() * c.block[i] * g.g[si] - c.block[i]).norm());
    }
    return worst;
}

GaugeElement random_structured_gauge(const Quiver& q, const DimensionVector& d,
                                     const SymmetricStructure& s, const BlockForm& c,
                                     std::uint64_t seed, double spread) {
    GaugeElement g = GaugeElement::identity(q, d);
    for (size_t i = 0; i < q.vertices.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        const int n = d.n[i];
        if (n == 0) continue;
        Rng rng = Rng::derive(seed, i);
        if (static_cast<int>(i) == si) {
            // exp of a C-alternating matrix X = C^{-1} A, sign*A^T = -A.
            const int sign = s.block_sign(static_cast<int>(i));
            Mat raw = gaussian_matrix(rng, n, n);
            Mat a = sign == 1 ? Mat(0.5 * (raw - raw.transpose()))
                              : Mat(0.5 * (raw + raw.transpose()));
            Mat x = c.block[i].inverse() * (spread * a);
            g.g[i] = x.exp();
        } else if (static_cast<int>(i) < si) {
            Mat gi;
            for (int attempt = 0; attempt < 64; ++attempt) {
                gi = Mat::Identity(n, n) + spread * gaussian_matrix(rng, n, n);
                Eigen::JacobiSVD<Mat> svd(gi);
                if (svd.singularValues().minCoeff() > 0.05) break;
            }
            g.g[i] = gi;
            g.g[si] = c_adjoint_vertex(gi, static_cast<int>(i), s, c).inverse();
        }
    }
    return g;
}

}  // namespace qm
