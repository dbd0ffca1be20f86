#include "quivermap/decompose.hpp"

#include <algorithm>
#include <cmath>

namespace qm {

namespace {

struct VecLayout {
    std::vector<int> offset;
    int total = 0;
};

VecLayout layout_of(const std::vector<int>& rows, const std::vector<int>& cols) {
    VecLayout l;
    l.offset.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        l.offset[i] = l.total;
        l.total += rows[i] * cols[i];
    }
    return l;
}

// Assembles the linear system for T_head phi_from = phi_to (T_tail (x) I_m)
// with unknowns T_i of shape to.n[i] x from.n[i], stacked column-major.
Mat intertwiner_system(const Representation& from, const Representation& to,
                       const VecLayout& layout) {
    const Quiver& q = *from.quiver;
    long rows = 0;
    for (int a = 0; a < from.num_arrows(); ++a)
        rows += static_cast<long>(to.dims.n[q.head_of(a)]) * from.dims.n[q.tail_of(a)] *
                from.dims.m[a];
    Mat sys = Mat::Zero(rows, layout.total);
    long row0 = 0;
    auto unknown = [&](int vertex, int r, int c) {
        return layout.offset[vertex] + c * to.dims.n[vertex] + r;
    };
    for (int a = 0; a < from.num_arrows(); ++a) {
        const int h = q.head_of(a), t = q.tail_of(a);
        const int m = from.dims.m[a];
        const int nh_to = to.dims.n[h], nh_from = from.dims.n[h];
        const int nt_from = from.dims.n[t], nt_to = to.dims.n[t];
        for (int i = 0; i < nh_to; ++i)
            for (int b = 0; b < nt_from; ++b)
                for (int k = 0; k < m; ++k) {
                    const long row = row0 + (static_cast<long>(i) * nt_from + b) * m + k;
                    // (T_h phi_from)[i, (b,k)]
                    for (int p = 0; p < nh_from; ++p)
                        sys(row, unknown(h, i, p)) += from.phi[a](p, b * m + k);
                    // -(phi_to (T_t (x) I))[i, (b,k)]
                    for (int ap = 0; ap < nt_to; ++ap)
                        sys(row, unknown(t, ap, b)) -= to.phi[a](i, ap * m + k);
                }
        row0 += static_cast<long>(nh_to) * nt_from * m;
    }
    return sys;
}

std::vector<std::vector<Mat>> unpack_kernel(const Mat& kernel, const std::vector<int>& rows,
                                            const std::vector<int>& cols,
                                            const VecLayout& layout) {
    std::vector<std::vector<Mat>> out;
    for (Eigen::Index v = 0; v < kernel.cols(); ++v) {
        std::vector<Mat> tuple(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            Mat u(rows[i], cols[i]);
            for (int c = 0; c < cols[i]; ++c)
                for (int r = 0; r < rows[i]; ++r)
                    u(r, c) = kernel(layout.offset[i] + c * rows[i] + r, v);
            tuple[i] = std::move(u);
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

}  // namespace

std::vector<std::vector<Mat>> intertwiner_space(const Representation& from,
                                                const Representation& to, double rank_tol) {
    const auto& q = *from.quiver;
    if (to.quiver->vertices != q.vertices)
        throw InvalidInput("intertwiner_space: quiver mismatch");
    std::vector<int> rows(to.dims.n.begin(), to.dims.n.end());
    std::vector<int> cols(from.dims.n.begin(), from.dims.n.end());
    VecLayout layout = layout_of(rows, cols);
    if (layout.total == 0) return {};
    Mat sys = intertwiner_system(from, to, layout);
    Mat kernel = kernel_basis(sys, rank_tol);
    return unpack_kernel(kernel, rows, cols, layout);
}

EndAlgebra endomorphism_algebra(const Representation& r, double rank_tol) {
    EndAlgebra alg;
    alg.basis = intertwiner_space(r, r, rank_tol);
    alg.dim = static_cast<int>(alg.basis.size());
    return alg;
}

std::optional<std::vector<Mat>> invertible_intertwiner(const Representation& from,
                                                       const Representation& to,
                                                       std::uint64_t seed, double sv_tol) {
    for (size_t i = 0; i < from.dims.n.size(); ++i)
        if (from.dims.n[i] != to.dims.n[i]) return std::nullopt;
    auto basis = intertwiner_space(from, to);
    if (basis.empty()) return std::nullopt;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Rng rng = Rng::derive(seed, attempt);
        std::vector<Mat> t(from.dims.n.size());
        for (size_t i = 0; i < t.size(); ++i) t[i] = Mat::Zero(to.dims.n[i], from.dims.n[i]);
        for (const auto& b : basis) {
            const cplx c = rng.cgauss();
            for (size_t i = 0; i < t.size(); ++i) t[i] += c * b[i];
        }
        bool invertible = true;
        for (size_t i = 0; i < t.size(); ++i) {
            if (t[i].rows() == 0) continue;
            Eigen::JacobiSVD<Mat> svd(t[i]);
            const auto& sv = svd.singularValues();
            if (sv(0) <= 0 || sv(sv.size() - 1) < sv_tol * sv(0)) {
                invertible = false;
                break;
            }
        }
        if (invertible) return t;
    }
    return std::nullopt;
}

bool is_simple(const Representation& r) { return endomorphism_algebra(r).dim == 1; }

const char* summand_tag_name(SummandTag t) {
    switch (t) {
        case SummandTag::PlainStable: return "PLAIN_STABLE";
        case SummandTag::OrthStableF: return "ORTH_STABLE_F";
        case SummandTag::DualPairE: return "DUAL_PAIR_E";
        case SummandTag::SelfdualPairS: return "SELFDUAL_PAIR_S";
    }
    return "?";
}

namespace {

struct Leaf {
    std::vector<Mat> embedding;
    Representation rep;
    bool certified = false;
};

double phi_scale(const Representation& r) {
    double s = 1.0;
    for (const auto& p : r.phi) s = std::max(s, p.norm());
    return s;
}

// One splitting attempt: a generic hermitian element of End, its global
// eigenvalue clusters, and the induced invariant spans.
bool try_split(const Representation& sub, const EndAlgebra& end, Rng& rng,
               std::vector<std::vector<Mat>>& spans_out) {
    const size_t nv = sub.dims.n.size();
    // Random element, symmetrized and projected back into End. The kernel
    // basis is orthonormal as stacked vectors, so projection is a plain
    // expansion in basis coefficients.
    std::vector<Mat> g(nv), h(nv);
    for (size_t i = 0; i < nv; ++i) g[i] = Mat::Zero(sub.dims.n[i], sub.dims.n[i]);
    for (const auto& b : end.basis) {
        const cplx c = rng.cgauss();
        for (size_t i = 0; i < nv; ++i) g[i] += c * b[i];
    }
    for (size_t i = 0; i < nv; ++i) h[i] = g[i] + g[i].adjoint();
    std::vector<cplx> coeff(end.basis.size(), cplx(0, 0));
    for (size_t k = 0; k < end.basis.size(); ++k)
        for (size_t i = 0; i < nv; ++i)
            coeff[k] += (end.basis[k][i].conjugate().array() * h[i].array()).sum();
    for (size_t i = 0; i < nv; ++i) {
        h[i].setZero();
        for (size_t k = 0; k < end.basis.size(); ++k) h[i] += coeff[k] * end.basis[k][i];
    }

    double h_norm = 0.0, herm_defect = 0.0;
    for (size_t i = 0; i < nv; ++i) {
        h_norm = std::max(h_norm, h[i].norm());
        herm_defect = std::max(herm_defect, (h[i] - h[i].adjoint()).norm());
    }
    if (h_norm <= 0) return false;
    const bool hermitian = herm_defect <= 1e-9 * h_norm;

    // Global eigenvalue clustering.
    struct EigPair {
        cplx value;
        int vertex;
        Eigen::Index col;
    };
    std::vector<EigPair> eigs;
    std::vector<Mat> vectors(nv);
    for (size_t i = 0; i < nv; ++i) {
        if (sub.dims.n[i] == 0) {
            vectors[i] = Mat(0, 0);
            continue;
        }
        if (hermitian) {
            Eigen::SelfAdjointEigenSolver<Mat> es(h[i]);
            vectors[i] = es.eigenvectors();
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
                eigs.push_back({cplx(es.eigenvalues()(k), 0.0), static_cast<int>(i), k});
        } else {
            Eigen::ComplexEigenSolver<Mat> es(h[i]);
            vectors[i] = es.eigenvectors();
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
                eigs.push_back({es.eigenvalues()(k), static_cast<int>(i), k});
        }
    }
    if (eigs.empty()) return false;
    std::sort(eigs.begin(), eigs.end(), [](const EigPair& a, const EigPair& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    const double cluster_tol = 1e-6 * (1.0 + h_norm);
    std::vector<int> cluster_of(eigs.size(), 0);
    int clusters = 1;
    for (size_t k = 1; k < eigs.size(); ++k) {
        if (std::abs(eigs[k].value - eigs[k - 1].value) > cluster_tol) ++clusters;
        cluster_of[k] = clusters - 1;
    }
    if (clusters < 2) return false;

    spans_out.assign(clusters, std::vector<Mat>(nv));
    for (int c = 0; c < clusters; ++c)
        for (size_t i = 0; i < nv; ++i) spans_out[c][i] = Mat(sub.dims.n[i], 0);
    for (size_t k = 0; k < eigs.size(); ++k) {
        auto& span = spans_out[cluster_of[k]][eigs[k].vertex];
        span.conservativeResize(Eigen::NoChange, span.cols() + 1);
        span.col(span.cols() - 1) = vectors[eigs[k].vertex].col(eigs[k].col);
    }
    // Orthonormalize and check that nothing collapsed (defective case).
    std::vector<int> seen(nv, 0);
    for (int c = 0; c < clusters; ++c)
        for (size_t i = 0; i < nv; ++i) {
            const auto before = spans_out[c][i].cols();
            spans_out[c][i] = column_space(spans_out[c][i], 1e-8);
            if (spans_out[c][i].cols() != before) return false;
            seen[i] += static_cast<int>(spans_out[c][i].cols());
        }
    for (size_t i = 0; i < nv; ++i)
        if (seen[i] != sub.dims.n[i]) return false;
    // Spectral projectors must project onto subrepresentations.
    const double scale = phi_scale(sub);
    for (int c = 0; c < clusters; ++c)
        if (invariance_residual(sub, spans_out[c]) > 1e-9 * scale) return false;
    return true;
}

void split_recursive(const Representation& sub, const std::vector<Mat>& embedding,
                     std::uint64_t seed, std::vector<Leaf>& leaves, bool& ok,
                     std::string& diagnostic) {
    int total = 0;
    for (int n : sub.dims.n) total += n;
    if (total == 0) return;

    EndAlgebra end = endomorphism_algebra(sub);
    if (end.dim <= 1) {
        leaves.push_back({embedding, sub, end.dim == 1});
        return;
    }
    for (int attempt = 0; attempt < 16; ++attempt) {
        Rng rng = Rng::derive(seed, 0x5eed0000ULL + attempt);
        std::vector<std::vector<Mat>> spans;
        if (!try_split(sub, end, rng, spans)) continue;
        for (size_t c = 0; c < spans.size(); ++c) {
            std::vector<Mat> next_embedding(embedding.size());
            for (size_t i = 0; i < embedding.size(); ++i)
                next_embedding[i] = embedding[i] * spans[c][i];
            Representation next = restrict_representation(sub, spans[c], 1e-7);
            split_recursive(next, next_embedding, seed + 0x9e37 * (c + 1), leaves, ok,
                            diagnostic);
        }
        return;
    }
    ok = false;
    diagnostic = "non-semisimple endomorphism algebra";
    leaves.push_back({embedding, sub, false});
}

}  // namespace

DecompositionReport decompose(const Representation& r, std::uint64_t seed) {
    const Quiver& q = *r.quiver;
    DecompositionReport report;
    report.change_of_basis = GaugeElement::identity(q, r.dims);

    std::vector<Mat> identity_embedding(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i)
        identity_embedding[i] = Mat::Identity(r.dims.n[i], r.dims.n[i]);

    std::vector<Leaf> leaves;
    split_recursive(r, identity_embedding, seed, leaves, report.ok, report.diagnostic);

    // Group isomorphic leaves; representative is the first member.
    std::vector<std::vector<size_t>> groups;
    for (size_t l = 0; l < leaves.size(); ++l) {
        bool placed = false;
        for (auto& grp : groups) {
            const Leaf& repr = leaves[grp.front()];
            if (leaves[l].rep.dims.n != repr.rep.dims.n) continue;
            if (invertible_intertwiner(leaves[l].rep, repr.rep, seed + 17 * l)) {
                grp.push_back(l);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({l});
    }

    // Change of basis: per vertex the inverse of the column assembly, with
    // isomorphic copies re-framed through an intertwiner so that every block
    // equals its group representative exactly.
    std::vector<Mat> columns(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i) columns[i] = Mat(r.dims.n[i], 0);
    for (const auto& grp : groups) {
        const Leaf& repr = leaves[grp.front()];
        DecompSummand summand;
        summand.rep = repr.rep;
        summand.multiplicity = static_cast<int>(grp.size());
        summand.certified_stable = repr.certified;
        for (size_t member : grp) {
            summand.copy_embeddings.push_back(leaves[member].embedding);
            std::vector<Mat> adjusted = leaves[member].embedding;
            if (member != grp.front()) {
                auto t = invertible_intertwiner(leaves[member].rep, repr.rep, seed + 31 * member);
                if (!t) {
                    report.ok = false;
                    report.diagnostic = "intertwiner between isomorphic summands degenerated";
                    continue;
                }
                for (size_t i = 0; i < adjusted.size(); ++i)
                    if (adjusted[i].cols() > 0) adjusted[i] = adjusted[i] * (*t)[i].inverse();
            }
            for (size_t i = 0; i < columns.size(); ++i)
                columns[i] = (Mat(columns[i].rows(), columns[i].cols() + adjusted[i].cols())
                                  << columns[i], adjusted[i])
                                 .finished();
        }
        report.summands.push_back(std::move(summand));
    }
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].cols() != r.dims.n[i]) {
            report.ok = false;
            report.diagnostic = "summand dimensions do not fill the total space";
            return report;
        }
        if (r.dims.n[i] > 0) report.change_of_basis.g[i] = columns[i].inverse();
    }
    return report;
}

double recomposition_residual(const Representation& r, const DecompositionReport& report) {
    Representation assembled = zero_representation(
        r.quiver, DimensionVector::make(*r.quiver, std::vector<int>(r.dims.n.size(), 0), r.dims.m));
    for (const auto& s : report.summands)
        for (int copy = 0; copy < s.multiplicity; ++copy)
            assembled = direct_sum(assembled, s.rep);
    return gauge_act(report.change_of_basis, r).distance(assembled);
}

namespace {

// Bilinear pairing of two subspace tuples under the block form, as one
// matrix over stacked per-vertex columns: rows from u, columns from w, with
// the (i, sigma(i)) blocks of C in between.
Mat block_pairing(const std::vector<Mat>& u, const std::vector<Mat>& w,
                  const SymmetricStructure& s, const BlockForm& c) {
    int rows = 0, cols = 0;
    std::vector<int> roff(u.size()), coff(w.size());
    for (size_t i = 0; i < u.size(); ++i) {
        roff[i] = rows;
        rows += static_cast<int>(u[i].cols());
    }
    for (size_t i = 0; i < w.size(); ++i) {
        coff[i] = cols;
        cols += static_cast<int>(w[i].cols());
    }
    Mat p = Mat::Zero(rows, cols);
    for (size_t i = 0; i < u.size(); ++i) {
        const int si = s.sigma_v[static_cast<int>(i)];
        if (u[i].cols() == 0 || w[si].cols() == 0) continue;
        p.block(roff[i], coff[si], u[i].cols(), w[si].cols()) =
            u[i].transpose() * c.block[i] * w[si];
    }
    return p;
}

int pairing_rank(const Mat& p, double rel_tol = 1e-8) {
    if (p.rows() == 0 || p.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(p);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0) return 0;
    int r = 0;
    while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
    return r;
}

}  // namespace

DecompositionReport classify_orthogonal_decomposition(const Representation& r,
                                                      const SymmetricStructure& s,
                                                      const BlockForm& c,
                                                      const ParameterVector& tau,
                                                      std::uint64_t seed) {
    (void)tau;  // enters only through the caller's choice of input
    {
        auto [structured, residual] = is_structured_rep(r, s, c, 1e-6 * phi_scale(r));
        if (!structured)
            throw StructureError("classify: input not structured (residual " +
                                 std::to_string(residual) + ")");
    }
    DecompositionReport report = decompose(r, seed);
    if (!report.ok) return report;

    const size_t k = report.summands.size();
    // Isotypic block spans (all copies side by side, orthonormal columns).
    std::vector<std::vector<Mat>> blocks(k);
    std::vector<int> block_dim(k, 0);
    for (size_t a = 0; a < k; ++a) {
        std::vector<Mat> span(r.dims.n.size());
        for (size_t i = 0; i < span.size(); ++i) span[i] = Mat(r.dims.n[i], 0);
        for (const auto& copy : report.summands[a].copy_embeddings)
            for (size_t i = 0; i < span.size(); ++i) span[i] = subspace_sum(span[i], copy[i]);
        for (size_t i = 0; i < span.size(); ++i) block_dim[a] += static_cast<int>(span[i].cols());
        blocks[a] = std::move(span);
    }

    // Pairing partner of every isotypic block.
    std::vector<int> partner(k, -1);
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) {
            const int rank = pairing_rank(block_pairing(blocks[a], blocks[b], s, c));
            if (rank == 0) continue;
            if (rank < std::min(block_dim[a], block_dim[b]) || partner[a] != -1 ||
                block_dim[a] != block_dim[b]) {
                report.ok = false;
                report.diagnostic = "form degenerate on polystable decomposition";
                return report;
            }
            partner[a] = static_cast<int>(b);
        }
        if (partner[a] == -1 && block_dim[a] > 0) {
            report.ok = false;
            report.diagnostic = "form degenerate on polystable decomposition";
            return report;
        }
    }
    for (size_t a = 0; a < k; ++a)
        if (partner[a] >= 0 && partner[partner[a]] != static_cast<int>(a)) {
            report.ok = false;
            report.diagnostic = "form degenerate on polystable decomposition";
            return report;
        }

    for (size_t a = 0; a < k; ++a) {
        if (partner[a] != static_cast<int>(a)) {
            report.summands[a].tag = SummandTag::DualPairE;
            if (report.summands[partner[a]].multiplicity != report.summands[a].multiplicity) {
                report.ok = false;
                report.diagnostic = "form degenerate on polystable decomposition";
                return report;
            }
            continue;
        }
        // Self-paired isotypic block: the symmetry of the invariant
        // self-pairing decides between F-type and S-type. Copies are pulled
        // to representative coordinates through intertwiners first.
        auto& summand = report.summands[a];
        const int m = summand.multiplicity;
        std::vector<std::vector<Mat>> pulled(m);
        for (int p = 0; p < m; ++p) {
            pulled[p] = summand.copy_embeddings[p];
            Representation copy_rep = restrict_representation(r, summand.copy_embeddings[p], 1e-7);
            auto t = invertible_intertwiner(copy_rep, summand.rep, seed + 97 * (p + 1));
            if (!t) {
                report.ok = false;
                report.diagnostic = "form degenerate on polystable decomposition";
                return report;
            }
            for (size_t i = 0; i < pulled[p].size(); ++i)
                if (pulled[p][i].cols() > 0) pulled[p][i] = pulled[p][i] * (*t)[i].inverse();
        }
        // Pulled-back pairing forms F^{pq} are all multiples of one invariant
        // form B0 (Schur); the multiplicity-space matrix Q of coefficients is
        // symmetric for F-type and antisymmetric for S-type.
        std::vector<std::vector<Mat>> forms(m * m);
        double best_norm = -1.0;
        int best = 0;
        for (int p = 0; p < m; ++p)
            for (int qq = 0; qq < m; ++qq) {
                std::vector<Mat> f(r.dims.n.size());
                for (size_t i = 0; i < f.size(); ++i) {
                    const int si = s.sigma_v[static_cast<int>(i)];
                    f[i] = pulled[p][i].transpose() * c.block[i] * pulled[qq][si];
                }
                double norm = 0.0;
                for (const auto& fi : f) norm += fi.squaredNorm();
                norm = std::sqrt(norm);
                if (norm > best_norm) {
                    best_norm = norm;
                    best = p * m + qq;
                }
                forms[p * m + qq] = std::move(f);
            }
        if (best_norm <= 0) {
            report.ok = false;
            report.diagnostic = "form degenerate on polystable decomposition";
            return report;
        }
        const auto& b0 = forms[best];
        double b0_sq = 0.0;
        for (const auto& fi : b0) b0_sq += fi.squaredNorm();
        Mat qmat = Mat::Zero(m, m);
        double schur_defect = 0.0;
        for (int p = 0; p < m; ++p)
            for (int qq = 0; qq < m; ++qq) {
                cplx coeff(0, 0);
                const auto& f = forms[p * m + qq];
                for (size_t i = 0; i < f.size(); ++i)
                    coeff += (b0[i].conjugate().array() * f[i].array()).sum();
                coeff /= b0_sq;
                qmat(p, qq) = coeff;
                double defect = 0.0;
                for (size_t i = 0; i < f.size(); ++i)
                    defect += (f[i] - coeff * b0[i]).squaredNorm();
                schur_defect = std::max(schur_defect, std::sqrt(defect));
            }
        const double sym = (qmat.transpose() - qmat).norm();
        const double anti = (qmat.transpose() + qmat).norm();
        const double qscale = std::max(1e-300, qmat.norm());
        if (schur_defect > 1e-6 * best_norm || std::min(sym, anti) > 1e-6 * qscale) {
            report.ok = false;
            report.diagnostic = "form degenerate on polystable decomposition";
            return report;
        }
        if (sym <= anti) {
            summand.tag = SummandTag::OrthStableF;
        } else {
            if (m % 2 != 0) {
                report.ok = false;
                report.diagnostic = "form degenerate on polystable decomposition";
                return report;
            }
            summand.tag = SummandTag::SelfdualPairS;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Destabilizer search.
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
    std::vector<Mat> basis;
    std::vector<int> dims;
};

std::vector<int> dims_of(const std::vector<Mat>& basis) {
    std::vector<int> d(basis.size());
    for (size_t i = 0; i < basis.size(); ++i) d[i] = static_cast<int>(basis[i].cols());
    return d;
}

bool same_candidate(const Candidate& a, const Candidate& b) {
    if (a.dims != b.dims) return false;
    for (size_t i = 0; i < a.basis.size(); ++i)
        if (!subspace_equal(a.basis[i], b.basis[i])) return false;
    return true;
}

class Lattice {
public:
    Lattice(const Representation& r, int budget) : r_(r), budget_(budget) {}

    bool add_closure_of(const std::vector<std::pair<int, Vec>>& seeds) {
        return add(generated_subrep(r_, seeds).basis);
    }

    bool add(const std::vector<Mat>& basis) {
        if (static_cast<int>(items_.size()) >= budget_) return false;
        // Normalize through the invariant closure of the columns.
        std::vector<std::pair<int, Vec>> seeds;
        for (size_t i = 0; i < basis.size(); ++i)
            for (Eigen::Index c = 0; c < basis[i].cols(); ++c)
                seeds.emplace_back(static_cast<int>(i), Vec(basis[i].col(c)));
        Candidate cand;
        cand.basis = generated_subrep(r_, seeds).basis;
        cand.dims = dims_of(cand.basis);
        for (const auto& existing : items_)
            if (same_candidate(existing, cand)) return false;
        items_.push_back(std::move(cand));
        return true;
    }

    /// Close under pairwise sums and intersections, budget-capped.
    void saturate() {
        bool grew = true;
        while (grew && static_cast<int>(items_.size()) < budget_) {
            grew = false;
            const size_t snapshot = items_.size();
            for (size_t a = 0; a < snapshot && static_cast<int>(items_.size()) < budget_; ++a)
                for (size_t b = a + 1; b < snapshot && static_cast<int>(items_.size()) < budget_;
                     ++b) {
                    std::vector<Mat> sum(items_[a].basis.size());
                    std::vector<Mat> inter(items_[a].basis.size());
                    for (size_t i = 0; i < sum.size(); ++i) {
                        sum[i] = subspace_sum(items_[a].basis[i], items_[b].basis[i]);
                        inter[i] = subspace_intersection(items_[a].basis[i], items_[b].basis[i]);
                    }
                    if (add(sum)) grew = true;
                    if (add(inter)) grew = true;
                }
        }
    }

    const std::vector<Candidate>& items() const { return items_; }

private:
    const Representation& r_;
    int budget_;
    std::vector<Candidate> items_;
};

Lattice build_lattice(const Representation& r, const DestabilizerOptions& opts) {
    const Quiver& q = *r.quiver;
    Lattice lattice(r, opts.exhaust_budget);

    std::vector<std::vector<Vec>> seed_vectors(q.vertices.size());
    for (size_t i = 0; i < q.vertices.size(); ++i)
        for (int k = 0; k < r.dims.n[i]; ++k) {
            Vec e = Vec::Zero(r.dims.n[i]);
            e(k) = 1.0;
            seed_vectors[i].push_back(e);
        }
    {
        Rng rng(opts.seed + 0xd15ab1e);
        size_t vertex = 0;
        for (int k = 0; k < opts.random_seeds; ++k) {
            // Round-robin over vertices with nonzero dimension.
            size_t tries = 0;
            while (tries < q.vertices.size() && r.dims.n[vertex % q.vertices.size()] == 0) {
                ++vertex;
                ++tries;
            }
            const size_t v = vertex % q.vertices.size();
            if (r.dims.n[v] == 0) break;
            Vec g(r.dims.n[v]);
            for (int c = 0; c < r.dims.n[v]; ++c) g(c) = rng.cgauss();
            seed_vectors[v].push_back(g);
            ++vertex;
        }
    }

    for (size_t i = 0; i < seed_vectors.size(); ++i)
        for (const auto& v : seed_vectors[i])
            lattice.add_closure_of({{static_cast<int>(i), v}});
    // Pairwise u + w and u + i w combinations catch witnesses that live on
    // quadrics (isotropic diagonals) rather than coordinate subspaces.
    for (size_t i = 0; i < seed_vectors.size(); ++i)
        for (size_t a = 0; a < seed_vectors[i].size(); ++a)
            for (size_t b = a + 1; b < seed_vectors[i].size(); ++b) {
                lattice.add_closure_of(
                    {{static_cast<int>(i), Vec(seed_vectors[i][a] + seed_vectors[i][b])}});
                lattice.add_closure_of(
                    {{static_cast<int>(i),
                      Vec(seed_vectors[i][a] + cplx(0, 1) * seed_vectors[i][b])}});
            }
    lattice.saturate();
    return lattice;
}

bool is_proper_nonzero(const Candidate& c, const DimensionVector& d) {
    int total = 0, full = 0;
    for (size_t i = 0; i < c.dims.size(); ++i) {
        total += c.dims[i];
        full += d.n[i];
    }
    return total > 0 && total < full;
}

bool is_central_type(const Candidate& c, const DimensionVector& d) {
    for (size_t i = 0; i < c.dims.size(); ++i)
        if (c.dims[i] != 0 && c.dims[i] != d.n[i]) return false;
    return true;
}

std::optional<DestabilizerWitness> pick_witness(const std::vector<const Candidate*>& cands,
                                                const Representation& r,
                                                const ParameterVector& tau,
                                                const DestabilizerOptions& opts,
                                                bool exclude_central_at_zero) {
    double tau_scale = 1.0;
    for (double t : tau.tau) tau_scale = std::max(tau_scale, std::abs(t));
    const double eps = opts.theta_tol * tau_scale;

    const Candidate* best = nullptr;
    double best_theta = 0.0;
    for (const Candidate* c : cands) {
        if (!is_proper_nonzero(*c, r.dims)) continue;
        const double th = theta(tau, c->basis);
        bool witness = th < -eps;
        if (!witness && opts.strict_mode && th <= eps) {
            witness = !(exclude_central_at_zero && is_central_type(*c, r.dims));
        }
        if (!witness) continue;
        if (!best || th < best_theta) {
            best = c;
            best_theta = th;
        }
    }
    if (!best) return std::nullopt;
    return DestabilizerWitness{best->basis, best_theta};
}

}  // namespace

std::optional<DestabilizerWitness> find_destabilizer(const Representation& r,
                                                     const ParameterVector& tau,
                                                     const DestabilizerOptions& opts) {
    auto trace = validate_tau_trace(*r.quiver, r.dims, tau, 1e-9);
    if (!trace.ok()) throw TraceObstruction(trace.joined());
    Lattice lattice = build_lattice(r, opts);
    std::vector<const Candidate*> cands;
    for (const auto& c : lattice.items()) cands.push_back(&c);
    return pick_witness(cands, r, tau, opts, /*exclude_central_at_zero=*/false);
}

std::optional<DestabilizerWitness> find_isotropic_destabilizer(const Representation& r,
                                                               const ParameterVector& tau,
                                                               const SymmetricStructure& s,
                                                               const BlockForm& c,
                                                               const DestabilizerOptions& opts) {
    {
        auto srep = validate_tau_structured(*r.quiver, s, tau, 1e-9);
        if (!srep.ok()) throw InvalidInput("tau not structured: " + srep.joined());
        auto [structured, residual] = is_structured_rep(r, s, c, 1e-6 * phi_scale(r));
        if (!structured)
            throw StructureError("representation not structured (residual " +
                                 std::to_string(residual) + ")");
    }
    Lattice lattice = build_lattice(r, opts);
    // U cap U^perp of every lattice element is isotropic and invariant; it is
    // the witness produced by a plain destabilizer in the equivalence proof.
    {
        const auto snapshot = lattice.items();
        for (const auto& cand : snapshot) {
            auto perp = orthogonal_complement(cand.basis, *r.quiver, r.dims, s, c);
            std::vector<Mat> inter(cand.basis.size());
            for (size_t i = 0; i < inter.size(); ++i)
                inter[i] = subspace_intersection(cand.basis[i], perp[i]);
            lattice.add(inter);
        }
    }
    std::vector<const Candidate*> cands;
    for (const auto& cand : lattice.items())
        if (is_isotropic(cand.basis, *r.quiver, s, c)) cands.push_back(&cand);
    return pick_witness(cands, r, tau, opts, /*exclude_central_at_zero=*/true);
}

OrthPlainRelation orth_plain_relation_check(const Representation& r, const SymmetricStructure& s,
                                            const BlockForm& c, const ParameterVector& tau,
                                            const DestabilizerOptions& opts) {
    OrthPlainRelation out;
    DestabilizerOptions semi = opts;
    semi.strict_mode = false;
    DestabilizerOptions strict = opts;
    strict.strict_mode = true;

    out.plain_ss = !find_destabilizer(r, tau, semi).has_value();
    out.plain_stable = !find_destabilizer(r, tau, strict).has_value();
    out.orth_ss = !find_isotropic_destabilizer(r, tau, s, c, semi).has_value();
    out.orth_stable = !find_isotropic_destabilizer(r, tau, s, c, strict).has_value();

    bool consistent = (out.plain_ss == out.orth_ss);
    if (out.plain_stable) consistent = consistent && out.orth_stable && is_simple(r);
    if (out.orth_stable) {
        auto dec = decompose(r, opts.seed + 1);
        bool plain_stables = dec.ok;
        for (const auto& summand : dec.summands)
            plain_stables = plain_stables && summand.multiplicity == 1 &&
                            summand.certified_stable;
        consistent = consistent && plain_stables;
    }
    out.consistent = consistent;
    return out;
}

}  // namespace qm
