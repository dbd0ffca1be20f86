#include "quivermap/generalized.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qm {

namespace {

struct KindName {
    SummandKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {SummandKind::AltV, "ALT_V"},       {SummandKind::AltVdual, "ALT_Vdual"},
    {SummandKind::EndE, "END_E"},       {SummandKind::AltW, "ALT_W"},
    {SummandKind::VV, "V_V"},           {SummandKind::VdualV, "Vdual_V"},
    {SummandKind::VVdual, "V_Vdual"},   {SummandKind::WW, "W_W"},
    {SummandKind::VW, "V_W"},           {SummandKind::VdualW, "Vdual_W"},
};

bool uses_paired_i(SummandKind k) {
    switch (k) {
        case SummandKind::AltW:
        case SummandKind::WW:
            return false;
        default:
            return true;
    }
}

bool uses_selfinv_j(SummandKind k) {
    switch (k) {
        case SummandKind::AltW:
        case SummandKind::WW:
        case SummandKind::VW:
        case SummandKind::VdualW:
            return true;
        default:
            return false;
    }
}

bool uses_paired_j(SummandKind k) {
    switch (k) {
        case SummandKind::VV:
        case SummandKind::VdualV:
        case SummandKind::VVdual:
            return true;
        default:
            return false;
    }
}

bool is_sigma_fixed_kind(SummandKind k) {
    switch (k) {
        case SummandKind::AltV:
        case SummandKind::AltVdual:
        case SummandKind::AltW:
            return true;
        default:
            return false;
    }
}

}  // namespace

const char* summand_kind_name(SummandKind k) {
    for (const auto& kn : kKindNames)
        if (kn.kind == k) return kn.name;
    return "?";
}

std::optional<SummandKind> summand_kind_from_name(const std::string& name) {
    for (const auto& kn : kKindNames)
        if (name == kn.name) return kn.kind;
    return std::nullopt;
}

ValidationReport validate_generalized(const GeneralizedQuiverSpec& gq) {
    ValidationReport rep;
    if (gq.group_sign != 1 && gq.group_sign != -1) rep.add("group_sign must be +1 or -1");
    std::set<std::string> labels;
    for (const auto& [label, dim] : gq.paired_chars) {
        if (label.find('*') != std::string::npos) rep.add("character label contains '*'");
        if (!labels.insert(label).second) rep.add("duplicate character label '" + label + "'");
        if (dim < 1) rep.add("paired character '" + label + "': dimension must be >= 1");
    }
    for (const auto& [label, dim] : gq.selfinv_chars) {
        if (label.find('*') != std::string::npos) rep.add("character label contains '*'");
        if (!labels.insert(label).second) rep.add("duplicate character label '" + label + "'");
        if (dim < 1) rep.add("self-inverse character '" + label + "': dimension must be >= 1");
        if (gq.group_sign == -1 && dim % 2 != 0)
            rep.add("self-inverse character '" + label + "': odd dimension under Sp");
    }
    const int r = static_cast<int>(gq.paired_chars.size());
    const int l = static_cast<int>(gq.selfinv_chars.size());
    for (size_t k = 0; k < gq.summands.size(); ++k) {
        const Summand& z = gq.summands[k];
        const std::string at = "summand " + std::to_string(k);
        if (z.twist < 1) rep.add(at + ": twist must be >= 1");
        const bool i_paired = uses_paired_i(z.kind);
        const bool i_ok = z.i >= 0 && z.i < (i_paired ? r : l);
        if (z.kind == SummandKind::WW && !(z.i >= 0 && z.i < l)) {
            rep.add(at + ": index constraint (self-inverse index out of range)");
        } else if (z.kind != SummandKind::WW && z.kind != SummandKind::AltW && !i_ok) {
            rep.add(at + ": index constraint (paired index out of range)");
        }
        if (uses_selfinv_j(z.kind) && !(z.j >= 0 && z.j < l))
            rep.add(at + ": index constraint (self-inverse index out of range)");
        if (uses_paired_j(z.kind) && !(z.j >= 0 && z.j < r))
            rep.add(at + ": index constraint (paired index out of range)");
        if ((uses_paired_j(z.kind) || z.kind == SummandKind::WW) && z.i == z.j)
            rep.add(at + ": index constraint (i == j)");
        // Lambda^2 of a 1-dimensional space vanishes; a zero summand would
        // put the trivial representation into the decomposition.
        if (gq.group_sign == 1) {
            if ((z.kind == SummandKind::AltV || z.kind == SummandKind::AltVdual) && z.i >= 0 &&
                z.i < r && gq.paired_chars[z.i].second == 1)
                rep.add(at + ": zero-dimensional alternating summand");
            if (z.kind == SummandKind::AltW && z.j >= 0 && z.j < l &&
                gq.selfinv_chars[z.j].second == 1)
                rep.add(at + ": zero-dimensional alternating summand");
        }
    }
    return rep;
}

SymmetricQuiverBundle build_symmetric_quiver(const GeneralizedQuiverSpec& gq) {
    auto vrep = validate_generalized(gq);
    if (!vrep.ok()) throw InvalidInput("invalid generalized quiver: " + vrep.joined());

    const int r = static_cast<int>(gq.paired_chars.size());
    auto quiver = std::make_shared<Quiver>();
    std::vector<int> n;
    std::vector<int> sigma_v;
    for (int i = 0; i < r; ++i) {
        quiver->vertices.push_back(gq.paired_chars[i].first);
        quiver->vertices.push_back(gq.paired_chars[i].first + "*");
        n.push_back(gq.paired_chars[i].second);
        n.push_back(gq.paired_chars[i].second);
        sigma_v.push_back(2 * i + 1);
        sigma_v.push_back(2 * i);
    }
    for (size_t j = 0; j < gq.selfinv_chars.size(); ++j) {
        quiver->vertices.push_back(gq.selfinv_chars[j].first);
        n.push_back(gq.selfinv_chars[j].second);
        sigma_v.push_back(2 * r + static_cast<int>(j));
    }

    auto q_of = [&](int i) { return 2 * i; };
    auto qdual_of = [&](int i) { return 2 * i + 1; };
    auto p_of = [&](int j) { return 2 * r + j; };

    std::vector<int> sigma_a;
    std::vector<int> m;
    std::vector<std::pair<int, int>> summand_arrows;
    auto add_fixed = [&](int k, int tail, int head, int twist) {
        const int idx = static_cast<int>(quiver->arrows.size());
        quiver->arrows.push_back({"g" + std::to_string(k), quiver->vertices[tail],
                                  quiver->vertices[head]});
        sigma_a.push_back(idx);
        m.push_back(twist);
        summand_arrows.emplace_back(idx, idx);
    };
    auto add_pair = [&](int k, int t1, int h1, int t2, int h2, int twist) {
        const int idx = static_cast<int>(quiver->arrows.size());
        quiver->arrows.push_back({"g" + std::to_string(k), quiver->vertices[t1],
                                  quiver->vertices[h1]});
        quiver->arrows.push_back({"g" + std::to_string(k) + "*", quiver->vertices[t2],
                                  quiver->vertices[h2]});
        sigma_a.push_back(idx + 1);
        sigma_a.push_back(idx);
        m.push_back(twist);
        m.push_back(twist);
        summand_arrows.emplace_back(idx, idx + 1);
    };

    for (size_t k = 0; k < gq.summands.size(); ++k) {
        const Summand& z = gq.summands[k];
        const int kk = static_cast<int>(k);
        switch (z.kind) {
            case SummandKind::AltV:
                add_fixed(kk, qdual_of(z.i), q_of(z.i), z.twist);
                break;
            case SummandKind::AltVdual:
                add_fixed(kk, q_of(z.i), qdual_of(z.i), z.twist);
                break;
            case SummandKind::EndE:
                add_pair(kk, q_of(z.i), q_of(z.i), qdual_of(z.i), qdual_of(z.i), z.twist);
                break;
            case SummandKind::AltW:
                add_fixed(kk, p_of(z.j), p_of(z.j), z.twist);
                break;
            case SummandKind::VV:
                add_pair(kk, q_of(z.i), q_of(z.j), qdual_of(z.j), qdual_of(z.i), z.twist);
                break;
            case SummandKind::VdualV:
                add_pair(kk, qdual_of(z.i), q_of(z.j), qdual_of(z.j), q_of(z.i), z.twist);
                break;
            case SummandKind::VVdual:
                add_pair(kk, q_of(z.i), qdual_of(z.j), q_of(z.j), qdual_of(z.i), z.twist);
                break;
            case SummandKind::WW:
                add_pair(kk, p_of(z.i), p_of(z.j), p_of(z.j), p_of(z.i), z.twist);
                break;
            case SummandKind::VW:
                add_pair(kk, q_of(z.i), p_of(z.j), p_of(z.j), qdual_of(z.i), z.twist);
                break;
            case SummandKind::VdualW:
                add_pair(kk, qdual_of(z.i), p_of(z.j), p_of(z.j), q_of(z.i), z.twist);
                break;
        }
    }

    SymmetricQuiverBundle bundle;
    bundle.quiver = quiver;
    bundle.dims = DimensionVector::make(*quiver, std::move(n), std::move(m));
    bundle.structure = SymmetricStructure::plain(*quiver, std::move(sigma_v), std::move(sigma_a),
                                                 gq.group_sign);
    auto check = validate_symmetric(*quiver, bundle.dims, bundle.structure);
    if (!check.ok())
        throw StructureError("built symmetric quiver fails validation: " + check.joined());
    bundle.form = standard_form(*quiver, bundle.dims, bundle.structure);
    bundle.summand_arrows = std::move(summand_arrows);
    return bundle;
}

std::pair<int, int> coord_shape(const GeneralizedQuiverSpec& gq, int summand) {
    const Summand& z = gq.summands[summand];
    auto np = [&](int i) { return gq.paired_chars[i].second; };
    auto nw = [&](int j) { return gq.selfinv_chars[j].second; };
    switch (z.kind) {
        case SummandKind::AltV:
        case SummandKind::AltVdual:
        case SummandKind::EndE:
            return {np(z.i), np(z.i) * z.twist};
        case SummandKind::AltW:
            return {nw(z.j), nw(z.j) * z.twist};
        case SummandKind::VV:
        case SummandKind::VdualV:
        case SummandKind::VVdual:
            return {np(z.j), np(z.i) * z.twist};
        case SummandKind::WW:
            return {nw(z.j), nw(z.i) * z.twist};
        case SummandKind::VW:
        case SummandKind::VdualW:
            return {nw(z.j), np(z.i) * z.twist};
    }
    return {0, 0};
}

Representation embed_representation(const GeneralizedQuiverSpec& gq,
                                    const SymmetricQuiverBundle& bundle,
                                    const GeneralizedCoords& coords, double constraint_tol) {
    if (coords.size() != gq.summands.size())
        throw InvalidInput("expected one coordinate matrix per summand");
    Representation r = zero_representation(bundle.quiver, bundle.dims);
    for (size_t k = 0; k < gq.summands.size(); ++k) {
        auto [rows, cols] = coord_shape(gq, static_cast<int>(k));
        if (coords[k].rows() != rows || coords[k].cols() != cols)
            throw InvalidInput("summand " + std::to_string(k) + ": coordinate shape mismatch");
        const auto [g, gstar] = bundle.summand_arrows[k];
        r.phi[g] = coords[k];
        if (g == gstar) {
            const double scale = std::max(1.0, coords[k].norm());
            Mat t = c_transpose_arrow(r, g, bundle.structure, bundle.form);
            if ((r.phi[g] + t).norm() > constraint_tol * scale)
                throw StructureError("summand " + std::to_string(k) + ": kind symmetry violated");
        } else {
            r.phi[gstar] = -c_transpose_arrow(r, g, bundle.structure, bundle.form);
        }
    }
    return r;
}

GeneralizedCoords extract_representation(const GeneralizedQuiverSpec& gq,
                                         const SymmetricQuiverBundle& bundle,
                                         const Representation& r, double structured_tol) {
    double scale = 1.0;
    for (const auto& p : r.phi) scale = std::max(scale, p.norm());
    auto [ok, residual] = is_structured_rep(r, bundle.structure, bundle.form,
                                            structured_tol * scale);
    if (!ok)
        throw StructureError("representation is not structured (residual " +
                             std::to_string(residual) + ")");
    GeneralizedCoords coords;
    coords.reserve(gq.summands.size());
    for (size_t k = 0; k < gq.summands.size(); ++k)
        coords.push_back(r.phi[bundle.summand_arrows[k].first]);
    return coords;
}

double check_equivariance(const GeneralizedQuiverSpec& gq, const SymmetricQuiverBundle& bundle,
                          const GaugeElement& gauge, const GeneralizedCoords& coords,
                          double gauge_tol) {
    const Quiver& q = *bundle.quiver;
    double gscale = 1.0;
    for (const auto& gi : gauge.g) gscale = std::max(gscale, gi.squaredNorm());
    if (structured_gauge_residual(gauge, q, bundle.structure, bundle.form) > gauge_tol * gscale)
        throw StructureError("gauge element is not in the structured group");

    GeneralizedCoords acted(coords.size());
    for (size_t k = 0; k < gq.summands.size(); ++k) {
        const int g = bundle.summand_arrows[k].first;
        const int head = q.head_of(g), tail = q.tail_of(g);
        const int m = gq.summands[k].twist;
        acted[k] = gauge.g[head] * coords[k] *
                   kron(gauge.g[tail].inverse(), Mat::Identity(m, m));
    }
    Representation lhs = embed_representation(gq, bundle, acted, 1e-6);
    Representation rhs = gauge_act(gauge, embed_representation(gq, bundle, coords));
    return lhs.distance(rhs);
}

// ---------------------------------------------------------------------------
// Mixed quiver settings.
// ---------------------------------------------------------------------------

const char* group_sym_name(GroupSym g) {
    switch (g) {
        case GroupSym::GL: return "GL";
        case GroupSym::SL: return "SL";
        case GroupSym::O: return "O";
        case GroupSym::SO: return "SO";
        case GroupSym::Sp: return "Sp";
    }
    return "?";
}

const char* arrow_sym_name(ArrowSym h) {
    switch (h) {
        case ArrowSym::M: return "M";
        case ArrowSym::Splus: return "S+";
        case ArrowSym::Sminus: return "S-";
        case ArrowSym::Lplus: return "L+";
        case ArrowSym::Lminus: return "L-";
    }
    return "?";
}

std::optional<GroupSym> group_sym_from_name(const std::string& name) {
    for (GroupSym g : {GroupSym::GL, GroupSym::SL, GroupSym::O, GroupSym::SO, GroupSym::Sp})
        if (name == group_sym_name(g)) return g;
    return std::nullopt;
}

std::optional<ArrowSym> arrow_sym_from_name(const std::string& name) {
    for (ArrowSym h : {ArrowSym::M, ArrowSym::Splus, ArrowSym::Sminus, ArrowSym::Lplus,
                       ArrowSym::Lminus})
        if (name == arrow_sym_name(h)) return h;
    return std::nullopt;
}

ValidationReport validate_mixed_setting(const MixedQuiverSetting& ms) {
    const Quiver& q = *ms.quiver;
    ValidationReport rep = validate_quiver(q, ms.dims);
    const int nv = static_cast<int>(q.vertices.size());
    const int na = static_cast<int>(q.arrows.size());
    if (static_cast<int>(ms.g_sym.size()) != nv || static_cast<int>(ms.h_sym.size()) != na ||
        static_cast<int>(ms.sigma_v.size()) != nv || static_cast<int>(ms.sigma_a.size()) != na) {
        rep.add("symbol/sigma sequences have wrong length");
        return rep;
    }
    for (int i = 0; i < nv; ++i)
        if (ms.sigma_v[i] < 0 || ms.sigma_v[i] >= nv || ms.sigma_v[ms.sigma_v[i]] != i) {
            rep.add("sigma is not an involution on vertices");
            break;
        }
    for (int a = 0; a < na; ++a)
        if (ms.sigma_a[a] < 0 || ms.sigma_a[a] >= na || ms.sigma_a[ms.sigma_a[a]] != a) {
            rep.add("sigma is not an involution on arrows");
            break;
        }
    if (!rep.ok()) return rep;

    auto vname = [&](int i) { return q.vertices[i]; };
    auto aname = [&](int a) { return q.arrows[a].id; };

    for (int i = 0; i < nv; ++i) {
        if (ms.g_sym[i] == GroupSym::Sp && ms.dims.n[i] % 2 != 0)
            rep.add("constraint (1) violated at vertex '" + vname(i) + "': Sp needs even dimension");
        if (ms.dims.n[ms.sigma_v[i]] != ms.dims.n[i])
            rep.add("constraint (5) violated at vertex '" + vname(i) + "': n[sigma(i)] != n[i]");
        if ((ms.g_sym[i] == GroupSym::O || ms.g_sym[i] == GroupSym::SO ||
             ms.g_sym[i] == GroupSym::Sp) &&
            ms.sigma_v[i] != i)
            rep.add("constraint (6) violated at vertex '" + vname(i) +
                    "': O/SO/Sp vertex must be sigma-fixed");
    }
    for (int a = 0; a < na; ++a) {
        const int t = q.tail_of(a), h = q.head_of(a);
        const bool loop = t == h;
        const ArrowSym ha = ms.h_sym[a];
        if (ha != ArrowSym::M && ms.dims.n[t] != ms.dims.n[h])
            rep.add("constraint (2) violated at arrow '" + aname(a) +
                    "': non-M symbol needs equal end dimensions");
        if (loop && (ha == ArrowSym::Splus || ha == ArrowSym::Sminus) &&
            ms.g_sym[t] != GroupSym::O && ms.g_sym[t] != GroupSym::SO)
            rep.add("constraint (3) violated at arrow '" + aname(a) +
                    "': S-symbol loop needs O or SO vertex");
        if (loop && (ha == ArrowSym::Lplus || ha == ArrowSym::Lminus) &&
            ms.g_sym[t] != GroupSym::Sp)
            rep.add("constraint (4) violated at arrow '" + aname(a) +
                    "': L-symbol loop needs Sp vertex");
        if (!loop && ha != ArrowSym::M) {
            if (ms.sigma_v[t] != h)
                rep.add("constraint (7) violated at arrow '" + aname(a) +
                        "': non-loop non-M arrow needs sigma(t) = h");
            if (ha != ArrowSym::Splus && ha != ArrowSym::Sminus)
                rep.add("constraint (7) violated at arrow '" + aname(a) +
                        "': non-loop symbol must be S+ or S-");
        }
    }
    return rep;
}

namespace {

Mat standard_j_block(int n) {
    Mat j = Mat::Zero(n, n);
    j.topRightCorner(n / 2, n / 2) = Mat::Identity(n / 2, n / 2);
    j.bottomLeftCorner(n / 2, n / 2) = -Mat::Identity(n / 2, n / 2);
    return j;
}

}  // namespace

Mat sample_mixed_block(ArrowSym h, int n, std::uint64_t seed) {
    if ((h == ArrowSym::Lplus || h == ArrowSym::Lminus) && n % 2 != 0)
        throw InvalidInput("L-symbol needs even dimension");
    Rng rng(seed);
    Mat g = gaussian_matrix(rng, n, n);
    switch (h) {
        case ArrowSym::M:
            return g;
        case ArrowSym::Splus:
            return 0.5 * (g + g.transpose());
        case ArrowSym::Sminus:
            return 0.5 * (g - g.transpose());
        case ArrowSym::Lplus:
            return Mat(0.5 * (g + g.transpose()) * standard_j_block(n).transpose());
        case ArrowSym::Lminus:
            return Mat(0.5 * (g - g.transpose()) * standard_j_block(n).transpose());
    }
    return g;
}

double mixed_block_residual(ArrowSym h, const Mat& a) {
    switch (h) {
        case ArrowSym::M:
            return 0.0;
        case ArrowSym::Splus:
            return (a.transpose() - a).norm();
        case ArrowSym::Sminus:
            return (a.transpose() + a).norm();
        case ArrowSym::Lplus: {
            Mat aj = a * standard_j_block(static_cast<int>(a.rows()));
            return (aj.transpose() - aj).norm();
        }
        case ArrowSym::Lminus: {
            Mat aj = a * standard_j_block(static_cast<int>(a.rows()));
            return (aj.transpose() + aj).norm();
        }
    }
    return 0.0;
}

ValidationReport validate_character_grading(const std::vector<GradedCharacter>& chars,
                                            GradingGroup group) {
    ValidationReport rep;
    size_t len = chars.empty() ? 0 : chars.front().exponents.size();
    for (const auto& c : chars)
        if (c.exponents.size() != len) {
            rep.add("exponent vectors have inconsistent lengths");
            return rep;
        }
    if (group == GradingGroup::SL) {
        std::vector<long> sum(len, 0);
        for (const auto& c : chars)
            for (size_t k = 0; k < len; ++k) sum[k] += c.multiplicity * c.exponents[k];
        for (size_t k = 0; k < len; ++k)
            if (sum[k] != 0) {
                rep.add("weighted sum nonzero in component " + std::to_string(k));
                break;
            }
        return rep;
    }
    // O/Sp: multiset closed under inverse with matching multiplicities.
    std::map<std::vector<long>, long> mult;
    for (const auto& c : chars) mult[c.exponents] += c.multiplicity;
    for (const auto& [exps, count] : mult) {
        std::vector<long> inv(exps.size());
        for (size_t k = 0; k < exps.size(); ++k) inv[k] = -exps[k];
        auto it = mult.find(inv);
        if (it == mult.end() || it->second != count) {
            rep.add("character multiset not closed under inverse");
            break;
        }
    }
    return rep;
}

}  // namespace qm
