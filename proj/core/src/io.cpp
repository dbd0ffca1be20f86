#include "quivermap/io.hpp"

#include <fstream>
#include <sstream>

namespace qm {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw ParseError(what); }

const json& need(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) parse_fail(std::string("missing field '") + key + "'");
    return *it;
}

int need_int(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number_integer()) parse_fail(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

std::string need_string(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_string()) parse_fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

cplx scalar_from_json(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    parse_fail("complex scalar must be a number or [re, im]");
}

int resolve_vertex(const Quiver& q, const std::string& id, const char* where) {
    const int i = q.vertex_index(id);
    if (i < 0) throw InvalidInput(std::string(where) + ": unknown vertex '" + id + "'");
    return i;
}

int resolve_arrow(const Quiver& q, const std::string& id, const char* where) {
    const int a = q.arrow_index(id);
    if (a < 0) throw InvalidInput(std::string(where) + ": unknown arrow '" + id + "'");
    return a;
}

std::vector<int> involution_from_json(const json& j, const char* where,
                                      const std::vector<std::string>& ids,
                                      int (*resolver)(const Quiver&, const std::string&,
                                                      const char*),
                                      const Quiver& q) {
    if (!j.is_object()) parse_fail(std::string(where) + " must be an object");
    std::vector<int> out(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) out[i] = static_cast<int>(i);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int from = resolver(q, it.key(), where);
        if (!it.value().is_string()) parse_fail(std::string(where) + " values must be ids");
        const int to = resolver(q, it.value().get<std::string>(), where);
        out[from] = to;
    }
    return out;
}

std::vector<int> signs_from_json(const json& j, const char* where,
                                 const std::vector<std::string>& ids,
                                 int (*resolver)(const Quiver&, const std::string&, const char*),
                                 const Quiver& q) {
    std::vector<int> out(ids.size(), +1);
    if (j.is_null()) return out;
    if (!j.is_object()) parse_fail(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int idx = resolver(q, it.key(), where);
        if (!it.value().is_number_integer())
            parse_fail(std::string(where) + " values must be +1 or -1");
        out[idx] = it.value().get<int>();
    }
    return out;
}

int char_index(const std::vector<std::pair<std::string, int>>& chars, const std::string& label) {
    for (size_t i = 0; i < chars.size(); ++i)
        if (chars[i].first == label) return static_cast<int>(i);
    return -1;
}

GeneralizedQuiverSpec generalized_from_json(const json& g) {
    GeneralizedQuiverSpec gq;
    const std::string group = need_string(g, "group");
    if (group == "O")
        gq.group_sign = +1;
    else if (group == "Sp")
        gq.group_sign = -1;
    else
        parse_fail("generalized.group must be 'O' or 'Sp'");
    for (const char* key : {"paired_chars", "selfinv_chars"}) {
        auto it = g.find(key);
        if (it == g.end()) continue;
        if (!it->is_array()) parse_fail(std::string("generalized.") + key + " must be an array");
        for (const auto& entry : *it) {
            const std::string label = need_string(entry, "label");
            const int dim = need_int(entry, "dim");
            if (std::string(key) == "paired_chars")
                gq.paired_chars.emplace_back(label, dim);
            else
                gq.selfinv_chars.emplace_back(label, dim);
        }
    }
    const json& summands = need(g, "summands");
    if (!summands.is_array()) parse_fail("generalized.summands must be an array");
    for (const auto& entry : summands) {
        Summand z;
        const std::string kind = need_string(entry, "kind");
        auto parsed = summand_kind_from_name(kind);
        if (!parsed) parse_fail("unknown summand kind '" + kind + "'");
        z.kind = *parsed;
        if (entry.contains("twist")) z.twist = need_int(entry, "twist");
        auto resolve = [&](const char* key, bool paired) {
            if (!entry.contains(key)) return -1;
            const std::string label = need_string(entry, key);
            const int idx = char_index(paired ? gq.paired_chars : gq.selfinv_chars, label);
            if (idx < 0) throw InvalidInput("summand references unknown character '" + label + "'");
            return idx;
        };
        switch (z.kind) {
            case SummandKind::AltV:
            case SummandKind::AltVdual:
            case SummandKind::EndE:
                z.i = resolve("i", true);
                break;
            case SummandKind::AltW:
                z.j = resolve("j", false);
                break;
            case SummandKind::VV:
            case SummandKind::VdualV:
            case SummandKind::VVdual:
                z.i = resolve("i", true);
                z.j = resolve("j", true);
                break;
            case SummandKind::WW:
                z.i = resolve("i", false);
                z.j = resolve("j", false);
                break;
            case SummandKind::VW:
            case SummandKind::VdualW:
                z.i = resolve("i", true);
                z.j = resolve("j", false);
                break;
        }
        gq.summands.push_back(z);
    }
    return gq;
}

}  // namespace

Mat matrix_from_json(const json& j) {
    if (!j.is_array()) parse_fail("matrix must be an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = 0;
    if (rows > 0) {
        if (!j[0].is_array()) parse_fail("matrix rows must be arrays");
        cols = static_cast<Eigen::Index>(j[0].size());
    }
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
            parse_fail("matrix rows have inconsistent lengths");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scalar_from_json(j[r][c]);
    }
    return m;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json subspaces_to_json(const Quiver& q, const std::vector<Mat>& basis) {
    json out = json::object();
    for (size_t i = 0; i < q.vertices.size(); ++i) out[q.vertices[i]] = matrix_to_json(basis[i]);
    return out;
}

QuiverSpecFile parse_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        // Recover a line number from the byte offset for the error message.
        size_t line = 1;
        for (size_t k = 0; k < e.byte && k < json_text.size(); ++k)
            if (json_text[k] == '\n') ++line;
        parse_fail("JSON parse error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!doc.is_object()) parse_fail("document must be a JSON object");

    QuiverSpecFile file;
    try {
        if (doc.contains("schema")) file.schema = need_int(doc, "schema");
        if (file.schema != 1) parse_fail("unsupported schema version");

        const bool has_generalized = doc.contains("generalized");
        const bool has_symmetric = doc.contains("symmetric");
        const bool has_mixed = doc.contains("mixed");
        if (has_generalized + has_symmetric + has_mixed > 1)
            throw InvalidInput("document must contain at most one of symmetric/generalized/mixed");

        if (has_generalized) {
            file.kind = QuiverSpecFile::Kind::Generalized;
            file.generalized = generalized_from_json(doc["generalized"]);
        }

        if (doc.contains("vertices")) {
            auto quiver = std::make_shared<Quiver>();
            for (const auto& v : need(doc, "vertices")) {
                if (!v.is_string()) parse_fail("vertices must be strings");
                quiver->vertices.push_back(v.get<std::string>());
            }
            std::vector<int> twists;
            for (const auto& a : need(doc, "arrows")) {
                Quiver::Arrow arrow;
                arrow.id = need_string(a, "id");
                arrow.tail = need_string(a, "tail");
                arrow.head = need_string(a, "head");
                quiver->arrows.push_back(arrow);
                twists.push_back(a.contains("twist") ? need_int(a, "twist") : 1);
            }
            std::vector<int> n(quiver->vertices.size(), 0);
            const json& dims = need(doc, "dims");
            if (!dims.is_object()) parse_fail("dims must be an object");
            for (auto it = dims.begin(); it != dims.end(); ++it) {
                if (!it.value().is_number_integer()) parse_fail("dims values must be integers");
                n[resolve_vertex(*quiver, it.key(), "dims")] = it.value().get<int>();
            }
            file.quiver = quiver;
            file.dims = DimensionVector::make(*quiver, std::move(n), std::move(twists));
        } else if (!has_generalized) {
            parse_fail("missing field 'vertices'");
        }

        if (has_symmetric) {
            file.kind = QuiverSpecFile::Kind::Symmetric;
            const json& sym = doc["symmetric"];
            SymmetricStructure s;
            const std::string form = need_string(sym, "form");
            if (form == "orthogonal")
                s.form_sign = +1;
            else if (form == "symplectic")
                s.form_sign = -1;
            else
                parse_fail("symmetric.form must be 'orthogonal' or 'symplectic'");
            s.sigma_v = involution_from_json(need(sym, "sigma_vertices"), "sigma_vertices",
                                             file.quiver->vertices, resolve_vertex, *file.quiver);
            std::vector<std::string> arrow_ids;
            for (const auto& a : file.quiver->arrows) arrow_ids.push_back(a.id);
            s.sigma_a = involution_from_json(need(sym, "sigma_arrows"), "sigma_arrows", arrow_ids,
                                             resolve_arrow, *file.quiver);
            s.eps_v = signs_from_json(sym.contains("eps_v") ? sym["eps_v"] : json(), "eps_v",
                                      file.quiver->vertices, resolve_vertex, *file.quiver);
            s.eps_a = signs_from_json(sym.contains("eps_a") ? sym["eps_a"] : json(), "eps_a",
                                      arrow_ids, resolve_arrow, *file.quiver);
            file.symmetric = std::move(s);
        }

        if (has_mixed) {
            file.kind = QuiverSpecFile::Kind::Mixed;
            const json& mx = doc["mixed"];
            MixedQuiverSetting ms;
            ms.quiver = file.quiver;
            ms.dims = file.dims;
            ms.g_sym.assign(file.quiver->vertices.size(), GroupSym::GL);
            ms.h_sym.assign(file.quiver->arrows.size(), ArrowSym::M);
            const json& gs = need(mx, "g_sym");
            for (auto it = gs.begin(); it != gs.end(); ++it) {
                auto sym = group_sym_from_name(it.value().get<std::string>());
                if (!sym) parse_fail("unknown group symbol '" + it.value().get<std::string>() + "'");
                ms.g_sym[resolve_vertex(*file.quiver, it.key(), "g_sym")] = *sym;
            }
            const json& hs = need(mx, "h_sym");
            for (auto it = hs.begin(); it != hs.end(); ++it) {
                auto sym = arrow_sym_from_name(it.value().get<std::string>());
                if (!sym) parse_fail("unknown arrow symbol '" + it.value().get<std::string>() + "'");
                ms.h_sym[resolve_arrow(*file.quiver, it.key(), "h_sym")] = *sym;
            }
            std::vector<std::string> arrow_ids;
            for (const auto& a : file.quiver->arrows) arrow_ids.push_back(a.id);
            ms.sigma_v = involution_from_json(
                mx.contains("sigma_vertices") ? mx["sigma_vertices"] : json::object(),
                "sigma_vertices", file.quiver->vertices, resolve_vertex, *file.quiver);
            ms.sigma_a = involution_from_json(
                mx.contains("sigma_arrows") ? mx["sigma_arrows"] : json::object(), "sigma_arrows",
                arrow_ids, resolve_arrow, *file.quiver);
            file.mixed = std::move(ms);
        }

        if (doc.contains("rep")) {
            if (!file.quiver) throw InvalidInput("inline rep requires an explicit quiver");
            const json& rep = doc["rep"];
            if (!rep.is_object()) parse_fail("rep must be an object keyed by arrow id");
            std::vector<Mat> phi(file.quiver->arrows.size());
            for (size_t a = 0; a < phi.size(); ++a) {
                const int nh = file.dims.n[file.quiver->head_of(static_cast<int>(a))];
                const int nt = file.dims.n[file.quiver->tail_of(static_cast<int>(a))];
                phi[a] = Mat::Zero(nh, static_cast<Eigen::Index>(nt) * file.dims.m[a]);
            }
            for (auto it = rep.begin(); it != rep.end(); ++it) {
                const int a = resolve_arrow(*file.quiver, it.key(), "rep");
                phi[a] = matrix_from_json(it.value());
            }
            file.rep_matrices = std::move(phi);
        }

        if (doc.contains("tau")) {
            if (!file.quiver) throw InvalidInput("tau requires an explicit quiver");
            const json& tj = doc["tau"];
            if (!tj.is_object()) parse_fail("tau must be an object keyed by vertex id");
            ParameterVector tau;
            tau.tau.assign(file.quiver->vertices.size(), 0.0);
            for (auto it = tj.begin(); it != tj.end(); ++it) {
                if (!it.value().is_number()) parse_fail("tau values must be numbers");
                tau.tau[resolve_vertex(*file.quiver, it.key(), "tau")] = it.value().get<double>();
            }
            file.tau = std::move(tau);
        }

        if (doc.contains("solver")) {
            const json& sv = doc["solver"];
            if (sv.contains("tol")) file.solver.tol = sv["tol"].get<double>();
            if (sv.contains("max_iter")) file.solver.max_iter = sv["max_iter"].get<int>();
            if (sv.contains("step")) file.solver.step = sv["step"].get<double>();
        }
        if (doc.contains("seed")) file.seed = doc["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed document: ") + e.what());
    }
    return file;
}

QuiverSpecFile load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

ValidationReport validate_spec(const QuiverSpecFile& file) {
    ValidationReport rep;
    if (file.generalized) {
        auto sub = validate_generalized(*file.generalized);
        rep.violations.insert(rep.violations.end(), sub.violations.begin(), sub.violations.end());
        return rep;
    }
    if (!file.quiver) {
        rep.add("document has no quiver");
        return rep;
    }
    rep = validate_quiver(*file.quiver, file.dims);
    if (!rep.ok()) return rep;
    if (file.symmetric) {
        auto sub = validate_symmetric(*file.quiver, file.dims, *file.symmetric);
        rep.violations.insert(rep.violations.end(), sub.violations.begin(), sub.violations.end());
    }
    if (file.mixed) {
        auto sub = validate_mixed_setting(*file.mixed);
        rep.violations.insert(rep.violations.end(), sub.violations.begin(), sub.violations.end());
    }
    if (file.rep_matrices) {
        for (size_t a = 0; a < file.rep_matrices->size(); ++a) {
            const int nh = file.dims.n[file.quiver->head_of(static_cast<int>(a))];
            const int nt = file.dims.n[file.quiver->tail_of(static_cast<int>(a))];
            const auto& m = (*file.rep_matrices)[a];
            if (m.rows() != nh || m.cols() != static_cast<Eigen::Index>(nt) * file.dims.m[a])
                rep.add("rep matrix for arrow '" + file.quiver->arrows[a].id +
                        "': shape mismatch");
        }
    }
    if (file.tau && file.tau->tau.size() != file.quiver->vertices.size())
        rep.add("tau has wrong length");
    return rep;
}

Representation spec_representation(const QuiverSpecFile& file) {
    if (!file.quiver) throw InvalidInput("document has no quiver to represent");
    if (file.rep_matrices) return make_representation(file.quiver, file.dims, *file.rep_matrices);
    return random_representation(file.quiver, file.dims, file.seed);
}

QuiverSpecFile symmetric_spec_from_bundle(const SymmetricQuiverBundle& bundle,
                                          const QuiverSpecFile& source) {
    QuiverSpecFile out;
    out.kind = QuiverSpecFile::Kind::Symmetric;
    out.quiver = bundle.quiver;
    out.dims = bundle.dims;
    out.symmetric = bundle.structure;
    out.solver = source.solver;
    out.seed = source.seed;
    return out;
}

std::string serialize_spec(const QuiverSpecFile& file) {
    json doc;
    doc["schema"] = file.schema;
    if (file.quiver) {
        json vertices = json::array();
        for (const auto& v : file.quiver->vertices) vertices.push_back(v);
        doc["vertices"] = std::move(vertices);
        json arrows = json::array();
        for (size_t a = 0; a < file.quiver->arrows.size(); ++a) {
            const auto& arrow = file.quiver->arrows[a];
            json entry = {{"id", arrow.id}, {"tail", arrow.tail}, {"head", arrow.head}};
            if (file.dims.m[a] != 1) entry["twist"] = file.dims.m[a];
            arrows.push_back(std::move(entry));
        }
        doc["arrows"] = std::move(arrows);
        json dims = json::object();
        for (size_t i = 0; i < file.quiver->vertices.size(); ++i)
            dims[file.quiver->vertices[i]] = file.dims.n[i];
        doc["dims"] = std::move(dims);
    }
    if (file.symmetric) {
        const auto& s = *file.symmetric;
        json sym;
        sym["form"] = s.form_sign == 1 ? "orthogonal" : "symplectic";
        json sv = json::object(), sa = json::object(), ev = json::object(), ea = json::object();
        for (size_t i = 0; i < file.quiver->vertices.size(); ++i) {
            sv[file.quiver->vertices[i]] = file.quiver->vertices[s.sigma_v[i]];
            if (s.eps_v[i] != 1) ev[file.quiver->vertices[i]] = s.eps_v[i];
        }
        for (size_t a = 0; a < file.quiver->arrows.size(); ++a) {
            sa[file.quiver->arrows[a].id] = file.quiver->arrows[s.sigma_a[a]].id;
            if (s.eps_a[a] != 1) ea[file.quiver->arrows[a].id] = s.eps_a[a];
        }
        sym["sigma_vertices"] = std::move(sv);
        sym["sigma_arrows"] = std::move(sa);
        if (!ev.empty()) sym["eps_v"] = std::move(ev);
        if (!ea.empty()) sym["eps_a"] = std::move(ea);
        doc["symmetric"] = std::move(sym);
    }
    if (file.rep_matrices) {
        json rep = json::object();
        for (size_t a = 0; a < file.rep_matrices->size(); ++a)
            rep[file.quiver->arrows[a].id] = matrix_to_json((*file.rep_matrices)[a]);
        doc["rep"] = std::move(rep);
    }
    if (file.tau) {
        json tj = json::object();
        for (size_t i = 0; i < file.quiver->vertices.size(); ++i)
            tj[file.quiver->vertices[i]] = file.tau->tau[i];
        doc["tau"] = std::move(tj);
    }
    doc["solver"] = {{"tol", file.solver.tol},
                     {"max_iter", file.solver.max_iter},
                     {"step", file.solver.step}};
    doc["seed"] = file.seed;
    return doc.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace qm
