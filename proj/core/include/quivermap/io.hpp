#pragma once

#include <json.hpp>

#include <optional>

#include "quivermap/decompose.hpp"
#include "quivermap/generalized.hpp"

namespace qm {

/// Malformed document (JSON syntax or wrong value types); distinct from
/// semantic errors so the CLI can map them to different exit codes.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// In-memory form of a quiver spec file. Exactly one flavour is active:
/// plain, symmetric/supermixed, generalized, or mixed setting.
struct QuiverSpecFile {
    enum class Kind { Plain, Symmetric, Generalized, Mixed };

    int schema = 1;
    Kind kind = Kind::Plain;
    QuiverPtr quiver;  // null for purely generalized documents
    DimensionVector dims;
    std::optional<std::vector<Mat>> rep_matrices;
    std::optional<ParameterVector> tau;
    std::optional<SymmetricStructure> symmetric;
    std::optional<GeneralizedQuiverSpec> generalized;
    std::optional<MixedQuiverSetting> mixed;
    SolveOptions solver;
    std::uint64_t seed = 0;
};

QuiverSpecFile parse_spec(const std::string& json_text);
QuiverSpecFile load_spec(const std::string& path);
std::string serialize_spec(const QuiverSpecFile& file);

/// Structural validation of the whole document (quiver, dims, active block,
/// inline representation shapes, tau length).
ValidationReport validate_spec(const QuiverSpecFile& file);

/// The representation a command operates on: inline matrices when present,
/// otherwise seeded random entries.
Representation spec_representation(const QuiverSpecFile& file);

/// Spec file describing the symmetric quiver built from a generalized block.
QuiverSpecFile symmetric_spec_from_bundle(const SymmetricQuiverBundle& bundle,
                                          const QuiverSpecFile& source);

// JSON pieces shared with the CLI report writer.
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json subspaces_to_json(const Quiver& q, const std::vector<Mat>& basis);

/// FNV-1a 64-bit content digest, 16 hex characters.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace qm
