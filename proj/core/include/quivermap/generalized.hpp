#pragma once

#include <optional>
#include <string>

#include "quivermap/symmetric.hpp"

namespace qm {

/// Irreducible summand kinds of the adjoint representation of O(V)/Sp(V)
/// under the centralizer of the character torus. The index pair (i, j)
/// references paired characters (i) and/or self-inverse characters (j),
/// depending on the kind.
enum class SummandKind {
    AltV,       // inside Hom(V_i*, V_i), sigma-fixed arrow
    AltVdual,   // inside Hom(V_i, V_i*), sigma-fixed arrow
    EndE,       // End(V_i), arrow pair
    AltW,       // inside End(W_j), sigma-fixed arrow
    VV,         // Hom(V_i, V_j), i != j
    VdualV,     // Hom(V_i*, V_j), i != j
    VVdual,     // Hom(V_i, V_j*), i != j
    WW,         // Hom(W_j, W_j'), j != j'
    VW,         // Hom(V_i, W_j)
    VdualW      // Hom(V_i*, W_j)
};

const char* summand_kind_name(SummandKind k);
std::optional<SummandKind> summand_kind_from_name(const std::string& name);

struct Summand {
    SummandKind kind;
    int i = -1;  // paired-character index (AltV, AltVdual, EndE, VV, VdualV, VVdual, VW, VdualW)
    int j = -1;  // second index: paired (VV, VdualV, VVdual) or self-inverse (AltW, WW, VW, VdualW)
    int twist = 1;
};

/// Character and multiplicity data of a generalized O/Sp-quiver: r paired
/// character slots (chi, chi^{-1}) and l self-inverse slots, plus the list of
/// irreducible summands making up the representation space.
struct GeneralizedQuiverSpec {
    int group_sign = +1;  // +1 for O(V), -1 for Sp(V)
    std::vector<std::pair<std::string, int>> paired_chars;   // (label, n_i >= 1)
    std::vector<std::pair<std::string, int>> selfinv_chars;  // (label, w_j >= 1)
    std::vector<Summand> summands;
};

ValidationReport validate_generalized(const GeneralizedQuiverSpec& gq);

/// The symmetric quiver built from a generalized quiver: vertices q_i, q_i*
/// per paired character and p_j per self-inverse character, arrows drawn per
/// kind, sigma exchanging starred/unstarred, the standard block form, and the
/// map from summand index to its (g, g*) arrow indices.
struct SymmetricQuiverBundle {
    QuiverPtr quiver;
    DimensionVector dims;
    SymmetricStructure structure;
    BlockForm form;
    std::vector<std::pair<int, int>> summand_arrows;  // equal entries for sigma-fixed kinds

    int paired_vertex(int i) const { return 2 * i; }        // q_i
    int paired_dual_vertex(int i) const { return 2 * i + 1; }  // q_i*
    int selfinv_vertex(int num_paired, int j) const { return 2 * num_paired + j; }  // p_j
};

SymmetricQuiverBundle build_symmetric_quiver(const GeneralizedQuiverSpec& gq);

/// Coordinate matrices, one per summand. Shapes follow the Hom space of the
/// kind (head-dim x tail-dim * twist); sigma-fixed kinds additionally carry
/// the C-alternating slice constraint checked by embed_representation.
using GeneralizedCoords = std::vector<Mat>;

/// Expected coordinate shape (rows, cols) for one summand.
std::pair<int, int> coord_shape(const GeneralizedQuiverSpec& gq, int summand);

/// Assigns phi_g = A and phi_{g*} = -A^t per summand; throws StructureError
/// when a sigma-fixed coordinate violates its alternating constraint. The
/// output satisfies is_structured_rep to 1e-12 by construction.
Representation embed_representation(const GeneralizedQuiverSpec& gq,
                                    const SymmetricQuiverBundle& bundle,
                                    const GeneralizedCoords& coords,
                                    double constraint_tol = 1e-10);

/// Inverse of embed_representation on structured representations.
GeneralizedCoords extract_representation(const GeneralizedQuiverSpec& gq,
                                         const SymmetricQuiverBundle& bundle,
                                         const Representation& r,
                                         double structured_tol = 1e-8);

/// Deviation between acting on coordinates (the R-action per Hom signature)
/// and acting on the embedded representation by the gauge group.
double check_equivariance(const GeneralizedQuiverSpec& gq, const SymmetricQuiverBundle& bundle,
                          const GaugeElement& gauge, const GeneralizedCoords& coords,
                          double gauge_tol = 1e-8);

// ---------------------------------------------------------------------------
// Mixed quiver settings (Lopatin-Zubkov data).
// ---------------------------------------------------------------------------

enum class GroupSym { GL, SL, O, SO, Sp };
enum class ArrowSym { M, Splus, Sminus, Lplus, Lminus };

const char* group_sym_name(GroupSym g);
const char* arrow_sym_name(ArrowSym h);
std::optional<GroupSym> group_sym_from_name(const std::string& name);
std::optional<ArrowSym> arrow_sym_from_name(const std::string& name);

struct MixedQuiverSetting {
    QuiverPtr quiver;
    DimensionVector dims;
    std::vector<GroupSym> g_sym;   // per vertex
    std::vector<ArrowSym> h_sym;   // per arrow
    std::vector<int> sigma_v;
    std::vector<int> sigma_a;
};

/// Checks the seven defining constraints, each reported by number.
ValidationReport validate_mixed_setting(const MixedQuiverSetting& ms);

/// Deterministic sample from M(n), S+-(n) or L+-(n); membership residual
/// (||A^T -+ A|| or ||(AJ)^T -+ AJ||) below 1e-12 by construction.
Mat sample_mixed_block(ArrowSym h, int n, std::uint64_t seed);

/// Membership residual of a matrix in the given block space.
double mixed_block_residual(ArrowSym h, const Mat& a);

// ---------------------------------------------------------------------------
// Character grading validators.
// ---------------------------------------------------------------------------

struct GradedCharacter {
    std::vector<long> exponents;  // additive exponent vector
    long multiplicity = 1;
};

enum class GradingGroup { O, Sp, SL };

/// O/Sp: the character multiset must be closed under inverse with matching
/// multiplicities. SL: the multiplicity-weighted exponent sum must vanish.
ValidationReport validate_character_grading(const std::vector<GradedCharacter>& chars,
                                            GradingGroup group);

}  // namespace qm
