#pragma once

#include <optional>

#include "quivermap/moment.hpp"

namespace qm {

/// Basis of the endomorphism algebra { (g_i) : g_head phi = phi (g_tail (x) I) },
/// found as the kernel of the assembled intertwining system.
struct EndAlgebra {
    std::vector<std::vector<Mat>> basis;
    int dim = 0;
};

EndAlgebra endomorphism_algebra(const Representation& r, double rank_tol = tol::rank);

/// Space of intertwiners T: from -> to with T_head phi_from = phi_to (T_tail (x) I).
std::vector<std::vector<Mat>> intertwiner_space(const Representation& from,
                                                const Representation& to,
                                                double rank_tol = tol::rank);

/// Generic element of the intertwiner space when it contains an invertible
/// one (decided per vertex by a relative singular-value threshold).
std::optional<std::vector<Mat>> invertible_intertwiner(const Representation& from,
                                                       const Representation& to,
                                                       std::uint64_t seed = 1,
                                                       double sv_tol = 1e-8);

/// Only global scalars commute with the representation.
bool is_simple(const Representation& r);

enum class SummandTag { PlainStable, OrthStableF, DualPairE, SelfdualPairS };

const char* summand_tag_name(SummandTag t);

struct DecompSummand {
    Representation rep;
    int multiplicity = 1;
    SummandTag tag = SummandTag::PlainStable;
    /// Orthonormal embeddings of each copy into the original total space,
    /// one vertex-tuple per copy.
    std::vector<std::vector<Mat>> copy_embeddings;
    /// End algebra of the summand has dimension one.
    bool certified_stable = false;
};

struct DecompositionReport {
    std::vector<DecompSummand> summands;
    GaugeElement change_of_basis;
    bool ok = true;
    std::string diagnostic;
};

/// Splits along spectral projectors of generic self-adjoint elements of the
/// endomorphism algebra and groups isomorphic summands into multiplicities.
/// Meaningful on polystable input; a non-semisimple endomorphism algebra is
/// reported through ok = false and the diagnostic.
DecompositionReport decompose(const Representation& r, std::uint64_t seed = 7);

/// Residual of the report against its input:
/// || gauge_act(change_of_basis, r) - blockdiag(summands with multiplicity) ||.
double recomposition_residual(const Representation& r, const DecompositionReport& report);

/// Plain decomposition followed by the pairing classification: a summand
/// whose isotypic block carries a nondegenerate restriction of C is
/// ORTH_STABLE_F or SELFDUAL_PAIR_S depending on the symmetry of the
/// invariant self-pairing; isotropic summands pair up as DUAL_PAIR_E.
DecompositionReport classify_orthogonal_decomposition(const Representation& r,
                                                      const SymmetricStructure& s,
                                                      const BlockForm& c,
                                                      const ParameterVector& tau,
                                                      std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Destabilizer search.
// ---------------------------------------------------------------------------

struct DestabilizerOptions {
    bool strict_mode = false;   // also accept proper nonzero witnesses with theta = 0
    int exhaust_budget = 512;   // cap on the candidate sublattice
    int random_seeds = 8;       // extra random seed vectors
    std::uint64_t seed = 0;
    double theta_tol = 1e-9;
};

struct DestabilizerWitness {
    std::vector<Mat> basis;
    double theta = 0.0;
};

/// Sound witness search over the sublattice generated by seed vectors under
/// subrepresentation closure, sums and intersections. Exhaustive whenever
/// every n_i <= 1 (finitely many subspace tuples). Returns the witness of
/// smallest theta, or nothing.
std::optional<DestabilizerWitness> find_destabilizer(const Representation& r,
                                                     const ParameterVector& tau,
                                                     const DestabilizerOptions& opts = {});

/// Isotropic variant for structured representations: witnesses must be
/// C-isotropic; candidates additionally include U cap U^perp for every
/// lattice element. In strict mode, theta = 0 witnesses whose induced
/// one-parameter subgroup is central in the structured group (every
/// component 0 or full) are excluded; they define no proper parabolic.
std::optional<DestabilizerWitness> find_isotropic_destabilizer(const Representation& r,
                                                               const ParameterVector& tau,
                                                               const SymmetricStructure& s,
                                                               const BlockForm& c,
                                                               const DestabilizerOptions& opts = {});

struct OrthPlainRelation {
    bool plain_ss = false;
    bool orth_ss = false;
    bool plain_stable = false;
    bool orth_stable = false;
    bool consistent = false;
};

/// Runs the four searches and checks the expected implications between the
/// plain and orthogonal notions of (semi)stability.
OrthPlainRelation orth_plain_relation_check(const Representation& r, const SymmetricStructure& s,
                                            const BlockForm& c, const ParameterVector& tau,
                                            const DestabilizerOptions& opts = {});

}  // namespace qm
