#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qm {

/// Thrown when inputs are structurally incompatible (shapes, unknown ids,
/// gauge elements that are not invertible, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a parameter vector violates the trace constraint
/// sum_i tau_i * n_i = 0 required for the gauge equation to be solvable.
class TraceObstruction : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Thrown when data fails a symmetric/structured-side precondition
/// (representation not structured, gauge not in the structured group, ...).
class StructureError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Accumulates named violations of structural invariants. An empty report
/// means the validated object is well formed.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    void add(std::string v) { violations.push_back(std::move(v)); }

    std::string joined() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v;
        }
        return out;
    }
};

namespace tol {
// Default tolerances. All entry points that test against a tolerance accept
// an explicit override; these are the documented defaults.
inline constexpr double orthonormal = 1e-10;
inline constexpr double invariance = 1e-10;
inline constexpr double structured = 1e-12;
inline constexpr double subspace_eq = 1e-8;
inline constexpr double solver = 1e-8;
inline constexpr double rank = 1e-10;
}  // namespace tol

}  // namespace qm
