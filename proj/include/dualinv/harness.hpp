#pragma once

/**
 * @file harness.hpp
 * @brief Randomized verification of the dual SVD and generalized-inverse identities.
 *
 * `generate` builds structured ensembles whose standard part has an exactly
 * controlled rank; `run_suite` evaluates every property on every trial and
 * aggregates pass/fail counts, worst residuals and the seeds of failures.
 * Each trial draws from its own stream seeded by (seed, trial index), so
 * results do not depend on thread scheduling.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "dualinv/gen_inverse.hpp"

namespace dualinv {

enum class Field { real, complex };

enum class Structure {
    generic,             ///< A_d unconstrained
    force_M4_zero,       ///< A_d = A_sR + SA_s + A_sTA_s, so M4 = O
    force_M2_M3_zero,    ///< A_d = PCQ + (I−P)C'(I−Q), so M2 = M3 = O
    force_all_zero,      ///< A_d = PCQ, so M2 = M3 = M4 = O
    infinitesimal_only,  ///< A_s = O
};

const char* to_string(Field f);
const char* to_string(Structure s);
Field field_from_string(const std::string& s);
Structure structure_from_string(const std::string& s);

struct EnsembleSpec {
    Eigen::Index rows = 2;
    Eigen::Index cols = 2;
    Field field = Field::real;
    std::optional<Eigen::Index> standard_rank;  ///< nullopt: uniform in [0, min(m, n)]
    Structure structure = Structure::generic;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    /// Nonzero singular values of A_s are log-uniform on [sigma_min, sigma_max].
    double sigma_min = 1e-3;
    double sigma_max = 1e3;

    /// Throws InvalidSpec.
    void validate() const;
};

using AnyDualMatrix = std::variant<DualMatrix<double>, DualMatrix<Complex>>;

/// Random engine for one trial; independent of every other trial.
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

/// Single trial of an ensemble in a fixed field.
template <BaseField T>
DualMatrix<T> generate_trial(const EnsembleSpec& spec, std::uint64_t trial);

/// All `spec.trials` matrices, deterministic in `spec.seed`.
std::vector<AnyDualMatrix> generate(const EnsembleSpec& spec);

/// Haar-distributed unitary (orthogonal over the reals) n×n matrix.
template <BaseField T>
BaseMatrix<T> random_unitary(Eigen::Index n, std::mt19937_64& rng);

/// i.i.d. standard normal entries (complex: unit-variance circular).
template <BaseField T>
BaseMatrix<T> random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

struct FailureRecord {
    std::size_t spec_index = 0;
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    double residual = 0.0;
};

struct PropertyStats {
    std::size_t pass = 0;
    std::size_t fail = 0;
    std::size_t vacuous = 0;  ///< counted in `pass`; precondition did not hold
    double max_residual = 0.0;
    std::vector<FailureRecord> failures;  ///< first few only
};

struct HarnessReport {
    std::map<std::string, PropertyStats> properties;
    std::size_t trials = 0;
    double wall_time_seconds = 0.0;

    [[nodiscard]] bool all_passed() const;
};

/// Outcome of one property on one matrix.
struct PropertyOutcome {
    std::string name;
    bool pass = true;
    bool vacuous = false;
    double residual = 0.0;
};

/// ‖R‖_F as a dual real; a standard part at or below `threshold` counts as
/// zero so that rounding noise does not masquerade as an appreciable norm.
template <BaseField T>
DualReal residual_norm(const DualMatrix<T>& R, double threshold);

/// Random candidate X for comparison against gmpi(A) = G. Kinds cycle mod 4:
///   0  unstructured Gaussian X,
///   1  G + W·ε,
///   2  G + (I − A_s⁺A_s)W(I − A_sA_s⁺),
///   3  kind 2 plus (I − A_s⁺A_s)W'(I − A_sA_s⁺)·ε.
/// Kinds 2 and 3 leave A·X·A = A·G·A, so they reach the optimal residual.
template <BaseField T>
DualMatrix<T> residual_candidate(const DualMatrix<T>& A, const DualMatrix<T>& G, int kind, std::mt19937_64& rng,
                                 const TolerancePolicy& tol = {});

struct OptimalityResult {
    double optimum_gap = 0.0;       ///< |‖(A·G·A − A)_d‖_F − ‖Σ₂d‖_F|
    std::size_t candidates = 0;
    std::size_t optimal = 0;        ///< candidates tying with G
    std::size_t beat_residual = 0;  ///< candidates with a smaller residual than G
    std::size_t beat_norm = 0;      ///< optimal candidates with a smaller norm than G
};

/// Compares G = gmpi(A) against `candidates` random X under the dual order,
/// with ties decided at `compare_tol`.
template <BaseField T>
OptimalityResult check_optimality(const DualMatrix<T>& A, std::size_t candidates, std::mt19937_64& rng,
                                  double compare_tol, const TolerancePolicy& tol = {});

/// Evaluate every property on a single matrix; `seed` drives the sampled
/// candidates of the optimal-residual property.
template <BaseField T>
std::vector<PropertyOutcome> evaluate_properties(const DualMatrix<T>& A, const TolerancePolicy& tol,
                                                 std::optional<Structure> structure = std::nullopt,
                                                 std::uint64_t seed = 0);

/// `threads` = 0 uses the hardware concurrency.
HarnessReport run_suite(const std::vector<EnsembleSpec>& specs, const TolerancePolicy& tol,
                        unsigned threads = 0);

/// Maximum number of failure records kept per property.
inline constexpr std::size_t kMaxFailureRecords = 8;

}  // namespace dualinv
