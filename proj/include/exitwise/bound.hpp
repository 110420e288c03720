// bound.hpp - end-to-end evaluation of the L₁ exit-time bound
//
//     E|τ(Γ₁) − τ(Γ₂)| ≤ max( sup_{D₁∩Γ₂} v₁ , sup_{D₂∩Γ₁} v₂ ),
//
// the paired checks of the identities used to prove it, and scenario suites.
#pragma once

#include "exitwise/exit_sim.hpp"
#include "exitwise/expected_exit.hpp"
#include "exitwise/scenario.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace exitwise {

/// Verdict threshold in standard errors of the left side.
inline constexpr double kVerdictSigmas = 4.0;
/// Below this many paths a report carries the low_n flag.
inline constexpr std::size_t kLowSampleCount = 1000;

enum class Verdict { holds, holds_within_noise, violated, error };

std::string_view to_string(Verdict v);

/// holds iff mean + 4·se ≤ rhs; violated iff mean − 4·se > rhs.
Verdict classify(const MCEstimate& lhs, double rhs);

struct TheoremReport {
    std::string scenario_id;
    MCEstimate lhs;
    /// First-pass estimate when the dt/2 recheck replaced it.
    std::optional<MCEstimate> lhs_coarse;
    double rhs = 0.0;
    SupResult sup1;  ///< sup of v₁ over D₁∩Γ₂
    SupResult sup2;  ///< sup of v₂ over D₂∩Γ₁
    SupMethod method = SupMethod::fd;
    std::size_t m = 0;
    double margin = 0.0;
    Verdict verdict = Verdict::error;
    std::size_t n = 0;
    /// Time step of the estimate in `lhs`.
    double dt = 0.0;
    std::uint64_t seed = 0;
    /// censor_warning, experimental_geometry, nested, empty_sup_set, low_n,
    /// dt_halved, error.
    std::vector<std::string> flags;
    std::string inputs_echo;
    std::string error;
};

/// Left side by coupled simulation, right side by sup_expected_exit on both
/// (inner, outer) orderings, then the 4σ verdict. Any verdict other than
/// holds triggers one rerun of the left side at dt/2, whose verdict is final.
TheoremReport evaluate_theorem1(const DiffusionModel& model, const InitialCondition& a_dist, const Region& r1,
                                const Region& r2, const SimConfig& cfg, std::size_t n, std::size_t m,
                                const SupOptions& sup = {});

struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Standard error of the per-path difference lhs − rhs.
    double std_error = 0.0;
    double z = 0.0;
};

struct IdentityReport {
    std::string scenario_id;
    /// overshoot1: E{e₁ v₁(y(τ₂))} vs E{e₁(τ₁−τ₂)}; overshoot2: the index swap;
    /// gap_split: E|τ₁−τ₂| vs the sum of the one-sided terms.
    std::array<IdentityCheck, 3> checks;
    std::size_t n = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    /// Largest path-wise |(|τ₁−τ₂|) − e₁(τ₁−τ₂) − e₂(τ₂−τ₁)|; 0 when gap_split holds exactly.
    double max_path_residual = 0.0;
    /// Exit points that landed outside the other region, where v was clamped to 0.
    std::size_t clamped = 0;
    double max_clamp_distance = 0.0;
    double censor_rate = 0.0;
    std::vector<std::string> flags;
    std::string error;

    double max_abs_z() const;
};

/// Paired estimation of both sides of each identity on the same n paths.
/// 1D scenarios with a fixed starting point only; v₁, v₂ are FD fields on
/// fd_nodes nodes, extended by 0 outside their regions.
IdentityReport verify_proof_identities(const DiffusionModel& model, std::span<const double> a, const Region& r1,
                                       const Region& r2, const SimConfig& cfg, std::size_t n,
                                       std::size_t fd_nodes = 2001);

/// Evaluates every scenario in order. Errors are captured in the row of the
/// scenario that raised them. Throws ConfigError for an empty suite.
std::vector<TheoremReport> run_scenario_suite(const std::vector<ScenarioSpec>& suite);

TheoremReport evaluate_scenario(const ScenarioSpec& s);
IdentityReport verify_scenario_identities(const ScenarioSpec& s);

}  // namespace exitwise
