// scenario.hpp - a complete, serializable description of one experiment.
#pragma once

#include "exitwise/exit_sim.hpp"
#include "exitwise/expected_exit.hpp"
#include "exitwise/geometry.hpp"
#include "exitwise/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace exitwise {

enum class ModelKind { bm, drifted_bm, constant_matrix };

std::string_view to_string(ModelKind k);

/// Built-in constant-coefficient models.
struct ModelSpec {
    ModelKind kind = ModelKind::bm;
    double sigma = 1.0;
    /// drifted_bm: drift vector (length n).
    std::vector<double> mu;
    /// constant_matrix: drift (length n) and β rows (n rows of d entries).
    std::vector<double> drift;
    std::vector<std::vector<double>> beta;
};

/// Builds the model for state dimension n (taken from the regions).
DiffusionModel build_model(const ModelSpec& spec, std::size_t n);

struct ScenarioSpec {
    std::string id;
    ModelSpec model;
    std::optional<Region> r1;
    std::optional<Region> r2;
    /// Initial law: support points and weights (one point, weight 1, when fixed).
    std::vector<Point> a;
    std::vector<double> a_weights;
    SimConfig sim;
    /// Coupled paths for the left side.
    std::size_t n = 100000;
    /// Boundary sample count for the sup terms.
    std::size_t m = 16;
    /// Unset: fd for 1D scenarios, mc otherwise.
    std::optional<SupMethod> sup_method;
    std::size_t fd_nodes = 2001;
    std::size_t sup_mc_samples = 10000;
    /// mfpt: points at which the FD field is compared with Monte Carlo.
    std::vector<double> probes;
    std::size_t probe_samples = 20000;

    InitialCondition initial_condition() const;
    SupOptions sup_options() const;
    std::size_t dim() const;
};

/// Config-table text that parses back to an identical scenario; numbers are
/// written with 17 significant digits.
std::string echo(const ScenarioSpec& s);

}  // namespace exitwise
