#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "tsvar/inverse.hpp"
#include "tsvar/timescale.hpp"
#include "tsvar/variational.hpp"

namespace tsvar {

/// Knobs shared by the CLI commands; every default here is also
/// spelled out in schema/problem_config.schema.json.
struct ProblemOptions {
    bool literal_general = false;
    double tolerance_el = 1e-9;
    double tolerance_legendre = 1e-10;
    int perturbations = 0;
    double radius = 0.1;
    std::uint64_t seed = 0;
};

/// A problem description as read from a config file. Either a full
/// ingredient bundle (synthesis) or a raw Lagrangian expression
/// (verification only) is present.
struct ProblemConfig {
    GridSpec timescale;
    std::optional<IngredientBundle> ingredients;
    std::optional<Expr> lagrangian;
    std::string lagrangian_src;
    ExtremalSpec extremal;
    ProblemOptions options;
};

ProblemConfig config_from_json(const nlohmann::json& j);
ProblemConfig load_config(const std::filesystem::path& path);

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// Serialized synthesized Lagrangian: inputs echoed plus the computed
/// arrays, enough to re-evaluate without re-running the synthesis.
nlohmann::json bundle_to_json(const LagrangianForm& form, const GridSpec& spec,
                              const ProblemOptions& opts);

struct LoadedBundle {
    LagrangianForm form;
    GridSpec spec;
    ProblemOptions options;
};
LoadedBundle bundle_from_json(const nlohmann::json& j);
bool is_bundle_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& report, const ProblemOptions& opts);

/// CSV with columns index,t,sigma,mu,offset_q,r_profile (r_profile is
/// empty at t = b, where the profile is not defined).
void write_bundle_csv(std::ostream& os, const LagrangianForm& form);

/// CSV with columns index,t,sigma,mu and, when ingredients are given,
/// the r/s coefficients and the exponential e_r(t, a).
void write_grid_table_csv(std::ostream& os, const GridPtr& grid,
                          const IngredientBundle* ing);

/// Reads a (t, y) trajectory covering every grid point. Throws
/// config_error on malformed rows, off-grid or missing points.
GridFunction read_trajectory_csv(std::istream& is, const GridPtr& grid);

/// Round-trip decimal formatting (17 significant digits).
std::string format_full(double value);

} // namespace tsvar
