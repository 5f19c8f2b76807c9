#pragma once

// Sectioned key=value run description.
//
//   [mesh]     n
//   [scheme]   eps tau t_end newton_tol newton_max splitting eps_list unregularized
//   [graphs]   bulk boundary bulk_pi_slope boundary_pi_slope rho c0
//   [init]     preset value mean amplitude seed file
//   [forcing]  preset amplitude surface_amplitude file
//   [output]   stride snapshots dir
//
// '#' and ';' start comments. Unknown sections and keys are errors.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chbs/forcing.hpp"
#include "chbs/scheme.hpp"

namespace chbs {

enum class InitPreset { Constant, Random, Table };
enum class ForcingPreset { Zero, Constant, Cosine, Table };

struct RunSpec {
    int mesh_n = 17;
    SchemeConfig scheme{};
    std::vector<double> eps_list{0.5, 0.25, 0.125, 0.0625};

    InitPreset init = InitPreset::Constant;
    double init_value = 0.0;
    double init_mean = 0.0;
    double init_amplitude = 0.1;
    std::optional<std::uint64_t> seed;
    std::filesystem::path init_file;

    ForcingPreset forcing = ForcingPreset::Zero;
    double forcing_amplitude = 0.0;
    double forcing_surface_amplitude = 0.0;
    std::filesystem::path forcing_file;

    int monitor_stride = 1;
    int snapshot_stride = 0;  // 0: no snapshots
    std::filesystem::path out_dir = "out";
};

/// Relative file paths resolve against base_dir. Throws ConfigError with the line number or key.
RunSpec parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunSpec load_config(const std::filesystem::path& path);

struct Problem {
    std::shared_ptr<const DiscreteDomain> domain;
    std::shared_ptr<const PairSpace> space;
    FieldPair u0;
    Forcing forcing;
};

/// Mesh, spaces, initial data and forcing described by a spec.
Problem build_problem(const RunSpec& spec);

/// Same as build_problem but reuses an existing space; RunSpec::mesh_n must match it.
Problem build_problem(const RunSpec& spec, std::shared_ptr<const PairSpace> space);

}  // namespace chbs
