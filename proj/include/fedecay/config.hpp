#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedecay/mesh.hpp"

namespace fedecay {

enum class ExperimentKind { Decay, RefineSweep, Schwarz, Convergence, MeshInfo };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct MeshSourceConfig {
    enum class Kind { Rectangle, Msh };
    Kind kind = Kind::Rectangle;
    // rectangle generator
    double width = 2.0;
    double height = 1.0;
    int nx = 0;
    int ny = 0;
    // msh import
    std::string path;
    std::vector<int> gamma_tags;  // physical tags mapped to Gamma, others GammaC

    bool operator==(const MeshSourceConfig&) const = default;
};

enum class GammaPreset { Left, All, None };

struct DatumConfig {
    enum class Kind { SinPiY, Constant1, Table };
    Kind kind = Kind::SinPiY;
    std::string table_path;  // CSV (arc-length, value) rows, linearly interpolated

    bool operator==(const DatumConfig&) const = default;
};

struct PatchConfig {
    std::optional<Box> box;           // D_h = cells contained in the box
    std::vector<int> cells;           // or an explicit element list
    std::optional<double> delta;      // fixed physical width for the energy ratio

    bool operator==(const PatchConfig& o) const;
};

struct SchwarzConfig {
    std::vector<int> overlaps;
    int n_iters = 25;
    std::string source = "constant-1";  // constant-1 | zero
    std::string init = "zero";          // zero | reference | random
    unsigned seed = 1234;

    bool operator==(const SchwarzConfig&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Decay;
    std::string output_dir = "out";
    double tol = 1e-12;
    int threads = 1;
    int degree = 1;
    int refinements = 1;
    std::vector<double> lambdas;
    MeshSourceConfig mesh;
    GammaPreset gamma = GammaPreset::Left;
    DatumConfig datum;
    PatchConfig patch;
    SchwarzConfig schwarz;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the flat "key = value" format with bracketed section headers.
/// Unknown sections or keys are configuration errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Kind-specific validation (required fields, value ranges). Throws ConfigError.
void validate_config(const ExperimentConfig& config);

}  // namespace fedecay
