#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "fedecay/config.hpp"
#include "fedecay/decay.hpp"
#include "fedecay/schwarz.hpp"

namespace fedecay {

/// Mesh for the given refinement level: the rectangle generator doubles nx/ny
/// per level (with the configured Gamma preset applied); the msh source is
/// imported with the configured tag map and supports level 0 only.
Mesh build_mesh(const ExperimentConfig& config, int refinement = 0);

/// Boundary datum as a point callback (sin-pi-y and constant-1 presets).
/// Table datums have no point form; see solve_config_problem.
ScalarField make_datum(const ExperimentConfig& config);

CellSet select_d_h(const ExperimentConfig& config, const Mesh& mesh);

/// Solves the configured Dirichlet problem for one lambda. Table datums are
/// interpolated along the arc length of the Gamma chain.
DiscreteSolution solve_config_problem(const ExperimentConfig& config, const FESpace& space,
                                      double lambda);

/// Exact solution of -div(grad u) + lambda^2 u = 0 on [0,width]x[0,1] with
/// u = sin(pi y) on the left edge and u = 0 on the rest of the boundary.
struct ManufacturedSolution {
    double width = 2.0;
    double lambda = 0.0;

    double mu() const;
    double value(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
};

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

/// L2 and H1-seminorm distance between an FE function and a smooth reference.
ErrorNorms error_against(const FESpace& space, std::span<const double> coeffs,
                         const std::function<double(Vec2)>& value,
                         const std::function<Vec2(Vec2)>& gradient);

struct DecayCell {
    double lambda = 0.0;
    double h = 0.0;
    double h_min = 0.0;
    int ell_max = 0;
    DecayProfile profile;
    std::optional<double> scaled;
    std::vector<double> flux_residuals;     // per layer 0..ell_max-1
    std::optional<double> fixed_width;      // E(0)/E(l*) when patch.delta is set
    int solver_iterations = 0;
};

struct DecayRun {
    std::vector<DecayCell> cells;
    std::filesystem::path dir;
};

DecayRun run_decay(const ExperimentConfig& config);

struct SweepRow {
    int refinement = 0;
    DecayCell cell;
};

struct RefineSweepRun {
    std::vector<SweepRow> rows;
    std::filesystem::path dir;
};

RefineSweepRun run_refine_sweep(const ExperimentConfig& config);

struct SchwarzCell {
    int ell_ov = 0;
    SchwarzTrace trace;
    std::optional<ThetaEstimate> theta;
};

struct SchwarzRun {
    std::vector<SchwarzCell> cells;
    std::filesystem::path dir;
};

SchwarzRun run_schwarz(const ExperimentConfig& config);

struct ConvergenceRow {
    double h = 0.0;
    double h1_error = 0.0;
    double l2_error = 0.0;
    std::optional<double> rate;  // H1 rate against the previous level
};

struct ConvergenceRun {
    std::vector<ConvergenceRow> rows;
    std::filesystem::path dir;
};

ConvergenceRun run_convergence(const ExperimentConfig& config);

MeshMetrics run_mesh_info(const ExperimentConfig& config, std::ostream& out);

/// Validates and dispatches on the configured kind.
void run_experiment(const ExperimentConfig& config, std::ostream& out);

}  // namespace fedecay
