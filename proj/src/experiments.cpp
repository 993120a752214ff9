#include "fedecay/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "fedecay/errors.hpp"
#include "fedecay/msh_io.hpp"
#include "fedecay/quadrature.hpp"
#include "fedecay/stats.hpp"

namespace fedecay {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::filesystem::path prepare_run_dir(const ExperimentConfig& config) {
    const std::filesystem::path dir = config.output_dir;
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "config.ini", serialize_config(config));
    return dir;
}

void append_mesh_log(std::ostringstream& log, const Mesh& mesh) {
    const MeshMetrics m = mesh_metrics(mesh);
    log << "mesh: vertices=" << mesh.n_vertices() << " triangles=" << mesh.n_triangles()
        << " boundary_edges=" << mesh.boundary_edges().size() << "\n";
    log << "mesh metrics: h=" << fmt(m.h) << " h_min=" << fmt(m.h_min)
        << " min_angle=" << fmt(m.min_angle) << "\n";
}

/// Orders the Gamma edges into one simple chain and returns the arc-length
/// parameter of every Gamma dof (vertex dofs and, for k = 2, edge midpoints).
/// The chain starts at the lexicographically smallest endpoint (or smallest
/// vertex for a closed loop), which fixes the parameterization.
std::map<int, double> gamma_arc_length(const FESpace& space) {
    const Mesh& mesh = space.mesh();

    std::vector<std::pair<int, int>> edges;
    std::map<int, std::vector<int>> adjacency;  // vertex -> edge indices
    for (const auto& e : mesh.boundary_edges()) {
        if (e.tag != BoundaryTag::Gamma) continue;
        const int idx = static_cast<int>(edges.size());
        edges.push_back({e.a, e.b});
        adjacency[e.a].push_back(idx);
        adjacency[e.b].push_back(idx);
    }
    if (edges.empty()) throw ConfigError("table datum: mesh has no Gamma edges");

    auto lex_less = [&mesh](int a, int b) {
        const Vec2 pa = mesh.vertex(a), pb = mesh.vertex(b);
        return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
    };

    int start = -1;
    for (const auto& [v, incident] : adjacency) {
        if (incident.size() > 2)
            throw ConfigError("table datum: Gamma edges do not form a simple chain");
        if (incident.size() == 1 && (start < 0 || lex_less(v, start))) start = v;
    }
    if (start < 0) {  // closed loop
        for (const auto& [v, incident] : adjacency)
            if (start < 0 || lex_less(v, start)) start = v;
    }

    std::map<int, double> param;
    std::vector<char> used(edges.size(), 0);
    param[start] = 0.0;
    int current = start;
    double s = 0.0;
    std::size_t chained = 0;
    while (chained < edges.size()) {
        int next_edge = -1;
        for (int e : adjacency[current])
            if (!used[e] && next_edge < 0) next_edge = e;
        if (next_edge < 0) throw ConfigError("table datum: Gamma edges are not connected");
        used[next_edge] = 1;
        ++chained;
        const auto [a, b] = edges[next_edge];
        const int next = (a == current) ? b : a;
        const double len = norm(mesh.vertex(next) - mesh.vertex(current));
        if (space.degree() == 2) {
            const int mid = space.edge_dof(current, next);
            if (mid >= 0) param[mid] = s + 0.5 * len;
        }
        s += len;
        if (!param.count(next)) param[next] = s;
        current = next;
    }
    return param;
}

/// Linear interpolation table read from CSV rows "s,value".
class DatumTable {
public:
    explicit DatumTable(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("table datum: cannot open " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#' || (line_no == 1 && !std::isdigit(line[0]) &&
                                                   line[0] != '-' && line[0] != '+'))
                continue;  // header or comment
            std::istringstream row(line);
            double s = 0, v = 0;
            char comma = 0;
            if (!(row >> s >> comma >> v) || comma != ',')
                throw ConfigError("table datum: malformed row '" + line + "' in " + path);
            points_.push_back({s, v});
        }
        if (points_.size() < 2) throw ConfigError("table datum: need at least two rows");
        std::sort(points_.begin(), points_.end());
    }

    double operator()(double s) const {
        if (s <= points_.front().first) return points_.front().second;
        if (s >= points_.back().first) return points_.back().second;
        const auto hi = std::upper_bound(points_.begin(), points_.end(), std::pair{s, 1e300});
        const auto lo = hi - 1;
        const double t = (s - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

private:
    std::vector<std::pair<double, double>> points_;
};

std::vector<double> table_lifting(const FESpace& space, const std::string& table_path) {
    const DatumTable table(table_path);
    const std::map<int, double> param = gamma_arc_length(space);

    std::vector<double> lifting(space.n_dofs(), 0.0);
    for (int d : space.gamma_dofs()) {
        const auto it = param.find(d);
        if (it == param.end())
            throw ConfigError("table datum: Gamma dof without an arc-length parameter");
        lifting[d] = table(it->second);
    }
    return lifting;
}

bool gamma_c_nonempty(const Mesh& mesh) {
    for (const auto& e : mesh.boundary_edges())
        if (e.tag == BoundaryTag::GammaC) return true;
    return false;
}

}  // namespace

Mesh build_mesh(const ExperimentConfig& config, int refinement) {
    if (config.mesh.kind == MeshSourceConfig::Kind::Rectangle) {
        const int factor = 1 << refinement;
        Mesh mesh = generate_rectangle_mesh(config.mesh.width, config.mesh.height,
                                            config.mesh.nx * factor, config.mesh.ny * factor);
        const double eps = 1e-9 * config.mesh.width;
        switch (config.gamma) {
            case GammaPreset::Left:
                return boundary_partition(mesh, [eps](Vec2 p) { return p.x < eps; });
            case GammaPreset::All:
                return boundary_partition(mesh, [](Vec2) { return true; });
            case GammaPreset::None:
                return mesh;
        }
    }
    if (refinement != 0)
        throw ConfigError("msh mesh source cannot be refined; supply finer mesh files");
    TagMap tags;
    for (int t : config.mesh.gamma_tags) tags[t] = BoundaryTag::Gamma;
    return import_msh_file(config.mesh.path, tags);
}

ScalarField make_datum(const ExperimentConfig& config) {
    switch (config.datum.kind) {
        case DatumConfig::Kind::SinPiY:
            return [](Vec2 p) { return std::sin(M_PI * p.y); };
        case DatumConfig::Kind::Constant1:
            return [](Vec2) { return 1.0; };
        case DatumConfig::Kind::Table:
            throw ConfigError("table datum has no point form; used via solve_config_problem");
    }
    throw ConfigError("unreachable datum kind");
}

CellSet select_d_h(const ExperimentConfig& config, const Mesh& mesh) {
    CellSet d_h;
    if (config.patch.box) {
        d_h = select_cells_in_box(mesh, *config.patch.box);
    } else {
        d_h = CellSet(config.patch.cells, mesh.n_triangles());
    }
    if (d_h.empty()) throw ConfigError("patch: selected D_h is empty");
    return d_h;
}

DiscreteSolution solve_config_problem(const ExperimentConfig& config, const FESpace& space,
                                      double lambda) {
    const CoefficientField field = CoefficientField::identity();
    if (config.datum.kind == DatumConfig::Kind::Table) {
        if (!(lambda > 0.0) && !gamma_c_nonempty(space.mesh()))
            throw SingularProblemError(
                "solve_config_problem: lambda = 0 requires a nonempty GammaC part");
        return solve_lifted(space, field, lambda, table_lifting(space, config.datum.table_path),
                            nullptr, config.tol);
    }
    return solve_dirichlet(space, field, lambda, make_datum(config), nullptr, config.tol);
}

double ManufacturedSolution::mu() const { return std::sqrt(M_PI * M_PI + lambda * lambda); }

double ManufacturedSolution::value(Vec2 p) const {
    const double m = mu();
    return std::sin(M_PI * p.y) * std::sinh(m * (width - p.x)) / std::sinh(m * width);
}

Vec2 ManufacturedSolution::gradient(Vec2 p) const {
    const double m = mu();
    const double denom = std::sinh(m * width);
    return {-m * std::sin(M_PI * p.y) * std::cosh(m * (width - p.x)) / denom,
            M_PI * std::cos(M_PI * p.y) * std::sinh(m * (width - p.x)) / denom};
}

ErrorNorms error_against(const FESpace& space, std::span<const double> coeffs,
                         const std::function<double(Vec2)>& value,
                         const std::function<Vec2(Vec2)>& gradient) {
    const auto& rule = quadrature(6);
    const int nd = space.dofs_per_element();
    double values[6];
    Vec2 grads[6];
    ErrorNorms norms;
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        const auto& tri = space.mesh().triangle(t);
        const Vec2 p0 = space.mesh().vertex(tri[0]);
        const Vec2 p1 = space.mesh().vertex(tri[1]);
        const Vec2 p2 = space.mesh().vertex(tri[2]);
        const double jac = 2.0 * space.element_area(t);
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
            const Vec2 x = p0 * qp.b0 + p1 * qp.b1 + p2 * qp.b2;
            double uh = 0.0;
            Vec2 guh{};
            for (int i = 0; i < nd; ++i) {
                uh += coeffs[dofs[i]] * values[i];
                guh = guh + grads[i] * coeffs[dofs[i]];
            }
            const double dv = uh - value(x);
            const Vec2 dg = guh - gradient(x);
            norms.l2 += qp.w * jac * dv * dv;
            norms.h1_semi += qp.w * jac * dot(dg, dg);
        }
    }
    norms.l2 = std::sqrt(norms.l2);
    norms.h1_semi = std::sqrt(norms.h1_semi);
    return norms;
}

namespace {

DecayCell compute_decay_cell(const ExperimentConfig& config, const FESpace& space,
                             const CellSet& d_h, double lambda) {
    DecayCell cell;
    cell.lambda = lambda;
    cell.h = space.mesh().h();
    cell.h_min = space.mesh().h_min();

    const DiscreteSolution sol = solve_config_problem(config, space, lambda);
    cell.solver_iterations = sol.iterations;

    const PatchLadder ladder = build_ladder(space.mesh(), d_h, sol.lifting_support);
    cell.ell_max = ladder.ell_max();
    cell.profile = energy_profile(sol, ladder);
    if (cell.profile.rho_hat && *cell.profile.rho_hat > 0.0)
        cell.scaled = scaled_rate(cell.profile);
    cell.flux_residuals.reserve(ladder.ell_max());
    for (int ell = 0; ell < ladder.ell_max(); ++ell)
        cell.flux_residuals.push_back(flux_identity_residual(sol, ladder, ell));
    if (config.patch.delta)
        cell.fixed_width = fixed_width_ratio(sol, ladder, *config.patch.delta);
    return cell;
}

std::string profile_csv(const DecayProfile& profile) {
    std::ostringstream out;
    out << "ell,E,E_rel,Q\n";
    for (int ell = 0; ell <= profile.ell_max(); ++ell) {
        out << ell << "," << fmt(profile.energy[ell]) << "," << fmt(profile.relative_energy[ell])
            << ",";
        if (ell < profile.ell_max() && std::isfinite(profile.quotients[ell]))
            out << fmt(profile.quotients[ell]);
        out << "\n";
    }
    return out.str();
}

std::string flux_csv(const std::vector<double>& residuals) {
    std::ostringstream out;
    out << "ell,residual\n";
    for (std::size_t ell = 0; ell < residuals.size(); ++ell)
        out << ell << "," << fmt(residuals[ell]) << "\n";
    return out.str();
}

std::string summary_row(const DecayCell& cell) {
    std::ostringstream out;
    out << fmt_short(cell.lambda) << "," << fmt(cell.h) << "," << fmt(cell.h_min) << ","
        << cell.ell_max << "," << fmt_opt(cell.profile.rho_hat) << "," << fmt_opt(cell.profile.mad)
        << "," << fmt_opt(cell.scaled) << "\n";
    return out.str();
}

constexpr const char* kSummaryHeader = "lambda,h,h_min,ell_max,rho_hat,mad,scaled_rate\n";

/// Runs one job per lambda with at most `threads` concurrent jobs.
template <typename Job>
std::vector<DecayCell> run_cells(const std::vector<double>& lambdas, int threads, Job job) {
    std::vector<DecayCell> cells(lambdas.size());
    std::size_t next = 0;
    while (next < lambdas.size()) {
        const std::size_t batch =
            std::min<std::size_t>(std::max(threads, 1), lambdas.size() - next);
        std::vector<std::future<DecayCell>> futures;
        for (std::size_t i = 1; i < batch; ++i)
            futures.push_back(std::async(std::launch::async, job, lambdas[next + i]));
        cells[next] = job(lambdas[next]);
        for (std::size_t i = 1; i < batch; ++i) cells[next + i] = futures[i - 1].get();
        next += batch;
    }
    return cells;
}

}  // namespace

DecayRun run_decay(const ExperimentConfig& config) {
    validate_config(config);
    DecayRun run;
    run.dir = prepare_run_dir(config);

    std::ostringstream log;
    log << "kind: decay\n";
    const Mesh mesh = build_mesh(config);
    append_mesh_log(log, mesh);
    const FESpace space(mesh, config.degree);
    log << "space: degree=" << config.degree << " dofs=" << space.n_dofs() << "\n";
    const CellSet d_h = select_d_h(config, mesh);
    log << "d_h: cells=" << d_h.size() << "\n";

    // Measured constants for provenance: the product-interpolation stability
    // of the space and the cutoff gradient bound are reported, not assumed.
    {
        const auto stability = measure_product_interpolation_stability(space, 20, 1u);
        log << "interpolation stability (20 trials): c0=" << fmt(stability.c0)
            << " c1=" << fmt(stability.c1) << "\n";
    }

    run.cells = run_cells(config.lambdas, config.threads, [&](double lambda) {
        return compute_decay_cell(config, space, d_h, lambda);
    });

    std::ostringstream summary;
    summary << kSummaryHeader;
    std::ostringstream fixed_width;
    fixed_width << "lambda,delta,ell_star,ratio\n";
    for (const DecayCell& cell : run.cells) {
        const std::string tag = fmt_short(cell.lambda);
        write_file_atomic(run.dir / ("profile_lambda_" + tag + ".csv"),
                          profile_csv(cell.profile));
        write_file_atomic(run.dir / ("flux_lambda_" + tag + ".csv"),
                          flux_csv(cell.flux_residuals));
        summary << summary_row(cell);
        if (cell.fixed_width) {
            const int ell_star = fixed_width_layer(*config.patch.delta, cell.h_min);
            fixed_width << tag << "," << fmt(*config.patch.delta) << "," << ell_star << ","
                        << fmt(*cell.fixed_width) << "\n";
        }
        log << "lambda=" << tag << ": ell_max=" << cell.ell_max
            << " rho_hat=" << fmt_opt(cell.profile.rho_hat)
            << " mad=" << fmt_opt(cell.profile.mad) << " cg_iterations=" << cell.solver_iterations
            << "\n";
    }
    write_file_atomic(run.dir / "summary.csv", summary.str());
    if (config.patch.delta) write_file_atomic(run.dir / "fixed_width.csv", fixed_width.str());
    write_file_atomic(run.dir / "run.log", log.str());
    return run;
}

RefineSweepRun run_refine_sweep(const ExperimentConfig& config) {
    validate_config(config);
    RefineSweepRun run;
    run.dir = prepare_run_dir(config);

    std::ostringstream log;
    log << "kind: refine-sweep\n";

    std::ostringstream summary;
    summary << kSummaryHeader;
    for (int r = 0; r < config.refinements; ++r) {
        const Mesh mesh = build_mesh(config, r);
        log << "refinement " << r << ":\n";
        append_mesh_log(log, mesh);
        const FESpace space(mesh, config.degree);
        const CellSet d_h = select_d_h(config, mesh);

        const auto cells = run_cells(config.lambdas, config.threads, [&](double lambda) {
            return compute_decay_cell(config, space, d_h, lambda);
        });
        for (const DecayCell& cell : cells) {
            const std::string tag = fmt_short(cell.lambda);
            const std::string suffix =
                config.refinements == 1 ? "" : "_r" + std::to_string(r);
            write_file_atomic(run.dir / ("profile_lambda_" + tag + suffix + ".csv"),
                              profile_csv(cell.profile));
            if (config.refinements == 1)
                write_file_atomic(run.dir / ("flux_lambda_" + tag + ".csv"),
                                  flux_csv(cell.flux_residuals));
            summary << summary_row(cell);
            run.rows.push_back({r, cell});
        }
    }
    write_file_atomic(run.dir / "summary.csv", summary.str());
    write_file_atomic(run.dir / "run.log", log.str());
    return run;
}

SchwarzRun run_schwarz(const ExperimentConfig& config) {
    validate_config(config);
    SchwarzRun run;
    run.dir = prepare_run_dir(config);

    std::ostringstream log;
    log << "kind: schwarz\n";
    const Mesh mesh = build_mesh(config);
    append_mesh_log(log, mesh);
    const FESpace space(mesh, config.degree);
    log << "space: degree=" << config.degree << " dofs=" << space.n_dofs() << "\n";

    const ScalarField f = config.schwarz.source == "zero" ? ScalarField([](Vec2) { return 0.0; })
                                                          : ScalarField([](Vec2) { return 1.0; });
    const DiscreteSolution reference = global_reference(space, f, config.tol);
    log << "reference: cg_iterations=" << reference.iterations << "\n";

    std::ostringstream summary;
    summary << "ell_ov,theta_geomean,theta_sup\n";
    for (int ell_ov : config.schwarz.overlaps) {
        const auto [sub1, sub2] = decompose_rectangle(space, ell_ov);

        std::vector<double> init1(sub1.space().n_dofs(), 0.0);
        std::vector<double> init2(sub2.space().n_dofs(), 0.0);
        if (config.schwarz.init == "reference") {
            init1 = sub1.restrict_from_parent(reference.u);
            init2 = sub2.restrict_from_parent(reference.u);
        } else if (config.schwarz.init == "random") {
            std::mt19937 rng(config.schwarz.seed + static_cast<unsigned>(ell_ov));
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (double& v : init1) v = gauss(rng);
            for (double& v : init2) v = gauss(rng);
            // Keep the iterates admissible: zero on the outer boundary.
            for (int d : sub1.outer_dofs()) init1[d] = 0.0;
            for (int d : sub2.outer_dofs()) init2[d] = 0.0;
        }

        SchwarzOptions options;
        options.n_iters = config.schwarz.n_iters;
        options.tol = config.tol;
        SchwarzCell cell;
        cell.ell_ov = ell_ov;
        cell.trace = schwarz_iterate(sub1, sub2, f, init1, init2, reference, options);
        try {
            cell.theta = estimate_theta(cell.trace);
        } catch (const std::domain_error&) {
            cell.theta = std::nullopt;
        }

        std::ostringstream trace_csv;
        trace_csv << "n,E_total,E_sub1,E_sub2\n";
        for (std::size_t n = 0; n < cell.trace.total_error.size(); ++n)
            trace_csv << n << "," << fmt(cell.trace.total_error[n]) << ","
                      << fmt(cell.trace.error_sub1[n]) << "," << fmt(cell.trace.error_sub2[n])
                      << "\n";
        write_file_atomic(run.dir / ("trace_ov_" + std::to_string(ell_ov) + ".csv"),
                          trace_csv.str());

        summary << ell_ov << ","
                << (cell.theta ? fmt(cell.theta->geomean) : std::string("nan")) << ","
                << (cell.theta ? fmt(cell.theta->sup) : std::string("nan")) << "\n";
        log << "ell_ov=" << ell_ov << ": iterations=" << cell.trace.total_error.size() - 1
            << " theta_geomean=" << (cell.theta ? fmt(cell.theta->geomean) : std::string("nan"))
            << "\n";
        run.cells.push_back(std::move(cell));
    }
    write_file_atomic(run.dir / "schwarz_summary.csv", summary.str());
    write_file_atomic(run.dir / "run.log", log.str());
    return run;
}

ConvergenceRun run_convergence(const ExperimentConfig& config) {
    validate_config(config);
    ConvergenceRun run;
    run.dir = prepare_run_dir(config);

    std::ostringstream log;
    log << "kind: convergence\n";
    const double lambda = config.lambdas.front();
    const ManufacturedSolution exact{config.mesh.width, lambda};

    std::ostringstream csv;
    csv << "h,h1_error,l2_error,rate\n";
    for (int r = 0; r < config.refinements; ++r) {
        const Mesh mesh = build_mesh(config, r);
        append_mesh_log(log, mesh);
        const FESpace space(mesh, config.degree);
        const DiscreteSolution sol = solve_config_problem(config, space, lambda);
        const ErrorNorms norms =
            error_against(space, sol.u, [&exact](Vec2 p) { return exact.value(p); },
                          [&exact](Vec2 p) { return exact.gradient(p); });

        ConvergenceRow row;
        row.h = mesh.h();
        row.h1_error = norms.h1_semi;
        row.l2_error = norms.l2;
        if (!run.rows.empty())
            row.rate = std::log2(run.rows.back().h1_error / row.h1_error) /
                       std::log2(run.rows.back().h / row.h);
        csv << fmt(row.h) << "," << fmt(row.h1_error) << "," << fmt(row.l2_error) << ","
            << (row.rate ? fmt(*row.rate) : std::string()) << "\n";
        run.rows.push_back(row);
    }
    write_file_atomic(run.dir / "convergence.csv", csv.str());
    write_file_atomic(run.dir / "run.log", log.str());
    return run;
}

MeshMetrics run_mesh_info(const ExperimentConfig& config, std::ostream& out) {
    validate_config(config);
    const std::filesystem::path dir = prepare_run_dir(config);
    const Mesh mesh = build_mesh(config);
    const MeshMetrics metrics = mesh_metrics(mesh);

    std::ostringstream log;
    log << "kind: mesh-info\n";
    append_mesh_log(log, mesh);
    write_file_atomic(dir / "run.log", log.str());
    out << log.str();
    return metrics;
}

void run_experiment(const ExperimentConfig& config, std::ostream& out) {
    switch (config.kind) {
        case ExperimentKind::Decay: {
            const DecayRun run = run_decay(config);
            out << "decay: wrote " << run.cells.size() << " profiles to " << run.dir.string()
                << "\n";
            return;
        }
        case ExperimentKind::RefineSweep: {
            const RefineSweepRun run = run_refine_sweep(config);
            out << "refine-sweep: wrote " << run.rows.size() << " summary rows to "
                << run.dir.string() << "\n";
            return;
        }
        case ExperimentKind::Schwarz: {
            const SchwarzRun run = run_schwarz(config);
            out << "schwarz: wrote " << run.cells.size() << " traces to " << run.dir.string()
                << "\n";
            return;
        }
        case ExperimentKind::Convergence: {
            const ConvergenceRun run = run_convergence(config);
            out << "convergence: wrote " << run.rows.size() << " rows to " << run.dir.string()
                << "\n";
            return;
        }
        case ExperimentKind::MeshInfo:
            run_mesh_info(config, out);
            return;
    }
}

}  // namespace fedecay
