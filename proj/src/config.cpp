#include "fedecay/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fedecay/errors.hpp"

namespace fedecay {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Decay: return "decay";
        case ExperimentKind::RefineSweep: return "refine-sweep";
        case ExperimentKind::Schwarz: return "schwarz";
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::MeshInfo: return "mesh-info";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "decay") return ExperimentKind::Decay;
    if (name == "refine-sweep") return ExperimentKind::RefineSweep;
    if (name == "schwarz") return ExperimentKind::Schwarz;
    if (name == "convergence") return ExperimentKind::Convergence;
    if (name == "mesh-info") return ExperimentKind::MeshInfo;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

bool PatchConfig::operator==(const PatchConfig& o) const {
    const auto box_eq = [](const std::optional<Box>& a, const std::optional<Box>& b) {
        if (a.has_value() != b.has_value()) return false;
        if (!a) return true;
        return a->lo.x == b->lo.x && a->lo.y == b->lo.y && a->hi.x == b->hi.x &&
               a->hi.y == b->hi.y;
    };
    return box_eq(box, o.box) && cells == o.cells && delta == o.delta;
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    std::string section;
    std::string line;

    const auto set_value = [&config](const std::string& section, const std::string& key,
                                     const std::string& value) {
        const std::string full = section + "." + key;
        if (section == "experiment") {
            if (key == "kind") config.kind = experiment_kind_from_string(value);
            else if (key == "output_dir") config.output_dir = value;
            else if (key == "tol") config.tol = parse_double(full, value);
            else if (key == "threads") config.threads = static_cast<int>(parse_int(full, value));
            else if (key == "degree") config.degree = static_cast<int>(parse_int(full, value));
            else if (key == "refinements")
                config.refinements = static_cast<int>(parse_int(full, value));
            else if (key == "lambdas") {
                config.lambdas.clear();
                for (const auto& item : split_list(value))
                    config.lambdas.push_back(parse_double(full, item));
            } else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "mesh") {
            if (key == "source") {
                if (value == "rectangle") config.mesh.kind = MeshSourceConfig::Kind::Rectangle;
                else if (value == "msh") config.mesh.kind = MeshSourceConfig::Kind::Msh;
                else throw ConfigError("config key 'mesh.source': unknown source '" + value + "'");
            } else if (key == "width") config.mesh.width = parse_double(full, value);
            else if (key == "height") config.mesh.height = parse_double(full, value);
            else if (key == "nx") config.mesh.nx = static_cast<int>(parse_int(full, value));
            else if (key == "ny") config.mesh.ny = static_cast<int>(parse_int(full, value));
            else if (key == "path") config.mesh.path = value;
            else if (key == "gamma_tags") {
                config.mesh.gamma_tags.clear();
                for (const auto& item : split_list(value))
                    config.mesh.gamma_tags.push_back(static_cast<int>(parse_int(full, item)));
            } else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "boundary") {
            if (key == "gamma") {
                if (value == "left") config.gamma = GammaPreset::Left;
                else if (value == "all") config.gamma = GammaPreset::All;
                else if (value == "none") config.gamma = GammaPreset::None;
                else throw ConfigError("config key 'boundary.gamma': unknown preset '" + value + "'");
            } else if (key == "datum") {
                if (value == "sin-pi-y") config.datum = {DatumConfig::Kind::SinPiY, ""};
                else if (value == "constant-1") config.datum = {DatumConfig::Kind::Constant1, ""};
                else if (value.rfind("table:", 0) == 0)
                    config.datum = {DatumConfig::Kind::Table, value.substr(6)};
                else throw ConfigError("config key 'boundary.datum': unknown datum '" + value + "'");
            } else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "patch") {
            if (key == "d_h_box") {
                const auto items = split_list(value);
                if (items.size() != 4)
                    throw ConfigError("config key 'patch.d_h_box': need x0,y0,x1,y1");
                Box box;
                box.lo = {parse_double(full, items[0]), parse_double(full, items[1])};
                box.hi = {parse_double(full, items[2]), parse_double(full, items[3])};
                config.patch.box = box;
            } else if (key == "d_h_cells") {
                config.patch.cells.clear();
                for (const auto& item : split_list(value))
                    config.patch.cells.push_back(static_cast<int>(parse_int(full, item)));
            } else if (key == "delta")
                config.patch.delta = parse_double(full, value);
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "schwarz") {
            if (key == "overlaps") {
                config.schwarz.overlaps.clear();
                for (const auto& item : split_list(value))
                    config.schwarz.overlaps.push_back(static_cast<int>(parse_int(full, item)));
            } else if (key == "n_iters")
                config.schwarz.n_iters = static_cast<int>(parse_int(full, value));
            else if (key == "source") config.schwarz.source = value;
            else if (key == "init") config.schwarz.init = value;
            else if (key == "seed")
                config.schwarz.seed = static_cast<unsigned>(parse_int(full, value));
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else {
            throw ConfigError("unknown config section '[" + section + "]'");
        }
    };

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed config line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("config key '" + key + "' outside any section");
        set_value(section, key, value);
    }
    return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "kind = " << to_string(c.kind) << "\n";
    out << "output_dir = " << c.output_dir << "\n";
    out << "tol = " << format_double(c.tol) << "\n";
    out << "threads = " << c.threads << "\n";
    out << "degree = " << c.degree << "\n";
    out << "refinements = " << c.refinements << "\n";
    if (!c.lambdas.empty()) {
        out << "lambdas = ";
        for (std::size_t i = 0; i < c.lambdas.size(); ++i)
            out << (i ? "," : "") << format_double(c.lambdas[i]);
        out << "\n";
    }

    out << "\n[mesh]\n";
    if (c.mesh.kind == MeshSourceConfig::Kind::Rectangle) {
        out << "source = rectangle\n";
        out << "width = " << format_double(c.mesh.width) << "\n";
        out << "height = " << format_double(c.mesh.height) << "\n";
        out << "nx = " << c.mesh.nx << "\n";
        out << "ny = " << c.mesh.ny << "\n";
    } else {
        out << "source = msh\n";
        out << "path = " << c.mesh.path << "\n";
        if (!c.mesh.gamma_tags.empty()) {
            out << "gamma_tags = ";
            for (std::size_t i = 0; i < c.mesh.gamma_tags.size(); ++i)
                out << (i ? "," : "") << c.mesh.gamma_tags[i];
            out << "\n";
        }
    }

    out << "\n[boundary]\n";
    out << "gamma = "
        << (c.gamma == GammaPreset::Left ? "left" : c.gamma == GammaPreset::All ? "all" : "none")
        << "\n";
    out << "datum = ";
    switch (c.datum.kind) {
        case DatumConfig::Kind::SinPiY: out << "sin-pi-y"; break;
        case DatumConfig::Kind::Constant1: out << "constant-1"; break;
        case DatumConfig::Kind::Table: out << "table:" << c.datum.table_path; break;
    }
    out << "\n";

    if (c.patch.box || !c.patch.cells.empty() || c.patch.delta) {
        out << "\n[patch]\n";
        if (c.patch.box) {
            out << "d_h_box = " << format_double(c.patch.box->lo.x) << ","
                << format_double(c.patch.box->lo.y) << "," << format_double(c.patch.box->hi.x)
                << "," << format_double(c.patch.box->hi.y) << "\n";
        }
        if (!c.patch.cells.empty()) {
            out << "d_h_cells = ";
            for (std::size_t i = 0; i < c.patch.cells.size(); ++i)
                out << (i ? "," : "") << c.patch.cells[i];
            out << "\n";
        }
        if (c.patch.delta) out << "delta = " << format_double(*c.patch.delta) << "\n";
    }

    if (!c.schwarz.overlaps.empty() || c.kind == ExperimentKind::Schwarz) {
        out << "\n[schwarz]\n";
        if (!c.schwarz.overlaps.empty()) {
            out << "overlaps = ";
            for (std::size_t i = 0; i < c.schwarz.overlaps.size(); ++i)
                out << (i ? "," : "") << c.schwarz.overlaps[i];
            out << "\n";
        }
        out << "n_iters = " << c.schwarz.n_iters << "\n";
        out << "source = " << c.schwarz.source << "\n";
        out << "init = " << c.schwarz.init << "\n";
        out << "seed = " << c.schwarz.seed << "\n";
    }
    return out.str();
}

void validate_config(const ExperimentConfig& c) {
    if (!(c.tol > 0.0)) throw ConfigError("experiment.tol must be positive");
    if (c.threads < 1) throw ConfigError("experiment.threads must be >= 1");
    if (c.degree != 1 && c.degree != 2) throw ConfigError("experiment.degree must be 1 or 2");
    if (c.refinements < 1) throw ConfigError("experiment.refinements must be >= 1");
    for (double l : c.lambdas)
        if (l < 0.0) throw ConfigError("experiment.lambdas must be nonnegative");

    if (c.mesh.kind == MeshSourceConfig::Kind::Rectangle) {
        if (c.mesh.nx < 1 || c.mesh.ny < 1)
            throw ConfigError("mesh.nx and mesh.ny must be >= 1 for the rectangle source");
        if (!(c.mesh.width > 0.0) || !(c.mesh.height > 0.0))
            throw ConfigError("mesh.width and mesh.height must be positive");
    } else {
        if (c.mesh.path.empty()) throw ConfigError("mesh.path is required for the msh source");
    }

    const bool needs_dh =
        c.kind == ExperimentKind::Decay || c.kind == ExperimentKind::RefineSweep;
    if (needs_dh) {
        if (c.lambdas.empty()) throw ConfigError("experiment.lambdas must not be empty");
        if (!c.patch.box && c.patch.cells.empty())
            throw ConfigError("patch.d_h_box or patch.d_h_cells is required");
        if (c.patch.box && !c.patch.cells.empty())
            throw ConfigError("patch.d_h_box and patch.d_h_cells are mutually exclusive");
    }
    if (c.kind == ExperimentKind::RefineSweep &&
        c.mesh.kind != MeshSourceConfig::Kind::Rectangle)
        throw ConfigError("refine-sweep requires the refinable rectangle mesh source");
    if (c.kind == ExperimentKind::Convergence) {
        if (c.mesh.kind != MeshSourceConfig::Kind::Rectangle)
            throw ConfigError("convergence requires the rectangle mesh source");
        if (c.gamma != GammaPreset::Left || c.datum.kind != DatumConfig::Kind::SinPiY)
            throw ConfigError("convergence requires gamma = left and datum = sin-pi-y");
        if (c.lambdas.size() != 1)
            throw ConfigError("convergence requires exactly one lambda");
    }
    if (c.kind == ExperimentKind::Schwarz) {
        if (c.mesh.kind != MeshSourceConfig::Kind::Rectangle)
            throw ConfigError("schwarz requires the rectangle mesh source");
        if (c.schwarz.overlaps.empty()) throw ConfigError("schwarz.overlaps must not be empty");
        if (c.schwarz.n_iters < 1) throw ConfigError("schwarz.n_iters must be >= 1");
        if (c.schwarz.source != "constant-1" && c.schwarz.source != "zero")
            throw ConfigError("schwarz.source must be constant-1 or zero");
        if (c.schwarz.init != "zero" && c.schwarz.init != "reference" &&
            c.schwarz.init != "random")
            throw ConfigError("schwarz.init must be zero, reference or random");
    }
}

}  // namespace fedecay
