#include "glme/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "glme/errors.hpp"
#include "glme/matrix_io.hpp"
#include "glme/sparse_matrix.hpp"
#include "glme/structured_factor.hpp"

namespace glme {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) throw IoError(path + ": manifest is missing required key '" +
                                    std::string(key) + "'");
    if (!v->is_string()) throw IoError(path + ": manifest key '" + std::string(key) +
                                       "' must be a string");
    return v->get<std::string>();
}

std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

}  // namespace

std::string variant_name(Variant variant) {
    switch (variant) {
        case Variant::Basic31: return "basic31";
        case Variant::Simplified41: return "simplified41";
    }
    throw ValueError("unknown solver variant value");
}

Variant variant_from_name(const std::string& name) {
    if (name == "basic31") return Variant::Basic31;
    if (name == "simplified41") return Variant::Simplified41;
    throw ValueError("unknown solver variant '" + name +
                     "' (expected 'basic31' or 'simplified41')");
}

RunManifest load_manifest(const std::string& path) {
    const json doc = parse_file(path);
    if (!doc.is_object()) throw IoError(path + ": manifest root must be a JSON object");

    RunManifest m;
    if (const json* v = find(doc, "command")) {
        if (!v->is_string()) throw IoError(path + ": manifest key 'command' must be a string");
        m.command = v->get<std::string>();
    }
    m.family = family_from_name(require_string(doc, "family", path));

    const json* matrices = find(doc, "matrices");
    if (matrices == nullptr || !matrices->is_object()) {
        throw IoError(path + ": manifest needs a 'matrices' object mapping slots to files");
    }
    for (const auto& [slot, value] : matrices->items()) {
        if (!value.is_string()) {
            throw IoError(path + ": matrix slot '" + slot + "' must be a file path string");
        }
        m.matrix_paths[slot] = value.get<std::string>();
    }

    if (const json* cfg = find(doc, "cfg")) {
        if (!cfg->is_object()) throw IoError(path + ": manifest key 'cfg' must be an object");
        if (const json* v = find(*cfg, "delta")) {
            if (!v->is_number()) throw IoError(path + ": cfg.delta must be a number");
            m.cfg.delta = v->get<double>();
        }
        if (const json* v = find(*cfg, "eps")) {
            if (!v->is_number()) throw IoError(path + ": cfg.eps must be a number");
            m.cfg.eps = v->get<double>();
        }
        if (const json* v = find(*cfg, "max_iter")) {
            if (!v->is_number_unsigned()) {
                throw IoError(path + ": cfg.max_iter must be a non-negative integer");
            }
            m.cfg.max_iter = v->get<std::size_t>();
        }
        if (const json* v = find(*cfg, "variant")) {
            if (!v->is_string()) throw IoError(path + ": cfg.variant must be a string");
            m.cfg.variant = variant_from_name(v->get<std::string>());
        }
    }

    if (const json* v = find(doc, "seed")) {
        if (!v->is_number_unsigned()) {
            throw IoError(path + ": manifest key 'seed' must be a non-negative integer");
        }
        m.seed = v->get<std::uint64_t>();
    }
    if (const json* v = find(doc, "report")) {
        if (!v->is_string()) throw IoError(path + ": manifest key 'report' must be a string");
        m.report_path = v->get<std::string>();
    }
    if (const json* v = find(doc, "trace")) {
        if (!v->is_string()) throw IoError(path + ": manifest key 'trace' must be a string");
        m.trace_path = v->get<std::string>();
    }
    return m;
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
    json doc = json::object();
    if (!manifest.command.empty()) doc["command"] = manifest.command;
    doc["family"] = family_name(manifest.family);
    json matrices = json::object();
    for (const auto& [slot, file] : manifest.matrix_paths) matrices[slot] = file;
    doc["matrices"] = std::move(matrices);
    doc["cfg"] = {{"delta", manifest.cfg.delta},
                  {"eps", manifest.cfg.eps},
                  {"max_iter", manifest.cfg.max_iter},
                  {"variant", variant_name(manifest.cfg.variant)}};
    doc["seed"] = manifest.seed;
    if (!manifest.report_path.empty()) doc["report"] = manifest.report_path;
    if (!manifest.trace_path.empty()) doc["trace"] = manifest.trace_path;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

DenseMatrix load_matrix_file(const std::string& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".csv") return read_csv(path);
    if (ext == ".mtx") return read_matrix_market(path).to_dense();
    throw IoError("unsupported matrix file extension '" + ext + "' (want .csv or .mtx): " +
                  path);
}

std::vector<std::string> family_slots(Family family) {
    switch (family) {
        case Family::AXB:
        case Family::Stein:
        case Family::TStein: return {"a", "b"};
        case Family::ClassicalSylvester:
        case Family::TClassical:
        case Family::StructuredSylvester: return {"a", "d"};
        case Family::GeneralizedSylvester:
        case Family::TGeneralized: return {"a", "b", "c", "d"};
        case Family::LyapunovDiscrete:
        case Family::LyapunovContinuous: return {"a"};
        case Family::Custom: break;
    }
    throw ValueError("family '" + family_name(family) + "' cannot be built from a manifest");
}

namespace {

DenseMatrix load_slot(const RunManifest& manifest, const std::string& slot,
                      const std::string& base_dir) {
    const auto it = manifest.matrix_paths.find(slot);
    if (it == manifest.matrix_paths.end()) {
        throw IoError("manifest is missing matrix slot '" + slot + "' required by family '" +
                      family_name(manifest.family) + "'");
    }
    std::filesystem::path p(it->second);
    if (!base_dir.empty() && p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return load_matrix_file(p.string());
}

}  // namespace

ManifestProblem build_problem(const RunManifest& manifest, const std::string& base_dir) {
    const std::vector<std::string> slots = family_slots(manifest.family);
    std::vector<StructuredFactor> factors;
    factors.reserve(slots.size());
    for (const std::string& slot : slots) {
        factors.push_back(StructuredFactor::dense(load_slot(manifest, slot, base_dir)));
    }
    DenseMatrix e = load_slot(manifest, "e", base_dir);

    switch (manifest.family) {
        case Family::AXB:
            return {EquationSpec::axb(std::move(factors[0]), std::move(factors[1])),
                    std::move(e)};
        case Family::ClassicalSylvester:
            return {EquationSpec::classical_sylvester(std::move(factors[0]),
                                                      std::move(factors[1])),
                    std::move(e)};
        case Family::GeneralizedSylvester:
            return {EquationSpec::generalized_sylvester(std::move(factors[0]),
                                                        std::move(factors[1]),
                                                        std::move(factors[2]),
                                                        std::move(factors[3])),
                    std::move(e)};
        case Family::Stein:
            return {EquationSpec::stein(std::move(factors[0]), std::move(factors[1])),
                    std::move(e)};
        case Family::TClassical:
            return {EquationSpec::t_classical(std::move(factors[0]), std::move(factors[1])),
                    std::move(e)};
        case Family::TGeneralized:
            return {EquationSpec::t_generalized(std::move(factors[0]), std::move(factors[1]),
                                                std::move(factors[2]), std::move(factors[3])),
                    std::move(e)};
        case Family::TStein:
            return {EquationSpec::t_stein(std::move(factors[0]), std::move(factors[1])),
                    std::move(e)};
        case Family::LyapunovDiscrete:
            return {EquationSpec::lyapunov_discrete(std::move(factors[0])), std::move(e)};
        case Family::LyapunovContinuous:
            return {EquationSpec::lyapunov_continuous(std::move(factors[0])), std::move(e)};
        case Family::StructuredSylvester:
            return {EquationSpec::structured_sylvester(std::move(factors[0]),
                                                       std::move(factors[1])),
                    std::move(e)};
        case Family::Custom: break;
    }
    throw ValueError("family '" + family_name(manifest.family) +
                     "' cannot be built from a manifest");
}

}  // namespace glme
