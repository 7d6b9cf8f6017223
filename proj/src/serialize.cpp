#include "pdo/serialize.hpp"

#include <fstream>

#include "pdo/error.hpp"

namespace pdo {

namespace {

using json = nlohmann::ordered_json;

json block_to_json(std::span<const Complex> block, int k) {
    json rows = json::array();
    for (int r = 0; r < k; ++r) {
        json row = json::array();
        for (int c = 0; c < k; ++c) {
            const Complex v = block[static_cast<std::size_t>(c * k + r)];
            row.push_back(json::array({v.real(), v.imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void block_from_json(const json& rows, std::span<Complex> block, int k) {
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(k))
        throw InvalidInput("sample is not a k x k array");
    for (int r = 0; r < k; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(k))
            throw InvalidInput("sample row does not have k entries");
        for (int c = 0; c < k; ++c) {
            const json& z = row[static_cast<std::size_t>(c)];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
                throw InvalidInput("complex entries must be [re, im] pairs");
            block[static_cast<std::size_t>(c * k + r)] = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
}

int read_k(const json& j) {
    if (!j.contains("k") || !j["k"].is_number_integer()) throw InvalidInput("missing integer field 'k'");
    return j["k"].get<int>();
}

DecayClass read_decay(const json& j) {
    if (!j.contains("decay")) return DecayClass::bounded;
    if (!j["decay"].is_string()) throw InvalidInput("field 'decay' must be a string");
    return decay_class_from_string(j["decay"].get<std::string>());
}

const json& require_array(const json& j, const char* key, std::size_t size) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != size)
        throw InvalidInput(std::string("field '") + key + "' must be an array of " + std::to_string(size) + " entries");
    return j[key];
}

}  // namespace

json to_json(const GridSpec& g) {
    json j;
    j["n"] = g.n();
    j["L"] = g.half_width();
    j["N"] = g.points_per_axis();
    return j;
}

GridSpec grid_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("grid must be an object");
    for (const char* key : {"n", "L", "N"})
        if (!j.contains(key) || !j[key].is_number()) throw InvalidInput(std::string("grid field '") + key + "' is missing");
    if (!j["n"].is_number_integer() || !j["N"].is_number_integer()) throw InvalidInput("grid n and N must be integers");
    return GridSpec(j["n"].get<int>(), j["L"].get<double>(), j["N"].get<int>());
}

json to_json(const ModuleFunction& f) {
    json j;
    j["grid"] = to_json(f.grid());
    j["k"] = f.k();
    j["decay"] = to_string(f.decay_class());
    json values = json::array();
    for (std::size_t i = 0; i < f.size(); ++i) values.push_back(block_to_json(f.block(i), f.k()));
    j["values"] = std::move(values);
    return j;
}

ModuleFunction module_function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("grid")) throw InvalidInput("field document needs a 'grid'");
    const GridSpec g = grid_from_json(j["grid"]);
    const int k = read_k(j);
    ModuleFunction f(g, k, read_decay(j));
    const json& values = require_array(j, "values", g.size());
    for (std::size_t i = 0; i < g.size(); ++i) block_from_json(values[i], f.block(i), k);
    return f;
}

json to_json(const SampledSymbol& a) {
    json j;
    j["space"] = "phase";
    j["grid"] = to_json(a.grid_x());
    j["grid_xi"] = to_json(a.grid_xi());
    j["k"] = a.k();
    j["decay"] = to_string(a.decay_class());
    json values = json::array();
    for (std::size_t ix = 0; ix < a.grid_x().size(); ++ix) {
        json row = json::array();
        for (std::size_t ixi = 0; ixi < a.grid_xi().size(); ++ixi) row.push_back(block_to_json(a.block(ix, ixi), a.k()));
        values.push_back(std::move(row));
    }
    j["values"] = std::move(values);
    return j;
}

SampledSymbol sampled_symbol_from_json(const json& j) {
    if (!j.is_object() || j.value("space", std::string()) != "phase")
        throw InvalidInput("symbol document needs \"space\": \"phase\"");
    if (!j.contains("grid")) throw InvalidInput("symbol document needs a 'grid'");
    const GridSpec gx = grid_from_json(j["grid"]);
    const GridSpec gxi = j.contains("grid_xi") ? grid_from_json(j["grid_xi"]) : gx.dual();
    const int k = read_k(j);
    SampledSymbol a(gx, gxi, k, read_decay(j));
    const json& values = require_array(j, "values", gx.size());
    for (std::size_t ix = 0; ix < gx.size(); ++ix) {
        if (!values[ix].is_array() || values[ix].size() != gxi.size())
            throw InvalidInput("symbol rows must have one entry per frequency sample");
        for (std::size_t ixi = 0; ixi < gxi.size(); ++ixi) block_from_json(values[ix][ixi], a.block(ix, ixi), k);
    }
    return a;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace pdo
