#include "ising1d/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ising1d/errors.hpp"
#include "json.hpp"

namespace ising1d {

namespace {

using nlohmann::json;

std::vector<double> real_array(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
    const json& a = j.at(key);
    if (!a.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(a.size());
    for (const json& v : a) {
        if (!v.is_number()) throw ParseError(std::string("\"") + key + "\" must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

json optional_real(const std::optional<BoundEntry>& e, bool slack) {
    if (!e) return nullptr;
    return slack ? e->slack : e->value;
}

std::string optional_cell(const std::optional<BoundEntry>& e, bool slack) {
    if (!e) return {};
    return format_real(slack ? e->slack : e->value);
}

json report_object(const BoundReport& r) {
    json j;
    j["i"] = r.i;
    j["j"] = r.j;
    j["exact"] = r.exact_cov;
    j["thm1"] = optional_real(r.thm1, false);
    j["thm2"] = optional_real(r.thm2, false);
    j["lemma3"] = optional_real(r.lemma3, false);
    j["zero_field"] = optional_real(r.zero_field, false);
    j["slack_thm1"] = optional_real(r.thm1, true);
    j["slack_thm2"] = optional_real(r.thm2, true);
    j["slack_lemma3"] = optional_real(r.lemma3, true);
    j["slack_zero_field"] = optional_real(r.zero_field, true);
    if (r.exact_cov_enum) j["exact_enum"] = *r.exact_cov_enum;
    return j;
}

}  // namespace

ChainParams chain_params_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance must be a JSON object");
    auto couplings = real_array(j, "J");
    auto fields = real_array(j, "h");
    try {
        return ChainParams(std::move(couplings), std::move(fields));
    } catch (const UsageError& e) {
        throw ParseError(std::string("invalid instance: ") + e.what());
    }
}

ChainParams load_chain_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return chain_params_from_json(buf.str());
}

std::string to_json(const ChainParams& params) {
    json j;
    j["J"] = std::vector<double>(params.couplings().begin(), params.couplings().end());
    j["h"] = std::vector<double>(params.fields().begin(), params.fields().end());
    return j.dump();
}

std::string to_json(const BoundReport& report) { return report_object(report).dump(); }

std::string bound_report_csv_header() {
    return "i,j,exact,thm1,thm2,lemma3,zero_field,slack_thm1,slack_thm2,slack_lemma3,slack_zero_field";
}

std::string to_csv_row(const BoundReport& r) {
    std::string row = std::to_string(r.i) + ',' + std::to_string(r.j) + ',' + format_real(r.exact_cov);
    for (const auto* e : {&r.thm1, &r.thm2, &r.lemma3, &r.zero_field}) row += ',' + optional_cell(*e, false);
    for (const auto* e : {&r.thm1, &r.thm2, &r.lemma3, &r.zero_field}) row += ',' + optional_cell(*e, true);
    return row;
}

std::string to_json(const McEstimate& estimate) {
    json j;
    j["mean"] = estimate.mean;
    j["std_error"] = estimate.std_error;
    j["samples"] = estimate.samples;
    return j.dump();
}

McEstimate mc_estimate_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        return McEstimate{j.at("mean").get<double>(), j.at("std_error").get<double>(),
                          j.at("samples").get<std::uint64_t>()};
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid estimate: ") + e.what());
    }
}

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace ising1d
