#include "spinlab/spectrum_report.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace spinlab {

int SpectrumReport::total_count() const {
    int c = 0;
    for (const auto& e : entries) c += e.multiplicity;
    return c;
}

std::vector<double> SpectrumReport::expanded() const {
    std::vector<double> v;
    for (const auto& e : entries) v.insert(v.end(), e.multiplicity, e.value);
    return v;
}

std::vector<SpectrumEntry> cluster_sorted(const std::vector<double>& sorted, double tol) {
    std::vector<SpectrumEntry> out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        double sum = sorted[i];
        while (j < sorted.size() && sorted[j] - sorted[j - 1] <= tol) sum += sorted[j++];
        out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
        i = j;
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        fail(ErrorCode::Parse, "not a number: '" + s + "'");
    return v;
}

nlohmann::json to_json(const SpectrumReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"value", format_double(e.value)}, {"multiplicity", e.multiplicity}});
    return {{"entries", entries},
            {"cutoff", format_double(r.cutoff)},
            {"cluster_tol", format_double(r.cluster_tol)},
            {"provenance", r.provenance == Provenance::Analytic ? "analytic" : "discretized"},
            {"n", r.n},
            {"delta_bits", r.delta_bits},
            {"lattice_hash", r.lattice_hash}};
}

SpectrumReport spectrum_from_json(const nlohmann::json& j) {
    try {
        SpectrumReport r;
        for (const auto& e : j.at("entries"))
            r.entries.push_back({parse_double(e.at("value").get<std::string>()), e.at("multiplicity").get<int>()});
        r.cutoff = parse_double(j.at("cutoff").get<std::string>());
        r.cluster_tol = parse_double(j.at("cluster_tol").get<std::string>());
        r.provenance = j.at("provenance").get<std::string>() == "analytic" ? Provenance::Analytic
                                                                            : Provenance::Discretized;
        r.n = j.at("n").get<int>();
        r.delta_bits = j.at("delta_bits").get<IntVec>();
        r.lattice_hash = j.at("lattice_hash").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("malformed spectrum report: ") + e.what());
    }
}

}  // namespace spinlab
