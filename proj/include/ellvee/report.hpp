#pragma once

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ellvee {

enum class Status { pass, fail, skipped };

inline std::string status_name(Status s) {
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
    }
    return "?";
}

/// Scientific notation, 17 significant digits.
inline std::string format_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline nlohmann::json complex_json(std::complex<double> c) {
    return nlohmann::json::array({format_sci(c.real()), format_sci(c.imag())});
}

struct Report {
    std::string check;
    std::string target;
    Status status = Status::skipped;
    double max_residual = 0.0;
    std::uint64_t seed = 0;
    std::map<std::string, double> tolerances;
    std::optional<double> elapsed_ms;
    nlohmann::json details = nlohmann::json::object();

    [[nodiscard]] bool ok() const { return status != Status::fail; }

    /// Fold a residual into the report against a tolerance.
    void absorb(double residual, double tol) {
        if (!(residual <= max_residual))
            max_residual = residual;
        if (!(residual < tol) && !(tol == 0.0 && residual == 0.0))
            status = Status::fail;
        else if (status == Status::skipped)
            status = Status::pass;
    }
};

inline nlohmann::json to_json(const Report& r) {
    nlohmann::json j;
    j["check"] = r.check;
    j["target"] = r.target;
    j["status"] = status_name(r.status);
    j["max_residual"] = format_sci(r.max_residual);
    j["seed"] = r.seed;
    nlohmann::json tol = nlohmann::json::object();
    for (const auto& [k, v] : r.tolerances)
        tol[k] = format_sci(v);
    j["tolerances"] = tol;
    j["elapsed_ms"] = r.elapsed_ms ? nlohmann::json(*r.elapsed_ms) : nlohmann::json(nullptr);
    if (!r.details.empty())
        j["details"] = r.details;
    return j;
}

}  // namespace ellvee
