#include "ellvee/hurwitz.hpp"
#include "ellvee/identities.hpp"
#include "ellvee/vee_systems.hpp"
#include "ellvee/wdvv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

using namespace ellvee;

namespace {

const std::vector<std::string> all_checks{"vee", "wdvv", "limits", "identities", "hurwitz", "jacobian"};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string system;
    std::string checks;
    bool all = false;
    std::vector<std::string> params;
    std::optional<double> tol, fd_tol;
    std::optional<int> max_terms;
    std::optional<std::size_t> samples;
    std::uint64_t seed = 20240601;
    bool json = false;
    bool timing = false;
    bool uncorrected = false;
    std::string output;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::map<std::string, Rational> parse_params(const std::vector<std::string>& kv) {
    std::map<std::string, Rational> out;
    for (const auto& p : kv) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects key=value, got " + p);
        try {
            Rational r(p.substr(eq + 1));
            r.canonicalize();
            out[p.substr(0, eq)] = r;
        } catch (const std::invalid_argument&) {
            throw UsageError("--param value must be an integer or p/q: " + p);
        }
    }
    return out;
}

VSystem resolve(const Options& o) {
    if (o.system.size() > 5 && o.system.substr(o.system.size() - 5) == ".json") {
        std::ifstream in(o.system);
        if (!in)
            throw UsageError("cannot read " + o.system);
        try {
            return vsystem_from_json(nlohmann::json::parse(in));
        } catch (const std::exception& e) {
            throw UsageError(o.system + ": " + e.what());
        }
    }
    try {
        return catalog(o.system, parse_params(o.params));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::optional<std::pair<SuperFamily, int>> superpotential_for(const VSystem& V) {
    const std::string base = V.name.substr(0, V.name.find('('));
    auto N = V.params.find("N");
    if (base == "AN" && N != V.params.end())
        return std::pair{SuperFamily::A, static_cast<int>(N->second.get_num().get_si())};
    if (base == "BN" && N != V.params.end())
        return std::pair{SuperFamily::B, static_cast<int>(N->second.get_num().get_si())};
    auto nu = V.params.find("nu");
    if (base == "A1_4" && nu != V.params.end() && nu->second == Rational(1, 2))
        return std::pair{SuperFamily::A, 1};
    return std::nullopt;
}

std::optional<std::pair<Family, int>> weyl_group_for(const VSystem& V) {
    const std::string base = V.name.substr(0, V.name.find('('));
    auto N = V.params.find("N");
    if (base == "A1_2" || base == "A1_4")
        return std::pair{Family::A, 1};
    if (base == "A2")
        return std::pair{Family::A, 2};
    if (base == "B2")
        return std::pair{Family::B, 2};
    if (base == "F4")
        return std::pair{Family::F4, 4};
    if (base == "E6" || base == "E7" || base == "E8")
        return std::pair{base == "E6" ? Family::E6 : base == "E7" ? Family::E7 : Family::E8, base[1] - '0'};
    if (base == "AN" && N != V.params.end())
        return std::pair{Family::A, static_cast<int>(N->second.get_num().get_si())};
    if (base == "BN" && N != V.params.end() && N->second >= 2)
        return std::pair{Family::B, static_cast<int>(N->second.get_num().get_si())};
    return std::nullopt;
}

Report skipped(const std::string& check, const std::string& target, const std::string& why) {
    Report r;
    r.check = check;
    r.target = target;
    r.status = Status::skipped;
    r.details["reason"] = why;
    return r;
}

Report failed(const std::string& check, const std::string& target, const std::string& why) {
    Report r;
    r.check = check;
    r.target = target;
    r.status = Status::fail;
    r.details["error"] = why;
    return r;
}

using Job = std::function<Report()>;

std::vector<Job> plan(const VSystem& V, const std::vector<std::string>& checks, const Options& o) {
    SeriesParams sp;
    if (o.max_terms)
        sp.max_terms = *o.max_terms;
    WdvvConfig w;
    w.eval.series = sp;
    w.seed = o.seed;
    if (o.tol)
        w.tol = *o.tol;
    if (o.samples)
        w.samples = *o.samples;
    IdentityRunConfig id;
    id.eval.series = sp;
    id.seed = o.seed;
    if (o.samples)
        id.samples = *o.samples;
    HurwitzRunConfig hz;
    hz.eval.series = sp;
    hz.seed = o.seed;
    if (o.fd_tol)
        hz.tol = *o.fd_tol;
    if (o.samples)
        hz.samples = *o.samples;
    JacobianRunConfig jc;
    jc.series = sp;
    jc.seed = o.seed;
    if (o.tol)
        jc.tol = *o.tol;
    if (o.samples)
        jc.samples = *o.samples;

    const std::string name = V.name;
    auto prepotential = [V, o]() { return make_prepotential(V, !o.uncorrected); };
    std::vector<Job> jobs;
    for (const auto& c : checks) {
        if (c == "vee") {
            jobs.push_back([V] { return is_elliptic(V); });
        } else if (c == "wdvv") {
            jobs.push_back([=] { return check_associators(prepotential(), w); });
            if (o.uncorrected)
                jobs.push_back([=] { return check_e4_defect(prepotential(), w); });
            jobs.push_back([=] { return check_modularity(prepotential(), w); });
            jobs.push_back([=] { return check_periodicity(prepotential(), w); });
        } else if (c == "limits") {
            jobs.push_back([=] { return check_limits(prepotential(), w); });
        } else if (c == "identities") {
            IdentityRunConfig sf = id;
            sf.tol = o.tol ? *o.tol : 1e-11;
            if (o.tol)
                id.tol = *o.tol;
            jobs.push_back([sf] { return check_special_functions(sf); });
            jobs.push_back([id] { return check_identities(id); });
        } else if (c == "hurwitz") {
            auto s = superpotential_for(V);
            if (!s)
                jobs.push_back([name] { return skipped("hurwitz", name, "no superpotential for this system"); });
            else
                jobs.push_back([s, hz] { return check_hurwitz(s->first, s->second, hz); });
        } else if (c == "jacobian") {
            auto g = weyl_group_for(V);
            if (!g)
                jobs.push_back([name] { return skipped("jacobian", name, "no Weyl group attached"); });
            else
                jobs.push_back([g, jc, name] {
                    try {
                        return check_jacobian(g->first, g->second, jc);
                    } catch (const std::invalid_argument& e) {
                        return skipped("jacobian", name, e.what());
                    }
                });
        } else {
            throw UsageError("unknown check: " + c);
        }
    }
    return jobs;
}

Report run(const Job& job, const std::string& target, std::uint64_t seed, bool timing) {
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    try {
        r = job();
    } catch (const std::exception& e) {
        r = failed("error", target, e.what());
    }
    r.seed = seed;
    if (timing)
        r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write " + path);
    out << text;
}

int cmd_list(bool json) {
    if (json) {
        auto arr = nlohmann::json::array();
        for (const auto& e : catalog_entries())
            arr.push_back({{"name", e.name}, {"params", e.params}, {"note", e.note}});
        std::cout << arr.dump(2) << "\n";
        return 0;
    }
    for (const auto& e : catalog_entries()) {
        std::string n = e.name + (e.params.empty() ? "" : "(" + e.params + ")");
        std::cout << n << std::string(n.size() < 10 ? 10 - n.size() : 1, ' ') << e.note << "\n";
    }
    return 0;
}

int cmd_verify(const Options& o) {
    std::vector<std::string> checks;
    if (o.all)
        checks = all_checks;
    else if (!o.checks.empty())
        checks = split_csv(o.checks);
    else
        checks = {"vee", "wdvv"};
    std::set<std::string> seen;
    for (const auto& c : checks) {
        if (std::find(all_checks.begin(), all_checks.end(), c) == all_checks.end())
            throw UsageError("unknown check: " + c);
        if (!seen.insert(c).second)
            throw UsageError("check listed twice: " + c);
    }
    const VSystem V = resolve(o);
    auto jobs = plan(V, checks, o);

    std::vector<std::future<Report>> running;
    for (const auto& j : jobs)
        running.push_back(std::async(std::launch::async, run, j, V.name, o.seed, o.timing));
    std::vector<Report> reports;
    for (auto& f : running)
        reports.push_back(f.get());

    bool ok = true;
    for (const auto& r : reports)
        ok = ok && r.ok();
    std::ostringstream out;
    if (o.json) {
        auto arr = nlohmann::json::array();
        for (const auto& r : reports)
            arr.push_back(to_json(r));
        out << arr.dump(2) << "\n";
    } else {
        for (const auto& r : reports) {
            out << status_name(r.status) << "  " << r.check << "  " << r.target << "  max_residual "
                << format_sci(r.max_residual);
            if (r.elapsed_ms)
                out << "  " << *r.elapsed_ms << " ms";
            out << "\n";
        }
        out << (ok ? "PASS" : "FAIL") << "\n";
    }
    emit(out.str(), o.output);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elliptic V-system and WDVV verification"};
    app.require_subcommand(1);

    bool list_json = false;
    auto* list = app.add_subcommand("list", "Catalog systems with parameter slots");
    list->add_flag("--json", list_json, "Machine-readable output");

    Options o;
    auto* verify = app.add_subcommand("verify", "Run checks on a catalog system or a JSON file");
    verify->add_option("system", o.system, "Catalog name or path to a .json system")->required();
    verify->add_option("--checks", o.checks, "Comma-separated: vee,wdvv,limits,identities,hurwitz,jacobian");
    verify->add_flag("--all", o.all, "Run every check");
    verify->add_option("--param", o.params, "Catalog parameter key=value (repeatable)");
    verify->add_option("--tol", o.tol, "Tolerance for numerical checks");
    verify->add_option("--fd-tol", o.fd_tol, "Tolerance for finite-difference based checks");
    verify->add_option("--max-terms", o.max_terms, "Series term budget")->check(CLI::PositiveNumber);
    verify->add_option("--samples", o.samples, "Random points per check")->check(CLI::PositiveNumber);
    verify->add_option("--seed", o.seed, "Random seed");
    verify->add_flag("--json", o.json, "JSON report");
    verify->add_option("--output", o.output, "Write the report to a file");
    verify->add_flag("--timing", o.timing, "Record elapsed_ms");
    verify->add_flag("--uncorrected", o.uncorrected, "Drop the E4 correction term");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (*list)
            return cmd_list(list_json);
        if (o.all && !o.checks.empty())
            throw UsageError("--all and --checks are exclusive");
        return cmd_verify(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
