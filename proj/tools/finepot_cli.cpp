#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "finepot/error.hpp"
#include "run.hpp"

#ifndef FINEPOT_VERSION
#define FINEPOT_VERSION "unknown"
#endif

namespace finepot::cli {

fs::path Run::file(const std::string& name) {
    artifacts.push_back(name);
    return out / name;
}

CsvWriter Run::csv(const std::string& name, std::vector<std::string> columns) {
    return CsvWriter(file(name), std::move(columns), seed);
}

int Run::levels(int minimum) const { return std::max(refine + 1, minimum); }

Summary::Summary(Run& run, const std::string& name)
    : out_(run.csv(name, {"quantity", "value", "error", "tolerance"})) {}

void Summary::add(const std::string& quantity, double value, double error, double tolerance) {
    out_.row({quantity, format_number(value), format_number(error), format_number(tolerance)});
}

void Summary::flag(const std::string& quantity, bool value) { add(quantity, value ? 1.0 : 0.0, 0.0, 0.0); }

std::vector<double> observed_orders(const std::vector<double>& h, const std::vector<double>& errors) {
    std::vector<double> q(errors.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k < errors.size(); ++k)
        if (errors[k - 1] > 0.0 && errors[k] > 0.0 && std::isfinite(errors[k - 1]))
            q[k] = std::log(errors[k - 1] / errors[k]) / std::log(h[k - 1] / h[k]);
    return q;
}

void write_refinement(Run& run, const std::string& name, const std::vector<double>& h,
                      const std::vector<double>& values, std::optional<double> exact) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> err(values.size(), nan);
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (exact) err[k] = std::abs(values[k] - *exact);
        else if (k > 0) err[k] = std::abs(values[k] - values[k - 1]);
    }
    auto q = observed_orders(h, err);
    auto w = run.csv(name, {"level", "h", "value", exact ? "error_vs_exact" : "difference_to_previous", "observed_order"});
    for (std::size_t k = 0; k < values.size(); ++k)
        w.row({std::to_string(k), format_number(h[k]), format_number(values[k]), format_number(err[k]), format_number(q[k])});
    Json levels = Json::array();
    for (std::size_t k = 0; k < values.size(); ++k)
        levels.push_back({{"h", h[k]}, {"value", values[k]}, {"observed_order", std::isfinite(q[k]) ? Json(q[k]) : Json()}});
    run.results[name] = levels;
}

namespace {

// Hashes the config and every file it names.
Json input_hashes(const Run& run) {
    Json inputs = Json::array();
    if (run.config_path.empty()) return inputs;
    inputs.push_back({{"path", run.config_path.string()}, {"sha256", sha256_file(run.config_path)}});
    std::function<void(const Json&)> walk = [&](const Json& j) {
        if (j.is_object() || j.is_array()) {
            for (const auto& item : j) walk(item);
        } else if (j.is_string()) {
            auto s = j.get<std::string>();
            if (s.empty() || s.size() > 4096) return;
            std::error_code ec;
            fs::path p = fs::path(s).is_absolute() ? fs::path(s) : run.base_dir / s;
            if (fs::is_regular_file(p, ec)) inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
        }
    };
    walk(run.config);
    return inputs;
}

void write_manifest(Run& run, const std::string& status) {
    Json m;
    m["command"] = run.command;
    m["status"] = status;
    m["seed"] = run.seed;
    m["quick"] = run.quick;
    m["refine"] = run.refine;
    m["generated"] = timestamp_utc();
    m["versions"] = {{"finepot", FINEPOT_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    m["inputs"] = input_hashes(run);
    m["parameters"] = run.config;
    m["artifacts"] = run.artifacts;
    m["results"] = run.results;
    write_json(run.out / "manifest.json", m);
}

} // namespace
} // namespace finepot::cli

int main(int argc, char** argv) {
    using namespace finepot;
    using namespace finepot::cli;

    CLI::App app{"Discrete p-energy obstacle problems, capacities and fine topology"};
    app.set_version_flag("--version", FINEPOT_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config, out;
    std::uint64_t seed = 20240611;
    bool quick = false;
    int refine = 0;
    app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory (default: out/<command>)");
    app.add_option("--seed", seed, "random seed, recorded in every output");
    app.add_flag("--quick", quick, "small instances");
    app.add_option("--refine", refine, "extra refinement levels (each halves h)")->check(CLI::NonNegativeNumber);

    const std::map<std::string, std::pair<std::string, int (*)(Run&)>> commands{
        {"solve", {"solve a double obstacle problem", cmd_solve}},
        {"capacity", {"Sobolev, variational or condenser capacity", cmd_capacity}},
        {"adams", {"Choquet integral of (psi - f)_+", cmd_adams}},
        {"mazya", {"Maz'ya capacitary inequality check", cmd_mazya}},
        {"wiener", {"dyadic thinness sum at a point", cmd_wiener}},
        {"swisscheese", {"Swiss cheese construction and its bounds", cmd_swisscheese}},
        {"fineint", {"fine interior classification and coincidence experiment", cmd_fineint}},
        {"transmission", {"line-measure transmission problem", cmd_transmission}},
        {"oned", {"weighted line: Poincare bound, atoms, p -> 1", cmd_oned}},
        {"suite", {"acceptance battery", cmd_suite}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    CLI11_PARSE(app, argc, argv);

    Run run;
    run.command = app.get_subcommands().front()->get_name();
    run.seed = seed;
    run.quick = quick;
    run.refine = refine;
    run.out = out.empty() ? fs::path("out") / run.command : fs::path(out);

    try {
        fs::create_directories(run.out);
    } catch (const std::exception& e) {
        std::cerr << "error [io]: cannot create " << run.out << ": " << e.what() << '\n';
        return 2;
    }

    auto failed = [&](const std::string& kind, const std::string& message) {
        std::cerr << "error [" << kind << "]: " << message << '\n';
        try {
            write_json(run.out / "error.json", Json{{"kind", kind}, {"message", message}, {"command", run.command}});
            write_manifest(run, "failed");
        } catch (const std::exception&) {
        }
        return 2;
    };

    try {
        if (!config.empty()) {
            run.config_path = fs::absolute(config);
            run.base_dir = run.config_path.parent_path();
            run.config = load_config(run.config_path);
        } else if (run.command != "suite") {
            fail(ErrorKind::Config, run.command + " needs --config");
        }
        int status = commands.at(run.command).second(run);
        if (run.checks_failed && status == 0) status = 1;
        write_manifest(run, status == 0 ? "ok" : "checks_failed");
        return status;
    } catch (const Error& e) {
        return failed(to_string(e.kind()), e.what());
    } catch (const Json::exception& e) {
        return failed("config", e.what());
    } catch (const std::exception& e) {
        return failed("internal", e.what());
    }
}
