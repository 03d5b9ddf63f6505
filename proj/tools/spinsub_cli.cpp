// Command-line front end: classify built-in examples, run the invariant
// suites, list the examples. Exit codes: 0 success, 1 numerical failure or
// residual out of tolerance, 2 invalid arguments.

#include "spinsub/lab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace spinsub;

constexpr double kDualPathTol = 1e-5;

int emit(const std::string& text, const std::string& path) {
    std::cout << text << '\n';
    if (path.empty()) return 0;
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return 1;
    }
    out << text << '\n';
    return 0;
}

std::string diagnostic(const std::string& kind, const std::string& message, const Vec* u = nullptr) {
    nlohmann::json d = {{"error", kind}, {"message", message}};
    if (u) d["u"] = std::vector<double>(u->data(), u->data() + u->size());
    return d.dump(2);
}

bool classify_ok(const lab::Report& rep) {
    if (rep.table_mismatches != 0) return false;
    for (const char* key : {"r_dual_path", "theta6_dual_path", "eta_dual_path"}) {
        const auto it = rep.max_residuals.find(key);
        if (it != rep.max_residuals.end() && !(it->second <= kDualPathTol)) return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Torsion classes of SU(3)-structures induced on 6-dimensional submanifolds of Spin(7) ambients"};
    app.require_subcommand(1);

    lab::ExampleSpec spec;
    lab::RunOptions run;
    std::string gammaText = "0";
    std::string jsonPath;
    double verifyTol = 1e-10;
    std::uint64_t verifySeed = 1;

    CLI::App* classify = app.add_subcommand("classify", "classify a built-in example over a sample grid");
    // --h is the step flag, so help is long-form only here.
    classify->set_help_flag("--help", "print this help message and exit");
    classify->add_option("--example", spec.name, "example name (see example-list)")->required();
    classify->add_option("--sigma", spec.sigma, "orientation sign of the fundamental form")
        ->check(CLI::IsMember({1, -1}));
    classify->add_option("--gamma", gammaText, "constant phase: a number or k*pi/n such as pi/4, -3pi/4");
    classify->add_option("--grid", spec.grid, "grid x grid sample points")->check(CLI::PositiveNumber);
    classify->add_option("--h", run.h, "finite-difference step")->check(CLI::PositiveNumber);
    classify->add_option("--tol", run.tol, "classification tolerance")->check(CLI::PositiveNumber);
    classify->add_option("--seed", spec.seed, "seed for graph coefficients and sample coordinates");
    classify->add_option("--json", jsonPath, "also write the report to this file");

    CLI::App* verify = app.add_subcommand("verify", "run the invariant suites of all modules");
    verify->add_option("--tol", verifyTol, "tolerance of the algebraic suites")->check(CLI::PositiveNumber);
    verify->add_option("--seed", verifySeed, "seed of the random samples");
    verify->add_option("--json", jsonPath, "also write the results to this file");

    CLI::App* list = app.add_subcommand("example-list", "list the built-in examples");
    list->add_option("--json", jsonPath, "also write the list to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        if (list->parsed()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [name, description] : lab::example_catalog())
                arr.push_back({{"name", name}, {"description", description}});
            return emit(arr.dump(2), jsonPath);
        }
        if (verify->parsed()) {
            const lab::VerifyReport rep = lab::run_verify({verifyTol, verifySeed});
            const int io = emit(lab::to_json(rep), jsonPath);
            return rep.all_pass() && io == 0 ? 0 : 1;
        }
        spec.gamma = lab::parse_angle(gammaText);
        const lab::Report rep = lab::run_report(spec, run);
        const int io = emit(lab::to_json(rep), jsonPath);
        return classify_ok(rep) && io == 0 ? 0 : 1;
    } catch (const lab::SpecError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const lab::PointError& e) {
        std::cout << diagnostic("point", e.what(), &e.u) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cout << diagnostic("numerical", e.what()) << '\n';
        return 1;
    }
}
