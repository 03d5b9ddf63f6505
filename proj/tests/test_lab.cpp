#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spinsub/lab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace spinsub;
using namespace spinsub::lab;
using nlohmann::json;

namespace {

ExampleSpec spec_of(const std::string& name, int sigma = 1, double gamma = 0.0, int grid = 2) {
    ExampleSpec s;
    s.name = name;
    s.sigma = sigma;
    s.gamma = gamma;
    s.grid = grid;
    return s;
}

std::vector<std::string> labels(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

} // namespace

TEST_CASE("every catalogued example builds") {
    std::set<std::string> names;
    for (const auto& [name, description] : example_catalog()) {
        CHECK_FALSE(description.empty());
        names.insert(name);
        for (int sigma : {1, -1}) {
            const Example ex = build_example(spec_of(name, sigma));
            CHECK(ex.chart.name() == name);
            CHECK(ex.ambient.sigma() == sigma);
        }
    }
    for (const char* n : {"plane", "graph", "s3xs3", "s6", "ellipsoid7", "helicoid_r3_q4", "minimal_r4_q4"})
        CHECK(names.count(n) == 1);
}

TEST_CASE("invalid example specifications") {
    CHECK_THROWS_AS(build_example(spec_of("torus")), SpecError);
    CHECK_THROWS_AS(build_example(spec_of("plane", 0)), SpecError);
    CHECK_THROWS_AS(build_example(spec_of("plane", 1, 0.0, 0)), SpecError);
    ExampleSpec e = spec_of("ellipsoid7");
    e.semi_axes = {1.0, 2.0};
    CHECK_THROWS_AS(build_example(e), SpecError);
    e.semi_axes = {1.0, 2.0, 1.0, 1.0, -1.0, 1.0, 1.0};
    CHECK_THROWS_AS(build_example(e), SpecError);
    ExampleSpec h = spec_of("helicoid_r3_q4");
    h.pitch = 0.0;
    CHECK_THROWS_AS(build_example(h), SpecError);
}

TEST_CASE("angle parsing") {
    const double pi = std::numbers::pi;
    CHECK(parse_angle("pi/4") == doctest::Approx(pi / 4));
    CHECK(parse_angle("-3pi/4") == doctest::Approx(-3 * pi / 4));
    CHECK(parse_angle("3*pi/4") == doctest::Approx(3 * pi / 4));
    CHECK(parse_angle("pi") == doctest::Approx(pi));
    CHECK(parse_angle("2pi/3") == doctest::Approx(2 * pi / 3));
    CHECK(parse_angle("0") == 0.0);
    CHECK(parse_angle("0.3") == 0.3);
    CHECK(parse_angle("-1e-2") == -0.01);
    for (const char* bad : {"", "pi/x", "abc", "1.2.3", "0.3rad", "pi/0"}) CHECK_THROWS_AS(parse_angle(bad), SpecError);
}

TEST_CASE("sample points") {
    for (std::uint64_t seed : {0ULL, 1ULL, 5ULL}) {
        ExampleSpec s = spec_of("s3xs3", 1, 0.0, 3);
        s.seed = seed;
        const Example ex = build_example(s);
        const auto pts = sample_points(ex);
        REQUIRE(pts.size() == 9);
        std::set<std::pair<double, double>> swept;
        for (const Vec& u : pts) {
            CHECK(ex.chart.domain().contains(u));
            swept.insert({u(ex.sweep[0]), u(ex.sweep[1])});
            if (seed == 0)
                for (int k = 0; k < 6; ++k)
                    if (k != ex.sweep[0] && k != ex.sweep[1])
                        CHECK(u(k) == doctest::Approx(0.5 * (ex.chart.domain().lo(k) + ex.chart.domain().hi(k))));
        }
        CHECK(swept.size() == 9);
        const auto again = sample_points(ex);
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK((pts[i] - again[i]).norm() == 0.0);
    }
}

TEST_CASE("JSON report schema") {
    const Report rep = run_report(spec_of("s3xs3", 1, std::numbers::pi / 4));
    const json doc = json::parse(to_json(rep));
    for (const char* key : {"example", "sigma", "gamma", "grid", "seed", "h", "tol", "points", "aggregate"})
        CHECK(doc.contains(key));
    CHECK(doc["example"] == "s3xs3");
    CHECK(doc["sigma"] == 1);
    CHECK(doc["gamma"].get<double>() == doctest::Approx(std::numbers::pi / 4));
    REQUIRE(doc["points"].is_array());
    CHECK(doc["points"].size() == 4);
    for (const json& p : doc["points"]) {
        CHECK(p["u"].is_array());
        CHECK(p["u"].size() == 6);
        const json& c = p["class"];
        CHECK(c["ambient"].is_string());
        CHECK(c["label"].is_array());
        for (const char* key : {"half_flat", "kaehler", "nearly_kaehler", "almost_kaehler", "locally_conformal_kaehler"})
            CHECK(c[key].is_boolean());
        CHECK(p["norms"].is_object());
        for (const char* key : {"W1p", "W1m", "W2p", "W2m", "W3", "W4", "W5"}) CHECK(p["norms"][key].is_number());
        CHECK(p["residuals"].is_object());
        CHECK(p["residuals"]["r_dual_path"].is_number());
        REQUIRE(p["table_rows"].is_array());
        CHECK_FALSE(p["table_rows"].empty());
        for (const json& row : p["table_rows"]) {
            CHECK(row["id"].is_string());
            CHECK(row["classes"].is_array());
            CHECK(row["residual"].is_number());
            CHECK(row["satisfied"].is_boolean());
            CHECK(row["contained"].is_boolean());
            CHECK(row["consistent"].get<bool>() == (row["satisfied"] == row["contained"]));
        }
    }
    const json& agg = doc["aggregate"];
    CHECK(agg["label"] == json::array({"W1-", "W3"}));
    CHECK(agg["half_flat"] == true);
    CHECK(agg["table_mismatches"] == 0);
    CHECK(agg["max_residuals"].is_object());
    CHECK(agg["mean_residuals"].is_object());
}

TEST_CASE("aggregate residuals are the extrema of the point values") {
    for (const char* name : {"graph", "ellipsoid7", "conformal_slice"}) {
        const Report rep = run_report(spec_of(name, -1, 0.7, 3));
        for (const auto& [key, mx] : rep.max_residuals) {
            double m = 0.0, mean = 0.0;
            for (const PointReport& p : rep.points) {
                m = std::max(m, p.residuals.at(key));
                mean += p.residuals.at(key);
            }
            CHECK(mx == m);
            CHECK(rep.mean_residuals.at(key) == doctest::Approx(mean / rep.points.size()).epsilon(1e-12));
        }
    }
}

TEST_CASE("reports are bit-identical for fixed flags") {
    for (const char* name : {"graph", "minimal_r4_q4"}) {
        ExampleSpec s = spec_of(name, 1, 0.3, 2);
        s.seed = 11;
        CHECK(to_json(run_report(s)) == to_json(run_report(s)));
    }
    ExampleSpec a = spec_of("graph"), b = spec_of("graph");
    b.seed = 2;
    CHECK(to_json(run_report(a)) != to_json(run_report(b)));
}

TEST_CASE("report expectations on the built-in examples") {
    const double pi4 = std::numbers::pi / 4;
    SUBCASE("s3xs3") {
        const Report p = run_report(spec_of("s3xs3", 1, pi4, 3));
        CHECK(p.consensus_label == labels({"W1-", "W3"}));
        CHECK(p.half_flat);
        const Report m = run_report(spec_of("s3xs3", -1, pi4, 3));
        CHECK(m.consensus_label == labels({"W1+", "W3"}));
        CHECK_FALSE(m.half_flat);
    }
    SUBCASE("plane") {
        const Report r = run_report(spec_of("plane"));
        CHECK(r.consensus_label.empty());
        CHECK(r.kaehler);
        for (const PointReport& p : r.points) {
            const auto it = std::find_if(p.table.rows.begin(), p.table.rows.end(),
                                         [](const subman::TableRow& row) { return row.id == "T1.W5"; });
            REQUIRE(it != p.table.rows.end());
            CHECK(it->satisfied);
        }
    }
    SUBCASE("s6") {
        const Report r = run_report(spec_of("s6", 1, 0.0, 3));
        CHECK(r.nearly_kaehler);
        CHECK(r.max_residuals.at("theta6_norm") < 1e-8);
    }
    SUBCASE("helicoid") {
        const Report r = run_report(spec_of("helicoid_r3_q4", 1, 0.0, 3));
        CHECK(r.max_residuals.at("dpsi_plus_norm") < 1e-6);
        CHECK(r.max_residuals.at("dpsi_minus_norm") < 1e-6);
        CHECK(r.max_residuals.at("theta6_norm") < 1e-8);
        CHECK(r.closed);
    }
    SUBCASE("minimal surface times Q4") {
        const Report r = run_report(spec_of("minimal_r4_q4", 1, 0.0, 3));
        int open = 0;
        for (const PointReport& p : r.points)
            if (std::max(p.residuals.at("closedness_1"), p.residuals.at("closedness_2")) > 1e-3) ++open;
        CHECK(2 * open > static_cast<int>(r.points.size()));
        CHECK_FALSE(r.closed);
        CHECK(r.max_residuals.at("theta6_norm") < 1e-6);
        CHECK(r.max_residuals.at("mean_curvature") < 1e-8);
    }
    SUBCASE("ellipsoid") {
        const Report r = run_report(spec_of("ellipsoid7", 1, 0.0, 3));
        CHECK(r.half_flat);
        CHECK(r.max_residuals.at("dpsi_plus_norm") < 1e-6);
        for (const PointReport& p : r.points) CHECK(p.residuals.at("dpsi_minus_norm") > 1e-2);
    }
    SUBCASE("conformal slice") {
        const Report r = run_report(spec_of("conformal_slice", 1, 0.0, 3));
        CHECK(r.locally_conformal_kaehler);
        CHECK(r.table_mismatches == 0);
        for (const PointReport& p : r.points)
            CHECK(p.ambient_class == subman::AmbientClass::LocallyConformalParallelTangent);
    }
}

TEST_CASE("minimal_r4_q4 surface data") {
    const Example ex = build_example(spec_of("minimal_r4_q4", 1, 0.0, 4));
    for (const Vec& u : sample_points(ex)) {
        const SurfaceCheck sc = surface_check(ex, u);
        CHECK(std::abs(sc.h1) + std::abs(sc.h2) < 1e-8);
        CHECK(sc.a_norm > 1e-3);
    }
}

TEST_CASE("Nijenhuis tensor of the induced structures") {
    const Example plane = build_example(spec_of("plane"));
    const NijenhuisResult np = nijenhuis_at(plane, sample_points(plane)[0]);
    CHECK(np.tensor.max_abs() < 1e-8);
    for (int sigma : {1, -1}) {
        const double g = std::numbers::pi / 4;
        const Example ex = build_example(spec_of("s3xs3", sigma, g));
        for (const Vec& u : sample_points(ex)) {
            const NijenhuisResult n = nijenhuis_at(ex, u);
            CHECK(n.skew_residual < 1e-6);
            const subman::PointGeometry geo = subman::frames_at(ex.chart, ex.ambient, u);
            const su3::Su3Point s = subman::induced_su3(geo, ex.ambient, g);
            // W1 part lambda psi+ + mu psi- of nabla omega
            const double lambda = -0.5 * (std::cos(g) + sigma * std::sin(g));
            const double mu = -0.5 * (std::sin(g) - sigma * std::cos(g));
            CHECK((n.form - 4.0 * lambda * s.psiM + 4.0 * mu * s.psiP).max_abs() < 1e-5);
            CHECK(forms::norm(n.form, forms::Gram::identity(6)) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("point failures carry the coordinates") {
    const Example ex = build_example(spec_of("s6"));
    const Vec u = Vec::Zero(6);
    try {
        run_point(ex, u, {});
        FAIL("expected a PointError");
    } catch (const PointError& e) {
        CHECK(e.u.size() == 6);
        CHECK(e.u.norm() == 0.0);
    }
}

TEST_CASE("verify suites") {
    const VerifyReport r = run_verify({1e-9, 3});
    CHECK(r.suites.size() >= 10);
    for (const SuiteResult& s : r.suites) {
        INFO(s.name);
        CHECK(s.pass);
        CHECK(s.residual <= s.tolerance);
    }
    CHECK(r.all_pass());
    const json doc = json::parse(to_json(r));
    CHECK(doc["all_pass"] == true);
    CHECK(doc["suites"].size() == r.suites.size());
    CHECK_THROWS_AS(run_verify({0.0, 1}), SpecError);
}
