#pragma once

// Built-in example submanifolds, grid sweeps producing classification
// reports, and their JSON serialization.

#include "spinsub/subman.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinsub::lab {

using subman::AmbientClass;
using subman::AmbientStructure;
using subman::Chart;
using subman::GammaField;
using subman::TableMatch;

/// Raised for unknown example names and invalid parameters.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A per-point failure, with the chart coordinates in the message.
class PointError : public std::runtime_error {
public:
    PointError(const Vec& u, const std::string& what);
    Vec u;
};

struct ExampleSpec {
    std::string name = "plane";
    int sigma = 1;
    double gamma = 0.0;
    std::vector<double> semi_axes;  // ellipsoid7; empty means a fixed generic choice
    double pitch = 1.0;             // helicoid_r3_q4: x3 = pitch * v
    int grid = 3;                   // grid x grid sample points over the two sweep coordinates
    std::uint64_t seed = 1;         // graph coefficients and the fixed coordinates of the samples
};

struct Example {
    ExampleSpec spec;
    Chart chart;
    AmbientStructure ambient;
    GammaField gamma;
    /// Chart coordinates swept by the sample grid.
    std::array<int, 2> sweep{0, 1};
};

/// Names accepted by build_example, with a one-line description each.
const std::vector<std::pair<std::string, std::string>>& example_catalog();

Example build_example(const ExampleSpec& spec);

/// grid x grid points over the sweep coordinates at cell centres; the other
/// coordinates are drawn once per point from the seed (seed 0: box centre).
std::vector<Vec> sample_points(const Example& ex);

/// Minimality and normal-connection data of minimal_r4_q4 at a sample point.
struct SurfaceCheck {
    double h1, h2, a_norm;
};
SurfaceCheck surface_check(const Example& ex, const Vec& u);

struct RunOptions {
    double h = 1e-3;   // step of the exterior-derivative stencil
    double tol = 1e-6; // relative classification tolerance
};

struct PointReport {
    Vec u;
    AmbientClass ambient_class = AmbientClass::Parallel;
    su3::Su3TorsionReport torsion;
    TableMatch table;
    std::map<std::string, double> residuals;
};

struct Report {
    ExampleSpec spec;
    RunOptions options;
    std::vector<PointReport> points;
    std::map<std::string, double> max_residuals;
    std::map<std::string, double> mean_residuals;
    /// Most frequent label over the points; ties go to the earliest point.
    std::vector<std::string> consensus_label;
    bool half_flat = false; // all points
    bool nearly_kaehler = false;
    bool kaehler = false;
    bool almost_kaehler = false;
    bool locally_conformal_kaehler = false;
    bool closed = false;
    int table_mismatches = 0;
};

PointReport run_point(const Example& ex, const Vec& u, const RunOptions& opt);
Report run_report(const ExampleSpec& spec, const RunOptions& opt = {});

/// JSON document {example, sigma, gamma, grid, h, tol, seed, points, aggregate}.
std::string to_json(const Report& report, int indent = 2);

/// Nijenhuis tensor of the induced J at u, on the orthonormal tangent frame.
struct NijenhuisResult {
    forms::Tensor tensor;
    forms::Form form;     // alternating part
    double skew_residual; // |tensor - alternating part|
};
NijenhuisResult nijenhuis_at(const Example& ex, const Vec& u, double h = 1e-4);

/// One invariant suite of the verify command. Algebraic suites are judged
/// against the requested tolerance, finite-difference suites against their
/// own fixed tolerance.
struct SuiteResult {
    std::string name;
    std::string kind; // "algebraic" or "finite-difference"
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    double tol = 1e-10;
    std::uint64_t seed = 1;
};

struct VerifyReport {
    VerifyOptions options;
    std::vector<SuiteResult> suites;
    bool all_pass() const;
};

/// Finite-difference suites and their tolerances:
///   cayley.conformal_nabla_phi 1e-5, lab.s3xs3_dpsi 1e-6, lab.s3xs3_nijenhuis 1e-5,
///   lab.dual_path 1e-5, lab.table_rows 0 mismatches, lab.helicoid_closed 1e-8,
///   lab.minimal_surface 1e-8.
VerifyReport run_verify(const VerifyOptions& opt = {});
std::string to_json(const VerifyReport& report, int indent = 2);

/// Accepts a numeric literal or the tokens "pi/4", "-3pi/4" style multiples k*pi/n.
double parse_angle(const std::string& text);

} // namespace spinsub::lab
