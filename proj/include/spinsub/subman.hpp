#pragma once

// Six-dimensional submanifolds of the Spin(7) ambients: frames, second
// fundamental form, normal connection, the induced SU(3)-structures and
// their torsion, Lie derivatives of the fundamental form along normals, and
// the classification tables relating torsion classes to extrinsic data.

#include "spinsub/cayley.hpp"
#include "spinsub/su3.hpp"

#include <functional>
#include <string>
#include <vector>

namespace spinsub::subman {

using cayley::AmbientStructure;
using forms::Form;
using forms::Gram;
using su3::Su3Point;
using su3::Su3TorsionReport;

/// Axis-aligned box in R^6.
struct Box {
    Vec lo = Vec::Constant(6, -1.0);
    Vec hi = Vec::Constant(6, 1.0);
    bool contains(const Vec& u) const;
    /// Point with fractional coordinates t in [0,1]^6.
    Vec at(const Vec& t) const;
};

/// Scalar polynomial of degree at most three on R^6.
struct Polynomial {
    double c0 = 0.0;
    Vec linear = Vec::Zero(6);
    Mat quadratic = Mat::Zero(6, 6); // value contribution u^T Q u / 2, Q symmetric
    struct Cubic {
        int i, j, k;
        double c; // contribution c u_i u_j u_k
    };
    std::vector<Cubic> cubic;

    double value(const Vec& u) const;
    Vec gradient(const Vec& u) const;
    Mat hessian(const Vec& u) const;
};

/// Parametrized immersion of a box in R^6 into R^8.
class Chart {
public:
    using MapFn = std::function<Vec(const Vec&)>;
    using Jet1Fn = std::function<Mat(const Vec&)>;
    /// Second derivatives: element i is the 8 x 6 matrix d/du_i of the Jacobian.
    using Jet2Fn = std::function<std::vector<Mat>(const Vec&)>;

    Chart(std::string name, Box domain, MapFn map, Jet1Fn jet1 = {}, Jet2Fn jet2 = {}, double h = 1e-4);

    /// u -> (g1(u), g2(u), u) with g1, g2 on the first two ambient axes.
    static Chart graph(const Polynomial& g1, const Polynomial& g2, Box domain);

    const std::string& name() const { return name_; }
    const Box& domain() const { return domain_; }
    double step() const { return h_; }
    bool analytic_jets() const { return static_cast<bool>(jet1_) && static_cast<bool>(jet2_); }

    Vec point(const Vec& u) const;
    Mat jacobian(const Vec& u) const;
    std::vector<Mat> hessian(const Vec& u) const;

private:
    std::string name_;
    Box domain_;
    MapFn map_;
    Jet1Fn jet1_;
    Jet2Fn jet2_;
    double h_;
};

/// Phase function gamma on the chart domain.
struct GammaField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient; // coordinate gradient; empty means finite differences

    static GammaField constant(double g);
    double at(const Vec& u) const { return value(u); }
    Vec grad(const Vec& u, double h) const;
};

/// Per-point package of frames and extrinsic data. Tangent quantities are
/// expressed on the orthonormal tangent frame T.
struct PointGeometry {
    Vec u, p;
    Mat jacobian; // 8 x 6 coordinate derivatives
    Mat T;        // 8 x 6, g-orthonormal, Gram-Schmidt of the Jacobian columns
    Mat R;        // 6 x 6 upper triangular, jacobian = T R
    Vec N1, N2;   // g-orthonormal normals, (T, N1, N2) positively oriented
    Mat alpha1 = Mat::Zero(6, 6);
    Mat alpha2 = Mat::Zero(6, 6);
    Vec a = Vec::Zero(6); // a(X) = <nabla_X N1, N2>
    double h1 = 0.0, h2 = 0.0;
    double gamma = 0.0;
    Vec dgamma = Vec::Zero(6); // d gamma on the tangent frame
    bool has_fundamental = false;

    /// Coordinate form (on d/du_i) -> form on the tangent frame.
    Form to_frame(const Form& coordinate_form) const;
    /// Form on the tangent frame -> coordinate form.
    Form to_coordinates(const Form& frame_form) const;
};

/// Frames only: T by Gram-Schmidt, N1 from the projection of the first ambient axis
/// onto the normal space (later axes as fallback), N2 completing a positive frame.
PointGeometry frames_at(const Chart& chart, const AmbientStructure& ambient, const Vec& u);

/// Frames plus alpha_j, a, h_j and the phase data.
PointGeometry fundamental_data(const Chart& chart, const AmbientStructure& ambient, const Vec& u,
                               const GammaField& gamma = GammaField::constant(0.0));

/// Ambient quantities on the orthonormal Cayley frame at the base point.
struct FrameData {
    Mat T;      // 8 x 6 tangent frame in Cayley-frame components
    Vec n1, n2; // normals in Cayley-frame components
    cayley::RbarTensor rbar;
    Form theta8; // on the Cayley frame
    Form dphi;   // on the Cayley frame
};
FrameData frame_data(const PointGeometry& geo, const AmbientStructure& ambient);

/// J X = P(N1, N2, X), omega, psi+- from the phase gamma; expressed on T.
Su3Point induced_su3(const PointGeometry& geo, const AmbientStructure& ambient, double gamma);

/// rbar(X, Y, Z) for vectors in Cayley-frame components.
double rbar_eval(const cayley::RbarTensor& rbar, const Vec& x, const Vec& y, const Vec& z);

/// f*(L_N Phi) on T for N = N1 (index 1) or N2 (index 2), from the Levi-Civita expression
/// with nabla_X N1 = -A_{N1} X + a(X) N2 and nabla_X N2 = -A_{N2} X - a(X) N1.
Form lie_restricted(const PointGeometry& geo, const AmbientStructure& ambient, int normal_index);

struct TorsionResult {
    Su3Point su3;
    Mat r;        // r(nabla omega) on T
    Form theta6;  // on T
    Form eta;     // on T
    Form lie1, lie2;
    /// Residuals of the two trace identities relating theta8(N_j), h_j and r.
    double trace_residual_1 = 0.0;
    double trace_residual_2 = 0.0;
    /// Largest deviation among the J-intertwining identities of the Lie-derivative terms.
    double lie_star_residual = 0.0;
    /// theta6 from r through the codifferential, compared with the closed form.
    double theta6_consistency = 0.0;
    Su3TorsionReport report;
};

/// Torsion of the induced structure from the extrinsic data and the ambient torsion.
TorsionResult torsion_via_rraa(const PointGeometry& geo, const AmbientStructure& ambient, double tol = 1e-6);

struct ExteriorResult {
    su3::ExteriorData ext; // on T
    Mat r;
    Form theta6;
    Form eta;
    double eta_residual = 0.0;
};

/// The same torsion from finite-difference exterior derivatives of omega and psi+-.
ExteriorResult torsion_via_exterior(const Chart& chart, const AmbientStructure& ambient, const Vec& u,
                                    const GammaField& gamma, double h = 1e-3);

struct Closedness {
    bool closed = false;
    double residual1 = 0.0; // |f*(L_{N1} Phi) - f*(N1 ⌟ dPhi)|
    double residual2 = 0.0;
};
Closedness closedness_check(const PointGeometry& geo, const AmbientStructure& ambient, double tol = 1e-8);

enum class AmbientClass { Parallel, Balanced, LocallyConformalParallel, LocallyConformalParallelTangent };
std::string to_string(AmbientClass c);

struct TableRow {
    std::string id;                   // e.g. "T1.W5"
    std::vector<std::string> classes; // components allowed by the row
    double residual = 0.0;
    bool satisfied = false; // residual < tol
    bool contained = false; // measured label within classes
    bool consistent() const { return satisfied == contained; }
};

struct TableMatch {
    AmbientClass ambient_class = AmbientClass::Parallel;
    std::vector<TableRow> rows;
    int mismatches() const;
};

/// Ambient class at the base point; tangency is decided from theta8(N1), theta8(N2).
AmbientClass ambient_class(const PointGeometry& geo, const AmbientStructure& ambient, double tol);

TableMatch table_match(const TorsionResult& torsion, const PointGeometry& geo, const AmbientStructure& ambient,
                       double tol);

} // namespace spinsub::subman
