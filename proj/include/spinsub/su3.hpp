#pragma once

// Pointwise SU(3)-structure algebra on a 6-dimensional inner product space
// and the torsion quantities built from it.

#include "spinsub/forms.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace spinsub::su3 {

using forms::Form;
using forms::Gram;
using forms::Orientation;
using forms::Tensor;

/// Raised when an SU(3)-structure fails its defining identities.
class DegenerateStructure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Su3Point {
    Gram g = Gram::identity(6);
    Mat J;      // J e_i = sum_k J(k,i) e_k
    Form omega; // omega(x,y) = <x, J y>
    Form psiP;
    Form psiM;
    double gamma = 0.0;
    /// Sign of omega^3 relative to the lexicographic top form.
    Orientation orientation{1};
};

/// Validates the identities between g, J, omega and psi; throws DegenerateStructure.
Su3Point make_su3(const Gram& g, const Mat& J, const Form& omega, const Form& psiP, const Form& psiM,
                  double gamma = 0.0, double tol = 1e-8);

/// Standard structure on R^6 with basis (e1,e2,e3,Je1,Je2,Je3) and
/// psi rotated by the phase: psi+^gamma = cos(gamma) psi+ - sin(gamma) psi-.
Su3Point canonical_su3(double gamma = 0.0);

/// Largest deviation among the wedge/interior identities of the structure.
double identity_residual(const Su3Point& s);
/// Largest deviation in *(*(mu^psi+)^psi+) = -2 mu and the J-twisted analogues.
double star_identity_residual(const Su3Point& s, const Form& mu);

/// (J mu)(X) = -mu(J X).
Form J_one_form(const Su3Point& s, const Form& mu);

/// Vector metrically dual to psi+(x, y, .).
Vec triple_cross_su3(const Su3Point& s, const Vec& x, const Vec& y);

/// Columns e1,e2,e3,Je1,Je2,Je3: an orthonormal frame with psi+(e1,e2,e3)=1, psi-(e1,e2,e3)=0.
Mat adapted_frame(const Su3Point& s);

/// r(beta)(x,y) = 1/2 <x ⌟ beta, y ⌟ psi+>, as a matrix on the working basis.
/// beta is a rank-3 tensor beta(X,Y,Z) whose (Y,Z) slices are J-anti-invariant.
Mat r_map(const Tensor& nabla_omega, const Su3Point& s, double tol = 1e-8);
/// beta(X) = sum_k r(X, f_k) f_k ⌟ psi+ over an orthonormal frame f.
Tensor r_inverse(const Mat& r, const Su3Point& s);

struct RDecomposition {
    // Parts as matrices on the adapted frame; they sum to r expressed there.
    Mat w1p, w1m, w2p, w2m, w3, w4;
    std::map<std::string, double> norms; // keys W1p, W1m, W2p, W2m, W3, W4
};

/// Orthogonal six-way split of r: W1m = multiple of g, W1p = multiple of omega,
/// W2m = symmetric J-invariant traceless, W2p = skew J-invariant orthogonal to omega,
/// W3 = symmetric J-anti-invariant, W4 = skew J-anti-invariant.
RDecomposition decompose_r(const Mat& r, const Su3Point& s);

/// <r, omega> = 1/2 sum_ij r(f_i, f_j) omega(f_i, f_j) over an orthonormal frame.
double r_dot_omega(const Mat& r, const Su3Point& s);
double r_trace(const Mat& r, const Su3Point& s);

/// Coderivative of omega from r: d*omega(Z) = sum_kl psi+(Z, f_k, f_l) r(f_k, f_l).
Form codifferential_from_r(const Mat& r, const Su3Point& s);
/// theta6 = J d*omega.
Form theta6_from_r(const Mat& r, const Su3Point& s);
/// theta6 from d omega: d*omega = -*(omega ^ d omega).
Form theta6_from_domega(const Form& domega, const Su3Point& s);

struct EtaResult {
    Form eta;
    /// Largest disagreement among the four expressions for 6 eta + theta6.
    double residual;
};
/// 6 eta + theta6 = *(*dpsi+ ^ psi+) = *(*dpsi- ^ psi-) = -J*(*dpsi+ ^ psi-) = J*(*dpsi- ^ psi+).
EtaResult eta_from_dpsi(const Form& dpsiP, const Form& dpsiM, const Su3Point& s, const Form& theta6);

/// xi_X Y = -1/2 sum_jk r(X, f_j) psi+(f_j, f_k, Y) J f_k.
Vec xi_u3(const Mat& r, const Su3Point& s, const Vec& x, const Vec& y);
Mat xi_u3_matrix(const Mat& r, const Su3Point& s, const Vec& x);

/// r from exterior derivatives:
/// 2r(X,Y) = <JX ⌟ d omega, Y ⌟ psi-> + <(JX^Y) ⌟ (dpsi-)_xi - (X^Y) ⌟ (dpsi+)_xi, omega>,
/// (dpsi)_xi = dpsi + 3 eta ^ psi.
Mat r_from_exterior(const Form& domega, const Form& dpsiP, const Form& dpsiM, const Form& eta,
                    const Su3Point& s);

struct Su3TorsionReport {
    Mat r;
    Form theta6;
    Form eta;
    std::map<std::string, double> norms; // W1p, W1m, W2p, W2m, W3, W4, W5
    std::vector<std::string> label;      // e.g. {"W1-", "W3"}
    bool half_flat = false;
    bool kaehler = false;
    bool nearly_kaehler = false;
    bool almost_kaehler = false;
    bool locally_conformal_kaehler = false;
    double tol = 0.0;
};

struct ExteriorData {
    bool available = false;
    Form domega, dpsiP, dpsiM;
};

/// Label = components with norm >= tol; predicates from the exterior data when available.
/// Locally conformal Kaehler test: 2 d omega + theta6 ^ omega = 0 (theta6 = J d*omega, d* = -*d*).
Su3TorsionReport classify_su3(const Mat& r, const Form& theta6, const Form& eta, const Su3Point& s,
                              const ExteriorData& ext, double tol);

/// Display names for the seven torsion components in label order.
const std::vector<std::pair<std::string, std::string>>& component_names();

/// Nijenhuis tensor N_{ijk} = <N(d_i, d_j), d_k> of a coordinate J-field,
/// with J-field(u) acting on coordinate vectors and metric(u) the coordinate Gram.
using MatField = std::function<Mat(const Vec&)>;
Tensor nijenhuis(const MatField& J, const MatField& metric, const Vec& u, double h);

} // namespace spinsub::su3
