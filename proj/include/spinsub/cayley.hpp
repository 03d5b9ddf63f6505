#pragma once

// Spin(7) linear algebra on R^8 and the Spin(7) ambients used by the
// submanifold engine.
//
// Working basis: index 0 is e, indices 1..7 are e_0..e_6.

#include "spinsub/forms.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace spinsub::cayley {

using forms::Form;
using forms::Gram;
using forms::Orientation;
using forms::Tensor;

/// Internal index of e_i (i taken mod 7); e itself is index 0.
constexpr int idx(int i) { return 1 + ((i % 7) + 7) % 7; }
constexpr int kE = 0;

struct CayleyForm {
    int sigma = 1;
    Form phi;
};

/// The fundamental 4-form of a Cayley frame for the given sigma.
CayleyForm cayley_form(int sigma);

/// Triple cross product: <P(x,y,z), w>_g = phi(x,y,z,w).
Vec triple_cross(const Form& phi, const Gram& g, const Vec& x, const Vec& y, const Vec& z);
Vec triple_cross(const CayleyForm& phi, const Vec& x, const Vec& y, const Vec& z);

/// -(1/7) * ((x ⌟ phi) ^ *(y ⌟ phi)) with the star of the supplied Gram.
double metric_from_phi(const Form& phi, const Gram& g, Orientation o, const Vec& x, const Vec& y);

/// beta_0 .. beta_6 spanning spin(7)^perp.
std::array<Form, 7> beta_basis(int sigma);

/// The linear map psi -> *(psi ^ phi) on 2-forms of an orthonormal Cayley frame.
Form spin7_operator(const Form& psi, const CayleyForm& phi);

struct Spin7Split {
    Form psi21; // in spin(7), eigenvalue +1
    Form psi7;  // in spin(7)^perp, eigenvalue -3
};
Spin7Split spin7_split(const Form& psi, const CayleyForm& phi);

/// theta^8 = -(1/7) *(*dphi ^ phi).
Form lee_form8(const Form& phi, const Form& dphi, const Gram& g, Orientation o);

/// Rank-3 tensor rbar(X,Y,Z) on an orthonormal Cayley frame,
/// antisymmetric in (Y,Z), each slice in spin(7)^perp.
struct RbarTensor {
    Tensor values{8, 3};

    double operator()(int x, int y, int z) const { return values({x, y, z}); }
    /// 2-form rbar(X, ., .).
    Form slice(const Vec& x) const;
    /// Largest spin(7)-component norm over the eight slices.
    double spin7_residual(const CayleyForm& phi) const;
    /// (4/7) sum_a rbar(e_a, e_a, .).
    Form trace_lee() const;
};

/// rbar from dphi via
///   4 rbar = 2<X ⌟ dphi, Y^(Z⌟phi) - Z^(Y⌟phi)> - 7 (X^theta8)(Y,Z) - 7 sigma phi(theta8, X, Y, Z),
/// all data expressed on an orthonormal Cayley frame.
RbarTensor rbar_from_dphi(const CayleyForm& phi, const Form& dphi, const Form& theta8);

/// 4 rbar = sum_i e_i (x) e_i ^ theta8 + sigma theta8 ⌟ phi.
RbarTensor rbar_conformal(const CayleyForm& phi, const Form& theta8);

/// rbar = sum a_ij e_i (x) beta_j for an 8 x 7 coefficient matrix.
RbarTensor rbar_from_coefficients(int sigma, const Mat& a);

/// xi_X Y with <xi_X Y, Z> = rbar(X,Y,Z)/4.
Vec xi_spin7(const RbarTensor& rbar, const Vec& x, const Vec& y);
/// xi_X Y = -(sigma/24) sum_ij rbar(X,e_i,e_j) P(e_i,e_j,Y).
Vec xi_spin7_cross(const RbarTensor& rbar, const CayleyForm& phi, const Vec& x, const Vec& y);
/// Matrix of Y -> xi_X Y.
Mat xi_matrix(const RbarTensor& rbar, const Vec& x);

/// Action of an endomorphism A on a covariant form:
/// (A.a)(Y_1..Y_p) = -sum_k a(Y_1, .., A Y_k, .., Y_p).
Form derivation(const Mat& A, const Form& a);

/// nabla_X phi = -xi_X . phi on the orthonormal Cayley frame.
Form nabla_phi(const RbarTensor& rbar, const CayleyForm& phi, const Vec& x);

enum class FernandezClass { W0, W1, W2, W };
std::string to_string(FernandezClass c);

struct FernandezResult {
    FernandezClass cls;
    double dphi_norm;
    double theta_norm;
    double w2_residual; // |dphi - theta8 ^ phi|
};

FernandezResult fernandez_class(const Form& phi, const Form& dphi, const Form& theta8, const Gram& g,
                                double tol);

/// A Spin(7)-structure on (an open set of) R^8 with closed-form data.
class AmbientStructure {
public:
    enum class Kind { Flat, Conformal, Synthetic, Rotating };
    using ScalarField = std::function<double(const Vec&)>;
    using GradientField = std::function<Vec(const Vec&)>;

    static AmbientStructure flat(int sigma);
    /// Metric e^{2f} I and phi = e^{4f} phi_0.
    static AmbientStructure conformal(int sigma, ScalarField f, GradientField df);
    /// Conformal ambient with f(p) = c . p.
    static AmbientStructure conformal_linear(int sigma, const Vec& c);
    /// Flat metric and phi_0 carrying an injected constant rbar (pointwise algebra only).
    static AmbientStructure synthetic(int sigma, const RbarTensor& rbar);
    /// Flat metric with the Cayley frame rotated by A(p) = (I - K(p))^{-1}(I + K(p)),
    /// K(p) = K0 + sum_i p_i K_i skew: a structure of general type with dphi by finite differences.
    static AmbientStructure rotating(int sigma, const Mat& k0, const std::vector<Mat>& k);

    Kind kind() const { return kind_; }
    int sigma() const { return phi0_.sigma; }
    const CayleyForm& phi0() const { return phi0_; }
    /// False when dphi is not the exterior derivative of phi(p).
    bool differentiable() const { return kind_ != Kind::Synthetic; }

    double conformal_factor(const Vec& p) const;
    Vec conformal_gradient(const Vec& p) const;

    // Coordinate-basis data.
    Form phi(const Vec& p) const;
    Form dphi(const Vec& p) const;
    Gram gram(const Vec& p) const;
    Form theta8(const Vec& p) const;
    /// Levi-Civita Christoffel contraction Gamma(X, Y) in coordinates.
    Vec christoffel(const Vec& p, const Vec& x, const Vec& y) const;

    /// Columns: g-orthonormal Cayley frame at p.
    Mat frame(const Vec& p) const;
    // Data on that frame.
    Form dphi_frame(const Vec& p) const;
    Form theta8_frame(const Vec& p) const;
    RbarTensor rbar_frame(const Vec& p) const;

private:
    Kind kind_ = Kind::Flat;
    CayleyForm phi0_;
    ScalarField f_;
    GradientField df_;
    RbarTensor injected_;
    Form injected_dphi_;
    Mat k0_;
    std::vector<Mat> k_;
    Mat rotation(const Vec& p) const;
};

} // namespace spinsub::cayley
