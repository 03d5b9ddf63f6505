#pragma once

// Dense exterior algebra on R^n, n <= 8.
//
// A p-form is stored by its coefficients on the lexicographically ordered
// basis e^{i1} ^ ... ^ e^{ip}, i1 < ... < ip. Multi-indices are handled as
// bitmasks internally; the public surface uses 0-based index lists.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace spinsub {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr int kMaxDim = 8;

/// Raised for shape, degree and dimension violations in the algebra layer.
class AlgebraError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace forms {

/// Lexicographic table of the p-subsets of {0..n-1}.
struct MultiIndexTable {
    int dim = 0;
    int degree = 0;
    std::vector<std::uint16_t> masks;   // position -> bitmask
    std::vector<std::int16_t> position; // bitmask -> position, -1 if not of size p

    static const MultiIndexTable& get(int dim, int degree);
};

int binomial(int n, int k);

/// Indices set in a mask, ascending.
std::vector<int> mask_indices(std::uint16_t mask);

class Form {
public:
    Form() = default;
    Form(int dim, int degree);

    /// coeff * e^{i1} ^ ... ^ e^{ip}; indices may be unsorted (sign applied).
    static Form basis(int dim, std::initializer_list<int> indices, double coeff = 1.0);
    static Form basis(int dim, std::span<const int> indices, double coeff = 1.0);
    /// One-form with the given covector components.
    static Form one_form(const Vec& components);
    static Form scalar(int dim, double value);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return coeffs_.size(); }

    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }
    double operator[](std::size_t i) const { return coeffs_[i]; }
    double& operator[](std::size_t i) { return coeffs_[i]; }

    /// Antisymmetric component a(e_{i1}, ..., e_{ip}) for arbitrary indices.
    double component(std::span<const int> indices) const;
    double component(std::initializer_list<int> indices) const;

    /// a(v_1, ..., v_p), vectors given as the columns of `vectors`.
    double evaluate(const Mat& vectors) const;

    /// Components of a 1-form as a vector.
    Vec as_vector() const;

    /// Largest absolute coefficient.
    double max_abs() const;
    /// Euclidean norm of the coefficient array (the identity-Gram norm).
    double coeff_norm() const;
    bool is_zero(double tol) const { return max_abs() <= tol; }

    Form& operator+=(const Form& other);
    Form& operator-=(const Form& other);
    Form& operator*=(double s);

    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(double s, Form a) { return a *= s; }
    friend Form operator*(Form a, double s) { return a *= s; }
    friend Form operator-(Form a) { return a *= -1.0; }

private:
    int dim_ = 0;
    int degree_ = 0;
    std::vector<double> coeffs_;
};

/// Symmetric positive definite matrix of inner products of the working basis.
class Gram {
public:
    explicit Gram(Mat matrix);
    static Gram identity(int dim);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Mat& matrix() const { return matrix_; }
    const Mat& inverse() const { return inverse_; }
    double sqrt_det() const { return sqrt_det_; }
    bool is_identity() const { return identity_; }

    double dot(const Vec& x, const Vec& y) const { return x.dot(matrix_ * y); }
    /// Vector metrically dual to a 1-form.
    Vec raise(const Form& one_form) const;
    /// 1-form metrically dual to a vector.
    Form lower(const Vec& v) const;

private:
    Mat matrix_;
    Mat inverse_;
    double sqrt_det_ = 1.0;
    bool identity_ = false;
};

/// Sign relative to the lexicographic top form.
struct Orientation {
    int sign = 1;
    explicit Orientation(int s = 1);
};

Form wedge(const Form& a, const Form& b);
/// x ⌟ a.
Form interior(const Vec& x, const Form& a);
double inner(const Form& a, const Form& b, const Gram& g);
double norm(const Form& a, const Gram& g);
Form hodge(const Form& a, const Gram& g, Orientation o);
/// Riemannian volume form sign * sqrt(det g) e^0 ^ ... ^ e^{n-1}.
Form volume(const Gram& g, Orientation o);
/// L^* a for a linear map L: R^m -> R^n given as an n x m matrix.
Form pullback(const Mat& L, const Form& a);

enum class FdOrder { Second, Fourth };

using FormField = std::function<Form(const Vec&)>;

/// Exterior derivative at u of a form field on a coordinate domain, by
/// central differences of the coefficient functions.
Form fd_exterior_derivative(const FormField& field, const Vec& u, double h,
                            FdOrder order = FdOrder::Second);

/// Dense covariant tensor of rank s on R^n, storage index i1*n^{s-1} + ... + is.
class Tensor {
public:
    Tensor() = default;
    Tensor(int dim, int rank);

    static Tensor from_form(const Form& a);
    static Tensor from_matrix(const Mat& m);

    int dim() const { return dim_; }
    int rank() const { return rank_; }

    double operator()(std::span<const int> idx) const { return values_[offset(idx)]; }
    double& operator()(std::span<const int> idx) { return values_[offset(idx)]; }
    double operator()(std::initializer_list<int> idx) const;
    double& operator()(std::initializer_list<int> idx);

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Alternating part as a form: coefficient at I is T(i1..ip) after
    /// antisymmetrization (equals T(I) for alternating T).
    Form to_form() const;
    Mat to_matrix() const;

    /// Component of T(X1, .., Xs) for vectors given as columns.
    double evaluate(const Mat& vectors) const;
    /// T(A x1, ..., A xs): change of basis with the columns of A.
    Tensor pullback(const Mat& A) const;

    double max_abs() const;
    double frobenius() const;

    Tensor& operator+=(const Tensor& o);
    Tensor& operator-=(const Tensor& o);
    Tensor& operator*=(double s);
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(double s, Tensor a) { return a *= s; }

private:
    std::size_t offset(std::span<const int> idx) const;

    int dim_ = 0;
    int rank_ = 0;
    std::vector<double> values_;
};

/// J_(j) B (.., X_j, ..) = -B(.., J X_j, ..), slot 0-based; J maps the
/// working basis by columns (J e_i = sum_k J(k,i) e_k).
Tensor apply_J_slot(const Tensor& B, const Mat& J, int slot);
/// J B (X1..Xs) = (-1)^s B(J X1, .., J Xs).
Tensor apply_J_all(const Tensor& B, const Mat& J);
Form apply_J_all(const Form& a, const Mat& J);

} // namespace forms
} // namespace spinsub
