#include "spinsub/forms.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>

namespace spinsub::forms {

namespace {

int popcount(std::uint32_t m) { return std::popcount(m); }

// Sign of the permutation that sorts the concatenation (A, B) of two
// disjoint ascending index sets.
int merge_sign(std::uint16_t a, std::uint16_t b) {
    int inversions = 0;
    for (int i = 0; i < kMaxDim; ++i) {
        if (a & (1u << i)) {
            // elements of b smaller than i
            inversions += popcount(b & ((1u << i) - 1u));
        }
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

double det_small(const Mat& m) {
    switch (m.rows()) {
    case 0:
        return 1.0;
    case 1:
        return m(0, 0);
    case 2:
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
        return m.determinant();
    }
}

Mat submatrix(const Mat& m, std::uint16_t rows, std::uint16_t cols) {
    const auto r = mask_indices(rows);
    const auto c = mask_indices(cols);
    Mat out(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
    return out;
}

Mat rows_of(const Mat& m, std::uint16_t rows) {
    const auto r = mask_indices(rows);
    Mat out(r.size(), m.cols());
    for (std::size_t i = 0; i < r.size(); ++i) out.row(i) = m.row(r[i]);
    return out;
}

void require(bool cond, const char* what) {
    if (!cond) throw AlgebraError(what);
}

} // namespace

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<int> mask_indices(std::uint16_t mask) {
    std::vector<int> out;
    for (int i = 0; i < 16; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

const MultiIndexTable& MultiIndexTable::get(int dim, int degree) {
    require(dim >= 0 && dim <= kMaxDim, "form dimension out of range");
    require(degree >= 0 && degree <= dim, "form degree out of range");
    static std::array<std::array<MultiIndexTable, kMaxDim + 1>, kMaxDim + 1> tables;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int n = 0; n <= kMaxDim; ++n) {
            for (int p = 0; p <= n; ++p) {
                auto& t = tables[n][p];
                t.dim = n;
                t.degree = p;
                t.position.assign(1u << n, -1);
                // Lexicographic order of sorted index tuples.
                std::vector<std::vector<int>> combos;
                std::vector<int> cur;
                std::function<void(int)> rec = [&](int start) {
                    if (static_cast<int>(cur.size()) == p) {
                        combos.push_back(cur);
                        return;
                    }
                    for (int i = start; i < n; ++i) {
                        cur.push_back(i);
                        rec(i + 1);
                        cur.pop_back();
                    }
                };
                rec(0);
                for (const auto& c : combos) {
                    std::uint16_t m = 0;
                    for (int i : c) m |= static_cast<std::uint16_t>(1u << i);
                    t.position[m] = static_cast<std::int16_t>(t.masks.size());
                    t.masks.push_back(m);
                }
            }
        }
    });
    return tables[dim][degree];
}

// ---------------------------------------------------------------- Form

Form::Form(int dim, int degree) : dim_(dim), degree_(degree) {
    require(dim >= 1 && dim <= kMaxDim, "form dimension must be in 1..8");
    require(degree >= 0 && degree <= dim, "form degree must be in 0..dim");
    coeffs_.assign(binomial(dim, degree), 0.0);
}

Form Form::basis(int dim, std::initializer_list<int> indices, double coeff) {
    return basis(dim, std::span<const int>(indices.begin(), indices.size()), coeff);
}

Form Form::basis(int dim, std::span<const int> indices, double coeff) {
    Form f(dim, static_cast<int>(indices.size()));
    std::vector<int> idx(indices.begin(), indices.end());
    for (int i : idx) require(i >= 0 && i < dim, "basis index out of range");
    // sort with parity tracking
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
    std::uint16_t m = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0 && idx[i] == idx[i - 1]) return f; // repeated index: zero form
        m |= static_cast<std::uint16_t>(1u << idx[i]);
    }
    const auto& t = MultiIndexTable::get(dim, f.degree());
    f.coeffs_[t.position[m]] = sign * coeff;
    return f;
}

Form Form::one_form(const Vec& components) {
    Form f(static_cast<int>(components.size()), 1);
    for (int i = 0; i < components.size(); ++i) f.coeffs_[i] = components(i);
    return f;
}

Form Form::scalar(int dim, double value) {
    Form f(dim, 0);
    f.coeffs_[0] = value;
    return f;
}

double Form::component(std::initializer_list<int> indices) const {
    return component(std::span<const int>(indices.begin(), indices.size()));
}

double Form::component(std::span<const int> indices) const {
    require(static_cast<int>(indices.size()) == degree_, "component arity mismatch");
    std::vector<int> idx(indices.begin(), indices.end());
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
    std::uint16_t m = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        require(idx[i] >= 0 && idx[i] < dim_, "component index out of range");
        if (i > 0 && idx[i] == idx[i - 1]) return 0.0;
        m |= static_cast<std::uint16_t>(1u << idx[i]);
    }
    const auto& t = MultiIndexTable::get(dim_, degree_);
    return sign * coeffs_[t.position[m]];
}

double Form::evaluate(const Mat& vectors) const {
    require(vectors.rows() == dim_ && vectors.cols() == degree_, "evaluate: shape mismatch");
    if (degree_ == 0) return coeffs_[0];
    const auto& t = MultiIndexTable::get(dim_, degree_);
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_[k] == 0.0) continue;
        s += coeffs_[k] * det_small(rows_of(vectors, t.masks[k]));
    }
    return s;
}

Vec Form::as_vector() const {
    require(degree_ == 1, "as_vector: not a 1-form");
    Vec v(dim_);
    for (int i = 0; i < dim_; ++i) v(i) = coeffs_[i];
    return v;
}

double Form::max_abs() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double Form::coeff_norm() const {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return std::sqrt(s);
}

Form& Form::operator+=(const Form& other) {
    require(dim_ == other.dim_ && degree_ == other.degree_, "form sum: shape mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

Form& Form::operator-=(const Form& other) {
    require(dim_ == other.dim_ && degree_ == other.degree_, "form difference: shape mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

Form& Form::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

// ---------------------------------------------------------------- Gram

Gram::Gram(Mat matrix) : matrix_(std::move(matrix)) {
    require(matrix_.rows() == matrix_.cols() && matrix_.rows() >= 1, "Gram must be square");
    require((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() <=
                1e-12 * (1.0 + matrix_.cwiseAbs().maxCoeff()),
            "Gram must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix_);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    require(es.eigenvalues().minCoeff() > 1e-12 * top && top > 0.0,
            "Gram must be positive definite");
    inverse_ = matrix_.inverse();
    sqrt_det_ = std::sqrt(es.eigenvalues().prod());
    identity_ = (matrix_ - Mat::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff() == 0.0;
}

Gram Gram::identity(int dim) { return Gram(Mat::Identity(dim, dim)); }

Vec Gram::raise(const Form& one_form) const {
    require(one_form.degree() == 1 && one_form.dim() == dim(), "raise: need a 1-form");
    return inverse_ * one_form.as_vector();
}

Form Gram::lower(const Vec& v) const {
    require(v.size() == dim(), "lower: dimension mismatch");
    return Form::one_form(matrix_ * v);
}

Orientation::Orientation(int s) : sign(s) {
    require(s == 1 || s == -1, "orientation sign must be +1 or -1");
}

// ---------------------------------------------------------------- operations

Form wedge(const Form& a, const Form& b) {
    require(a.dim() == b.dim(), "wedge: dimension mismatch");
    require(a.degree() + b.degree() <= a.dim(), "wedge: degree overflow");
    const int n = a.dim();
    Form out(n, a.degree() + b.degree());
    const auto& ta = MultiIndexTable::get(n, a.degree());
    const auto& tb = MultiIndexTable::get(n, b.degree());
    const auto& tc = MultiIndexTable::get(n, out.degree());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        const auto ma = ta.masks[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0.0) continue;
            const auto mb = tb.masks[j];
            if (ma & mb) continue;
            out[tc.position[ma | mb]] += merge_sign(ma, mb) * a[i] * b[j];
        }
    }
    return out;
}

Form interior(const Vec& x, const Form& a) {
    require(x.size() == a.dim(), "interior: dimension mismatch");
    require(a.degree() >= 1, "interior: degree-0 form");
    const int n = a.dim();
    Form out(n, a.degree() - 1);
    const auto& ta = MultiIndexTable::get(n, a.degree());
    const auto& tc = MultiIndexTable::get(n, out.degree());
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) continue;
        const auto m = ta.masks[k];
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            if (!(m & (1u << i))) continue;
            const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
            out[tc.position[m & ~(1u << i)]] += sign * x(i) * a[k];
            ++pos;
        }
    }
    return out;
}

double inner(const Form& a, const Form& b, const Gram& g) {
    require(a.dim() == b.dim() && a.dim() == g.dim(), "inner: dimension mismatch");
    require(a.degree() == b.degree(), "inner: degree mismatch");
    if (g.is_identity()) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    const auto& t = MultiIndexTable::get(a.dim(), a.degree());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0.0) continue;
            s += a[i] * b[j] * det_small(submatrix(g.inverse(), t.masks[i], t.masks[j]));
        }
    }
    return s;
}

double norm(const Form& a, const Gram& g) { return std::sqrt(std::max(0.0, inner(a, a, g))); }

Form hodge(const Form& a, const Gram& g, Orientation o) {
    require(a.dim() == g.dim(), "hodge: dimension mismatch");
    const int n = a.dim();
    const int p = a.degree();
    const auto& t = MultiIndexTable::get(n, p);
    const auto& tc = MultiIndexTable::get(n, n - p);
    const std::uint16_t full = static_cast<std::uint16_t>((1u << n) - 1u);

    // raised components a^I
    std::vector<double> raised(a.size(), 0.0);
    if (g.is_identity()) {
        for (std::size_t i = 0; i < a.size(); ++i) raised[i] = a[i];
    } else {
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                if (a[j] != 0.0)
                    raised[i] += a[j] * det_small(submatrix(g.inverse(), t.masks[i], t.masks[j]));
    }
    Form out(n, n - p);
    const double scale = o.sign * g.sqrt_det();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (raised[i] == 0.0) continue;
        const auto m = t.masks[i];
        const auto mc = static_cast<std::uint16_t>(full & ~m);
        out[tc.position[mc]] += scale * merge_sign(m, mc) * raised[i];
    }
    return out;
}

Form volume(const Gram& g, Orientation o) {
    Form v(g.dim(), g.dim());
    v[0] = o.sign * g.sqrt_det();
    return v;
}

Form pullback(const Mat& L, const Form& a) {
    require(L.rows() == a.dim(), "pullback: shape mismatch");
    require(L.cols() >= 1 && L.cols() <= kMaxDim, "pullback: bad target dimension");
    const int m = static_cast<int>(L.cols());
    require(a.degree() <= m, "pullback: degree exceeds target dimension");
    Form out(m, a.degree());
    if (a.degree() == 0) {
        out[0] = a[0];
        return out;
    }
    const auto& ta = MultiIndexTable::get(a.dim(), a.degree());
    const auto& tb = MultiIndexTable::get(m, a.degree());
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) continue;
        const Mat rows = rows_of(L, ta.masks[k]);
        for (std::size_t j = 0; j < out.size(); ++j) {
            const auto cols = mask_indices(tb.masks[j]);
            Mat sub(rows.rows(), cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c) sub.col(c) = rows.col(cols[c]);
            out[j] += a[k] * det_small(sub);
        }
    }
    return out;
}

Form fd_exterior_derivative(const FormField& field, const Vec& u, double h, FdOrder order) {
    require(h > 0.0, "fd_exterior_derivative: step must be positive");
    const int n = static_cast<int>(u.size());
    Form centre = field(u);
    require(centre.dim() == n, "fd_exterior_derivative: field dimension differs from domain");
    require(centre.degree() < n, "fd_exterior_derivative: top-degree field");
    Form out(n, centre.degree() + 1);
    for (int j = 0; j < n; ++j) {
        Vec e = Vec::Zero(n);
        e(j) = h;
        Form deriv;
        if (order == FdOrder::Second) {
            deriv = (field(u + e) - field(u - e)) * (1.0 / (2.0 * h));
        } else {
            deriv = (field(u - 2.0 * e) - field(u + 2.0 * e) + 8.0 * (field(u + e) - field(u - e))) *
                    (1.0 / (12.0 * h));
        }
        out += wedge(Form::basis(n, {j}), deriv);
    }
    return out;
}

// ---------------------------------------------------------------- Tensor

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
    require(dim >= 1 && dim <= kMaxDim && rank >= 0 && rank <= 6, "tensor shape out of range");
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
    values_.assign(n, 0.0);
}

std::size_t Tensor::offset(std::span<const int> idx) const {
    require(static_cast<int>(idx.size()) == rank_, "tensor index arity mismatch");
    std::size_t off = 0;
    for (int i : idx) {
        require(i >= 0 && i < dim_, "tensor index out of range");
        off = off * dim_ + static_cast<std::size_t>(i);
    }
    return off;
}

double Tensor::operator()(std::initializer_list<int> idx) const {
    return (*this)(std::span<const int>(idx.begin(), idx.size()));
}

double& Tensor::operator()(std::initializer_list<int> idx) {
    return (*this)(std::span<const int>(idx.begin(), idx.size()));
}

namespace {

// Decode a flat offset into an index tuple.
void decode(std::size_t off, int dim, int rank, std::vector<int>& idx) {
    idx.resize(rank);
    for (int s = rank - 1; s >= 0; --s) {
        idx[s] = static_cast<int>(off % dim);
        off /= dim;
    }
}

} // namespace

Tensor Tensor::from_form(const Form& a) {
    Tensor t(a.dim(), a.degree());
    std::vector<int> idx;
    for (std::size_t k = 0; k < t.values_.size(); ++k) {
        decode(k, t.dim_, t.rank_, idx);
        t.values_[k] = a.component(idx);
    }
    return t;
}

Tensor Tensor::from_matrix(const Mat& m) {
    require(m.rows() == m.cols(), "from_matrix: square matrix required");
    Tensor t(static_cast<int>(m.rows()), 2);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t({i, j}) = m(i, j);
    return t;
}

Form Tensor::to_form() const {
    Form out(dim_, rank_);
    const auto& t = MultiIndexTable::get(dim_, rank_);
    std::vector<int> perm(rank_);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto idx = mask_indices(t.masks[k]);
        std::iota(perm.begin(), perm.end(), 0);
        double s = 0.0;
        int count = 0;
        do {
            int inv = 0;
            for (int i = 0; i < rank_; ++i)
                for (int j = i + 1; j < rank_; ++j)
                    if (perm[i] > perm[j]) ++inv;
            std::vector<int> p(rank_);
            for (int i = 0; i < rank_; ++i) p[i] = idx[perm[i]];
            s += ((inv % 2 == 0) ? 1.0 : -1.0) * (*this)(p);
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out[k] = s / count;
    }
    return out;
}

Mat Tensor::to_matrix() const {
    require(rank_ == 2, "to_matrix: rank-2 tensor required");
    Mat m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = (*this)({i, j});
    return m;
}

double Tensor::evaluate(const Mat& vectors) const {
    require(vectors.rows() == dim_ && vectors.cols() == rank_, "tensor evaluate: shape mismatch");
    double s = 0.0;
    std::vector<int> idx;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] == 0.0) continue;
        decode(k, dim_, rank_, idx);
        double prod = values_[k];
        for (int i = 0; i < rank_; ++i) prod *= vectors(idx[i], i);
        s += prod;
    }
    return s;
}

Tensor Tensor::pullback(const Mat& A) const {
    require(A.rows() == dim_, "tensor pullback: shape mismatch");
    const int m = static_cast<int>(A.cols());
    Tensor cur = *this;
    // contract one slot at a time
    for (int slot = 0; slot < rank_; ++slot) {
        // slots before `slot` already have dimension m
        std::vector<int> shapeIn(rank_), shapeOut(rank_);
        for (int s = 0; s < rank_; ++s) {
            shapeIn[s] = (s < slot) ? m : dim_;
            shapeOut[s] = (s <= slot) ? m : dim_;
        }
        std::size_t sizeOut = 1;
        for (int s : shapeOut) sizeOut *= static_cast<std::size_t>(s);
        std::vector<double> out(sizeOut, 0.0);
        std::vector<int> idx(rank_);
        for (std::size_t k = 0; k < sizeOut; ++k) {
            std::size_t off = k;
            for (int s = rank_ - 1; s >= 0; --s) {
                idx[s] = static_cast<int>(off % shapeOut[s]);
                off /= shapeOut[s];
            }
            double acc = 0.0;
            for (int a = 0; a < dim_; ++a) {
                const double w = A(a, idx[slot]);
                if (w == 0.0) continue;
                std::size_t offIn = 0;
                for (int s = 0; s < rank_; ++s) {
                    const int v = (s == slot) ? a : idx[s];
                    offIn = offIn * shapeIn[s] + static_cast<std::size_t>(v);
                }
                acc += w * cur.values_[offIn];
            }
            out[k] = acc;
        }
        cur.values_ = std::move(out);
    }
    Tensor res(m, rank_);
    res.values_ = std::move(cur.values_);
    return res;
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double Tensor::frobenius() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

Tensor& Tensor::operator+=(const Tensor& o) {
    require(dim_ == o.dim_ && rank_ == o.rank_, "tensor sum: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
    require(dim_ == o.dim_ && rank_ == o.rank_, "tensor difference: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

Tensor apply_J_slot(const Tensor& B, const Mat& J, int slot) {
    require(J.rows() == B.dim() && J.cols() == B.dim(), "apply_J_slot: J shape mismatch");
    if (slot < 0 || slot >= B.rank()) throw AlgebraError("apply_J_slot: slot out of range");
    Tensor out(B.dim(), B.rank());
    std::vector<int> idx, src;
    const auto vals = B.values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
        decode(k, B.dim(), B.rank(), idx);
        src = idx;
        double acc = 0.0;
        for (int a = 0; a < B.dim(); ++a) {
            const double w = J(a, idx[slot]);
            if (w == 0.0) continue;
            src[slot] = a;
            acc += w * B(src);
        }
        out.values()[k] = -acc;
    }
    return out;
}

Tensor apply_J_all(const Tensor& B, const Mat& J) {
    // J_(1) ... J_(s) B = (-1)^s B(JX1..JXs)
    Tensor out = B;
    for (int s = 0; s < B.rank(); ++s) out = apply_J_slot(out, J, s);
    return out;
}

Form apply_J_all(const Form& a, const Mat& J) {
    return apply_J_all(Tensor::from_form(a), J).to_form();
}

} // namespace spinsub::forms
