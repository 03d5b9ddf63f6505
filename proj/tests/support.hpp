#pragma once

// Shared helpers for the test binaries: seeded generators of random
// vectors, forms and metrics, plus brute-force oracles.

#include "spinsub/forms.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace testsupport {

using spinsub::Mat;
using spinsub::Vec;
using spinsub::forms::Form;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611ULL);
    return gen;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec random_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform();
    return v;
}

inline Mat random_mat(int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = uniform();
    return m;
}

inline Form random_form(int n, int p) {
    Form f(n, p);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = uniform();
    return f;
}

/// Random symmetric positive definite matrix with eigenvalues in [0.5, 2].
inline Mat random_spd(int n) {
    Mat a = random_mat(n, n);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(0.5, 2.0);
    return q * d.asDiagonal() * q.transpose();
}

/// Random orthogonal matrix.
inline Mat random_orthogonal(int n) {
    Eigen::HouseholderQR<Mat> qr(random_mat(n, n));
    return qr.householderQ();
}

inline int perm_sign(const std::vector<int>& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

/// (a ^ b)(v_1..v_{p+q}) by the shuffle-free permutation sum
/// 1/(p! q!) sum_sigma sgn(sigma) a(v_sigma(1..p)) b(v_sigma(p+1..p+q)).
inline double brute_wedge_eval(const Form& a, const Form& b, const Mat& v) {
    const int p = a.degree();
    const int q = b.degree();
    std::vector<int> perm(p + q);
    std::iota(perm.begin(), perm.end(), 0);
    double s = 0.0;
    double fact = 1.0;
    for (int i = 2; i <= p; ++i) fact *= i;
    for (int i = 2; i <= q; ++i) fact *= i;
    do {
        Mat va(v.rows(), p), vb(v.rows(), q);
        for (int i = 0; i < p; ++i) va.col(i) = v.col(perm[i]);
        for (int i = 0; i < q; ++i) vb.col(i) = v.col(perm[p + i]);
        s += perm_sign(perm) * a.evaluate(va) * b.evaluate(vb);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return s / fact;
}

/// Euclidean inner product (1/p!) sum over all index tuples a_I b_I.
inline double brute_inner_euclid(const Form& a, const Form& b) {
    const int n = a.dim();
    const int p = a.degree();
    std::vector<int> idx(p, 0);
    double s = 0.0;
    double fact = 1.0;
    for (int i = 2; i <= p; ++i) fact *= i;
    while (true) {
        s += a.component(idx) * b.component(idx);
        int k = p - 1;
        while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
        if (k < 0) break;
    }
    return s / fact;
}

} // namespace testsupport
