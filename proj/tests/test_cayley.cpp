#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spinsub/cayley.hpp"
#include "support.hpp"

#include <cmath>

using namespace spinsub;
using namespace spinsub::forms;
using namespace spinsub::cayley;
using namespace testsupport;

namespace {

Vec unit8(int i) {
    Vec v = Vec::Zero(8);
    v(i) = 1.0;
    return v;
}

// Independent construction of the fundamental form: evaluate each Z7 term
// as a determinant of the four selected coordinates.
double phi_oracle(int sigma, const Mat& v) {
    auto term = [&](std::array<int, 4> rows) {
        Mat m(4, 4);
        for (int r = 0; r < 4; ++r) m.row(r) = v.row(rows[r]);
        return m.determinant();
    };
    double s = 0.0;
    for (int i = 0; i < 7; ++i) {
        s += term({0, 1 + i % 7, 1 + (i + 1) % 7, 1 + (i + 3) % 7});
        s -= sigma * term({1 + (i + 2) % 7, 1 + (i + 4) % 7, 1 + (i + 5) % 7, 1 + (i + 6) % 7});
    }
    return s;
}

// Covariant derivative of phi for the conformal ambient by central
// differences plus Christoffel correction, expressed on the orthonormal frame.
Form fd_nabla_phi_frame(const AmbientStructure& amb, const Vec& p, int a, double h) {
    const Mat E = amb.frame(p);
    const Vec X = E.col(a);
    const Form dX = (amb.phi(p + h * X) - amb.phi(p - h * X)) * (1.0 / (2.0 * h));
    Mat G(8, 8);
    for (int k = 0; k < 8; ++k) G.col(k) = amb.christoffel(p, X, unit8(k));
    const Form nab = dX + derivation(G, amb.phi(p));
    return pullback(E, nab);
}

} // namespace

TEST_CASE("fundamental form coefficients") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        int nonzero = 0;
        for (std::size_t i = 0; i < c.phi.size(); ++i)
            if (c.phi[i] != 0.0) {
                ++nonzero;
                CHECK(std::abs(c.phi[i]) == 1.0);
            }
        CHECK(nonzero == 14);
        CHECK(c.phi.component({kE, idx(0), idx(1), idx(3)}) == 1.0);
        CHECK(c.phi.component({idx(2), idx(4), idx(5), idx(6)}) == -sigma);
        for (int t = 0; t < 20; ++t) {
            Mat v = random_mat(8, 4);
            CHECK(c.phi.evaluate(v) == doctest::Approx(phi_oracle(sigma, v)).epsilon(1e-12));
        }
        const Gram id = Gram::identity(8);
        CHECK(inner(c.phi, c.phi, id) == doctest::Approx(14.0));
        CHECK((wedge(c.phi, c.phi) - 14.0 * sigma * volume(id, Orientation(1))).max_abs() < 1e-12);
        CHECK((hodge(c.phi, id, Orientation(1)) - sigma * c.phi).max_abs() < 1e-12);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                CHECK(metric_from_phi(c.phi, id, Orientation(1), unit8(a), unit8(b)) ==
                      doctest::Approx(a == b ? 1.0 : 0.0));
    }
}

TEST_CASE("interior of e with the fundamental form") {
    const CayleyForm c = cayley_form(1);
    Form expected(8, 3);
    for (int i = 0; i < 7; ++i) expected += Form::basis(8, {idx(i), idx(i + 1), idx(i + 3)});
    CHECK((interior(unit8(kE), c.phi) - expected).max_abs() < 1e-15);
}

TEST_CASE("Cayley 4-plane") {
    for (int sigma : {1, -1}) {
        Mat L = Mat::Zero(8, 4);
        const int cols[4] = {idx(2), idx(4), idx(5), idx(6)};
        for (int k = 0; k < 4; ++k) L(cols[k], k) = 1.0;
        const Form r = pullback(L, cayley_form(sigma).phi);
        CHECK(r[0] == doctest::Approx(-sigma));
    }
}

TEST_CASE("triple cross product") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        CHECK((triple_cross(c, unit8(kE), unit8(idx(0)), unit8(idx(1))) - unit8(idx(3))).norm() < 1e-15);
        for (int t = 0; t < 1000; ++t) {
            Mat v = random_mat(8, 4);
            const Vec P = triple_cross(c, v.col(0), v.col(1), v.col(2));
            CHECK(P.dot(v.col(3)) == doctest::Approx(phi_oracle(sigma, v)).epsilon(1e-11));
            if (t < 50) {
                CHECK(std::abs(P.dot(v.col(0))) < 1e-12);
                CHECK(triple_cross(c, v.col(0), v.col(0), v.col(1)).norm() < 1e-14);
                Eigen::HouseholderQR<Mat> qr(v.leftCols(3));
                Mat q = qr.householderQ() * Mat::Identity(8, 3);
                CHECK(triple_cross(c, q.col(0), q.col(1), q.col(2)).norm() == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("metric recovery on a conformal Cayley form") {
    const double f = 0.37;
    const Gram g(std::exp(2 * f) * Mat::Identity(8, 8));
    const Form phi = std::exp(4 * f) * cayley_form(1).phi;
    const Vec x = random_vec(8), y = random_vec(8);
    CHECK(metric_from_phi(phi, g, Orientation(1), x, y) ==
          doctest::Approx(std::exp(2 * f) * x.dot(y)).epsilon(1e-12));
}

TEST_CASE("spin(7) splitting") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        const auto betas = beta_basis(sigma);
        const Gram id = Gram::identity(8);
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j)
                CHECK(inner(betas[i], betas[j], id) == doctest::Approx(i == j ? 4.0 : 0.0));
            CHECK((spin7_operator(betas[i], c) + 3.0 * betas[i]).max_abs() < 1e-12);
        }
        // eigenspace dimensions via the operator matrix on the 28 basis 2-forms
        Mat M(28, 28);
        for (int k = 0; k < 28; ++k) {
            Form e(8, 2);
            e[k] = 1.0;
            const Form s = spin7_operator(e, c);
            for (int r = 0; r < 28; ++r) M(r, k) = s[r];
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        int plus = 0, minus = 0;
        for (int k = 0; k < 28; ++k) {
            if (std::abs(es.eigenvalues()(k) - 1.0) < 1e-10) ++plus;
            if (std::abs(es.eigenvalues()(k) + 3.0) < 1e-10) ++minus;
        }
        CHECK(plus == 21);
        CHECK(minus == 7);
        // the beta span is the whole -3 eigenspace
        Mat B(28, 7);
        for (int i = 0; i < 7; ++i)
            for (int r = 0; r < 28; ++r) B(r, i) = betas[i][r];
        CHECK(Eigen::FullPivLU<Mat>(B).rank() == 7);

        for (int t = 0; t < 50; ++t) {
            const Form psi = random_form(8, 2);
            const auto sp = spin7_split(psi, c);
            CHECK((sp.psi21 + sp.psi7 - psi).max_abs() < 1e-12);
            CHECK((spin7_operator(sp.psi21, c) - sp.psi21).max_abs() < 1e-12);
            CHECK((spin7_operator(sp.psi7, c) + 3.0 * sp.psi7).max_abs() < 1e-12);
            CHECK((spin7_split(sp.psi7, c).psi7 - sp.psi7).max_abs() < 1e-12);
            CHECK(spin7_split(sp.psi21, c).psi7.max_abs() < 1e-12);
            for (int i = 0; i < 7; ++i) CHECK(std::abs(inner(sp.psi21, betas[i], id)) < 1e-12);
        }
    }
}

TEST_CASE("Lee form and rbar of a conformal ambient") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        for (int t = 0; t < 10; ++t) {
            const Form theta = Form::one_form(random_vec(8));
            const Form dphi = wedge(theta, c.phi);
            CHECK((lee_form8(c.phi, dphi, Gram::identity(8), Orientation(1)) - theta).max_abs() < 1e-12);
            const RbarTensor a = rbar_from_dphi(c, dphi, theta);
            const RbarTensor b = rbar_conformal(c, theta);
            CHECK((a.values - b.values).max_abs() < 1e-12);
            CHECK(a.spin7_residual(c) < 1e-12);
            CHECK((a.trace_lee() - theta).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("rbar of a generic intrinsic torsion round-trips through dphi") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        for (int t = 0; t < 5; ++t) {
            const RbarTensor r = rbar_from_coefficients(sigma, random_mat(8, 7));
            CHECK(r.spin7_residual(c) < 1e-12);
            Form dphi(8, 5);
            for (int k = 0; k < 8; ++k) dphi += wedge(Form::basis(8, {k}), nabla_phi(r, c, unit8(k)));
            const Form theta = lee_form8(c.phi, dphi, Gram::identity(8), Orientation(1));
            CHECK((theta - r.trace_lee()).max_abs() < 1e-12);
            const RbarTensor back = rbar_from_dphi(c, dphi, theta);
            CHECK((back.values - r.values).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("xi formulas agree") {
    for (int sigma : {1, -1}) {
        const CayleyForm c = cayley_form(sigma);
        const RbarTensor r = rbar_from_coefficients(sigma, random_mat(8, 7));
        for (int t = 0; t < 20; ++t) {
            const Vec x = random_vec(8), y = random_vec(8), z = random_vec(8);
            const Vec a = xi_spin7(r, x, y);
            CHECK((a - xi_spin7_cross(r, c, x, y)).norm() < 1e-12);
            CHECK(a.dot(z) == doctest::Approx(-xi_spin7(r, x, z).dot(y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("conformal ambient") {
    Vec grad = Vec::Zero(8);
    grad(idx(0)) = 0.1;
    for (int sigma : {1, -1}) {
        const AmbientStructure amb = AmbientStructure::conformal_linear(sigma, grad);
        for (int t = 0; t < 20; ++t) {
            const Vec p = random_vec(8);
            const Gram g = amb.gram(p);
            const Form theta = lee_form8(amb.phi(p), amb.dphi(p), g, Orientation(1));
            CHECK((theta - amb.theta8(p)).max_abs() < 1e-10);
            CHECK(std::abs(theta[idx(0)] - 0.4) < 1e-10);
            const auto fc = fernandez_class(amb.phi(p), amb.dphi(p), theta, g, 1e-6);
            CHECK(fc.cls == FernandezClass::W2);
            CHECK(fc.w2_residual < 1e-10);
            // frame data agrees with the dphi route
            const RbarTensor r = amb.rbar_frame(p);
            const RbarTensor r2 = rbar_from_dphi(amb.phi0(), amb.dphi_frame(p), amb.theta8_frame(p));
            CHECK((r.values - r2.values).max_abs() < 1e-12);
            // nabla phi = -xi phi by finite differences
            for (int a = 0; a < 8; ++a) {
                const Form fd = fd_nabla_phi_frame(amb, p, a, 1e-4);
                const Form ex = nabla_phi(r, amb.phi0(), unit8(a));
                CHECK((fd - ex).max_abs() < 1e-6);
            }
        }
    }
}

TEST_CASE("rotating ambient") {
    auto skew = [](double s) {
        const Mat m = random_mat(8, 8);
        return Mat(s * (m - m.transpose()));
    };
    for (int sigma : {1, -1}) {
        std::vector<Mat> k;
        for (int i = 0; i < 8; ++i) k.push_back(skew(0.15));
        const AmbientStructure amb = AmbientStructure::rotating(sigma, skew(0.1), k);
        for (int t = 0; t < 3; ++t) {
            const Vec p = 0.5 * random_vec(8);
            const Mat E = amb.frame(p);
            CHECK((E.transpose() * E - Mat::Identity(8, 8)).norm() < 1e-12);
            CHECK(std::abs(E.determinant() - 1.0) < 1e-12);
            CHECK((pullback(E, amb.phi(p)) - amb.phi0().phi).max_abs() < 1e-12);
            const RbarTensor r = amb.rbar_frame(p);
            CHECK(r.spin7_residual(amb.phi0()) < 1e-8);
            CHECK((r.trace_lee() - amb.theta8_frame(p)).max_abs() < 1e-8);
            const auto fc = fernandez_class(amb.phi(p), amb.dphi(p), amb.theta8(p), amb.gram(p), 1e-6);
            CHECK(fc.cls == FernandezClass::W);
            for (int a = 0; a < 8; ++a) {
                const Form fd = fd_nabla_phi_frame(amb, p, a, 1e-4);
                const Form ex = nabla_phi(r, amb.phi0(), unit8(a));
                CHECK((fd - ex).max_abs() < 1e-6);
            }
        }
    }
}

TEST_CASE("Fernandez classes") {
    const CayleyForm c = cayley_form(1);
    const Gram id = Gram::identity(8);
    CHECK(fernandez_class(c.phi, Form(8, 5), Form(8, 1), id, 1e-8).cls == FernandezClass::W0);
    const Form dphi = wedge(beta_basis(1)[1], Form::basis(8, {idx(2)}));
    const Form dphi5 = wedge(dphi, Form::basis(8, {idx(4), idx(5)}) + Form::basis(8, {kE, idx(6)}));
    const Form theta = lee_form8(c.phi, dphi5, id, Orientation(1));
    CHECK(fernandez_class(c.phi, dphi5, theta, id, 1e-8).cls == FernandezClass::W);
    // balanced synthetic torsion
    Mat a = random_mat(8, 7);
    RbarTensor r = rbar_from_coefficients(1, a);
    const RbarTensor r2 = rbar_conformal(c, r.trace_lee());
    r.values -= r2.values;
    CHECK(r.trace_lee().max_abs() < 1e-12);
    const AmbientStructure syn = AmbientStructure::synthetic(1, r);
    const Vec p = Vec::Zero(8);
    CHECK(fernandez_class(syn.phi(p), syn.dphi(p), syn.theta8(p), id, 1e-8).cls == FernandezClass::W1);
    CHECK(lee_form8(syn.phi(p), syn.dphi(p), id, Orientation(1)).max_abs() < 1e-12);
    CHECK(AmbientStructure::flat(1).theta8(p).max_abs() == 0.0);
}

TEST_CASE("invalid sigma") { CHECK_THROWS_AS(cayley_form(0), AlgebraError); }
