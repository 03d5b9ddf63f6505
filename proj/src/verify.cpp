#include "spinsub/lab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace spinsub::lab {

namespace {

using forms::Form;
using forms::Gram;
using forms::Orientation;
using forms::wedge;

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    Vec vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform();
        return v;
    }
    Mat mat(int r, int c) {
        Mat m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = uniform();
        return m;
    }
    Form form(int n, int p) {
        Form f(n, p);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = uniform();
        return f;
    }

private:
    std::mt19937_64 gen_;
};

Vec unit(int n, int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
}

double graded_algebra(Sampler& rs) {
    double worst = 0.0;
    const Gram g = Gram::identity(8);
    const Orientation o(1);
    for (int t = 0; t < 30; ++t) {
        const int p = t % 5, q = (t / 5) % 4;
        const Form a = rs.form(8, p), b = rs.form(8, q), c = rs.form(8, 1);
        const double sgn = (p * q) % 2 == 0 ? 1.0 : -1.0;
        worst = std::max(worst, (wedge(a, b) - sgn * wedge(b, a)).max_abs());
        worst = std::max(worst, (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs());
        const double s2 = (p * (8 - p)) % 2 == 0 ? 1.0 : -1.0;
        worst = std::max(worst, (forms::hodge(forms::hodge(a, g, o), g, o) - s2 * a).max_abs());
        const Form b2 = rs.form(8, p);
        const Form top = wedge(a, forms::hodge(b2, g, o));
        worst = std::max(worst, (top - forms::inner(a, b2, g) * forms::volume(g, o)).max_abs());
    }
    return worst;
}

double fundamental_form() {
    double worst = 0.0;
    const Gram g = Gram::identity(8);
    const Orientation o(1);
    for (int sigma : {1, -1}) {
        const cayley::CayleyForm c = cayley::cayley_form(sigma);
        worst = std::max(worst, (wedge(c.phi, c.phi) - 14.0 * sigma * forms::volume(g, o)).max_abs());
        worst = std::max(worst, (forms::hodge(c.phi, g, o) - sigma * c.phi).max_abs());
    }
    return worst;
}

double beta_basis() {
    double worst = 0.0;
    const Gram g = Gram::identity(8);
    for (int sigma : {1, -1}) {
        const cayley::CayleyForm c = cayley::cayley_form(sigma);
        const auto betas = cayley::beta_basis(sigma);
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j)
                worst = std::max(worst, std::abs(forms::inner(betas[i], betas[j], g) - (i == j ? 4.0 : 0.0)));
            worst = std::max(worst, (cayley::spin7_operator(betas[i], c) + 3.0 * betas[i]).max_abs());
        }
    }
    return worst;
}

// Distance of each eigenvalue of psi -> *(psi ^ phi) from {1, -3}, plus the
// multiplicity defects against 21 and 7.
double spin7_eigenspaces(Sampler& rs) {
    double worst = 0.0;
    for (int sigma : {1, -1}) {
        const cayley::CayleyForm c = cayley::cayley_form(sigma);
        Mat M(28, 28);
        for (int k = 0; k < 28; ++k) {
            Form e(8, 2);
            e[k] = 1.0;
            const Form s = cayley::spin7_operator(e, c);
            for (int r = 0; r < 28; ++r) M(r, k) = s[r];
        }
        const Eigen::SelfAdjointEigenSolver<Mat> es(M);
        int plus = 0, minus = 0;
        for (int k = 0; k < 28; ++k) {
            const double ev = es.eigenvalues()(k);
            const double dp = std::abs(ev - 1.0), dm = std::abs(ev + 3.0);
            worst = std::max(worst, std::min(dp, dm));
            (dp < dm ? plus : minus)++;
        }
        worst = std::max(worst, static_cast<double>(std::abs(plus - 21) + std::abs(minus - 7)));
        for (int t = 0; t < 20; ++t) {
            const Form psi = rs.form(8, 2);
            const auto sp = cayley::spin7_split(psi, c);
            worst = std::max(worst, (sp.psi21 + sp.psi7 - psi).max_abs());
            worst = std::max(worst, (cayley::spin7_operator(sp.psi7, c) + 3.0 * sp.psi7).max_abs());
        }
    }
    return worst;
}

double xi_dual(Sampler& rs) {
    double worst = 0.0;
    for (int sigma : {1, -1}) {
        const cayley::CayleyForm c = cayley::cayley_form(sigma);
        for (int t = 0; t < 10; ++t) {
            const cayley::RbarTensor rb = cayley::rbar_from_coefficients(sigma, rs.mat(8, 7));
            const Vec x = rs.vec(8), y = rs.vec(8);
            worst = std::max(worst,
                             (cayley::xi_spin7(rb, x, y) - cayley::xi_spin7_cross(rb, c, x, y)).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

double su3_identities(Sampler& rs) {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const su3::Su3Point s = su3::canonical_su3(rs.uniform(-std::numbers::pi, std::numbers::pi));
        worst = std::max(worst, su3::identity_residual(s));
        const Gram& g = s.g;
        worst = std::max(worst, (wedge(s.omega, wedge(s.omega, s.omega)) - 6.0 * forms::volume(g, s.orientation))
                                    .max_abs());
        worst = std::max(worst, (wedge(s.psiP, s.psiM) + 4.0 * forms::volume(g, s.orientation)).max_abs());
        worst = std::max(worst, wedge(s.psiP, s.omega).max_abs());
        worst = std::max(worst, wedge(s.psiM, s.omega).max_abs());
        for (int k = 0; k < 10; ++k) {
            const Vec x = rs.vec(6);
            worst = std::max(worst, (forms::interior(x, s.psiP) - forms::interior(s.J * x, s.psiM)).max_abs());
            worst = std::max(worst, su3::star_identity_residual(s, Form::one_form(rs.vec(6))));
        }
    }
    return worst;
}

double r_round_trip(Sampler& rs) {
    double worst = 0.0;
    const su3::Su3Point s = su3::canonical_su3(0.3);
    for (int t = 0; t < 100; ++t) {
        const Mat r = rs.mat(6, 6);
        const forms::Tensor beta = su3::r_inverse(r, s);
        worst = std::max(worst, (su3::r_map(beta, s) - r).cwiseAbs().maxCoeff());
        worst = std::max(worst, (su3::r_inverse(su3::r_map(beta, s), s) - beta).max_abs());
    }
    return worst;
}

double r_decomposition(Sampler& rs) {
    double worst = 0.0;
    const su3::Su3Point s = su3::canonical_su3(-0.7);
    const Mat F = su3::adapted_frame(s);
    for (int t = 0; t < 20; ++t) {
        const Mat r = rs.mat(6, 6);
        const su3::RDecomposition d = su3::decompose_r(r, s);
        const std::vector<Mat> parts = {d.w1p, d.w1m, d.w2p, d.w2m, d.w3, d.w4};
        Mat sum = Mat::Zero(6, 6);
        for (const Mat& p : parts) sum += p;
        worst = std::max(worst, (sum - F.transpose() * r * F).cwiseAbs().maxCoeff());
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j)
                worst = std::max(worst, std::abs((parts[i].array() * parts[j].array()).sum()));
    }
    return worst;
}

double induced_identities(Sampler& rs) {
    double worst = 0.0;
    ExampleSpec spec;
    spec.name = "graph";
    spec.seed = 7;
    for (int sigma : {1, -1}) {
        spec.sigma = sigma;
        spec.gamma = rs.uniform(-3.0, 3.0);
        const Example ex = build_example(spec);
        for (int t = 0; t < 5; ++t) {
            const Vec u = ex.chart.domain().at(0.5 * (rs.vec(6) + Vec::Ones(6)));
            const subman::PointGeometry geo = subman::frames_at(ex.chart, ex.ambient, u);
            const su3::Su3Point s = subman::induced_su3(geo, ex.ambient, spec.gamma);
            worst = std::max(worst, su3::identity_residual(s));
        }
    }
    return worst;
}

double conformal_nabla_phi(Sampler& rs) {
    double worst = 0.0;
    Vec grad = Vec::Zero(8);
    grad(cayley::idx(0)) = 0.1;
    const double h = 1e-4;
    for (int sigma : {1, -1}) {
        const AmbientStructure amb = AmbientStructure::conformal_linear(sigma, grad);
        for (int t = 0; t < 3; ++t) {
            const Vec p = rs.vec(8);
            const Mat E = amb.frame(p);
            const cayley::RbarTensor rb = amb.rbar_frame(p);
            for (int a = 0; a < 8; ++a) {
                const Vec X = E.col(a);
                const Form dX = (amb.phi(p + h * X) - amb.phi(p - h * X)) * (1.0 / (2.0 * h));
                Mat G(8, 8);
                for (int k = 0; k < 8; ++k) G.col(k) = amb.christoffel(p, X, unit(8, k));
                const Form fd = forms::pullback(E, dX + cayley::derivation(G, amb.phi(p)));
                worst = std::max(worst, (fd - cayley::nabla_phi(rb, amb.phi0(), unit(8, a))).max_abs());
            }
        }
    }
    return worst;
}

// For constant phase g, dPsi- = -(cos g + sigma sin g) omega^omega, and
// Psi+ at g equals Psi- at g + pi/2, so dPsi+ = (sin g - sigma cos g) omega^omega.
double s3xs3_dpsi(std::uint64_t seed) {
    double worst = 0.0;
    for (int sigma : {1, -1})
        for (double gamma : {0.0, 0.3, std::numbers::pi / 4}) {
            ExampleSpec spec;
            spec.name = "s3xs3";
            spec.sigma = sigma;
            spec.gamma = gamma;
            spec.grid = 2;
            spec.seed = seed;
            const Example ex = build_example(spec);
            for (const Vec& u : sample_points(ex)) {
                const subman::ExteriorResult e = subman::torsion_via_exterior(ex.chart, ex.ambient, u, ex.gamma);
                const subman::PointGeometry geo = subman::frames_at(ex.chart, ex.ambient, u);
                const su3::Su3Point s = subman::induced_su3(geo, ex.ambient, gamma);
                const Form ww = wedge(s.omega, s.omega);
                const double cp = std::sin(gamma) - sigma * std::cos(gamma);
                const double cm = -(std::cos(gamma) + sigma * std::sin(gamma));
                worst = std::max(worst, (e.ext.dpsiP - cp * ww).max_abs());
                worst = std::max(worst, (e.ext.dpsiM - cm * ww).max_abs());
            }
        }
    return worst;
}

// The W1 part lambda Psi+ + mu Psi- of nabla omega, with lambda = -(cos g + sigma sin g)/2 and
// mu = -(sin g - sigma cos g)/2, gives N = 4 lambda Psi- - 4 mu Psi+.
double s3xs3_nijenhuis(std::uint64_t seed) {
    double worst = 0.0;
    for (int sigma : {1, -1})
        for (double gamma : {0.0, std::numbers::pi / 4}) {
            ExampleSpec spec;
            spec.name = "s3xs3";
            spec.sigma = sigma;
            spec.gamma = gamma;
            spec.grid = 2;
            spec.seed = seed;
            const Example ex = build_example(spec);
            for (const Vec& u : sample_points(ex)) {
                const NijenhuisResult n = nijenhuis_at(ex, u);
                const subman::PointGeometry geo = subman::frames_at(ex.chart, ex.ambient, u);
                const su3::Su3Point s = subman::induced_su3(geo, ex.ambient, gamma);
                const double lambda = -0.5 * (std::cos(gamma) + sigma * std::sin(gamma));
                const double mu = -0.5 * (std::sin(gamma) - sigma * std::cos(gamma));
                worst = std::max(worst, (n.form - (4.0 * lambda) * s.psiM + (4.0 * mu) * s.psiP).max_abs());
                worst = std::max(worst, n.skew_residual);
            }
        }
    return worst;
}

struct ExampleSweep {
    double dual_path = 0.0;
    double mismatches = 0.0;
};

ExampleSweep example_sweep(std::uint64_t seed) {
    ExampleSweep out;
    for (const auto& [name, description] : example_catalog())
        for (int sigma : {1, -1}) {
            ExampleSpec spec;
            spec.name = name;
            spec.sigma = sigma;
            spec.gamma = 0.4;
            spec.grid = 2;
            spec.seed = seed;
            const Report rep = run_report(spec);
            for (const char* key : {"r_dual_path", "theta6_dual_path", "eta_dual_path"})
                out.dual_path = std::max(out.dual_path, rep.max_residuals.at(key));
            out.mismatches += rep.table_mismatches;
        }
    return out;
}

double helicoid_closed(std::uint64_t seed) {
    ExampleSpec spec;
    spec.name = "helicoid_r3_q4";
    spec.grid = 3;
    spec.seed = seed;
    const Report rep = run_report(spec);
    return std::max(rep.max_residuals.at("closedness_1"), rep.max_residuals.at("closedness_2"));
}

// Mean curvature of minimal_r4_q4, or 1 when the normal connection degenerates.
double minimal_surface(std::uint64_t seed) {
    ExampleSpec spec;
    spec.name = "minimal_r4_q4";
    spec.grid = 3;
    spec.seed = seed;
    const Example ex = build_example(spec);
    double worst = 0.0;
    for (const Vec& u : sample_points(ex)) {
        const SurfaceCheck sc = surface_check(ex, u);
        worst = std::max(worst, std::abs(sc.h1) + std::abs(sc.h2));
        if (sc.a_norm < 1e-3) worst = std::max(worst, 1.0);
    }
    return worst;
}

} // namespace

bool VerifyReport::all_pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
}

VerifyReport run_verify(const VerifyOptions& opt) {
    if (!(opt.tol > 0.0)) throw SpecError("tolerance must be positive");
    VerifyReport rep;
    rep.options = opt;
    Sampler rs(opt.seed);
    auto add = [&](std::string name, bool algebraic, double residual, double fdTol) {
        const double tol = algebraic ? opt.tol : fdTol;
        rep.suites.push_back({std::move(name), algebraic ? "algebraic" : "finite-difference", residual, tol,
                              residual <= tol});
    };
    add("forms.graded_algebra", true, graded_algebra(rs), 0.0);
    add("cayley.fundamental_form", true, fundamental_form(), 0.0);
    add("cayley.beta_basis", true, beta_basis(), 0.0);
    add("cayley.spin7_eigenspaces", true, spin7_eigenspaces(rs), 0.0);
    add("cayley.xi_dual", true, xi_dual(rs), 0.0);
    add("su3.identities", true, su3_identities(rs), 0.0);
    add("su3.r_round_trip", true, r_round_trip(rs), 0.0);
    add("su3.r_decomposition", true, r_decomposition(rs), 0.0);
    add("subman.induced_identities", true, induced_identities(rs), 0.0);
    add("cayley.conformal_nabla_phi", false, conformal_nabla_phi(rs), 1e-5);
    add("lab.s3xs3_dpsi", false, s3xs3_dpsi(opt.seed), 1e-6);
    add("lab.s3xs3_nijenhuis", false, s3xs3_nijenhuis(opt.seed), 1e-5);
    const ExampleSweep sweep = example_sweep(opt.seed);
    add("lab.dual_path", false, sweep.dual_path, 1e-5);
    add("lab.table_rows", false, sweep.mismatches, 0.0);
    add("lab.helicoid_closed", false, helicoid_closed(opt.seed), 1e-8);
    add("lab.minimal_surface", false, minimal_surface(opt.seed), 1e-8);
    return rep;
}

std::string to_json(const VerifyReport& report, int indent) {
    using nlohmann::json;
    json suites = json::array();
    for (const SuiteResult& s : report.suites)
        suites.push_back({{"name", s.name},
                          {"kind", s.kind},
                          {"residual", s.residual},
                          {"tolerance", s.tolerance},
                          {"pass", s.pass}});
    json doc = {{"tol", report.options.tol},
                {"seed", report.options.seed},
                {"suites", suites},
                {"all_pass", report.all_pass()}};
    return doc.dump(indent);
}

} // namespace spinsub::lab
