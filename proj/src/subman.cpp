#include "spinsub/subman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace spinsub::subman {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw AlgebraError(what);
}

Vec unit(int n, int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
}

// Fourth-order central difference of a vector-valued function along e_i.
template <class F>
auto central4(const F& f, const Vec& u, int i, double h) {
    using Value = std::decay_t<decltype(f(u))>;
    const Vec e = h * unit(static_cast<int>(u.size()), i);
    const Value a = f(u - 2 * e), b = f(u - e), c = f(u + e), d = f(u + 2 * e);
    return Value(((a - d) + 8.0 * (c - b)) / (12.0 * h));
}

Form matrix_to_two_form(const Mat& m) {
    Form w(static_cast<int>(m.rows()), 2);
    const auto& t = forms::MultiIndexTable::get(static_cast<int>(m.rows()), 2);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const auto ij = forms::mask_indices(t.masks[k]);
        w[k] = 0.5 * (m(ij[0], ij[1]) - m(ij[1], ij[0]));
    }
    return w;
}

// d/dt of pullback(L + t M, a) at t = 0.
Form pullback_variation(const Mat& L, const Mat& M, const Form& a) {
    const int m = static_cast<int>(L.cols());
    const int p = a.degree();
    Form out(m, p);
    const auto& t = forms::MultiIndexTable::get(m, p);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto idx = forms::mask_indices(t.masks[k]);
        Mat cols(L.rows(), p);
        for (int s = 0; s < p; ++s) cols.col(s) = L.col(idx[s]);
        double v = 0.0;
        for (int s = 0; s < p; ++s) {
            Mat c = cols;
            c.col(s) = M.col(idx[s]);
            v += a.evaluate(c);
        }
        out[k] = v;
    }
    return out;
}

double frob(const Mat& m) { return m.norm(); }

} // namespace

bool Box::contains(const Vec& u) const {
    if (u.size() != lo.size()) return false;
    for (int i = 0; i < u.size(); ++i)
        if (u(i) < lo(i) || u(i) > hi(i)) return false;
    return true;
}

Vec Box::at(const Vec& t) const { return lo + (hi - lo).cwiseProduct(t); }

double Polynomial::value(const Vec& u) const {
    double v = c0 + linear.dot(u) + 0.5 * u.dot(quadratic * u);
    for (const auto& c : cubic) v += c.c * u(c.i) * u(c.j) * u(c.k);
    return v;
}

Vec Polynomial::gradient(const Vec& u) const {
    Vec g = linear + 0.5 * (quadratic + quadratic.transpose()) * u;
    for (const auto& c : cubic) {
        g(c.i) += c.c * u(c.j) * u(c.k);
        g(c.j) += c.c * u(c.i) * u(c.k);
        g(c.k) += c.c * u(c.i) * u(c.j);
    }
    return g;
}

Mat Polynomial::hessian(const Vec& u) const {
    Mat h = 0.5 * (quadratic + quadratic.transpose());
    for (const auto& c : cubic) {
        const int a[3] = {c.i, c.j, c.k};
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                if (x == y) continue;
                const int z = 3 - x - y;
                h(a[x], a[y]) += c.c * u(a[z]);
            }
    }
    return h;
}

Chart::Chart(std::string name, Box domain, MapFn map, Jet1Fn jet1, Jet2Fn jet2, double h)
    : name_(std::move(name)), domain_(std::move(domain)), map_(std::move(map)), jet1_(std::move(jet1)),
      jet2_(std::move(jet2)), h_(h) {
    require(static_cast<bool>(map_), "chart needs a map");
    require(h_ > 0.0, "chart step must be positive");
}

Chart Chart::graph(const Polynomial& g1, const Polynomial& g2, Box domain) {
    auto map = [g1, g2](const Vec& u) {
        Vec p(8);
        p(0) = g1.value(u);
        p(1) = g2.value(u);
        p.tail(6) = u;
        return p;
    };
    auto jet1 = [g1, g2](const Vec& u) {
        Mat j = Mat::Zero(8, 6);
        j.row(0) = g1.gradient(u).transpose();
        j.row(1) = g2.gradient(u).transpose();
        j.bottomRows(6).setIdentity();
        return j;
    };
    auto jet2 = [g1, g2](const Vec& u) {
        const Mat a = g1.hessian(u), b = g2.hessian(u);
        std::vector<Mat> out(6, Mat::Zero(8, 6));
        for (int i = 0; i < 6; ++i) {
            out[i].row(0) = a.row(i);
            out[i].row(1) = b.row(i);
        }
        return out;
    };
    return Chart("graph", std::move(domain), map, jet1, jet2);
}

Vec Chart::point(const Vec& u) const {
    require(u.size() == 6, "chart points have 6 coordinates");
    return map_(u);
}

Mat Chart::jacobian(const Vec& u) const {
    if (jet1_) return jet1_(u);
    Mat j(8, 6);
    for (int i = 0; i < 6; ++i) j.col(i) = central4([&](const Vec& v) { return map_(v); }, u, i, h_);
    return j;
}

std::vector<Mat> Chart::hessian(const Vec& u) const {
    if (jet2_) return jet2_(u);
    std::vector<Mat> out(6, Mat(8, 6));
    if (jet1_) {
        for (int i = 0; i < 6; ++i) out[i] = central4([&](const Vec& v) { return Mat(jet1_(v)); }, u, i, h_);
        return out;
    }
    const Vec p0 = map_(u);
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
            const Vec ei = h_ * unit(6, i), ej = h_ * unit(6, j);
            Vec d;
            if (i == j)
                d = (map_(u + ei) - 2.0 * p0 + map_(u - ei)) / (h_ * h_);
            else
                d = (map_(u + ei + ej) - map_(u + ei - ej) - map_(u - ei + ej) + map_(u - ei - ej)) /
                    (4.0 * h_ * h_);
            out[i].col(j) = d;
            out[j].col(i) = d;
        }
    return out;
}

GammaField GammaField::constant(double g) {
    return {[g](const Vec&) { return g; }, [](const Vec&) { return Vec(Vec::Zero(6)); }};
}

Vec GammaField::grad(const Vec& u, double h) const {
    if (gradient) return gradient(u);
    Vec g(6);
    for (int i = 0; i < 6; ++i) {
        const Vec e = h * unit(6, i);
        g(i) = (value(u - 2 * e) - value(u + 2 * e) + 8.0 * (value(u + e) - value(u - e))) / (12.0 * h);
    }
    return g;
}

Form PointGeometry::to_frame(const Form& coordinate_form) const {
    return forms::pullback(R.inverse(), coordinate_form);
}

Form PointGeometry::to_coordinates(const Form& frame_form) const { return forms::pullback(R, frame_form); }

PointGeometry frames_at(const Chart& chart, const AmbientStructure& ambient, const Vec& u) {
    PointGeometry geo;
    geo.u = u;
    geo.p = chart.point(u);
    geo.jacobian = chart.jacobian(u);
    const Mat G = ambient.gram(geo.p).matrix();
    const double scale = geo.jacobian.cwiseAbs().maxCoeff();
    geo.T = Mat::Zero(8, 6);
    for (int i = 0; i < 6; ++i) {
        Vec v = geo.jacobian.col(i);
        for (int k = 0; k < i; ++k) v -= geo.T.col(k) * geo.T.col(k).dot(G * v);
        const double n = std::sqrt(v.dot(G * v));
        if (!(n > 1e-10 * (1.0 + scale))) throw AlgebraError("chart Jacobian is rank deficient");
        geo.T.col(i) = v / n;
    }
    geo.R = geo.T.transpose() * G * geo.jacobian;
    auto project = [&](Vec v) {
        for (int k = 0; k < 6; ++k) v -= geo.T.col(k) * geo.T.col(k).dot(G * v);
        return v;
    };
    int axis = 0;
    for (; axis < 8; ++axis) {
        const Vec a = unit(8, axis) / std::sqrt(G(axis, axis));
        const Vec v = project(a);
        const double n = std::sqrt(v.dot(G * v));
        if (n >= 1e-6) {
            geo.N1 = v / n;
            break;
        }
    }
    if (axis == 8) throw AlgebraError("no ambient axis has a usable normal projection");
    Vec best;
    double bestNorm = 0.0;
    for (int k = 0; k < 8; ++k) {
        Vec v = project(unit(8, k) / std::sqrt(G(k, k)));
        v -= geo.N1 * geo.N1.dot(G * v);
        const double n = std::sqrt(v.dot(G * v));
        if (n > bestNorm + 1e-12) {
            bestNorm = n;
            best = v / n;
        }
    }
    geo.N2 = best;
    Mat full(8, 8);
    full << geo.T, geo.N1, geo.N2;
    if (full.determinant() < 0.0) geo.N2 = -geo.N2;
    return geo;
}

PointGeometry fundamental_data(const Chart& chart, const AmbientStructure& ambient, const Vec& u,
                               const GammaField& gamma) {
    PointGeometry geo = frames_at(chart, ambient, u);
    const Mat G = ambient.gram(geo.p).matrix();
    const auto H = chart.hessian(u);
    const Mat Rinv = geo.R.inverse();
    Mat a1(6, 6), a2(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const Vec nab = H[i].col(j) + ambient.christoffel(geo.p, geo.jacobian.col(i), geo.jacobian.col(j));
            a1(i, j) = geo.N1.dot(G * nab);
            a2(i, j) = geo.N2.dot(G * nab);
        }
    geo.alpha1 = Rinv.transpose() * (0.5 * (a1 + a1.transpose())) * Rinv;
    geo.alpha2 = Rinv.transpose() * (0.5 * (a2 + a2.transpose())) * Rinv;
    Vec ac(6);
    const double h = chart.step();
    for (int i = 0; i < 6; ++i) {
        const Vec dN1 = central4([&](const Vec& v) { return Vec(frames_at(chart, ambient, v).N1); }, u, i, h);
        const Vec nab = dN1 + ambient.christoffel(geo.p, geo.jacobian.col(i), geo.N1);
        ac(i) = geo.N2.dot(G * nab);
    }
    geo.a = Rinv.transpose() * ac;
    geo.h1 = geo.alpha1.trace() / 6.0;
    geo.h2 = geo.alpha2.trace() / 6.0;
    geo.gamma = gamma.at(u);
    geo.dgamma = Rinv.transpose() * gamma.grad(u, h);
    geo.has_fundamental = true;
    return geo;
}

FrameData frame_data(const PointGeometry& geo, const AmbientStructure& ambient) {
    const Mat Finv = ambient.frame(geo.p).inverse();
    return {Finv * geo.T, Finv * geo.N1, Finv * geo.N2, ambient.rbar_frame(geo.p), ambient.theta8_frame(geo.p),
            ambient.dphi_frame(geo.p)};
}

Su3Point induced_su3(const PointGeometry& geo, const AmbientStructure& ambient, double gamma) {
    const FrameData fd = frame_data(geo, ambient);
    const auto& phi = ambient.phi0();
    Mat J(6, 6);
    for (int i = 0; i < 6; ++i) J.col(i) = fd.T.transpose() * cayley::triple_cross(phi, fd.n1, fd.n2, fd.T.col(i));
    const Form omega = matrix_to_two_form(J);
    const Form a = forms::pullback(fd.T, forms::interior(fd.n1, phi.phi));
    const Form b = static_cast<double>(phi.sigma) * forms::pullback(fd.T, forms::interior(fd.n2, phi.phi));
    const double c = std::cos(gamma), s = std::sin(gamma);
    return su3::make_su3(Gram::identity(6), J, omega, c * a - s * b, s * a + c * b, gamma);
}

double rbar_eval(const cayley::RbarTensor& rbar, const Vec& x, const Vec& y, const Vec& z) {
    Mat cols(8, 3);
    cols << x, y, z;
    return rbar.values.evaluate(cols);
}

Form lie_restricted(const PointGeometry& geo, const AmbientStructure& ambient, int normal_index) {
    require(normal_index == 1 || normal_index == 2, "normal index must be 1 or 2");
    require(geo.has_fundamental, "lie_restricted needs the fundamental data");
    const FrameData fd = frame_data(geo, ambient);
    const auto& phi = ambient.phi0();
    const Vec& n = normal_index == 1 ? fd.n1 : fd.n2;
    const Mat& alpha = normal_index == 1 ? geo.alpha1 : geo.alpha2;
    const Vec& other = normal_index == 1 ? fd.n2 : fd.n1;
    const double sgn = normal_index == 1 ? 1.0 : -1.0;
    Mat M(8, 6);
    for (int i = 0; i < 6; ++i) M.col(i) = -fd.T * alpha.col(i) + sgn * geo.a(i) * other;
    return forms::pullback(fd.T, cayley::nabla_phi(fd.rbar, phi, n)) + pullback_variation(fd.T, M, phi.phi);
}

namespace {

// The extrinsic torsion formulas are written for the pair (rbar, theta8) with the
// opposite sign to the one produced by rbar_from_dphi and lee_form8.
cayley::RbarTensor extrinsic_rbar(const FrameData& fd) {
    cayley::RbarTensor rb = fd.rbar;
    for (double& v : rb.values.values()) v = -v;
    return rb;
}

} // namespace

TorsionResult torsion_via_rraa(const PointGeometry& geo, const AmbientStructure& ambient, double tol) {
    require(geo.has_fundamental, "torsion_via_rraa needs the fundamental data");
    TorsionResult out;
    const FrameData fd = frame_data(geo, ambient);
    const double sigma = ambient.sigma();
    const double c = std::cos(geo.gamma), s = std::sin(geo.gamma);
    out.su3 = induced_su3(geo, ambient, geo.gamma);
    const Su3Point& su = out.su3;
    const Mat& J = su.J;
    const cayley::RbarTensor rb = extrinsic_rbar(fd);
    // J_(2) alpha (X, Y) = -alpha(X, J Y)
    const Mat J2a1 = -geo.alpha1 * J, J2a2 = -geo.alpha2 * J;
    Mat r(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const Vec X = fd.T.col(i), Y = fd.T.col(j), JY = fd.T * J.col(j);
            const double t1 = sigma * rbar_eval(rb, X, JY, fd.n1) + sigma * J2a1(i, j) + geo.alpha2(i, j);
            const double t2 = sigma * rbar_eval(rb, X, Y, fd.n1) - sigma * geo.alpha1(i, j) + J2a2(i, j);
            r(i, j) = c * t1 - s * t2;
        }
    out.r = r;

    const Vec th8 = -fd.theta8.as_vector();
    Vec theta(6), etaRest(6), etaRest2(6);
    for (int i = 0; i < 6; ++i) {
        const Vec X = fd.T.col(i), JX = fd.T * J.col(i);
        theta(i) = 1.75 * th8.dot(X) + rbar_eval(rb, fd.n1, X, fd.n1) - sigma * rbar_eval(rb, fd.n2, JX, fd.n1) +
                   sigma * rbar_eval(rb, JX, fd.n2, fd.n1);
        etaRest(i) = -rbar_eval(rb, fd.n1, X, fd.n1) - sigma * rbar_eval(rb, JX, fd.n2, fd.n1);
        etaRest2(i) = sigma * rbar_eval(rb, fd.n2, JX, fd.n1) - sigma * rbar_eval(rb, JX, fd.n2, fd.n1);
    }
    out.theta6 = Form::one_form(theta);
    out.theta6_consistency = (su3::theta6_from_r(r, su) - out.theta6).max_abs();

    out.lie1 = lie_restricted(geo, ambient, 1);
    out.lie2 = lie_restricted(geo, ambient, 2);
    const Gram g6 = Gram::identity(6);
    const forms::Orientation o = su.orientation;
    auto st = [&](const Form& a) { return forms::hodge(a, g6, o); };
    const Form p1 = forms::pullback(fd.T, forms::interior(fd.n1, ambient.phi0().phi));
    const Form p2 = forms::pullback(fd.T, forms::interior(fd.n2, ambient.phi0().phi));
    const Form s11 = st(forms::wedge(st(out.lie1), p1));
    const Form s22 = st(forms::wedge(st(out.lie2), p2));
    const Form s12 = st(forms::wedge(st(out.lie1), p2));
    const Form s21 = st(forms::wedge(st(out.lie2), p1));
    const Form jdg = su3::J_one_form(su, Form::one_form(geo.dgamma));
    out.eta = (1.0 / 3.0) * (-1.0 * jdg + 0.5 * s11 + Form::one_form(etaRest));
    const Form eta2 = (1.0 / 3.0) * (-1.0 * jdg + 0.5 * s22 + Form::one_form(etaRest2));
    out.lie_star_residual = std::max({(eta2 - out.eta).max_abs(),
                                      (s11 + sigma * su3::J_one_form(su, s12)).max_abs(),
                                      (s22 - sigma * su3::J_one_form(su, s21)).max_abs()});

    const double trr = su3::r_trace(r, su), ro = su3::r_dot_omega(r, su);
    out.trace_residual_1 = std::abs(1.75 * sigma * th8.dot(fd.n1) -
                                    (sigma * rbar_eval(rb, fd.n2, fd.n2, fd.n1) + 6.0 * sigma * geo.h1 - s * trr +
                                     2.0 * c * ro));
    out.trace_residual_2 = std::abs(-1.75 * th8.dot(fd.n2) -
                                    (rbar_eval(rb, fd.n1, fd.n2, fd.n1) - 6.0 * geo.h2 + c * trr + 2.0 * s * ro));

    const double scale = 1.0 + r.norm() + geo.alpha1.norm() + geo.alpha2.norm() + th8.norm();
    if (std::max(out.trace_residual_1, out.trace_residual_2) > 1e-6 * scale)
        throw AlgebraError("trace identities violated: inconsistent extrinsic and ambient data");
    double total = r.norm() + forms::norm(out.eta, g6);
    out.report = su3::classify_su3(r, out.theta6, out.eta, su, su3::ExteriorData{}, tol * (1.0 + total));
    return out;
}

ExteriorResult torsion_via_exterior(const Chart& chart, const AmbientStructure& ambient, const Vec& u,
                                    const GammaField& gamma, double h) {
    struct Triple {
        Form w, p, m;
    };
    auto forms_at = [&](const Vec& v) {
        const PointGeometry g = frames_at(chart, ambient, v);
        const Su3Point s = induced_su3(g, ambient, gamma.at(v));
        return Triple{g.to_coordinates(s.omega), g.to_coordinates(s.psiP), g.to_coordinates(s.psiM)};
    };
    Form dw(6, 3), dp(6, 4), dm(6, 4);
    for (int i = 0; i < 6; ++i) {
        const Vec e = h * unit(6, i);
        const Triple a = forms_at(u - 2 * e), b = forms_at(u - e), c = forms_at(u + e), d = forms_at(u + 2 * e);
        const double k = 1.0 / (12.0 * h);
        const Form di = Form::basis(6, {i});
        dw += forms::wedge(di, k * ((a.w - d.w) + 8.0 * (c.w - b.w)));
        dp += forms::wedge(di, k * ((a.p - d.p) + 8.0 * (c.p - b.p)));
        dm += forms::wedge(di, k * ((a.m - d.m) + 8.0 * (c.m - b.m)));
    }
    const PointGeometry geo = frames_at(chart, ambient, u);
    const Su3Point s = induced_su3(geo, ambient, gamma.at(u));
    ExteriorResult out;
    out.ext = {true, geo.to_frame(dw), geo.to_frame(dp), geo.to_frame(dm)};
    out.theta6 = su3::theta6_from_domega(out.ext.domega, s);
    const su3::EtaResult e = su3::eta_from_dpsi(out.ext.dpsiP, out.ext.dpsiM, s, out.theta6);
    out.eta = e.eta;
    out.eta_residual = e.residual;
    out.r = su3::r_from_exterior(out.ext.domega, out.ext.dpsiP, out.ext.dpsiM, out.eta, s);
    return out;
}

Closedness closedness_check(const PointGeometry& geo, const AmbientStructure& ambient, double tol) {
    const FrameData fd = frame_data(geo, ambient);
    Closedness c;
    c.residual1 = (lie_restricted(geo, ambient, 1) - forms::pullback(fd.T, forms::interior(fd.n1, fd.dphi)))
                      .coeff_norm();
    c.residual2 = (lie_restricted(geo, ambient, 2) - forms::pullback(fd.T, forms::interior(fd.n2, fd.dphi)))
                      .coeff_norm();
    c.closed = c.residual1 < tol && c.residual2 < tol;
    return c;
}

std::string to_string(AmbientClass c) {
    switch (c) {
    case AmbientClass::Parallel:
        return "W0bar";
    case AmbientClass::Balanced:
        return "W1bar";
    case AmbientClass::LocallyConformalParallel:
        return "W2bar";
    case AmbientClass::LocallyConformalParallelTangent:
        return "W2bar-tangent";
    }
    return "?";
}

int TableMatch::mismatches() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const TableRow& r) { return !r.consistent(); }));
}

AmbientClass ambient_class(const PointGeometry& geo, const AmbientStructure& ambient, double tol) {
    const FrameData fd = frame_data(geo, ambient);
    const auto f = cayley::fernandez_class(ambient.phi0().phi, fd.dphi, fd.theta8, Gram::identity(8), tol);
    switch (f.cls) {
    case cayley::FernandezClass::W0:
        return AmbientClass::Parallel;
    case cayley::FernandezClass::W1:
        return AmbientClass::Balanced;
    case cayley::FernandezClass::W2: {
        const Vec th = fd.theta8.as_vector();
        const bool tangent = std::abs(th.dot(fd.n1)) < tol && std::abs(th.dot(fd.n2)) < tol;
        return tangent ? AmbientClass::LocallyConformalParallelTangent : AmbientClass::LocallyConformalParallel;
    }
    case cayley::FernandezClass::W:
        break;
    }
    throw AlgebraError("ambient Spin(7)-structure is of general type; no classification table applies");
}

TableMatch table_match(const TorsionResult& torsion, const PointGeometry& geo, const AmbientStructure& ambient,
                       double tol) {
    TableMatch tm;
    tm.ambient_class = ambient_class(geo, ambient, tol);
    const FrameData fd = frame_data(geo, ambient);
    const Su3Point& su = torsion.su3;
    const Mat& J = su.J;
    const double sigma = ambient.sigma();
    const double c = std::cos(geo.gamma), s = std::sin(geo.gamma);
    const Mat I = Mat::Identity(6, 6);
    const Mat& a1 = geo.alpha1;
    const Mat& a2 = geo.alpha2;
    const double h1 = geo.h1, h2 = geo.h2;
    auto Jop = [&](const Mat& a) { return Mat(J.transpose() * a * J); }; // a(JX, JY)
    auto J1 = [&](const Mat& b) { return Mat(-J.transpose() * b); };     // -b(JX, Y)
    const Vec th8 = -fd.theta8.as_vector();
    const double t1 = th8.dot(fd.n1), t2 = th8.dot(fd.n2);
    const double tangentialTheta = (fd.T.transpose() * th8).norm();
    const cayley::RbarTensor rb = extrinsic_rbar(fd);
    const double rb221 = rbar_eval(rb, fd.n2, fd.n2, fd.n1);
    const double rb121 = rbar_eval(rb, fd.n1, fd.n2, fd.n1);

    // Shared predicate residuals.
    const Gram g6 = Gram::identity(6);
    auto st = [&](const Form& a) { return forms::hodge(a, g6, su.orientation); };
    const Form p1 = forms::pullback(fd.T, forms::interior(fd.n1, ambient.phi0().phi));
    const Form lieStar = st(forms::wedge(st(torsion.lie1), p1));
    const Form jdg = su3::J_one_form(su, Form::one_form(geo.dgamma));
    const double noW3 = frob(sigma * (a1 - Jop(a1)) - J1(a2 - Jop(a2)));
    const double noW2p = frob(c * sigma * (a1 + Jop(a1)) - s * (a2 + Jop(a2)) - 2.0 * (sigma * h1 * c - h2 * s) * I);
    const double noW2m = frob(s * sigma * (a1 + Jop(a1)) + c * (a2 + Jop(a2)) - 2.0 * (sigma * h1 * s + h2 * c) * I);
    const double noW2 = frob(a1 + Jop(a1) - 2.0 * h1 * I) + frob(a2 + Jop(a2) - 2.0 * h2 * I);
    const double umbilic = frob(a1 - h1 * I) + frob(a2 - h2 * I);
    const double geodesic = frob(a1) + frob(a2);
    const double antiInv = frob(Jop(a1) + a1) + frob(Jop(a2) + a2);
    // Combinations controlling the W1 components through the trace identities.
    const double A = 6.0 * sigma * h1 + sigma * rb221 - 1.75 * sigma * t1;
    const double B = -6.0 * h2 + rb121 + 1.75 * t2;

    using V = std::vector<std::string>;
    const V all5 = {"W1+", "W1-", "W2+", "W2-", "W3", "W5"};
    auto add = [&](std::string id, V classes, double residual) {
        TableRow row{std::move(id), std::move(classes), residual, residual < tol, false};
        const auto& lab = torsion.report.label;
        row.contained = std::all_of(lab.begin(), lab.end(), [&](const std::string& x) {
            return std::find(row.classes.begin(), row.classes.end(), x) != row.classes.end();
        });
        tm.rows.push_back(std::move(row));
    };

    switch (tm.ambient_class) {
    case AmbientClass::Parallel:
        add("T1.noW5", {"W1+", "W1-", "W2+", "W2-", "W3"}, (jdg - 0.5 * lieStar).coeff_norm());
        add("T1.noW3", {"W1+", "W1-", "W2+", "W2-", "W5"}, noW3);
        add("T1.noW2+", {"W1+", "W1-", "W2-", "W3", "W5"}, noW2p);
        add("T1.noW2-", {"W1+", "W1-", "W2+", "W3", "W5"}, noW2m);
        add("T1.noW1+", {"W1-", "W2+", "W2-", "W3", "W5"}, std::abs(sigma * h1 * c - h2 * s));
        add("T1.noW1-", {"W1+", "W2+", "W2-", "W3", "W5"}, std::abs(sigma * h1 * s + h2 * c));
        add("T1.noW2", {"W1+", "W1-", "W3", "W5"}, noW2);
        add("T1.minimal", {"W2+", "W2-", "W3", "W5"}, std::abs(h1) + std::abs(h2));
        add("T1.umbilic", {"W1+", "W1-", "W5"}, umbilic);
        add("T1.W3W5", {"W3", "W5"}, antiInv);
        add("T1.W5", {"W5"}, geodesic);
        break;
    case AmbientClass::Balanced: {
        Vec th(6);
        for (int i = 0; i < 6; ++i) {
            const Vec X = fd.T.col(i), JX = fd.T * J.col(i);
            th(i) = rbar_eval(rb, fd.n1, fd.n1, X) + sigma * rbar_eval(rb, fd.n2, JX, fd.n1) -
                    sigma * rbar_eval(rb, JX, fd.n2, fd.n1);
        }
        add("T2.noW4", all5, th.norm());
        add("T2.noW1+", {"W1-", "W2+", "W2-", "W3", "W4", "W5"}, std::abs(A * c + B * s));
        add("T2.noW1-", {"W1+", "W2+", "W2-", "W3", "W4", "W5"}, std::abs(A * s - B * c));
        add("T2.noW1", {"W2+", "W2-", "W3", "W4", "W5"}, std::abs(A) + std::abs(B));
        break;
    }
    case AmbientClass::LocallyConformalParallel:
    case AmbientClass::LocallyConformalParallelTangent: {
        const bool tan = tm.ambient_class == AmbientClass::LocallyConformalParallelTangent;
        const std::string T = tan ? "T4." : "T3.";
        add(T + "noW5", {"W1+", "W1-", "W2+", "W2-", "W3", "W4"},
            (2.0 * jdg - lieStar - torsion.theta6).coeff_norm());
        add(T + "noW4", all5, tangentialTheta);
        add(T + "noW3", {"W1+", "W1-", "W2+", "W2-", "W4", "W5"}, noW3);
        add(T + "noW2+", {"W1+", "W1-", "W2-", "W3", "W4", "W5"}, noW2p);
        add(T + "noW2-", {"W1+", "W1-", "W2+", "W3", "W4", "W5"}, noW2m);
        add(T + "noW1+", {"W1-", "W2+", "W2-", "W3", "W4", "W5"},
            std::abs(sigma * (t1 - 4.0 * h1) * c - (t2 - 4.0 * h2) * s));
        add(T + "noW1-", {"W1+", "W2+", "W2-", "W3", "W4", "W5"},
            std::abs(sigma * (t1 - 4.0 * h1) * s + (t2 - 4.0 * h2) * c));
        add(T + "noW2", {"W1+", "W1-", "W3", "W4", "W5"}, noW2);
        add(T + "noW1", {"W2+", "W2-", "W3", "W4", "W5"}, std::abs(4.0 * h1 - t1) + std::abs(4.0 * h2 - t2));
        add(T + "umbilic", {"W1+", "W1-", "W4", "W5"}, umbilic);
        add(T + "W4W5", {"W4", "W5"}, frob(4.0 * a1 - t1 * I) + frob(4.0 * a2 - t2 * I));
        add(T + "W5", {"W5"}, frob(4.0 * a1 - t1 * I) + frob(4.0 * a2 - t2 * I) + tangentialTheta);
        break;
    }
    }
    return tm;
}

} // namespace spinsub::subman
