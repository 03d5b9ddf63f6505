#include "spinsub/su3.hpp"

#include <algorithm>
#include <cmath>

namespace spinsub::su3 {

namespace {

Vec unit(int n, int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
}

void fail(const std::string& what) { throw DegenerateStructure(what); }

double mat_max(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// (a, b) components of a 2-form as a matrix.
Mat two_form_matrix(const Form& a) {
    const int n = a.dim();
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a.component({i, j});
    return m;
}

Form slice(const Tensor& t, int x) {
    const int n = t.dim();
    Form out(n, 2);
    const auto& tab = forms::MultiIndexTable::get(n, 2);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto yz = forms::mask_indices(tab.masks[k]);
        out[k] = t({x, yz[0], yz[1]});
    }
    return out;
}

} // namespace

Su3Point make_su3(const Gram& g, const Mat& J, const Form& omega, const Form& psiP, const Form& psiM,
                  double gamma, double tol) {
    if (g.dim() != 6 || J.rows() != 6 || J.cols() != 6) fail("SU(3) data must live on a 6-dimensional space");
    if (omega.dim() != 6 || omega.degree() != 2 || psiP.dim() != 6 || psiP.degree() != 3 ||
        psiM.dim() != 6 || psiM.degree() != 3)
        fail("SU(3) forms have the wrong shape");
    const Mat I = Mat::Identity(6, 6);
    if (mat_max(J * J + I) > tol) fail("J^2 != -1");
    if (mat_max(J.transpose() * g.matrix() * J - g.matrix()) > tol * (1.0 + mat_max(g.matrix())))
        fail("J is not orthogonal for the metric");
    if (mat_max(two_form_matrix(omega) - g.matrix() * J) > tol * (1.0 + mat_max(g.matrix())))
        fail("omega(x,y) != <x, J y>");
    const Form w3 = forms::wedge(omega, forms::wedge(omega, omega));
    if (std::abs(std::abs(w3[0]) - 6.0 * g.sqrt_det()) > tol * 6.0 * g.sqrt_det())
        fail("omega^3 is not 6 times a unit volume form");
    Su3Point s{g, J, omega, psiP, psiM, gamma, Orientation(w3[0] > 0 ? 1 : -1)};
    if (identity_residual(s) > tol) fail("psi+/psi- violate the SU(3) identities");
    return s;
}

Su3Point canonical_su3(double gamma) {
    Mat J = Mat::Zero(6, 6);
    Form omega(6, 2), a(6, 3), b(6, 3);
    for (int i = 0; i < 3; ++i) {
        J(3 + i, i) = 1.0;
        J(i, 3 + i) = -1.0;
        omega -= Form::basis(6, {i, 3 + i});
    }
    a += Form::basis(6, {0, 1, 2});
    a -= Form::basis(6, {3, 4, 2});
    a -= Form::basis(6, {3, 1, 5});
    a -= Form::basis(6, {0, 4, 5});
    b -= Form::basis(6, {3, 4, 5});
    b += Form::basis(6, {3, 1, 2});
    b += Form::basis(6, {0, 4, 2});
    b += Form::basis(6, {0, 1, 5});
    const double c = std::cos(gamma), s = std::sin(gamma);
    return make_su3(Gram::identity(6), J, omega, c * a - s * b, s * a + c * b, gamma);
}

double identity_residual(const Su3Point& s) {
    const Form vol = forms::volume(s.g, s.orientation);
    double r = 0.0;
    r = std::max(r, forms::wedge(s.psiP, s.omega).max_abs());
    r = std::max(r, forms::wedge(s.psiM, s.omega).max_abs());
    r = std::max(r, (forms::wedge(s.psiP, s.psiM) + 4.0 * vol).max_abs());
    r = std::max(r, std::abs(forms::inner(s.psiP, s.psiP, s.g) - 4.0));
    r = std::max(r, std::abs(forms::inner(s.psiM, s.psiM, s.g) - 4.0));
    for (int i = 0; i < 6; ++i) {
        const Vec x = unit(6, i);
        const Vec jx = s.J * x;
        r = std::max(r, (forms::interior(x, s.psiP) - forms::interior(jx, s.psiM)).max_abs());
        const Form xf = s.g.lower(x);
        const Form jxf = s.g.lower(jx);
        const Form lhs = forms::wedge(xf, s.psiP);
        r = std::max(r, (lhs - forms::wedge(jxf, s.psiM)).max_abs());
        r = std::max(r, (lhs + forms::wedge(forms::interior(jx, s.psiP), s.omega)).max_abs());
    }
    return r;
}

double star_identity_residual(const Su3Point& s, const Form& mu) {
    auto st = [&](const Form& a) { return forms::hodge(a, s.g, s.orientation); };
    const Form jm = J_one_form(s, mu);
    double r = 0.0;
    r = std::max(r, (st(forms::wedge(st(forms::wedge(mu, s.psiP)), s.psiP)) + 2.0 * mu).max_abs());
    r = std::max(r, (st(forms::wedge(st(forms::wedge(mu, s.psiM)), s.psiM)) + 2.0 * mu).max_abs());
    r = std::max(r, (st(forms::wedge(st(forms::wedge(mu, s.psiM)), s.psiP)) - 2.0 * jm).max_abs());
    r = std::max(r, (st(forms::wedge(st(forms::wedge(mu, s.psiP)), s.psiM)) + 2.0 * jm).max_abs());
    return r;
}

Form J_one_form(const Su3Point& s, const Form& mu) {
    if (mu.degree() != 1 || mu.dim() != 6) throw AlgebraError("J_one_form: 1-form on R^6 required");
    return Form::one_form(-s.J.transpose() * mu.as_vector());
}

Mat adapted_frame(const Su3Point& s) {
    const Mat& G = s.g.matrix();
    auto nrm = [&](const Vec& v) { return std::sqrt(v.dot(G * v)); };
    Mat F(6, 6);
    Vec e1 = unit(6, 0);
    e1 /= nrm(e1);
    const Vec je1 = s.J * e1;
    Vec e2;
    bool found = false;
    for (int k = 1; k < 6 && !found; ++k) {
        Vec v = unit(6, k);
        v -= v.dot(G * e1) * e1 + v.dot(G * je1) * je1;
        const double n = nrm(v);
        if (n > 1e-6) {
            e2 = v / n;
            found = true;
        }
    }
    if (!found) fail("adapted_frame: no second frame vector");
    const Vec e3 = triple_cross_su3(s, e1, e2);
    if (std::abs(nrm(e3) - 1.0) > 1e-8) fail("adapted_frame: psi+(e1,e2,.) is not a unit covector");
    F << e1, e2, e3, s.J * e1, s.J * e2, s.J * e3;
    return F;
}

Vec triple_cross_su3(const Su3Point& s, const Vec& x, const Vec& y) {
    return s.g.raise(forms::interior(y, forms::interior(x, s.psiP)));
}

Mat r_map(const Tensor& beta, const Su3Point& s, double tol) {
    if (beta.dim() != 6 || beta.rank() != 3) throw AlgebraError("r_map: rank-3 tensor on R^6 required");
    const double scale = 1.0 + beta.max_abs();
    for (int x = 0; x < 6; ++x) {
        Mat b(6, 6);
        for (int y = 0; y < 6; ++y)
            for (int z = 0; z < 6; ++z) b(y, z) = beta({x, y, z});
        if (mat_max(s.J.transpose() * b * s.J + b) > tol * scale)
            throw AlgebraError("r_map: slice is not in u(3)^perp");
    }
    std::array<Form, 6> yPsi;
    for (int y = 0; y < 6; ++y) yPsi[y] = forms::interior(unit(6, y), s.psiP);
    Mat r(6, 6);
    for (int x = 0; x < 6; ++x) {
        const Form bx = slice(beta, x);
        for (int y = 0; y < 6; ++y) r(x, y) = 0.5 * forms::inner(bx, yPsi[y], s.g);
    }
    return r;
}

Tensor r_inverse(const Mat& r, const Su3Point& s) {
    const Mat F = adapted_frame(s);
    const Mat RF = r * F;
    std::array<Mat, 6> fPsi;
    for (int k = 0; k < 6; ++k) fPsi[k] = two_form_matrix(forms::interior(F.col(k), s.psiP));
    Tensor t(6, 3);
    for (int x = 0; x < 6; ++x) {
        Mat acc = Mat::Zero(6, 6);
        for (int k = 0; k < 6; ++k) acc += RF(x, k) * fPsi[k];
        for (int y = 0; y < 6; ++y)
            for (int z = 0; z < 6; ++z) t({x, y, z}) = acc(y, z);
    }
    return t;
}

RDecomposition decompose_r(const Mat& r, const Su3Point& s) {
    const Mat F = adapted_frame(s);
    const Mat R = F.transpose() * r * F;
    const Mat J0 = canonical_su3().J;
    const Mat inv = 0.5 * (R + J0.transpose() * R * J0);
    const Mat anti = R - inv;
    const Mat symInv = 0.5 * (inv + inv.transpose());
    const Mat skewInv = inv - symInv;
    RDecomposition d;
    d.w1m = (symInv.trace() / 6.0) * Mat::Identity(6, 6);
    d.w2m = symInv - d.w1m;
    d.w1p = (skewInv.cwiseProduct(J0).sum() / 6.0) * J0;
    d.w2p = skewInv - d.w1p;
    d.w3 = 0.5 * (anti + anti.transpose());
    d.w4 = anti - d.w3;
    d.norms = {{"W1p", d.w1p.norm()}, {"W1m", d.w1m.norm()}, {"W2p", d.w2p.norm()},
               {"W2m", d.w2m.norm()}, {"W3", d.w3.norm()},   {"W4", d.w4.norm()}};
    return d;
}

double r_dot_omega(const Mat& r, const Su3Point& s) {
    const Mat F = adapted_frame(s);
    const Mat R = F.transpose() * r * F;
    return 0.5 * R.cwiseProduct(canonical_su3().J).sum();
}

double r_trace(const Mat& r, const Su3Point& s) {
    const Mat F = adapted_frame(s);
    return (F.transpose() * r * F).trace();
}

Form codifferential_from_r(const Mat& r, const Su3Point& s) {
    const Mat F = adapted_frame(s);
    const Mat R = F.transpose() * r * F;
    const Form psi0 = forms::pullback(F, s.psiP);
    Vec muF = Vec::Zero(6);
    for (int z = 0; z < 6; ++z)
        for (int k = 0; k < 6; ++k)
            for (int l = 0; l < 6; ++l)
                if (k != l && z != k && z != l) muF(z) += psi0.component({z, k, l}) * R(k, l);
    return Form::one_form(F.transpose().inverse() * muF);
}

Form theta6_from_r(const Mat& r, const Su3Point& s) { return J_one_form(s, codifferential_from_r(r, s)); }

Form theta6_from_domega(const Form& domega, const Su3Point& s) {
    const Form dstar = -forms::hodge(forms::wedge(s.omega, domega), s.g, s.orientation);
    return J_one_form(s, dstar);
}

EtaResult eta_from_dpsi(const Form& dpsiP, const Form& dpsiM, const Su3Point& s, const Form& theta6) {
    auto st = [&](const Form& a) { return forms::hodge(a, s.g, s.orientation); };
    const std::array<Form, 4> e = {
        st(forms::wedge(st(dpsiP), s.psiP)),
        st(forms::wedge(st(dpsiM), s.psiM)),
        -J_one_form(s, st(forms::wedge(st(dpsiP), s.psiM))),
        J_one_form(s, st(forms::wedge(st(dpsiM), s.psiP))),
    };
    Form avg = 0.25 * (e[0] + e[1] + e[2] + e[3]);
    double res = 0.0;
    for (const auto& x : e) res = std::max(res, forms::norm(x - avg, s.g));
    return {(1.0 / 6.0) * (avg - theta6), res};
}

Vec xi_u3(const Mat& r, const Su3Point& s, const Vec& x, const Vec& y) {
    const Mat F = adapted_frame(s);
    const Vec rx = F.transpose() * r.transpose() * x; // r(X, f_j)
    Vec out = Vec::Zero(6);
    for (int j = 0; j < 6; ++j) {
        if (rx(j) == 0.0) continue;
        const Form a = forms::interior(F.col(j), s.psiP);
        for (int k = 0; k < 6; ++k) {
            const double v = forms::interior(F.col(k), a).as_vector().dot(y);
            out += (-0.5 * rx(j) * v) * (s.J * F.col(k));
        }
    }
    return out;
}

Mat xi_u3_matrix(const Mat& r, const Su3Point& s, const Vec& x) {
    Mat m(6, 6);
    for (int i = 0; i < 6; ++i) m.col(i) = xi_u3(r, s, x, unit(6, i));
    return m;
}

Mat r_from_exterior(const Form& domega, const Form& dpsiP, const Form& dpsiM, const Form& eta,
                    const Su3Point& s) {
    const Form dP = dpsiP + 3.0 * forms::wedge(eta, s.psiP);
    const Form dM = dpsiM + 3.0 * forms::wedge(eta, s.psiM);
    Mat r(6, 6);
    for (int i = 0; i < 6; ++i) {
        const Vec x = unit(6, i);
        const Vec jx = s.J * x;
        const Form jxd = forms::interior(jx, domega);
        const Form xP = forms::interior(x, dP);
        const Form jxM = forms::interior(jx, dM);
        for (int j = 0; j < 6; ++j) {
            const Vec y = unit(6, j);
            double v = forms::inner(jxd, forms::interior(y, s.psiM), s.g);
            const Form c = forms::interior(y, jxM) - forms::interior(y, xP);
            v += forms::inner(c, s.omega, s.g);
            r(i, j) = 0.5 * v;
        }
    }
    return r;
}

const std::vector<std::pair<std::string, std::string>>& component_names() {
    static const std::vector<std::pair<std::string, std::string>> names = {
        {"W1p", "W1+"}, {"W1m", "W1-"}, {"W2p", "W2+"}, {"W2m", "W2-"},
        {"W3", "W3"},   {"W4", "W4"},   {"W5", "W5"}};
    return names;
}

Su3TorsionReport classify_su3(const Mat& r, const Form& theta6, const Form& eta, const Su3Point& s,
                              const ExteriorData& ext, double tol) {
    Su3TorsionReport rep;
    rep.r = r;
    rep.theta6 = theta6;
    rep.eta = eta;
    rep.tol = tol;
    rep.norms = decompose_r(r, s).norms;
    rep.norms["W5"] = forms::norm(eta, s.g);
    for (const auto& [key, display] : component_names())
        if (rep.norms.at(key) >= tol) rep.label.push_back(display);
    auto has = [&](const char* key) { return rep.norms.at(key) >= tol; };
    const bool w1 = has("W1p") || has("W1m");
    const bool w2 = has("W2p") || has("W2m");
    rep.kaehler = !w1 && !w2 && !has("W3") && !has("W4");
    if (ext.available) {
        const double thetaNorm = forms::norm(theta6, s.g);
        rep.half_flat = forms::norm(ext.dpsiP, s.g) < tol && thetaNorm < tol;
        const Form nk = ext.domega - 0.25 * forms::inner(ext.domega, s.psiP, s.g) * s.psiP -
                        0.25 * forms::inner(ext.domega, s.psiM, s.g) * s.psiM;
        rep.nearly_kaehler = forms::norm(nk, s.g) < tol;
        rep.almost_kaehler = forms::norm(ext.domega, s.g) < tol;
        rep.locally_conformal_kaehler =
            forms::norm(2.0 * ext.domega + forms::wedge(theta6, s.omega), s.g) < tol;
    } else {
        rep.half_flat = !has("W1p") && !has("W2p") && !has("W4") && !has("W5");
        rep.nearly_kaehler = !w2 && !has("W3") && !has("W4");
        rep.almost_kaehler = !w1 && !has("W3") && !has("W4");
        rep.locally_conformal_kaehler = !w1 && !w2 && !has("W3");
    }
    return rep;
}

Tensor nijenhuis(const MatField& J, const MatField& metric, const Vec& u, double h) {
    const int n = static_cast<int>(u.size());
    const Mat J0 = J(u);
    if (J0.rows() != n || J0.cols() != n) throw AlgebraError("nijenhuis: J-field shape mismatch");
    std::vector<Mat> dJ(n);
    for (int b = 0; b < n; ++b) {
        const Vec e = h * unit(n, b);
        dJ[b] = (J(u + e) - J(u - e)) / (2.0 * h);
    }
    const Mat G = metric(u);
    Tensor out(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec N = Vec::Zero(n);
            for (int b = 0; b < n; ++b) N += J0(b, i) * dJ[b].col(j) - J0(b, j) * dJ[b].col(i);
            N += J0 * (dJ[j].col(i) - dJ[i].col(j));
            const Vec low = G * N;
            for (int k = 0; k < n; ++k) out({i, j, k}) = low(k);
        }
    return out;
}

} // namespace spinsub::su3
