#include "spinsub/cayley.hpp"

#include <cmath>

namespace spinsub::cayley {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw AlgebraError(what);
}

void require_sigma(int sigma) { require(sigma == 1 || sigma == -1, "sigma must be +1 or -1"); }

Vec unit(int n, int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
}

} // namespace

CayleyForm cayley_form(int sigma) {
    require_sigma(sigma);
    CayleyForm c{sigma, Form(8, 4)};
    for (int i = 0; i < 7; ++i) {
        c.phi += Form::basis(8, {kE, idx(i), idx(i + 1), idx(i + 3)});
        c.phi -= Form::basis(8, {idx(i + 2), idx(i + 4), idx(i + 5), idx(i + 6)}, sigma);
    }
    return c;
}

Vec triple_cross(const Form& phi, const Gram& g, const Vec& x, const Vec& y, const Vec& z) {
    require(phi.degree() == 4, "triple_cross: phi must be a 4-form");
    const Form w = forms::interior(z, forms::interior(y, forms::interior(x, phi)));
    return g.raise(w);
}

Vec triple_cross(const CayleyForm& phi, const Vec& x, const Vec& y, const Vec& z) {
    return triple_cross(phi.phi, Gram::identity(8), x, y, z);
}

double metric_from_phi(const Form& phi, const Gram& g, Orientation o, const Vec& x, const Vec& y) {
    const Form a = forms::interior(x, phi);
    const Form b = forms::interior(y, phi);
    const Form top = forms::wedge(a, forms::hodge(b, g, o));
    return (1.0 / 7.0) * forms::hodge(top, g, o)[0];
}

std::array<Form, 7> beta_basis(int sigma) {
    require_sigma(sigma);
    std::array<Form, 7> out;
    for (int i = 0; i < 7; ++i) {
        Form b = Form::basis(8, {idx(i), kE}, sigma);
        b += Form::basis(8, {idx(i + 1), idx(i + 3)});
        b += Form::basis(8, {idx(i + 4), idx(i + 5)});
        b += Form::basis(8, {idx(i + 2), idx(i + 6)});
        out[i] = b;
    }
    return out;
}

Form spin7_operator(const Form& psi, const CayleyForm& phi) {
    require(psi.dim() == 8 && psi.degree() == 2, "spin7_operator: 2-form on R^8 required");
    return forms::hodge(forms::wedge(psi, phi.phi), Gram::identity(8), Orientation(1));
}

Spin7Split spin7_split(const Form& psi, const CayleyForm& phi) {
    const Form s = spin7_operator(psi, phi);
    return {0.25 * (3.0 * psi + s), 0.25 * (psi - s)};
}

Form lee_form8(const Form& phi, const Form& dphi, const Gram& g, Orientation o) {
    require(phi.degree() == 4 && dphi.degree() == 5, "lee_form8: degree mismatch");
    return (-1.0 / 7.0) * forms::hodge(forms::wedge(forms::hodge(dphi, g, o), phi), g, o);
}

// ---------------------------------------------------------------- RbarTensor

Form RbarTensor::slice(const Vec& x) const {
    Form out(8, 2);
    const auto& t = forms::MultiIndexTable::get(8, 2);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto yz = forms::mask_indices(t.masks[k]);
        double s = 0.0;
        for (int a = 0; a < 8; ++a) s += x(a) * values({a, yz[0], yz[1]});
        out[k] = s;
    }
    return out;
}

double RbarTensor::spin7_residual(const CayleyForm& phi) const {
    double worst = 0.0;
    for (int a = 0; a < 8; ++a) {
        const Form s = slice(unit(8, a));
        worst = std::max(worst, spin7_split(s, phi).psi21.coeff_norm());
    }
    return worst;
}

Form RbarTensor::trace_lee() const {
    Form out(8, 1);
    for (int z = 0; z < 8; ++z) {
        double s = 0.0;
        for (int a = 0; a < 8; ++a) s += values({a, a, z});
        out[z] = (4.0 / 7.0) * s;
    }
    return out;
}

RbarTensor rbar_from_dphi(const CayleyForm& phi, const Form& dphi, const Form& theta8) {
    require(dphi.dim() == 8 && dphi.degree() == 5, "rbar_from_dphi: dphi must be a 5-form on R^8");
    require(theta8.dim() == 8 && theta8.degree() == 1, "rbar_from_dphi: theta8 must be a 1-form");
    const Gram id = Gram::identity(8);
    std::array<Form, 8> yPhi, xd;
    std::array<Form, 8> e;
    for (int a = 0; a < 8; ++a) {
        yPhi[a] = forms::interior(unit(8, a), phi.phi);
        xd[a] = forms::interior(unit(8, a), dphi);
        e[a] = Form::basis(8, {a});
    }
    const Form tp = forms::interior(theta8.as_vector(), phi.phi);
    RbarTensor r;
    for (int y = 0; y < 8; ++y) {
        for (int z = y + 1; z < 8; ++z) {
            const Form c = forms::wedge(e[y], yPhi[z]) - forms::wedge(e[z], yPhi[y]);
            for (int x = 0; x < 8; ++x) {
                double v = 2.0 * forms::inner(xd[x], c, id);
                v -= 7.0 * ((x == y ? theta8[z] : 0.0) - (x == z ? theta8[y] : 0.0));
                v -= 7.0 * phi.sigma * tp.component({x, y, z});
                r.values({x, y, z}) = 0.25 * v;
                r.values({x, z, y}) = -0.25 * v;
            }
        }
    }
    return r;
}

RbarTensor rbar_conformal(const CayleyForm& phi, const Form& theta8) {
    require(theta8.dim() == 8 && theta8.degree() == 1, "rbar_conformal: theta8 must be a 1-form");
    const Form tp = forms::interior(theta8.as_vector(), phi.phi);
    RbarTensor r;
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) {
                double v = (x == y ? theta8[z] : 0.0) - (x == z ? theta8[y] : 0.0);
                v += phi.sigma * tp.component({x, y, z});
                r.values({x, y, z}) = 0.25 * v;
            }
    return r;
}

RbarTensor rbar_from_coefficients(int sigma, const Mat& a) {
    require(a.rows() == 8 && a.cols() == 7, "rbar_from_coefficients: 8 x 7 matrix required");
    const auto betas = beta_basis(sigma);
    RbarTensor r;
    for (int x = 0; x < 8; ++x) {
        Form s(8, 2);
        for (int j = 0; j < 7; ++j) s += a(x, j) * betas[j];
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) r.values({x, y, z}) = s.component({y, z});
    }
    return r;
}

Mat xi_matrix(const RbarTensor& rbar, const Vec& x) {
    Mat m = Mat::Zero(8, 8);
    for (int a = 0; a < 8; ++a) {
        if (x(a) == 0.0) continue;
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) m(z, y) += 0.25 * x(a) * rbar(a, y, z);
    }
    return m;
}

Vec xi_spin7(const RbarTensor& rbar, const Vec& x, const Vec& y) { return xi_matrix(rbar, x) * y; }

Vec xi_spin7_cross(const RbarTensor& rbar, const CayleyForm& phi, const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(8);
    const Form s = rbar.slice(x);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (i == j) continue;
            const double c = s.component({i, j});
            if (c == 0.0) continue;
            out += c * triple_cross(phi, unit(8, i), unit(8, j), y);
        }
    return (-phi.sigma / 24.0) * out;
}

Form derivation(const Mat& A, const Form& a) {
    const int n = a.dim();
    require(A.rows() == n && A.cols() == n, "derivation: shape mismatch");
    Form out(n, a.degree());
    if (a.degree() == 0) return out;
    for (int k = 0; k < n; ++k) out -= forms::wedge(Form::basis(n, {k}), forms::interior(A.col(k), a));
    return out;
}

Form nabla_phi(const RbarTensor& rbar, const CayleyForm& phi, const Vec& x) {
    return -derivation(xi_matrix(rbar, x), phi.phi);
}

std::string to_string(FernandezClass c) {
    switch (c) {
    case FernandezClass::W0:
        return "W0bar";
    case FernandezClass::W1:
        return "W1bar";
    case FernandezClass::W2:
        return "W2bar";
    case FernandezClass::W:
        return "Wbar";
    }
    return "Wbar";
}

FernandezResult fernandez_class(const Form& phi, const Form& dphi, const Form& theta8, const Gram& g,
                                double tol) {
    require(tol > 0.0, "fernandez_class: tolerance must be positive");
    FernandezResult r{FernandezClass::W, forms::norm(dphi, g), forms::norm(theta8, g), 0.0};
    r.w2_residual = forms::norm(dphi - forms::wedge(theta8, phi), g);
    if (r.dphi_norm < tol)
        r.cls = FernandezClass::W0;
    else if (r.theta_norm < tol)
        r.cls = FernandezClass::W1;
    else if (r.w2_residual < tol)
        r.cls = FernandezClass::W2;
    return r;
}

// ---------------------------------------------------------------- AmbientStructure

AmbientStructure AmbientStructure::flat(int sigma) {
    AmbientStructure a;
    a.kind_ = Kind::Flat;
    a.phi0_ = cayley_form(sigma);
    return a;
}

AmbientStructure AmbientStructure::conformal(int sigma, ScalarField f, GradientField df) {
    require(static_cast<bool>(f) && static_cast<bool>(df), "conformal ambient needs f and df");
    AmbientStructure a;
    a.kind_ = Kind::Conformal;
    a.phi0_ = cayley_form(sigma);
    a.f_ = std::move(f);
    a.df_ = std::move(df);
    return a;
}

AmbientStructure AmbientStructure::conformal_linear(int sigma, const Vec& c) {
    require(c.size() == 8, "conformal_linear: gradient must have 8 components");
    return conformal(
        sigma, [c](const Vec& p) { return c.dot(p); }, [c](const Vec&) { return c; });
}

AmbientStructure AmbientStructure::synthetic(int sigma, const RbarTensor& rbar) {
    AmbientStructure a;
    a.kind_ = Kind::Synthetic;
    a.phi0_ = cayley_form(sigma);
    a.injected_ = rbar;
    Form d(8, 5);
    for (int k = 0; k < 8; ++k)
        d += forms::wedge(Form::basis(8, {k}), nabla_phi(rbar, a.phi0_, unit(8, k)));
    a.injected_dphi_ = d;
    return a;
}

AmbientStructure AmbientStructure::rotating(int sigma, const Mat& k0, const std::vector<Mat>& k) {
    require(k0.rows() == 8 && k0.cols() == 8 && k.size() == 8, "rotating ambient needs 8 x 8 generators");
    require((k0 + k0.transpose()).cwiseAbs().maxCoeff() < 1e-12, "rotation generators must be skew");
    for (const auto& m : k)
        require(m.rows() == 8 && m.cols() == 8 && (m + m.transpose()).cwiseAbs().maxCoeff() < 1e-12,
                "rotation generators must be skew");
    AmbientStructure a;
    a.kind_ = Kind::Rotating;
    a.phi0_ = cayley_form(sigma);
    a.k0_ = k0;
    a.k_ = k;
    return a;
}

Mat AmbientStructure::rotation(const Vec& p) const {
    Mat k = k0_;
    for (int i = 0; i < 8; ++i) k += p(i) * k_[i];
    const Mat I = Mat::Identity(8, 8);
    return (I - k).inverse() * (I + k);
}

double AmbientStructure::conformal_factor(const Vec& p) const {
    return kind_ == Kind::Conformal ? f_(p) : 0.0;
}

Vec AmbientStructure::conformal_gradient(const Vec& p) const {
    return kind_ == Kind::Conformal ? df_(p) : Vec::Zero(8);
}

Form AmbientStructure::phi(const Vec& p) const {
    if (kind_ == Kind::Rotating) return forms::pullback(rotation(p).transpose(), phi0_.phi);
    return std::exp(4.0 * conformal_factor(p)) * phi0_.phi;
}

Form AmbientStructure::dphi(const Vec& p) const {
    switch (kind_) {
    case Kind::Flat:
        return Form(8, 5);
    case Kind::Synthetic:
        return injected_dphi_;
    case Kind::Rotating:
        return forms::fd_exterior_derivative([this](const Vec& q) { return phi(q); }, p, 1e-3,
                                             forms::FdOrder::Fourth);
    case Kind::Conformal:
        break;
    }
    return forms::wedge(Form::one_form(4.0 * conformal_gradient(p)), phi(p));
}

Gram AmbientStructure::gram(const Vec& p) const {
    if (kind_ != Kind::Conformal) return Gram::identity(8);
    return Gram(std::exp(2.0 * conformal_factor(p)) * Mat::Identity(8, 8));
}

Form AmbientStructure::theta8(const Vec& p) const {
    switch (kind_) {
    case Kind::Flat:
        return Form(8, 1);
    case Kind::Synthetic:
        return injected_.trace_lee();
    case Kind::Rotating:
        return lee_form8(phi(p), dphi(p), Gram::identity(8), Orientation(1));
    case Kind::Conformal:
        break;
    }
    return Form::one_form(4.0 * conformal_gradient(p));
}

Vec AmbientStructure::christoffel(const Vec& p, const Vec& x, const Vec& y) const {
    if (kind_ != Kind::Conformal) return Vec::Zero(8);
    const Vec df = conformal_gradient(p);
    return x * df.dot(y) + y * df.dot(x) - x.dot(y) * df;
}

Mat AmbientStructure::frame(const Vec& p) const {
    if (kind_ == Kind::Rotating) return rotation(p);
    return std::exp(-conformal_factor(p)) * Mat::Identity(8, 8);
}

Form AmbientStructure::dphi_frame(const Vec& p) const { return forms::pullback(frame(p), dphi(p)); }

Form AmbientStructure::theta8_frame(const Vec& p) const { return forms::pullback(frame(p), theta8(p)); }

RbarTensor AmbientStructure::rbar_frame(const Vec& p) const {
    switch (kind_) {
    case Kind::Flat:
        return RbarTensor{};
    case Kind::Synthetic:
        return injected_;
    case Kind::Rotating:
        return rbar_from_dphi(phi0_, dphi_frame(p), theta8_frame(p));
    case Kind::Conformal:
        break;
    }
    return rbar_conformal(phi0_, theta8_frame(p));
}

} // namespace spinsub::cayley
