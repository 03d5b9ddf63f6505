#include "spinsub/lab.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

namespace spinsub::lab {

namespace {

using cplx = std::complex<double>;

std::string format_point(const Vec& u) {
    std::ostringstream os;
    os << "u = (";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

// Value, Jacobian and second derivatives of a map R^k -> R^m.
struct LocalJet {
    Vec x;
    Mat J;
    std::vector<Mat> H; // H[i] = d/d(in_i) of J
};

// A block of the chart: some chart coordinates feed a local map whose
// outputs land on the listed ambient axes.
struct Block {
    std::vector<int> inputs;
    std::vector<int> axes;
    std::function<LocalJet(const Vec&)> jet;
};

Chart assemble(std::string name, subman::Box box, std::vector<Block> blocks) {
    auto eval = [blocks](const Vec& u, int order) {
        LocalJet out{Vec::Zero(8), Mat::Zero(8, 6), std::vector<Mat>(6, Mat::Zero(8, 6))};
        for (const Block& b : blocks) {
            Vec in(static_cast<int>(b.inputs.size()));
            for (std::size_t i = 0; i < b.inputs.size(); ++i) in(static_cast<int>(i)) = u(b.inputs[i]);
            const LocalJet j = b.jet(in);
            for (std::size_t r = 0; r < b.axes.size(); ++r) {
                const int ax = b.axes[r];
                out.x(ax) = j.x(static_cast<int>(r));
                if (order < 1) continue;
                for (std::size_t c = 0; c < b.inputs.size(); ++c) {
                    out.J(ax, b.inputs[c]) = j.J(static_cast<int>(r), static_cast<int>(c));
                    if (order < 2) continue;
                    for (std::size_t d = 0; d < b.inputs.size(); ++d)
                        out.H[b.inputs[c]](ax, b.inputs[d]) = j.H[c](static_cast<int>(r), static_cast<int>(d));
                }
            }
        }
        return out;
    };
    return Chart(
        std::move(name), std::move(box), [eval](const Vec& u) { return eval(u, 0).x; },
        [eval](const Vec& u) { return eval(u, 1).J; }, [eval](const Vec& u) { return eval(u, 2).H; });
}

LocalJet linear_jet(const Vec& in) {
    const int k = static_cast<int>(in.size());
    return {in, Mat::Identity(k, k), std::vector<Mat>(k, Mat::Zero(k, k))};
}

// Hyperspherical coordinates on the n-sphere, scaled per output:
// x_0 = cos t_0, x_1 = sin t_0 cos t_1, ..., x_n = sin t_0 ... sin t_{n-1}.
LocalJet sphere_jet(const Vec& t, const Vec& scale) {
    const int n = static_cast<int>(t.size());
    // factor kind per output and angle: 0 absent, 1 cos, 2 sin
    auto kind = [n](int out, int ang) {
        if (ang < out) return 2;
        if (ang == out && out < n) return 1;
        return 0;
    };
    auto f = [&](int k, int a, int der) {
        const double c = std::cos(t(a)), s = std::sin(t(a));
        if (k == 0) return der == 0 ? 1.0 : 0.0;
        const double vals[2][3] = {{c, -s, -c}, {s, c, -s}};
        return vals[k - 1][der];
    };
    LocalJet j{Vec(n + 1), Mat(n + 1, n), std::vector<Mat>(n, Mat(n + 1, n))};
    for (int o = 0; o <= n; ++o) {
        auto prod = [&](int a, int da, int b, int db) {
            double v = scale(o);
            for (int g = 0; g < n; ++g) {
                int der = 0;
                if (g == a) der += da;
                if (g == b) der += db;
                v *= f(kind(o, g), g, der);
            }
            return v;
        };
        j.x(o) = prod(-1, 0, -1, 0);
        for (int a = 0; a < n; ++a) {
            j.J(o, a) = prod(a, 1, -1, 0);
            for (int b = 0; b < n; ++b) j.H[a](o, b) = a == b ? prod(a, 2, -1, 0) : prod(a, 1, b, 1);
        }
    }
    return j;
}

// Real or imaginary part of a holomorphic polynomial sum c_k z^k, as a function of (x, y).
struct HoloComponent {
    std::vector<cplx> coeffs;
    bool imaginary;
};

LocalJet holomorphic_jet(const Vec& in, const std::vector<HoloComponent>& comps) {
    const cplx z(in(0), in(1));
    const int m = static_cast<int>(comps.size());
    LocalJet j{Vec(m), Mat(m, 2), std::vector<Mat>(2, Mat(m, 2))};
    for (int r = 0; r < m; ++r) {
        cplx g = 0, g1 = 0, g2 = 0;
        const auto& c = comps[r].coeffs;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double kk = static_cast<double>(k);
            g += c[k] * std::pow(z, kk);
            if (k >= 1) g1 += kk * c[k] * std::pow(z, kk - 1);
            if (k >= 2) g2 += kk * (kk - 1) * c[k] * std::pow(z, kk - 2);
        }
        // d/dx = d/dz, d/dy = i d/dz
        const cplx gx = g1, gy = cplx(0, 1) * g1, gxx = g2, gxy = cplx(0, 1) * g2, gyy = -g2;
        auto part = [&](cplx w) { return comps[r].imaginary ? w.imag() : w.real(); };
        j.x(r) = part(g);
        j.J(r, 0) = part(gx);
        j.J(r, 1) = part(gy);
        j.H[0](r, 0) = part(gxx);
        j.H[0](r, 1) = part(gxy);
        j.H[1](r, 0) = part(gxy);
        j.H[1](r, 1) = part(gyy);
    }
    return j;
}

subman::Box uniform_box(double lo, double hi) { return {Vec::Constant(6, lo), Vec::Constant(6, hi)}; }

subman::Polynomial random_polynomial(std::mt19937_64& gen, double amp) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    subman::Polynomial p;
    for (int i = 0; i < 6; ++i) p.linear(i) = amp * d(gen);
    for (int i = 0; i < 6; ++i)
        for (int k = i; k < 6; ++k) p.quadratic(i, k) = p.quadratic(k, i) = amp * d(gen);
    for (int t = 0; t < 3; ++t) {
        std::uniform_int_distribution<int> ix(0, 5);
        const int a = ix(gen), b = ix(gen), c = ix(gen);
        p.cubic.push_back({a, b, c, amp * d(gen)});
    }
    return p;
}

const std::vector<int> kCayleyPlane = {0, 1, 2, 4}; // e, e0, e1, e3
const std::vector<int> kQ4 = {3, 5, 6, 7};          // e2, e4, e5, e6

} // namespace

PointError::PointError(const Vec& point, const std::string& what)
    : std::runtime_error(what + " at " + format_point(point)), u(point) {}

const std::vector<std::pair<std::string, std::string>>& example_catalog() {
    static const std::vector<std::pair<std::string, std::string>> c = {
        {"plane", "totally geodesic R^6 = span{e1..e6} in flat R^8"},
        {"graph", "graph of two seeded random cubic polynomials over R^6 in flat R^8"},
        {"s3xs3", "S^3 x S^3 in span{e,e0,e1,e3} x span{e2,e4,e5,e6}, flat ambient"},
        {"s6", "unit S^6 in span{e,e0,..,e5}, flat ambient"},
        {"ellipsoid7", "ellipsoid in span{e0,..,e6} (normal N1 = e), flat ambient"},
        {"helicoid_r3_q4", "helicoid in the Cayley plane span{e,e0,e1,e3} times Q^4"},
        {"minimal_r4_q4", "minimal surface in span{e,e0,e1,e3} with non-flat normal bundle times Q^4"},
        {"conformal_slice", "totally geodesic R^6 in R^8 with metric e^{2f}, f = 0.1 x2 tangent to the slice"},
    };
    return c;
}

Example build_example(const ExampleSpec& spec) {
    if (spec.sigma != 1 && spec.sigma != -1) throw SpecError("sigma must be +1 or -1");
    if (spec.grid < 1) throw SpecError("grid must be at least 1");
    const AmbientStructure flat = AmbientStructure::flat(spec.sigma);
    const GammaField gamma = GammaField::constant(spec.gamma);
    const std::string& n = spec.name;

    auto plane = [](std::string chartName) {
        return assemble(std::move(chartName), uniform_box(-1.0, 1.0), {Block{{0, 1, 2, 3, 4, 5}, {2, 3, 4, 5, 6, 7}, linear_jet}});
    };

    if (n == "plane") return {spec, plane(n), flat, gamma, {0, 1}};
    if (n == "graph") {
        std::mt19937_64 gen(spec.seed);
        const subman::Polynomial g1 = random_polynomial(gen, 0.3), g2 = random_polynomial(gen, 0.3);
        return {spec, subman::Chart::graph(g1, g2, uniform_box(-0.5, 0.5)), flat, gamma, {0, 1}};
    }
    if (n == "s3xs3") {
        const Vec one = Vec::Ones(4);
        auto sph = [one](const Vec& t) { return sphere_jet(t, one); };
        Chart c = assemble("s3xs3", uniform_box(0.3, 1.2),
                           {Block{{0, 1, 2}, kCayleyPlane, sph}, Block{{3, 4, 5}, kQ4, sph}});
        return {spec, std::move(c), flat, gamma, {0, 3}};
    }
    if (n == "s6") {
        const Vec one = Vec::Ones(7);
        Chart c = assemble("s6", uniform_box(0.3, 1.2),
                           {Block{{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5, 6},
                                  [one](const Vec& t) { return sphere_jet(t, one); }}});
        return {spec, std::move(c), flat, gamma, {0, 1}};
    }
    if (n == "ellipsoid7") {
        std::vector<double> ax = spec.semi_axes;
        if (ax.empty()) ax = {1.0, 1.3, 0.8, 1.6, 1.1, 0.9, 1.4};
        if (ax.size() != 7) throw SpecError("ellipsoid7 needs 7 semi-axes");
        Vec scale(7);
        for (int i = 0; i < 7; ++i) {
            if (!(ax[i] > 0.0)) throw SpecError("semi-axes must be positive");
            scale(i) = ax[i];
        }
        Chart c = assemble("ellipsoid7", uniform_box(0.3, 1.2),
                           {Block{{0, 1, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6, 7},
                                  [scale](const Vec& t) { return sphere_jet(t, scale); }}});
        return {spec, std::move(c), flat, gamma, {0, 1}};
    }
    if (n == "helicoid_r3_q4") {
        if (!(spec.pitch != 0.0)) throw SpecError("helicoid pitch must be nonzero");
        const double k = spec.pitch;
        auto hel = [k](const Vec& in) {
            const double u = in(0), v = in(1);
            const double sh = std::sinh(u), ch = std::cosh(u), c = std::cos(v), s = std::sin(v);
            LocalJet j{Vec(3), Mat(3, 2), std::vector<Mat>(2, Mat(3, 2))};
            j.x << sh * c, sh * s, k * v;
            j.J << ch * c, -sh * s, ch * s, sh * c, 0.0, k;
            j.H[0] << sh * c, -ch * s, sh * s, ch * c, 0.0, 0.0;
            j.H[1] << -ch * s, -sh * c, ch * c, -sh * s, 0.0, 0.0;
            return j;
        };
        subman::Box box = uniform_box(-1.0, 1.0);
        box.lo(1) = -1.5;
        box.hi(1) = 1.5;
        Chart c = assemble("helicoid_r3_q4", box, {Block{{0, 1}, {1, 2, 4}, hel}, Block{{2, 3, 4, 5}, kQ4, linear_jet}});
        return {spec, std::move(c), flat, gamma, {0, 1}};
    }
    if (n == "minimal_r4_q4") {
        // Conformal harmonic map z -> (Re(z - z^4/4), Im(z + z^4/4), Re(z^2/2 + z^3/3), Im(z^2/2 - z^3/3)).
        const std::vector<HoloComponent> comps = {
            {{0.0, 1.0, 0.0, 0.0, -0.25}, false},
            {{0.0, 1.0, 0.0, 0.0, 0.25}, true},
            {{0.0, 0.0, 0.5, 1.0 / 3.0}, false},
            {{0.0, 0.0, 0.5, -1.0 / 3.0}, true},
        };
        subman::Box box = uniform_box(-1.0, 1.0);
        box.lo(0) = 0.3;
        box.hi(0) = 0.9;
        box.lo(1) = 0.2;
        box.hi(1) = 0.8;
        Chart c = assemble("minimal_r4_q4", box,
                           {Block{{0, 1}, kCayleyPlane, [comps](const Vec& in) { return holomorphic_jet(in, comps); }},
                            Block{{2, 3, 4, 5}, kQ4, linear_jet}});
        Example ex{spec, std::move(c), flat, gamma, {0, 1}};
        for (const Vec& u : sample_points(ex)) {
            const SurfaceCheck sc = surface_check(ex, u);
            if (std::abs(sc.h1) + std::abs(sc.h2) > 1e-8 || sc.a_norm < 1e-6)
                throw PointError(u, "minimal_r4_q4 failed its minimality or normal-connection check");
        }
        return ex;
    }
    if (n == "conformal_slice") {
        Vec grad = Vec::Zero(8);
        grad(cayley::idx(2)) = 0.1;
        return {spec, plane(n), AmbientStructure::conformal_linear(spec.sigma, grad), gamma, {0, 1}};
    }
    throw SpecError("unknown example '" + n + "'");
}

std::vector<Vec> sample_points(const Example& ex) {
    const int g = ex.spec.grid;
    const subman::Box& box = ex.chart.domain();
    std::mt19937_64 gen(ex.spec.seed);
    std::uniform_real_distribution<double> d(0.1, 0.9);
    std::vector<Vec> out;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            Vec t = Vec::Constant(6, 0.5);
            for (int k = 0; k < 6; ++k)
                if (ex.spec.seed != 0) t(k) = d(gen);
            t(ex.sweep[0]) = (i + 0.5) / g;
            t(ex.sweep[1]) = (j + 0.5) / g;
            out.push_back(box.at(t));
        }
    return out;
}

SurfaceCheck surface_check(const Example& ex, const Vec& u) {
    const subman::PointGeometry geo = subman::fundamental_data(ex.chart, ex.ambient, u, ex.gamma);
    return {geo.h1, geo.h2, geo.a.norm()};
}

PointReport run_point(const Example& ex, const Vec& u, const RunOptions& opt) {
    try {
        PointReport pr;
        pr.u = u;
        const subman::PointGeometry geo = subman::fundamental_data(ex.chart, ex.ambient, u, ex.gamma);
        subman::TorsionResult tr = subman::torsion_via_rraa(geo, ex.ambient, opt.tol);
        auto& res = pr.residuals;
        res["trace_identity_1"] = tr.trace_residual_1;
        res["trace_identity_2"] = tr.trace_residual_2;
        res["lie_star"] = tr.lie_star_residual;
        res["theta6_consistency"] = tr.theta6_consistency;
        const forms::Gram g6 = forms::Gram::identity(6);
        res["theta6_norm"] = forms::norm(tr.theta6, g6);
        res["eta_norm"] = forms::norm(tr.eta, g6);
        res["mean_curvature"] = std::abs(geo.h1) + std::abs(geo.h2);
        res["normal_connection"] = geo.a.norm();
        const subman::Closedness cl = subman::closedness_check(geo, ex.ambient);
        res["closedness_1"] = cl.residual1;
        res["closedness_2"] = cl.residual2;
        if (ex.ambient.differentiable()) {
            const subman::ExteriorResult e = subman::torsion_via_exterior(ex.chart, ex.ambient, u, ex.gamma, opt.h);
            res["r_dual_path"] = (e.r - tr.r).cwiseAbs().maxCoeff();
            res["theta6_dual_path"] = (e.theta6 - tr.theta6).max_abs();
            res["eta_dual_path"] = (e.eta - tr.eta).max_abs();
            res["eta_exterior_consistency"] = e.eta_residual;
            res["dpsi_plus_norm"] = forms::norm(e.ext.dpsiP, g6);
            res["dpsi_minus_norm"] = forms::norm(e.ext.dpsiM, g6);
            res["domega_norm"] = forms::norm(e.ext.domega, g6);
            tr.report = su3::classify_su3(tr.r, tr.theta6, tr.eta, tr.su3, e.ext, tr.report.tol);
        }
        pr.torsion = tr.report;
        pr.table = subman::table_match(tr, geo, ex.ambient, opt.tol);
        pr.ambient_class = pr.table.ambient_class;
        return pr;
    } catch (const PointError&) {
        throw;
    } catch (const std::exception& err) {
        throw PointError(u, err.what());
    }
}

Report run_report(const ExampleSpec& spec, const RunOptions& opt) {
    const Example ex = build_example(spec);
    Report rep;
    rep.spec = spec;
    rep.options = opt;
    for (const Vec& u : sample_points(ex)) rep.points.push_back(run_point(ex, u, opt));

    std::map<std::string, int> counts;
    std::map<std::string, std::vector<std::string>> labels;
    std::vector<std::string> order;
    rep.half_flat = rep.nearly_kaehler = rep.kaehler = rep.almost_kaehler = rep.locally_conformal_kaehler = true;
    rep.closed = true;
    for (const PointReport& p : rep.points) {
        std::string key;
        for (const auto& l : p.torsion.label) key += l + ",";
        if (!counts.count(key)) order.push_back(key);
        ++counts[key];
        labels[key] = p.torsion.label;
        rep.half_flat = rep.half_flat && p.torsion.half_flat;
        rep.nearly_kaehler = rep.nearly_kaehler && p.torsion.nearly_kaehler;
        rep.kaehler = rep.kaehler && p.torsion.kaehler;
        rep.almost_kaehler = rep.almost_kaehler && p.torsion.almost_kaehler;
        rep.locally_conformal_kaehler = rep.locally_conformal_kaehler && p.torsion.locally_conformal_kaehler;
        rep.closed = rep.closed && p.residuals.at("closedness_1") < 1e-8 && p.residuals.at("closedness_2") < 1e-8;
        rep.table_mismatches += p.table.mismatches();
        for (const auto& [k, v] : p.residuals) {
            rep.max_residuals[k] = std::max(rep.max_residuals.count(k) ? rep.max_residuals[k] : 0.0, v);
            rep.mean_residuals[k] += v / static_cast<double>(rep.points.size());
        }
    }
    std::string best;
    int bestCount = -1;
    for (const auto& k : order)
        if (counts[k] > bestCount) {
            bestCount = counts[k];
            best = k;
        }
    if (bestCount > 0) rep.consensus_label = labels[best];
    return rep;
}

std::string to_json(const Report& report, int indent) {
    using nlohmann::json;
    json doc;
    doc["example"] = report.spec.name;
    doc["sigma"] = report.spec.sigma;
    doc["gamma"] = report.spec.gamma;
    doc["grid"] = report.spec.grid;
    doc["seed"] = report.spec.seed;
    doc["h"] = report.options.h;
    doc["tol"] = report.options.tol;
    json pts = json::array();
    for (const PointReport& p : report.points) {
        json jp;
        jp["u"] = std::vector<double>(p.u.data(), p.u.data() + p.u.size());
        const auto& t = p.torsion;
        jp["class"] = {{"ambient", subman::to_string(p.ambient_class)},
                       {"label", t.label},
                       {"half_flat", t.half_flat},
                       {"kaehler", t.kaehler},
                       {"nearly_kaehler", t.nearly_kaehler},
                       {"almost_kaehler", t.almost_kaehler},
                       {"locally_conformal_kaehler", t.locally_conformal_kaehler},
                       {"tolerance", t.tol}};
        jp["norms"] = t.norms;
        jp["residuals"] = p.residuals;
        json rows = json::array();
        for (const auto& r : p.table.rows)
            rows.push_back({{"id", r.id},
                            {"classes", r.classes},
                            {"residual", r.residual},
                            {"satisfied", r.satisfied},
                            {"contained", r.contained},
                            {"consistent", r.consistent()}});
        jp["table_rows"] = rows;
        pts.push_back(jp);
    }
    doc["points"] = pts;
    doc["aggregate"] = {{"label", report.consensus_label},
                        {"half_flat", report.half_flat},
                        {"kaehler", report.kaehler},
                        {"nearly_kaehler", report.nearly_kaehler},
                        {"almost_kaehler", report.almost_kaehler},
                        {"locally_conformal_kaehler", report.locally_conformal_kaehler},
                        {"closed", report.closed},
                        {"table_mismatches", report.table_mismatches},
                        {"max_residuals", report.max_residuals},
                        {"mean_residuals", report.mean_residuals}};
    return doc.dump(indent);
}

NijenhuisResult nijenhuis_at(const Example& ex, const Vec& u, double h) {
    auto geometry = [&](const Vec& v) { return subman::fundamental_data(ex.chart, ex.ambient, v, ex.gamma); };
    su3::MatField J = [&](const Vec& v) -> Mat {
        const subman::PointGeometry g = geometry(v);
        const su3::Su3Point s = subman::induced_su3(g, ex.ambient, g.gamma);
        return g.R.inverse() * s.J * g.R;
    };
    su3::MatField metric = [&](const Vec& v) -> Mat {
        const subman::PointGeometry g = geometry(v);
        return g.R.transpose() * g.R;
    };
    const forms::Tensor coord = su3::nijenhuis(J, metric, u, h);
    const subman::PointGeometry g = geometry(u);
    NijenhuisResult out;
    out.tensor = coord.pullback(g.R.inverse());
    out.form = out.tensor.to_form();
    out.skew_residual = (out.tensor - forms::Tensor::from_form(out.form)).max_abs();
    return out;
}

double parse_angle(const std::string& text) {
    static const std::regex piForm(R"(^\s*([+-]?)(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, piForm)) {
        double k = m[2].str().empty() ? 1.0 : std::stod(m[2].str());
        if (m[1].str() == "-") k = -k;
        const double den = m[3].matched ? std::stod(m[3].str()) : 1.0;
        if (den == 0.0) throw SpecError("zero denominator in angle '" + text + "'");
        return k * std::numbers::pi / den;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw SpecError("cannot parse angle '" + text + "'");
    }
    if (used != text.size()) throw SpecError("cannot parse angle '" + text + "'");
    return v;
}

} // namespace spinsub::lab
