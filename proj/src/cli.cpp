#include "spinlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "spinlab/discrete_dirac.hpp"
#include "spinlab/green.hpp"
#include "spinlab/sphere_spectrum.hpp"
#include "spinlab/torus_spectrum.hpp"

namespace spinlab {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    if (!text.empty() && text.back() == sep) out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

IntVec parse_int_vector(const std::string& text, int expected_size) {
    RVec v = parse_real_vector(text, expected_size);
    IntVec out;
    for (int i = 0; i < v.size(); ++i) {
        if (v(i) != std::floor(v(i)) || std::abs(v(i)) > 1e6) fail(ErrorCode::Parse, "expected integers in '" + text + "'");
        out.push_back(static_cast<int>(v(i)));
    }
    return out;
}

std::string csv_row(const std::vector<double>& vals) {
    std::string s;
    for (std::size_t i = 0; i < vals.size(); ++i) s += (i ? "," : "") + format_double(vals[i]);
    return s + "\n";
}

struct Output {
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::string csv;
};

struct Common {
    std::string lattice = "I3";
    std::string delta;
    std::string json_path;
    std::string csv_path;
    CLI::Option* json_opt = nullptr;
    CLI::Option* csv_opt = nullptr;
};

void add_outputs(CLI::App* sub, Common& c) {
    c.json_opt = sub->add_option("--json", c.json_path, "write JSON (stdout if no path)")->expected(0, 1);
    c.csv_opt = sub->add_option("--csv", c.csv_path, "write CSV (stdout if no path)")->expected(0, 1);
}

void add_torus(CLI::App* sub, Common& c) {
    sub->add_option("--lattice", c.lattice, "I<n> or row-major basis");
    sub->add_option("--delta", c.delta, "spin structure bit string");
}

nlohmann::json lattice_json(const Lattice& lat, const SpinStructureDelta& d) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < lat.n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < lat.n; ++j) row.push_back(format_double(lat.basis(j, i)));
        rows.push_back(row);
    }
    return {{"basis_rows", rows}, {"hash", lattice_hash(lat)}, {"delta_bits", d.bits}};
}

struct Handler {
    CLI::App* app = nullptr;
    CLI::Option* json_opt = nullptr;
    CLI::Option* csv_opt = nullptr;
    std::function<Output()> run;
};

// Groups the sorted eigenpairs of a discretized operator into the clusters of its report.
struct Cluster {
    double value = 0.0;
    std::vector<FourierSpinorField> vectors;
};

std::vector<Cluster> positive_clusters(const EigenResult& er, int count) {
    std::vector<Cluster> out;
    std::size_t off = 0;
    double zero_tol = 1e-9 * std::max(1.0, er.norm);
    for (const auto& e : er.report.entries) {
        if (e.value > zero_tol && static_cast<int>(out.size()) < count) {
            Cluster c;
            c.value = e.value;
            for (int k = 0; k < e.multiplicity; ++k) c.vectors.push_back(er.vectors[off + k]);
            out.push_back(std::move(c));
        }
        off += e.multiplicity;
    }
    return out;
}

double abs_coeff_sum(const ConformalFactor& f) {
    double s = 0.0;
    for (const auto& [m, c] : f.modes) s += std::abs(c);
    return s;
}

}  // namespace

Lattice parse_lattice_flag(const std::string& text) {
    std::string t = trim(text);
    if (t.size() >= 2 && (t[0] == 'I' || t[0] == 'i')) {
        int n = 0;
        try {
            std::size_t pos = 0;
            n = std::stoi(t.substr(1), &pos);
            if (pos != t.size() - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "bad lattice '" + text + "'");
        }
        require(n >= 1 && n <= 8, "lattice dimension must be 1..8");
        return cubic_lattice(n);
    }
    auto parts = split(t, ',');
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(parts.size()))));
    if (n < 1 || n * n != static_cast<int>(parts.size())) fail(ErrorCode::Parse, "lattice needs n*n entries: '" + text + "'");
    RMat basis(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis(j, i) = parse_double(trim(parts[i * n + j]));
    return make_lattice(basis);
}

SpinStructureDelta parse_delta_flag(const Lattice& lat, const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) t = std::string(lat.n, '1');
    if (static_cast<int>(t.size()) != lat.n) fail(ErrorCode::Parse, "delta needs " + std::to_string(lat.n) + " bits");
    IntVec bits;
    for (char ch : t) {
        if (ch != '0' && ch != '1') fail(ErrorCode::Parse, "delta must be a bit string: '" + text + "'");
        bits.push_back(ch - '0');
    }
    return make_delta(lat, bits);
}

RVec parse_real_vector(const std::string& text, int expected_size) {
    auto parts = split(trim(text), ',');
    if (expected_size > 0 && static_cast<int>(parts.size()) != expected_size)
        fail(ErrorCode::Parse, "expected " + std::to_string(expected_size) + " numbers in '" + text + "'");
    RVec v(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) v(i) = parse_double(trim(parts[i]));
    for (int i = 0; i < v.size(); ++i)
        if (!std::isfinite(v(i))) fail(ErrorCode::Parse, "non-finite number in '" + text + "'");
    return v;
}

CVec parse_complex_vector(const std::string& text, int expected_size) {
    auto parts = split(trim(text), ',');
    if (expected_size > 0 && static_cast<int>(parts.size()) != expected_size)
        fail(ErrorCode::Parse, "expected " + std::to_string(expected_size) + " entries in '" + text + "'");
    CVec v(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto ri = split(trim(parts[i]), ':');
        if (ri.size() == 1) v(i) = parse_double(trim(ri[0]));
        else if (ri.size() == 2) v(i) = cplx(parse_double(trim(ri[0])), parse_double(trim(ri[1])));
        else fail(ErrorCode::Parse, "bad complex entry '" + parts[i] + "'");
    }
    return v;
}

nlohmann::json json_complex(cplx z) { return nlohmann::json::array({format_double(z.real()), format_double(z.imag())}); }

nlohmann::json json_vector(const CVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(json_complex(v(i)));
    return a;
}

nlohmann::json json_vector(const RVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(format_double(v(i)));
    return a;
}

nlohmann::json json_matrix(const CMat& m) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(json_vector(CVec(m.row(i).transpose())));
    return a;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spectral spin-geometry toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    Common c;
    std::vector<Handler> handlers;

    // torus-spectrum
    double ts_cutoff = 3.0;
    {
        auto* sub = app.add_subcommand("torus-spectrum", "analytic Dirac spectrum of a flat torus");
        add_torus(sub, c);
        sub->add_option("--cutoff", ts_cutoff, "spectral cutoff Lambda");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            auto r = torus_dirac_spectrum(lat, d, ts_cutoff);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"cutoff", format_double(ts_cutoff)}};
            o.results = to_json(r);
            o.diagnostics = {{"total_count", r.total_count()}};
            o.csv = "value,multiplicity\n";
            for (const auto& e : r.entries) o.csv += format_double(e.value) + "," + std::to_string(e.multiplicity) + "\n";
            return o;
        }});
    }

    // sphere-spectrum
    int sp_n = 3, sp_m = 5;
    {
        auto* sub = app.add_subcommand("sphere-spectrum", "Dirac and Laplace spectra of the round sphere");
        sub->add_option("--n", sp_n, "sphere dimension");
        sub->add_option("--m-max", sp_m, "largest m / k");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            auto dirac = sphere_dirac_spectrum(sp_n, sp_m);
            auto lap = sphere_laplace_spectrum(sp_n, sp_m);
            Output o;
            o.inputs = {{"n", sp_n}, {"m_max", sp_m}};
            nlohmann::json dj = nlohmann::json::array(), lj = nlohmann::json::array();
            o.csv = "m,abs_lambda,multiplicity_per_sign\n";
            for (const auto& r : dirac) {
                dj.push_back({{"m", r.m}, {"abs_lambda", format_double(r.abs_lambda())}, {"multiplicity_per_sign", r.multiplicity}});
                o.csv += std::to_string(r.m) + "," + format_double(r.abs_lambda()) + "," + std::to_string(r.multiplicity) + "\n";
            }
            for (const auto& r : lap) lj.push_back({{"k", r.k}, {"eigenvalue", r.eigenvalue}, {"multiplicity", r.multiplicity}});
            o.results = {{"dirac", dj}, {"laplace", lj}};
            return o;
        }});
    }

    // sphere-zeros
    std::string sz_poly;
    int sz_n = 3, sz_samples = 20000, sz_iters = 50;
    unsigned sz_seed = 0;
    bool sz_project = false;
    {
        auto* sub = app.add_subcommand("sphere-zeros", "zero set of an eigenspinor on S^n via its harmonic polynomial");
        sub->add_option("--poly", sz_poly, "harmonic polynomial, e.g. x1*x2*x3")->required();
        sub->add_option("--n", sz_n, "sphere dimension (polynomial in x1..x_{n+1})");
        sub->add_option("--samples", sz_samples, "seed points");
        sub->add_option("--newton-iters", sz_iters, "Gauss-Newton iterations");
        sub->add_option("--seed", sz_seed, "sampling seed");
        sub->add_flag("--project", sz_project, "project the polynomial to its harmonic part");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            require(sz_n >= 1 && sz_n <= 15, "sphere dimension must be 1..15");
            Polynomial p = parse_polynomial(sz_poly, sz_n + 1);
            HarmonicPolynomial f = sz_project ? harmonic_project(p) : make_harmonic(p);
            require(sz_samples >= 1 && sz_iters >= 1, "samples and iterations must be positive");
            auto scan = sphere_zero_scan(f, sz_samples, sz_iters, sz_seed);
            Output o;
            o.inputs = {{"poly", sz_poly}, {"n", sz_n}, {"samples", sz_samples}, {"newton_iters", sz_iters}, {"seed", sz_seed},
                        {"project", sz_project}};
            nlohmann::json zs = nlohmann::json::array();
            int d = f.ambient_dim();
            for (int i = 1; i <= d; ++i) o.csv += "x" + std::to_string(i) + ",";
            o.csv += "grad_norm,cluster\n";
            for (const auto& z : scan.zeros) {
                zs.push_back({{"x", json_vector(z.x)}, {"grad_norm", format_double(z.grad_norm)}, {"cluster", z.cluster}});
                std::vector<double> row(z.x.data(), z.x.data() + z.x.size());
                row.push_back(z.grad_norm);
                std::string line = csv_row(row);
                line.pop_back();
                o.csv += line + "," + std::to_string(z.cluster) + "\n";
            }
            o.results = {{"polynomial", f.p.to_string()}, {"zeros", zs}, {"num_clusters", scan.num_clusters},
                         {"num_singular", scan.num_singular}};
            o.diagnostics = {{"seeds", scan.seeds}, {"converged", scan.converged}};
            return o;
        }});
    }

    // discrete-spectrum
    std::string ds_u = "0";
    double ds_cutoff = 3.0;
    {
        auto* sub = app.add_subcommand("discrete-spectrum", "spectrum of the Fourier-Galerkin conformal Dirac operator");
        add_torus(sub, c);
        sub->add_option("--u", ds_u, "conformal factor, e.g. 0.05*cos:1,0,0");
        sub->add_option("--cutoff", ds_cutoff, "mode cutoff Lambda");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            auto u = parse_conformal_factor(ds_u, lat.n);
            auto op = assemble_conformal_dirac(lat, d, u, ds_cutoff);
            auto er = hermitian_spectrum(op, false);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"u", describe(u)}, {"cutoff", format_double(ds_cutoff)}};
            o.results = to_json(er.report);
            o.diagnostics = {{"dim", op.dim()}, {"max_residual", format_double(er.max_residual)},
                             {"norm", format_double(er.norm)}};
            if (lat.n == 2) o.diagnostics["k_defect"] = format_double(structure_defect(op, StructureKind::RealAnticommutingK));
            if (lat.n == 3) o.diagnostics["j_defect"] = format_double(structure_defect(op, StructureKind::QuatCommutingJ));
            o.csv = "value,multiplicity\n";
            for (const auto& e : er.report.entries) o.csv += format_double(e.value) + "," + std::to_string(e.multiplicity) + "\n";
            return o;
        }});
    }

    // spectral-flow
    std::string sf_f = "cos:1,0,0";
    double sf_tmin = -0.1, sf_tmax = 0.1, sf_cutoff = 3.0;
    int sf_steps = 41, sf_k = 4;
    {
        auto* sub = app.add_subcommand("spectral-flow", "smallest positive eigenvalues along u_t = log(1 + t f) / 2");
        add_torus(sub, c);
        sub->add_option("--f", sf_f, "direction f (conformal factor grammar)");
        sub->add_option("--t-min", sf_tmin);
        sub->add_option("--t-max", sf_tmax);
        sub->add_option("--steps", sf_steps);
        sub->add_option("--k", sf_k, "eigenvalues per step");
        sub->add_option("--cutoff", sf_cutoff, "mode cutoff Lambda");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            auto f = parse_conformal_factor(sf_f, lat.n);
            require(sf_steps >= 2 && sf_k >= 1 && sf_tmax > sf_tmin, "need steps >= 2, k >= 1, t-max > t-min");
            double bound = abs_coeff_sum(f) * std::max(std::abs(sf_tmin), std::abs(sf_tmax));
            require(bound < 1.0, "1 + t f must stay positive on the t range");
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"f", describe(f)}, {"t_min", format_double(sf_tmin)},
                        {"t_max", format_double(sf_tmax)}, {"steps", sf_steps}, {"k", sf_k},
                        {"cutoff", format_double(sf_cutoff)}};
            o.csv = "t";
            for (int i = 1; i <= sf_k; ++i) o.csv += ",lambda_" + std::to_string(i);
            o.csv += "\n";
            nlohmann::json rows = nlohmann::json::array();
            double max_res = 0.0;
            for (int s = 0; s < sf_steps; ++s) {
                double t = sf_tmin + (sf_tmax - sf_tmin) * s / (sf_steps - 1);
                CellFunction ut = [&, t](const RVec& x) { return 0.5 * std::log1p(t * f.eval_cell(x)); };
                auto op = assemble_conformal_dirac(lat, d, ut, f.max_mode(), sf_cutoff);
                auto er = hermitian_spectrum(op, false);
                max_res = std::max(max_res, er.max_residual);
                std::vector<double> row{t};
                double tol = 1e-9 * std::max(1.0, er.norm);
                for (int i = 0; i < er.values.size() && static_cast<int>(row.size()) <= sf_k; ++i)
                    if (er.values(i) > tol) row.push_back(er.values(i));
                if (static_cast<int>(row.size()) <= sf_k) fail(ErrorCode::Precond, "cutoff too small for k eigenvalues");
                o.csv += csv_row(row);
                rows.push_back({{"t", format_double(t)},
                                {"values", json_vector(RVec(Eigen::Map<RVec>(row.data() + 1, sf_k)))}});
            }
            o.results = {{"rows", rows}};
            o.diagnostics = {{"max_residual", format_double(max_res)}};
            return o;
        }});
    }

    // perturb-derivative
    std::string pd_u = "0", pd_f, pd_k;
    double pd_cutoff = 4.0;
    int pd_clusters = 3;
    {
        auto* sub = app.add_subcommand("perturb-derivative", "first-order eigenvalue derivatives from the energy-momentum tensor");
        add_torus(sub, c);
        sub->add_option("--u", pd_u, "base conformal factor");
        auto* fo = sub->add_option("--f", pd_f, "conformal direction k = f g");
        auto* ko = sub->add_option("--k", pd_k, "constant symmetric k, row-major n*n");
        fo->excludes(ko);
        sub->add_option("--cutoff", pd_cutoff, "mode cutoff Lambda");
        sub->add_option("--clusters", pd_clusters, "lowest positive clusters");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            auto u = parse_conformal_factor(pd_u, lat.n);
            require(!pd_f.empty() || !pd_k.empty(), "one of --f or --k is required");
            require(pd_clusters >= 1, "clusters must be positive");
            MetricPerturbation k;
            ConformalFactor f;
            if (!pd_f.empty()) {
                f = parse_conformal_factor(pd_f, lat.n);
                k = MetricPerturbation::conformal(f.modes);
            } else {
                RVec e = parse_real_vector(pd_k, lat.n * lat.n);
                RMat K = Eigen::Map<RMat>(e.data(), lat.n, lat.n).transpose();
                require((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, K.cwiseAbs().maxCoeff()),
                        "k must be symmetric");
                k = MetricPerturbation::constant(K);
            }
            auto op = assemble_conformal_dirac(lat, d, u, pd_cutoff);
            auto er = hermitian_spectrum(op, true);
            auto clusters = positive_clusters(er, pd_clusters);
            require(static_cast<int>(clusters.size()) == pd_clusters, "cutoff too small for the requested clusters");
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"u", describe(u)}, {"cutoff", format_double(pd_cutoff)},
                        {"clusters", pd_clusters}};
            if (!pd_f.empty()) o.inputs["f"] = describe(f);
            else o.inputs["k"] = pd_k;
            o.csv = "cluster,lambda,derivative\n";
            nlohmann::json cj = nlohmann::json::array();
            double shortcut_gap = 0.0;
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                RVec der = eigenvalue_derivative(clusters[i].vectors, clusters[i].value, k);
                nlohmann::json entry = {{"lambda", format_double(clusters[i].value)},
                                        {"multiplicity", clusters[i].vectors.size()},
                                        {"derivatives", json_vector(der)}};
                if (!pd_f.empty() && u.modes.empty()) {
                    CMat V = conformal_derivative_matrix(clusters[i].vectors, clusters[i].value, f.modes);
                    RVec sv = Eigen::SelfAdjointEigenSolver<CMat>(V).eigenvalues();
                    entry["conformal_shortcut"] = json_vector(sv);
                    shortcut_gap = std::max(shortcut_gap, (sv - der).cwiseAbs().maxCoeff());
                }
                for (int j = 0; j < der.size(); ++j)
                    o.csv += std::to_string(i + 1) + "," + format_double(clusters[i].value) + "," + format_double(der(j)) + "\n";
                cj.push_back(entry);
            }
            o.results = {{"clusters", cj}};
            o.diagnostics = {{"max_residual", format_double(er.max_residual)}, {"dim", op.dim()}};
            if (!pd_f.empty() && u.modes.empty()) o.diagnostics["shortcut_gap"] = format_double(shortcut_gap);
            return o;
        }});
    }

    // green
    int g_n = 3;
    double g_lambda = 0.0;
    std::string g_at, g_gamma;
    {
        auto* sub = app.add_subcommand("green", "Euclidean Green's function of D - lambda");
        sub->add_option("--n", g_n, "dimension (2 or 3)");
        sub->add_option("--lambda", g_lambda, "spectral parameter of D - lambda");
        sub->add_option("--at", g_at, "evaluation point")->required();
        sub->add_option("--gamma", g_gamma, "constant spinor, entries re or re:im");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            require(g_n == 2 || g_n == 3, "n must be 2 or 3");
            RVec x = parse_real_vector(g_at, g_n);
            CVec gamma = g_gamma.empty() ? CVec(CVec::Unit(2, 0)) : parse_complex_vector(g_gamma, 2);
            auto e = euclidean_green_eval(g_n, g_lambda, x, gamma);
            double res = green_residual(g_n, g_lambda, x, gamma).norm();
            Output o;
            o.inputs = {{"n", g_n}, {"lambda", format_double(g_lambda)}, {"at", json_vector(x)}, {"gamma", json_vector(gamma)}};
            o.results = {{"value", json_vector(e.value)},
                         {"singular_leading", json_vector(e.singular_leading)},
                         {"remainder", json_vector(e.remainder)}};
            o.diagnostics = {{"residual", format_double(res)}};
            o.csv = "component,re,im\n";
            for (int i = 0; i < e.value.size(); ++i)
                o.csv += std::to_string(i) + "," + format_double(e.value(i).real()) + "," + format_double(e.value(i).imag()) + "\n";
            return o;
        }});
    }

    // green-verify
    int gv_n = 3, gv_order = 64;
    double gv_lambda = 1.5;
    {
        auto* sub = app.add_subcommand("green-verify", "residual and defining-integral checks of the Green's function");
        sub->add_option("--n", gv_n, "dimension (2 or 3)");
        sub->add_option("--lambda", gv_lambda, "spectral parameter of D - lambda");
        sub->add_option("--order", gv_order, "quadrature nodes per direction");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            require(gv_n == 2 || gv_n == 3, "n must be 2 or 3");
            BumpSpec b = default_bump(gv_n);
            b.order = gv_order;
            CVec gamma(2);
            gamma << cplx(0.6, 0.2), cplx(-0.1, 0.7);
            auto r = green_verify(gv_n, gv_lambda, b, gamma);
            Output o;
            o.inputs = {{"n", gv_n}, {"lambda", format_double(gv_lambda)}, {"order", gv_order},
                        {"sigma", format_double(b.sigma)}, {"radius", format_double(b.radius)}, {"eps", b.eps}};
            nlohmann::json raw = nlohmann::json::array();
            o.csv = "eps,re,im\n";
            for (std::size_t i = 0; i < r.raw.size(); ++i) {
                raw.push_back(json_complex(r.raw[i]));
                o.csv += csv_row({b.eps[i], r.raw[i].real(), r.raw[i].imag()});
            }
            o.results = {{"max_residual", format_double(r.max_residual)},
                         {"integral_error", format_double(r.integral_error)},
                         {"extrapolated", json_complex(r.extrapolated)},
                         {"target", json_complex(r.target)},
                         {"raw", raw}};
            if (gv_n == 2) {
                double slope = fit_log_coefficient(gv_lambda);
                o.results["log_coefficient"] = format_double(slope);
                o.results["log_coefficient_expected"] = format_double(-gv_lambda / (2.0 * kPi));
            }
            return o;
        }});
    }

    // torus-green
    std::string tg_at = "0.3,0.1,0.2", tg_method = "image", tg_gamma;
    double tg_param = 20.0;
    {
        auto* sub = app.add_subcommand("torus-green", "Green's function of D on a flat torus");
        add_torus(sub, c);
        sub->add_option("--at", tg_at, "evaluation point");
        sub->add_option("--method", tg_method, "image | spectral | heat")
            ->check(CLI::IsMember({"image", "spectral", "heat"}));
        sub->add_option("--param", tg_param, "shell radius R (image) or cutoff Lambda (spectral, heat)");
        sub->add_option("--gamma", tg_gamma, "constant spinor, entries re or re:im");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            int N = 1 << (lat.n / 2);
            RVec x = parse_real_vector(tg_at, lat.n);
            CVec gamma = tg_gamma.empty() ? CVec(CVec::Unit(N, 0)) : parse_complex_vector(tg_gamma, N);
            TorusGreenMethod m = tg_method == "image"      ? TorusGreenMethod::ImageSum
                                 : tg_method == "spectral" ? TorusGreenMethod::SpectralSum
                                                           : TorusGreenMethod::HeatSpectralSum;
            CVec v = torus_green(lat, d, x, gamma, m, tg_param);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"at", json_vector(x)}, {"method", tg_method},
                        {"param", format_double(tg_param)}, {"gamma", json_vector(gamma)}};
            o.results = {{"value", json_vector(v)}};
            o.csv = "component,re,im\n";
            for (int i = 0; i < v.size(); ++i)
                o.csv += std::to_string(i) + "," + format_double(v(i).real()) + "," + format_double(v(i).imag()) + "\n";
            return o;
        }});
    }

    // mass-endo
    double me_R = 20.0;
    int me_half = 0;
    {
        auto* sub = app.add_subcommand("mass-endo", "mass endomorphism of a flat torus by symmetric shells");
        add_torus(sub, c);
        sub->add_option("--shells", me_R, "shell radius R");
        sub->add_option("--half-shell", me_half, "also report the unpaired half of this shell");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            auto m = mass_endomorphism_torus(lat, d, me_R);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"shells", format_double(me_R)}};
            nlohmann::json tr = nlohmann::json::array();
            o.csv = "radius,points,partial_norm\n";
            for (const auto& s : m.trace) {
                tr.push_back({{"radius", format_double(s.radius)}, {"points", s.points},
                              {"partial_norm", format_double(s.partial_norm)}});
                o.csv += format_double(s.radius) + "," + std::to_string(s.points) + "," + format_double(s.partial_norm) + "\n";
            }
            o.results = {{"matrix", json_matrix(m.matrix)},
                         {"max_norm", format_double(m.matrix.cwiseAbs().maxCoeff())},
                         {"trace", tr}};
            if (me_half > 0) {
                o.inputs["half_shell"] = me_half;
                o.results["half_shell_norm"] = format_double(half_shell_sum(lat, d, me_half).cwiseAbs().maxCoeff());
            }
            o.diagnostics = {{"points", m.points}};
            return o;
        }});
    }

    // hijazi
    std::string hj_u = "0", hj_solver = "iterative";
    double hj_cutoff = 4.0;
    {
        auto* sub = app.add_subcommand("hijazi", "Hijazi inequality margin on a conformally flat 3-torus");
        add_torus(sub, c);
        sub->add_option("--u", hj_u, "conformal factor");
        sub->add_option("--cutoff", hj_cutoff, "mode cutoff Lambda");
        sub->add_option("--solver", hj_solver, "iterative | dense")->check(CLI::IsMember({"iterative", "dense"}));
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            require(lat.n == 3, "hijazi is implemented for n = 3");
            auto d = parse_delta_flag(lat, c.delta);
            auto u = parse_conformal_factor(hj_u, lat.n);
            auto h = hijazi_check(lat, d, u, hj_cutoff,
                                  hj_solver == "dense" ? HijaziSolver::Dense : HijaziSolver::Iterative);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"u", describe(u)}, {"cutoff", format_double(hj_cutoff)},
                        {"solver", hj_solver}};
            o.results = {{"lambda1", format_double(h.lambda1)}, {"lambda1_sq", format_double(h.lambda1_sq)},
                         {"mu0", format_double(h.mu0)},         {"bound", format_double(h.bound)},
                         {"margin", format_double(h.margin)}};
            o.diagnostics = {{"dirac_dim", h.dirac_dim}, {"laplace_dim", h.laplace_dim},
                             {"lanczos_iterations", h.lanczos_iterations}};
            o.csv = "lambda1,lambda1_sq,mu0,bound,margin\n" +
                    csv_row({h.lambda1, h.lambda1_sq, h.mu0, h.bound, h.margin});
            return o;
        }});
    }

    // frame-field
    std::string ff_alpha = "0,0,0", ff_alpha2;
    int ff_mu = 1, ff_j = 1, ff_grid = 32;
    {
        auto* sub = app.add_subcommand("frame-field", "frame field of a torus eigenspinor, or zero scan of a two-frequency one");
        add_torus(sub, c);
        sub->add_option("--alpha", ff_alpha, "dual-lattice mode");
        sub->add_option("--alpha2", ff_alpha2, "second mode of equal norm: zero-set scan");
        sub->add_option("--mu", ff_mu, "eigenvalue sign");
        sub->add_option("--j", ff_j, "eigenspace basis index");
        sub->add_option("--grid", ff_grid, "grid points per axis");
        add_outputs(sub, c);
        handlers.push_back({sub, c.json_opt, c.csv_opt, [&]() {
            Lattice lat = parse_lattice_flag(c.lattice);
            auto d = parse_delta_flag(lat, c.delta);
            require(ff_grid >= 2 && ff_grid <= 256, "grid must be in 2..256");
            IntVec a = parse_int_vector(ff_alpha, lat.n);
            Output o;
            o.inputs = {{"lattice", lattice_json(lat, d)}, {"alpha", a}, {"grid", ff_grid}};
            if (!ff_alpha2.empty()) {
                IntVec a2 = parse_int_vector(ff_alpha2, lat.n);
                o.inputs["alpha2"] = a2;
                auto scan = zero_set_scan(two_frequency_field(lat, d, a, a2), ff_grid);
                for (int i = 1; i <= lat.n; ++i) o.csv += "x" + std::to_string(i) + ",";
                o.csv += "abs,cluster\n";
                nlohmann::json pts = nlohmann::json::array();
                for (const auto& p : scan.points) {
                    RVec x = lat.basis * p.s;
                    std::vector<double> row(x.data(), x.data() + x.size());
                    row.push_back(p.abs);
                    std::string line = csv_row(row);
                    line.pop_back();
                    o.csv += line + "," + std::to_string(p.cluster) + "\n";
                    pts.push_back({{"x", json_vector(x)}, {"abs", format_double(p.abs)}, {"cluster", p.cluster}});
                }
                o.results = {{"zeros", pts}, {"num_clusters", scan.num_clusters}};
                o.diagnostics = {{"max_abs", format_double(scan.max_abs)}, {"threshold", format_double(scan.threshold)}};
                return o;
            }
            require(lat.n == 3, "frame fields are defined for n = 3");
            o.inputs["mu"] = ff_mu;
            o.inputs["j"] = ff_j;
            auto rep = torus_frame_field(torus_eigenspinor(lat, d, a, ff_mu, ff_j), ff_grid);
            o.results = {{"min_abs", format_double(rep.min_abs)},
                         {"max_abs", format_double(rep.max_abs)},
                         {"max_orthonormality_error", format_double(rep.max_orthonormality_error)},
                         {"max_det_error", format_double(rep.max_det_error)},
                         {"max_seam_jump", format_double(rep.max_seam_jump)},
                         {"max_neighbor_angle", format_double(rep.max_neighbor_angle)}};
            o.csv = "s1,s2,s3,r11,r12,r13,r21,r22,r23,r31,r32,r33\n";
            int g = ff_grid;
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j)
                    for (int k = 0; k < g; ++k) {
                        const auto& R = rep.frames[(static_cast<std::size_t>(i) * g + j) * g + k];
                        std::vector<double> row{double(i) / g, double(j) / g, double(k) / g};
                        for (int r = 0; r < 3; ++r)
                            for (int s = 0; s < 3; ++s) row.push_back(R(r, s));
                        o.csv += csv_row(row);
                    }
            return o;
        }});
    }

    try {
        std::vector<const char*> argv{kToolName};
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        err << "E:PARSE:" << msg << "\n";
        return 2;
    }

    try {
        for (auto& h : handlers) {
            if (!h.app->parsed()) continue;
            Output o = h.run();
            nlohmann::json doc = {{"tool", kToolName},
                                  {"version", kToolVersion},
                                  {"subcommand", h.app->get_name()},
                                  {"inputs", o.inputs},
                                  {"results", o.results},
                                  {"diagnostics", o.diagnostics}};
            std::string json_text = doc.dump(2) + "\n";
            bool want_json = h.json_opt->count() > 0 || h.csv_opt->count() == 0;
            bool want_csv = h.csv_opt->count() > 0;
            auto emit = [&](const std::string& path, const std::string& text) {
                if (path.empty()) {
                    out << text;
                    return;
                }
                std::ofstream f(path, std::ios::binary);
                if (!f) fail(ErrorCode::IO, "cannot open '" + path + "' for writing");
                f << text;
                if (!f) fail(ErrorCode::IO, "write failed for '" + path + "'");
            };
            if (want_json) emit(c.json_path, json_text);
            if (want_csv) emit(c.csv_path, o.csv);
            return 0;
        }
        fail(ErrorCode::Parse, "no subcommand");
    } catch (const Error& e) {
        err << "E:" << error_code_name(e.code()) << ":" << e.what() << "\n";
        return e.code() == ErrorCode::Parse ? 2 : 1;
    } catch (const std::exception& e) {
        err << "E:NUMERIC:" << e.what() << "\n";
        return 1;
    }
}

}  // namespace spinlab
