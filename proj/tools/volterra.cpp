#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "volterra/error.hpp"
#include "volterra/heat.hpp"
#include "volterra/kernel_transform.hpp"
#include "volterra/parametrix.hpp"
#include "volterra/summation.hpp"

using namespace volterra;

namespace {

constexpr int kInputError = 1;
constexpr int kCertificationError = 2;

struct RunConfig {
    std::string input;
    std::string output;
    std::string method = "analytic";
    int depth = -1;
    int budget = 3;
    std::uint64_t seed = 1;
    std::vector<double> shells;
    double tol = 1e-6;
    std::string t_range = "-2..2";
    int nt = 17;
    double x = 0.0;
    std::vector<double> y{0.0};
    std::vector<double> xs{0.0};
    double resolution = 1.0;
    std::string format = "json";
    bool analyticity = false;
    std::vector<std::string> estimates;
};

Json read_json(const std::string& path) {
    if (path.empty()) throw InvalidArgument("--input is required");
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open input file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("malformed JSON in '" + path + "': " + e.what());
    }
}

// Writes to a temporary file in the target directory and renames it into place.
void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::path target(cfg.output);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw InvalidArgument("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, target);
}

void emit_json(const RunConfig& cfg, const Json& j) {
    emit(cfg, j.dump(2) + "\n");
}

SummationOptions summation_options(const RunConfig& cfg) {
    SummationOptions o;
    if (cfg.depth >= 0) o.n_max = static_cast<std::size_t>(cfg.depth);
    o.budget = cfg.budget;
    o.seed = cfg.seed;
    o.estimate_grid.seed = cfg.seed;
    o.analyticity.seed = cfg.seed;
    if (!cfg.shells.empty()) o.estimate_grid.shells = cfg.shells;
    o.analyticity.tolerance = cfg.tol;
    return o;
}

void validate(const RunConfig& cfg) {
    if (cfg.budget < 0) throw InvalidArgument("--budget must be >= 0");
    if (!(cfg.tol > 0.0)) throw InvalidArgument("--tol must be positive");
    if (cfg.nt < 1) throw InvalidArgument("--nt must be >= 1");
    if (!(cfg.resolution > 0.0)) throw InvalidArgument("--resolution must be positive");
    for (double s : cfg.shells) {
        if (!(s > 0.0)) throw InvalidArgument("--shells entries must be positive");
    }
    if (cfg.format != "json" && cfg.format != "csv") throw InvalidArgument("--format must be json or csv");
}

bool all_pass(const std::vector<EstimateReport>& reports) {
    for (const auto& r : reports) {
        if (!r.pass) return false;
    }
    return true;
}

int cmd_sum(const RunConfig& cfg) {
    auto exp = SymbolExpansion::from_json(read_json(cfg.input));
    auto q = realize(parse_method(cfg.method), exp, summation_options(cfg));
    emit_json(cfg, q.to_json());
    return q.certified() ? 0 : kCertificationError;
}

OperatorSpec read_operator(const RunConfig& cfg) {
    return OperatorSpec::from_json(read_json(cfg.input));
}

int cmd_parametrix(const RunConfig& cfg) {
    auto spec = read_operator(cfg);
    int J = cfg.depth >= 0 ? cfg.depth : 4;
    auto comps = parametrix_components(spec, J);
    auto rep = compose_check(spec, comps, J);
    Json j = comps.to_json();
    j["operator"] = spec.to_json();
    j["compose_check"] = rep.to_json();
    emit_json(cfg, j);
    return rep.exact ? 0 : kCertificationError;
}

int cmd_heat(const RunConfig& cfg) {
    auto spec = read_operator(cfg);
    int J = cfg.depth >= 0 ? cfg.depth : 4;
    std::string id = std::filesystem::path(cfg.input).stem().string();
    auto h = heat_coefficients(spec, J, cfg.xs, cfg.resolution, id);
    emit_json(cfg, h.to_json());
    return 0;
}

std::vector<double> time_grid(const RunConfig& cfg) {
    auto pos = cfg.t_range.find("..");
    if (pos == std::string::npos) throw InvalidArgument("--t expects a range a..b");
    double a, b;
    try {
        a = std::stod(cfg.t_range.substr(0, pos));
        b = std::stod(cfg.t_range.substr(pos + 2));
    } catch (const std::exception&) {
        throw InvalidArgument("--t expects numeric bounds, got '" + cfg.t_range + "'");
    }
    if (!(a < b)) throw InvalidArgument("--t needs a < b");
    std::vector<double> t;
    for (int i = 0; i < cfg.nt; ++i) {
        double v = cfg.nt == 1 ? a : a + (b - a) * i / (cfg.nt - 1);
        // the kernel is only sampled off t = 0
        if (std::abs(v) > 1e-12 * std::max(std::abs(a), std::abs(b))) t.push_back(v);
    }
    return t;
}

int cmd_kernel(const RunConfig& cfg) {
    Json in = read_json(cfg.input);
    KernelOptions opts;
    opts.tol = cfg.tol;
    opts.resolution = cfg.resolution;
    auto t = time_grid(cfg);

    KernelSlice k;
    if (in.contains("method")) {
        auto q = RealizedSymbol::from_json(in);
        k = inverse_fourier_kernel(q, cfg.x, cfg.y, t, opts);
    } else {
        auto exp = SymbolExpansion::from_json(in);
        if (exp.size() == 0) throw InvalidArgument("empty expansion");
        SymExpr sum(exp.context());
        for (const auto& e : exp.entries()) sum += e.symbol;
        ExprFunction f(sum);
        k = inverse_fourier_kernel(f, exp.entries().front().order, cfg.x, cfg.y, t, opts);
    }

    bool has_neg = false, has_pos = false;
    double lo = 0.0;
    for (double v : t) {
        if (v < 0.0) {
            has_neg = true;
            lo = std::min(lo, v);
        }
        if (v > 0.0) has_pos = true;
    }
    bool pass = true;
    Json report = nullptr;
    if (has_neg && has_pos) {
        double hi = -INFINITY;
        for (double v : t) {
            if (v < 0.0) hi = std::max(hi, v);
        }
        auto rep = volterra_check(k, lo, hi);
        pass = rep.pass;
        report = rep.to_json();
    }
    if (cfg.format == "csv") {
        emit(cfg, k.to_csv());
    } else {
        Json j{{"kernel", k.to_json()}, {"volterra_check", report}};
        emit_json(cfg, j);
    }
    return pass ? 0 : kCertificationError;
}

int cmd_verify(const RunConfig& cfg) {
    Json in = read_json(cfg.input);
    std::vector<EstimateReport> reports;
    auto opts = summation_options(cfg);
    std::vector<std::string> ids = cfg.estimates;
    if (ids.empty() && !cfg.analyticity) ids = {"eq8"};

    if (in.contains("method")) {
        auto q = RealizedSymbol::from_json(in);
        const auto& exp = q.source();
        std::size_t count = q.components().size();
        if (cfg.depth >= 0) count = std::min(count, static_cast<std::size_t>(cfg.depth) + 1);
        auto grid = certification_grid(q, opts.estimate_grid);
        for (const auto& id : ids) {
            EstimateMode mode;
            if (id == "eq4") {
                mode = EstimateMode::RealTau;
            } else if (id == "eq8") {
                mode = EstimateMode::HalfPlane;
            } else {
                throw InvalidArgument("unknown estimate '" + id + "' (expected eq4 or eq8)");
            }
            for (std::size_t N = 1; N <= count; ++N) {
                reports.push_back(check_expansion_estimates(q, exp, N, cfg.budget, mode, grid));
            }
        }
        if (cfg.analyticity) reports.push_back(check_analyticity(q, opts.analyticity));
    } else {
        auto exp = SymbolExpansion::from_json(in);
        if (!ids.empty() && exp.mode() == ExpansionMode::Polyhomogeneous) {
            for (const auto& e : exp.entries()) {
                HomogeneousSymbol h(e.symbol, static_cast<int>(e.order));
                auto r = check_homogeneity(h, 1000, cfg.seed);
                r.grid["order"] = e.order;
                reports.push_back(std::move(r));
            }
        }
        if (cfg.analyticity) {
            for (const auto& e : exp.entries()) reports.push_back(check_analyticity(ExprFunction(e.symbol), opts.analyticity));
        }
    }
    Json bundle = Json::array();
    for (const auto& r : reports) bundle.push_back(r.to_json());
    bool pass = all_pass(reports);
    emit_json(cfg, Json{{"pass", pass}, {"reports", bundle}});
    return pass ? 0 : kCertificationError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra symbol calculus: summation, parametrices, heat coefficients and kernels"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
        sub->add_option("--seed", cfg.seed, "Random seed for sampling grids");
    };

    auto* sum = app.add_subcommand("sum", "Realize an asymptotic expansion as a symbol");
    sum->add_option("--input,--symbol,-i", cfg.input, "SymbolExpansion JSON")->required();
    sum->add_option("--method,-m", cfg.method, "cutoff | analytic | translation");
    sum->add_option("--depth", cfg.depth, "Highest term index N_max (default: all)");
    sum->add_option("--budget", cfg.budget, "Derivative budget |alpha|+|beta|+k");
    sum->add_option("--shells", cfg.shells, "Estimate shells (pseudo-norm radii)")->delimiter(',');
    sum->add_option("--tol", cfg.tol, "Analyticity residual tolerance");
    add_common(sum);

    auto* par = app.add_subcommand("parametrix", "Parametrix components of P + d_t");
    par->add_option("--input,--op,-i", cfg.input, "OperatorSpec JSON")->required();
    par->add_option("--depth", cfg.depth, "Number of correction terms J (default 4)");
    add_common(par);

    auto* heat = app.add_subcommand("heat", "Small-time heat kernel coefficients");
    heat->add_option("--input,--op,-i", cfg.input, "OperatorSpec JSON")->required();
    heat->add_option("--depth", cfg.depth, "Highest coefficient index J (default 4)");
    heat->add_option("--x", cfg.xs, "x samples")->delimiter(',');
    heat->add_option("--resolution", cfg.resolution, "Quadrature resolution multiplier");
    add_common(heat);

    auto* ker = app.add_subcommand("kernel", "Space-time kernel slice and Volterra check");
    ker->add_option("--input,--symbol,-i", cfg.input, "SymbolExpansion or realized symbol JSON")->required();
    ker->add_option("--t", cfg.t_range, "Time range a..b");
    ker->add_option("--nt", cfg.nt, "Number of t samples");
    ker->add_option("--x", cfg.x, "Base point x");
    ker->add_option("--y", cfg.y, "y samples")->delimiter(',');
    ker->add_option("--tol", cfg.tol, "Absolute quadrature tolerance");
    ker->add_option("--resolution", cfg.resolution, "Quadrature resolution multiplier");
    ker->add_option("--format", cfg.format, "json | csv");
    add_common(ker);

    auto* ver = app.add_subcommand("verify", "Re-run symbol estimates on a realized symbol or expansion");
    ver->add_option("--input,--symbol,-i", cfg.input, "Realized symbol or SymbolExpansion JSON")->required();
    ver->add_option("--estimates", cfg.estimates, "eq4, eq8")->delimiter(',');
    ver->add_flag("--analyticity", cfg.analyticity, "Check analyticity in tau");
    ver->add_option("--depth", cfg.depth, "Highest N to check");
    ver->add_option("--budget", cfg.budget, "Derivative budget");
    ver->add_option("--shells", cfg.shells, "Estimate shells")->delimiter(',');
    ver->add_option("--tol", cfg.tol, "Analyticity residual tolerance");
    add_common(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        validate(cfg);
        if (*sum) return cmd_sum(cfg);
        if (*par) return cmd_parametrix(cfg);
        if (*heat) return cmd_heat(cfg);
        if (*ker) return cmd_kernel(cfg);
        return cmd_verify(cfg);
    } catch (const CertificationError& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return kCertificationError;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature failed: " << e.what() << "\n";
        return kCertificationError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
