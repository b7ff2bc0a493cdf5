// effkern: reduce reaction-diffusion networks to effective nonlocal kernels
// and simulate the resulting integro-differential systems.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "effkern/detect.hpp"
#include "effkern/pipeline.hpp"
#include "effkern/simulate.hpp"

using namespace effkern;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes shared with the docs: 0 ok, 1 generic failure, 2 config parse
// error, 3 unsupported network structure, 4 decay warning under --strict,
// 5 instability abort
enum ExitCode {
    kOk = 0,
    kFail = 1,
    kParse = 2,
    kUnsupported = 3,
    kStrictWarning = 4,
    kInstability = 5,
};

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Manifest {
    json doc;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Manifest(const std::string& subcommand, int argc, char** argv) {
        doc["tool"] = "effkern";
        doc["version"] = kVersion;
        doc["subcommand"] = subcommand;
        std::vector<std::string> args(argv, argv + argc);
        doc["command"] = args;
    }
    void add_output(const std::string& path) { outputs.push_back(path); }
    void write(const std::string& path) {
        doc["outputs"] = outputs;
        doc["wall_clock_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << doc.dump(2) << "\n";
        }
        std::filesystem::rename(tmp, path);
    }
};

struct CommonOpts {
    std::string spec_path;
    std::string preset;
    std::string out_dir;
    int threads = 1;
    bool dry_run = false;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_source = true) {
    if (with_source) {
        cmd->add_option("--spec", c.spec_path, "network config file");
        cmd->add_option("--preset", c.preset, "builtin preset name");
    }
    const char* env_dir = std::getenv("EFFKERN_OUT_DIR");
    c.out_dir = env_dir ? env_dir : ".";
    cmd->add_option("--out-dir", c.out_dir, "output directory");
    cmd->add_option("--threads", c.threads, "parallelism degree")->check(CLI::Range(1, 64));
    cmd->add_flag("--dry-run", c.dry_run, "print the plan without computing");
    cmd->add_flag("--strict", c.strict, "promote warnings to failures");
}

NetworkSpec load_spec(const CommonOpts& c, std::string& config_id) {
    if (!c.preset.empty()) {
        config_id = "preset:" + c.preset;
        return builtin_preset(c.preset);
    }
    if (c.spec_path.empty())
        throw CLI::ValidationError("--spec or --preset is required");
    std::ifstream in(c.spec_path);
    if (!in) throw std::runtime_error("cannot open " + c.spec_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    config_id = text;
    return parse_network(text);
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ReductionMethod parse_method(const std::string& m) {
    if (m == "exact") return ReductionMethod::exact_lambert;
    if (m == "way1") return ReductionMethod::way_I;
    if (m == "way2") return ReductionMethod::way_II;
    throw CLI::ValidationError("unknown method '" + m + "'");
}

std::optional<RegularizationMode::Variant> parse_variant(const std::string& v) {
    if (v.empty()) return std::nullopt;
    if (v == "split") return RegularizationMode::Variant::split;
    if (v == "uniform") return RegularizationMode::Variant::uniform;
    if (v == "mollifier") return RegularizationMode::Variant::mollifier;
    throw CLI::ValidationError("unknown regularization mode '" + v + "'");
}

void write_branches_csv(const std::string& path, const EigenBranches& eb,
                        Manifest& man) {
    std::vector<std::string> headers = {"s"};
    std::vector<std::vector<double>> cols(1 + 2 * eb.size() + 1);
    for (int i = 0; i < eb.grid.n; ++i) cols[0].push_back(eb.grid.point(i));
    for (int j = 0; j < eb.size(); ++j) {
        headers.push_back("re_zeta_" + std::to_string(j + 1));
        for (int i = 0; i < eb.grid.n; ++i)
            cols[1 + j].push_back(eb.branches(i, j).real());
    }
    for (int j = 0; j < eb.size(); ++j) {
        headers.push_back("im_zeta_" + std::to_string(j + 1));
        for (int i = 0; i < eb.grid.n; ++i)
            cols[1 + eb.size() + j].push_back(eb.branches(i, j).imag());
    }
    headers.push_back("lambda_max");
    for (int i = 0; i < eb.grid.n; ++i)
        cols[1 + 2 * eb.size()].push_back(eb.lambda_max(i));
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& c : cols) ptrs.push_back(&c);
    write_csv(path, headers, ptrs);
    man.add_output(path);
}

void write_curve_csv(const std::string& path, const std::string& xlabel,
                     const Eigen::VectorXd& x, const std::string& ylabel,
                     const Eigen::VectorXd& y, Manifest& man) {
    std::vector<double> xs(x.data(), x.data() + x.size());
    std::vector<double> ys(y.data(), y.data() + y.size());
    write_csv(path, {xlabel, ylabel}, {&xs, &ys});
    man.add_output(path);
}

void write_spectrum_csv(const std::string& path, const ReducedSpectrum& rs,
                        Manifest& man) {
    std::vector<double> s(rs.grid.n);
    for (int i = 0; i < rs.grid.n; ++i) s[i] = rs.grid.point(i);
    if (rs.kind == ReducedSpectrum::Kind::scalar) {
        std::vector<double> mu(rs.mu.data(), rs.mu.data() + rs.mu.size());
        write_csv(path, {"s", "mu_max"}, {&s, &mu});
    } else {
        auto vec = [](const Eigen::VectorXd& v) {
            return std::vector<double>(v.data(), v.data() + v.size());
        };
        std::vector<double> n1 = vec(rs.nu1), n2 = vec(rs.nu2), p = vec(rs.p), q = vec(rs.q);
        write_csv(path, {"s", "nu1", "nu2", "p", "q"}, {&s, &n1, &n2, &p, &q});
    }
    man.add_output(path);
}

int finish_warnings(const std::vector<std::string>& warnings, bool strict) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (strict && !warnings.empty()) {
        std::cerr << "error: warnings promoted by --strict\n";
        return kStrictWarning;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

struct ReduceCli {
    CommonOpts common;
    int dim = 0; // 0: preset default
    std::string method = "way2";
    std::string mode;
    double eps = 0.05;
    double delta = 0.1;
    double smax = 40.0;
    int samples = 4096;
    double fit_window = 0.2;
    double kernel_extent = 40.0;
};

int cmd_reduce(const ReduceCli& cli, int argc, char** argv) {
    Manifest man("reduce", argc, argv);
    std::string config_id;
    NetworkSpec spec = load_spec(cli.common, config_id);
    man.doc["config_hash"] = "fnv1a:" + hex64(fnv1a64(config_id));

    ReduceOptions opt;
    opt.dimension = cli.dim > 0 ? cli.dim : spec.dimension_default;
    opt.method = parse_method(cli.method);
    opt.variant = parse_variant(cli.mode);
    opt.epsilon = cli.eps;
    opt.delta = cli.delta;
    opt.s_max = cli.smax;
    opt.samples = cli.samples;
    opt.fit_window = cli.fit_window;
    opt.kernel_extent = cli.kernel_extent;
    opt.threads = cli.common.threads;
    man.doc["params"] = {{"dimension", opt.dimension}, {"method", cli.method},
                         {"eps", cli.eps},             {"delta", cli.delta},
                         {"s_max", cli.smax},          {"samples", cli.samples}};

    if (cli.common.dry_run) {
        std::cout << "plan: reduce " << config_id.substr(0, 32) << " dim=" << opt.dimension
                  << " method=" << cli.method << "\n"
                  << "would write: branches.csv spectrum.csv kernel*.csv manifest.json in "
                  << cli.common.out_dir << "\n";
        return kOk;
    }

    std::filesystem::create_directories(cli.common.out_dir);
    ReduceArtifacts art = run_reduction(spec, opt);

    const std::string& dir = cli.common.out_dir;
    write_branches_csv(join(dir, "branches.csv"), art.branches, man);
    write_spectrum_csv(join(dir, "spectrum.csv"), art.spectrum, man);
    const char* xlabel = opt.dimension == 1 ? "x" : "r";
    write_curve_csv(join(dir, "kernel.csv"), xlabel, art.system.K.x, "K",
                    art.system.K.values, man);
    if (art.system.pair()) {
        write_curve_csv(join(dir, "kernel_M.csv"), xlabel, art.system.M->x, "M",
                        art.system.M->values, man);
        write_curve_csv(join(dir, "kernel_N.csv"), xlabel, art.system.N->x, "N",
                        art.system.N->values, man);
        if (art.system.L && art.system.L->kernel)
            write_curve_csv(join(dir, "kernel_L_remainder.csv"), xlabel,
                            art.system.L->kernel->x, "L_minus_delta",
                            art.system.L->kernel->values, man);
    }

    // summary
    std::cout << "lambda_h: degree " << art.lambda_h.degree;
    if (art.lambda_h.degree == 2) std::cout << ", coefficient " << art.lambda_h.coefficient;
    std::cout << "\n";
    std::cout << "lambda_max(0) = " << art.branches.lambda_max(0) << "\n";
    if (art.spectrum.kind == ReducedSpectrum::Kind::scalar) {
        int arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < art.spectrum.grid.n; ++i) {
            double v = art.lambda_h(art.spectrum.grid.point(i)) + art.spectrum.mu(i);
            if (v > best) { best = v; arg = i; }
        }
        std::cout << "mu_max(0) = " << art.spectrum.mu(0) << "\n";
        std::cout << "dispersion peak " << best << " at s = " << art.spectrum.grid.point(arg)
                  << "\n";
    } else {
        std::cout << "pair reduction (" << method_name(art.spectrum.method)
                  << "), xi_c = " << art.spectrum.xi_c << "\n";
    }
    if (art.branches.collision)
        std::cout << "collision: xi_c = " << art.branches.collision->xi_c << " ("
                  << art.branches.collision->windows << " window(s))\n";

    man.write(join(dir, "manifest.json"));
    return finish_warnings(art.system.warnings, cli.common.strict);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCli {
    CommonOpts common;
    int dim = 0;
    std::string method = "way2";
    std::string mode;
    double eps = 0.05;
    double delta = 0.1;
    int grid_n = 0; // 0: 1024 (1D) / 256 (2D)
    double dx = 0.0; // 0: 0.2 (1D) / 0.5 (2D)
    double dt = 0.0;
    int steps = 2000;
    int record_every = 0;
    std::uint64_t seed = 1;
    double noise_amp = 0.0; // 0: 0.01 u*
    double u_star = 1.0;
    bool irreversible = false;
    bool no_cutoff = false;
    bool ablate = false;
    std::string seed_edge; // "left"
    std::string init_file;
};

void write_snapshot(const std::string& dir, const std::string& tag, const Field& f,
                    int step, Manifest& man, json& snaps) {
    char name[64];
    std::snprintf(name, sizeof(name), "snap_%s%06d", tag.c_str(), step);
    std::string grid_path = join(dir, std::string(name) + ".grid");
    write_grid(grid_path, f);
    man.add_output(grid_path);
    json entry = {{"file", std::string(name) + ".grid"}, {"time", f.time}, {"step", step}};
    if (f.dimension == 2) {
        std::string pgm_path = join(dir, std::string(name) + ".pgm");
        write_pgm(pgm_path, f);
        man.add_output(pgm_path);
        entry["heatmap"] = std::string(name) + ".pgm";
    } else {
        std::vector<double> xs(f.nx), vs(f.values.begin(), f.values.end());
        for (int i = 0; i < f.nx; ++i) xs[i] = i * f.dx;
        std::string csv_path = join(dir, std::string(name) + ".csv");
        write_csv(csv_path, {"x", "u"}, {&xs, &vs});
        man.add_output(csv_path);
        entry["profile"] = std::string(name) + ".csv";
    }
    snaps.push_back(entry);
}

int cmd_simulate(const SimulateCli& cli, int argc, char** argv) {
    Manifest man("simulate", argc, argv);
    std::string config_id;
    NetworkSpec spec = load_spec(cli.common, config_id);
    man.doc["config_hash"] = "fnv1a:" + hex64(fnv1a64(config_id));

    int dim = cli.dim > 0 ? cli.dim : spec.dimension_default;
    int n = cli.grid_n > 0 ? cli.grid_n : (dim == 1 ? 1024 : 256);
    double dx = cli.dx > 0 ? cli.dx : (dim == 1 ? 0.2 : 0.5);

    ReduceOptions opt;
    opt.dimension = dim;
    opt.method = parse_method(cli.method);
    opt.variant = parse_variant(cli.mode);
    opt.epsilon = cli.eps;
    opt.delta = cli.delta;
    opt.u_star = cli.u_star;
    opt.threads = cli.common.threads;

    double amp = cli.noise_amp > 0 ? cli.noise_amp : 0.01 * cli.u_star;
    man.doc["params"] = {{"dimension", dim},       {"method", cli.method},
                         {"grid_n", n},            {"dx", dx},
                         {"steps", cli.steps},     {"seed", cli.seed},
                         {"noise_amp", amp},       {"u_star", cli.u_star},
                         {"irreversible", cli.irreversible}, {"eps", cli.eps},
                         {"delta", cli.delta}};

    if (cli.common.dry_run) {
        std::cout << "plan: reduce (matched to " << n << "x" << dx << "), then "
                  << cli.steps << " Euler steps; snapshots every " << cli.record_every
                  << " steps into " << cli.common.out_dir << "\n";
        return kOk;
    }

    std::filesystem::create_directories(cli.common.out_dir);
    ReduceArtifacts art = run_reduction_matched(spec, opt, n, dx);

    SimParams params;
    params.dt = cli.dt;
    params.steps = cli.steps;
    params.record_every = cli.record_every;
    params.seed = cli.seed;
    params.irreversible = cli.irreversible;
    params.cutoff_enabled = !cli.no_cutoff;

    json snaps = json::array();
    const std::string& dir = cli.common.out_dir;

    auto initial_field = [&]() {
        if (!cli.init_file.empty()) return read_grid(cli.init_file);
        Field f = make_noise_field(dim, n, dim == 1 ? 1 : n, dx, amp, cli.seed);
        if (cli.seed_edge == "left") {
            f = Field::zeros(dim, n, dim == 1 ? 1 : n, dx);
            seed_left_edge(f, std::max(2, n / 32), cli.u_star);
        }
        return f;
    };

    std::vector<std::string> warnings = art.system.warnings;
    if (art.system.pair()) {
        Field x0 = initial_field();
        Field y0 = Field::zeros(dim, n, dim == 1 ? 1 : n, dx);
        PairResult res = simulate_pair(
            art.system, x0, y0, params,
            [&](const Field& f, int step) { write_snapshot(dir, "X", f, step, man, snaps); },
            [&](const Field& f, int step) { write_snapshot(dir, "Y", f, step, man, snaps); });
        write_snapshot(dir, "X", res.x, params.steps, man, snaps);
        write_snapshot(dir, "Y", res.y, params.steps, man, snaps);
        std::cout << "pair simulation done: dt = " << res.dt_used
                  << " (bound " << res.dt_bound << ")\n";
        for (const auto& w : res.warnings) warnings.push_back(w);
    } else {
        Field f0 = initial_field();
        auto run_half = [&](Field start, int steps, int offset) {
            SimParams p = params;
            p.steps = steps;
            SimResult r = simulate_scalar(art.system, start, p,
                                          [&](const Field& f, int step) {
                                              write_snapshot(dir, "", f, offset + step, man,
                                                             snaps);
                                          });
            for (const auto& w : r.warnings) warnings.push_back(w);
            return r;
        };
        SimResult res;
        if (cli.ablate) {
            // run half, knock out a disk, run the rest
            res = run_half(f0, cli.steps / 2, 0);
            std::mt19937_64 rng(cli.seed + 1);
            std::uniform_real_distribution<double> pos(0.25, 0.75);
            double cx = pos(rng) * n * dx, cy = pos(rng) * n * dx;
            ablate_disk(res.final, cx, cy, n * dx / 8.0);
            res = run_half(res.final, cli.steps - cli.steps / 2, cli.steps / 2);
        } else {
            res = run_half(f0, cli.steps, 0);
        }
        write_snapshot(dir, "", res.final, cli.steps, man, snaps);
        std::cout << "scalar simulation done: dt = " << res.dt_used
                  << " (bound " << res.dt_bound << ", |K|_1 = " << res.kernel_l1 << ")\n";
        WavenumberEstimate est = dominant_wavenumber(res.final);
        std::cout << "dominant wavenumber " << est.wavenumber
                  << " (confidence " << est.confidence << ")\n";
    }

    man.doc["snapshots"] = snaps;
    man.write(join(dir, "manifest.json"));
    return finish_warnings(warnings, cli.common.strict);
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleCli {
    CommonOpts common;
    int dim = 0;
    std::string mode = "single";
    double xi = 1.0;
    int grid_n = 0;
    double dx = 0.0;
    double dt = 0.05;
    int steps = 200;
    std::uint64_t seed = 1;
    double noise_amp = 0.01;
};

int cmd_oracle(const OracleCli& cli, int argc, char** argv) {
    Manifest man("oracle", argc, argv);
    std::string config_id;
    NetworkSpec spec = load_spec(cli.common, config_id);
    man.doc["config_hash"] = "fnv1a:" + hex64(fnv1a64(config_id));
    int dim = cli.dim > 0 ? cli.dim : spec.dimension_default;
    int n = cli.grid_n > 0 ? cli.grid_n : (dim == 1 ? 1024 : 128);
    double dx = cli.dx > 0 ? cli.dx : 0.2;
    man.doc["params"] = {{"dimension", dim}, {"mode", cli.mode}, {"xi", cli.xi},
                         {"grid_n", n},      {"dx", dx},         {"dt", cli.dt},
                         {"steps", cli.steps}};

    if (cli.common.dry_run) {
        std::cout << "plan: oracle " << cli.mode << " on " << n << "^" << dim << "\n";
        return kOk;
    }
    std::filesystem::create_directories(cli.common.out_dir);

    SpectralSymbol symbol = assemble_symbol(spec, dim);
    SimParams params;
    params.dt = cli.dt;
    params.steps = cli.steps;

    if (cli.mode == "single") {
        // snap xi to the nearest grid mode
        double L = n * dx;
        int k = std::max(1, static_cast<int>(std::lround(cli.xi * L / (2.0 * std::numbers::pi))));
        double xi = 2.0 * std::numbers::pi * k / L;
        Eigen::EigenSolver<Eigen::MatrixXd> es(symbol.evaluate(xi));
        double lmax = es.eigenvalues().real().maxCoeff();

        std::vector<Field> u0;
        for (int c = 0; c < spec.size(); ++c) {
            Field f = Field::zeros(dim, n, dim == 1 ? 1 : n, dx);
            for (int iy = 0; iy < f.ny; ++iy)
                for (int ix = 0; ix < f.nx; ++ix)
                    f.at(ix, iy) = 1e-3 * std::cos(xi * ix * dx);
            u0.push_back(f);
        }
        // growth rate from the second half of the run
        std::vector<Field> mid = simulate_full_network(spec, dim, u0, params);
        std::vector<Field> fin = simulate_full_network(spec, dim, mid, params);
        FftGrid fft(n, dim == 1 ? 1 : n);
        std::vector<std::complex<double>> sa(fft.spectrum_size()), sb(fft.spectrum_size());
        fft.forward(mid[0].values.data(), sa.data());
        fft.forward(fin[0].values.data(), sb.data());
        double t = cli.dt * cli.steps;
        double rate = std::log(std::abs(sb[k]) / std::abs(sa[k])) / t;
        double rel = std::fabs(rate - lmax) / std::max(1e-300, std::fabs(lmax));
        std::cout << "mode xi = " << xi << "\n";
        std::cout << "measured growth rate = " << rate << "\n";
        std::cout << "lambda_max(xi)       = " << lmax << "\n";
        std::cout << "relative error       = " << rel << "\n";
        for (int c = 0; c < spec.size(); ++c) {
            std::string path = join(cli.common.out_dir,
                                    "oracle_" + spec.components[c] + ".grid");
            write_grid(path, fin[c]);
            man.add_output(path);
        }
    } else if (cli.mode == "noise") {
        std::vector<Field> u0;
        for (int c = 0; c < spec.size(); ++c)
            u0.push_back(make_noise_field(dim, n, dim == 1 ? 1 : n, dx, cli.noise_amp,
                                          cli.seed + c));
        std::vector<Field> fin = simulate_full_network(spec, dim, u0, params);
        WavenumberEstimate est = dominant_wavenumber(fin[0]);
        // argmax of the dispersion over the same bins
        WavenumberGrid grid{std::numbers::pi / dx, 512};
        EigenBranches eb = sample_eigenvalues(symbol, grid, cli.common.threads);
        int arg = 0;
        for (int i = 1; i < grid.n; ++i)
            if (eb.lambda_max(i) > eb.lambda_max(arg)) arg = i;
        std::cout << "dominant wavenumber = " << est.wavenumber << " (confidence "
                  << est.confidence << ")\n";
        std::cout << "dispersion argmax   = " << grid.point(arg) << "\n";
        for (int c = 0; c < spec.size(); ++c) {
            std::string path = join(cli.common.out_dir,
                                    "oracle_" + spec.components[c] + ".grid");
            write_grid(path, fin[c]);
            man.add_output(path);
        }
    } else {
        throw CLI::ValidationError("oracle mode must be single or noise");
    }
    man.write(join(cli.common.out_dir, "manifest.json"));
    return kOk;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectCli {
    CommonOpts common;
    std::string before;
    std::string after;
    double delta = 1e-3;
    double floor_rel = 1e-6;
};

int cmd_detect(const DetectCli& cli, int argc, char** argv) {
    Manifest man("detect", argc, argv);
    man.doc["params"] = {{"before", cli.before}, {"after", cli.after},
                         {"delta", cli.delta},   {"floor_rel", cli.floor_rel}};
    if (cli.common.dry_run) {
        std::cout << "plan: detect " << cli.before << " -> " << cli.after << "\n";
        return kOk;
    }
    std::filesystem::create_directories(cli.common.out_dir);
    Field before = read_grid(cli.before);
    Field after = read_grid(cli.after);
    DetectionResult res = detect_kernel(before, after, cli.delta, cli.floor_rel);

    FftGrid fft(before.nx, before.dimension == 1 ? 1 : before.ny);
    std::vector<double> kx(res.spectrum.size()), ky(res.spectrum.size()),
        val(res.spectrum.begin(), res.spectrum.end()), masked(res.spectrum.size());
    for (int m = 0; m < static_cast<int>(res.spectrum.size()); ++m) {
        fft.mode_components(m, before.dx, kx[m], ky[m]);
        masked[m] = res.mask[m] ? 1.0 : 0.0;
    }
    std::string spath = join(cli.common.out_dir, "detected_spectrum.csv");
    if (before.dimension == 1)
        write_csv(spath, {"s", "k_hat", "masked"}, {&kx, &val, &masked});
    else
        write_csv(spath, {"kx", "ky", "k_hat", "masked"}, {&kx, &ky, &val, &masked});
    man.add_output(spath);

    std::string gpath = join(cli.common.out_dir, "detected_kernel.grid");
    write_grid(gpath, res.kernel);
    man.add_output(gpath);

    std::cout << "unmasked modes: " << res.unmasked << " / " << res.spectrum.size() << "\n";
    std::cout << "imaginary residue: " << res.imag_residue << "\n";
    man.write(join(cli.common.out_dir, "manifest.json"));
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective nonlocal kernels for linear reaction-diffusion networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    ReduceCli rc;
    CLI::App* reduce = app.add_subcommand("reduce", "reduce a network to its kernel(s)");
    add_common(reduce, rc.common);
    reduce->add_option("--dim", rc.dim, "1 or 2 (default: preset's)")->check(CLI::Range(1, 2));
    reduce->add_option("--method", rc.method, "exact | way1 | way2");
    reduce->add_option("--mode", rc.mode, "split | uniform | mollifier");
    reduce->add_option("--eps", rc.eps, "damping scale");
    reduce->add_option("--delta", rc.delta, "time shift");
    reduce->add_option("--smax", rc.smax, "wavenumber cutoff");
    reduce->add_option("--samples", rc.samples, "grid samples")->check(CLI::Range(16, 1 << 20));
    reduce->add_option("--fit-window", rc.fit_window, "top fraction for the lambda_h fit");
    reduce->add_option("--kernel-rmax", rc.kernel_extent, "radial kernel reach (2D)");

    SimulateCli sc;
    CLI::App* simulate = app.add_subcommand("simulate", "reduce inline and time-step");
    add_common(simulate, sc.common);
    simulate->add_option("--dim", sc.dim, "1 or 2")->check(CLI::Range(1, 2));
    simulate->add_option("--method", sc.method, "exact | way1 | way2");
    simulate->add_option("--mode", sc.mode, "split | uniform | mollifier");
    simulate->add_option("--eps", sc.eps, "damping scale");
    simulate->add_option("--delta", sc.delta, "time shift");
    simulate->add_option("--grid-n", sc.grid_n, "grid points per side");
    simulate->add_option("--dx", sc.dx, "grid spacing");
    simulate->add_option("--dt", sc.dt, "time step (0: half the stability bound)");
    simulate->add_option("--steps", sc.steps, "step count");
    simulate->add_option("--record-every", sc.record_every, "snapshot cadence");
    simulate->add_option("--seed", sc.seed, "noise seed");
    simulate->add_option("--noise-amp", sc.noise_amp, "noise amplitude (0: 0.01 u*)");
    simulate->add_option("--u-star", sc.u_star, "cutoff saturation level");
    simulate->add_flag("--irreversible", sc.irreversible, "max{., 0} reaction term");
    simulate->add_flag("--no-cutoff", sc.no_cutoff, "disable chi (linear run)");
    simulate->add_flag("--ablate", sc.ablate, "zero a disk mid-run");
    simulate->add_option("--seed-edge", sc.seed_edge, "left: seed the left edge");
    simulate->add_option("--init-file", sc.init_file, "initial state grid file");

    OracleCli oc;
    CLI::App* oracle = app.add_subcommand("oracle", "exact linear network stepping");
    add_common(oracle, oc.common);
    oracle->add_option("--dim", oc.dim, "1 or 2")->check(CLI::Range(1, 2));
    oracle->add_option("--mode", oc.mode, "single | noise");
    oracle->add_option("--xi", oc.xi, "wavenumber for single-mode runs");
    oracle->add_option("--grid-n", oc.grid_n, "grid points per side");
    oracle->add_option("--dx", oc.dx, "grid spacing");
    oracle->add_option("--dt", oc.dt, "time step");
    oracle->add_option("--steps", oc.steps, "steps per measurement half");
    oracle->add_option("--seed", oc.seed, "noise seed");
    oracle->add_option("--noise-amp", oc.noise_amp, "noise amplitude");

    DetectCli dc;
    CLI::App* detect = app.add_subcommand("detect", "recover a kernel from two snapshots");
    add_common(detect, dc.common, /*with_source=*/false);
    detect->add_option("before", dc.before, "snapshot at t")->required();
    detect->add_option("after", dc.after, "snapshot at t + delta")->required();
    detect->add_option("--delta", dc.delta, "time separation")->required();
    detect->add_option("--floor", dc.floor_rel, "relative denominator floor");

    CLI::App* presets = app.add_subcommand("preset-list", "list builtin presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (reduce->parsed()) return cmd_reduce(rc, argc, argv);
        if (simulate->parsed()) return cmd_simulate(sc, argc, argv);
        if (oracle->parsed()) return cmd_oracle(oc, argc, argv);
        if (detect->parsed()) return cmd_detect(dc, argc, argv);
        if (presets->parsed()) {
            for (const auto& name : preset_names()) {
                NetworkSpec s = builtin_preset(name);
                std::cout << name << " (" << s.size() << " components, dim "
                          << s.dimension_default << "): " << s.notes << "\n";
            }
            return kOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kParse;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported structure: " << e.what() << "\n";
        return kUnsupported;
    } catch (const ComplexBranches& e) {
        std::cerr << "unsupported structure: " << e.what() << "\n";
        return kUnsupported;
    } catch (const InstabilityError& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return kInstability;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kFail;
}
