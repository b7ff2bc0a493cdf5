#include "effkern/eigenflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

namespace effkern {

namespace {

Eigen::VectorXcd solve_eigenvalues(const Eigen::MatrixXd& m, double s) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen solver failure at s=" + std::to_string(s));
    return solver.eigenvalues();
}

// Minimal-total-distance assignment of cur onto prev. Exhaustive for small
// sizes (the paper's networks have N <= 6); greedy beyond that.
std::vector<int> match_branches(const Eigen::VectorXcd& prev,
                                const Eigen::VectorXcd& cur) {
    const int n = static_cast<int>(prev.size());
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    if (n <= 6) {
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double cost = 0.0;
            for (int j = 0; j < n; ++j) cost += std::abs(prev(j) - cur(perm[j]));
            // strict < keeps the lexicographically first permutation on ties
            if (cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<bool> used(n, false);
        for (int j = 0; j < n; ++j) {
            int pick = -1;
            double d = std::numeric_limits<double>::infinity();
            for (int k = 0; k < n; ++k) {
                if (used[k]) continue;
                double c = std::abs(prev(j) - cur(k));
                if (c < d) { d = c; pick = k; }
            }
            used[pick] = true;
            best[j] = pick;
        }
    }
    return best;
}

bool conjugate_pair(std::complex<double> a, std::complex<double> b) {
    if (a.imag() == 0.0 || b.imag() == 0.0) return false;
    double scale = std::max(1.0, std::abs(a));
    return std::abs(std::conj(a) - b) <= 1e-9 * scale;
}

// Leading pair of `vals` taken as the two entries closest to the reference
// pair; true when that pair is complex.
bool pair_complex_at(const Eigen::VectorXcd& vals, std::complex<double> r0,
                     std::complex<double> r1) {
    int n = static_cast<int>(vals.size());
    int i0 = 0;
    double d0 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        double d = std::abs(vals(k) - r0);
        if (d < d0) { d0 = d; i0 = k; }
    }
    int i1 = -1;
    double d1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        if (k == i0) continue;
        double d = std::abs(vals(k) - r1);
        if (d < d1) { d1 = d; i1 = k; }
    }
    return vals(i0).imag() != 0.0 && vals(i1).imag() != 0.0;
}

} // namespace

EigenBranches sample_eigenvalues(const SymbolFn& fn, int size,
                                 const WavenumberGrid& grid, int threads) {
    if (!grid.valid())
        throw std::invalid_argument("sample_eigenvalues: invalid grid (need n >= 16, s_max > 0)");

    std::vector<Eigen::VectorXcd> raw(grid.n);
    auto solve_range = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            double s = grid.point(i);
            raw[i] = solve_eigenvalues(fn(s), s);
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        solve_range(0, grid.n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (grid.n + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            int lo = t * chunk;
            int hi = std::min(grid.n, lo + chunk);
            if (lo < hi) pool.emplace_back(solve_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    EigenBranches out;
    out.grid = grid;
    out.branches.resize(grid.n, size);
    out.lambda_max.resize(grid.n);

    // Order at s = 0 by descending real part (imaginary part breaks ties).
    {
        std::vector<int> idx(size);
        std::iota(idx.begin(), idx.end(), 0);
        const Eigen::VectorXcd& v = raw[0];
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (v(a).real() != v(b).real()) return v(a).real() > v(b).real();
            return v(a).imag() > v(b).imag();
        });
        for (int j = 0; j < size; ++j) out.branches(0, j) = v(idx[j]);
    }
    for (int i = 1; i < grid.n; ++i) {
        Eigen::VectorXcd prev = out.branches.row(i - 1).transpose();
        std::vector<int> m = match_branches(prev, raw[i]);
        for (int j = 0; j < size; ++j) out.branches(i, j) = raw[i](m[j]);
    }

    // Canonical orientation: within each mutually-conjugate column pair,
    // the lower-indexed branch carries the positive imaginary part.
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j + 1 < size; ++j) {
            for (int k = j + 1; k < size; ++k) {
                if (conjugate_pair(out.branches(i, j), out.branches(i, k)) &&
                    out.branches(i, j).imag() < 0.0) {
                    std::swap(out.branches(i, j), out.branches(i, k));
                }
            }
        }
    }

    for (int i = 0; i < grid.n; ++i) {
        double m = out.branches(i, 0).real();
        for (int j = 1; j < size; ++j) m = std::max(m, out.branches(i, j).real());
        out.lambda_max(i) = m;
    }

    try {
        out.collision = detect_collision(fn, size, out);
    } catch (const UnsupportedError& e) {
        out.collision_diagnostic = e.what();
    }
    return out;
}

namespace {

struct QuadraticFit {
    double alpha = 0.0;
    double beta = 0.0;
    double rms = 0.0;
    double scale = 0.0; // max |lambda_max| over the window
};

QuadraticFit fit_quadratic(const EigenBranches& branches, int lo) {
    const int n = branches.grid.n;
    double s4 = 0, s2 = 0, c = 0, ys2 = 0, y1 = 0;
    for (int i = lo; i < n; ++i) {
        double s = branches.grid.point(i);
        double y = branches.lambda_max(i);
        double q = s * s;
        s4 += q * q;
        s2 += q;
        c += 1.0;
        ys2 += y * q;
        y1 += y;
    }
    double det = s4 * c - s2 * s2;
    if (det == 0.0) throw UnsupportedError("fit_lambda_h: degenerate fit window");
    QuadraticFit f;
    f.alpha = (ys2 * c - y1 * s2) / det;
    f.beta = (s4 * y1 - s2 * ys2) / det;
    double ss = 0.0;
    for (int i = lo; i < n; ++i) {
        double s = branches.grid.point(i);
        double r = branches.lambda_max(i) - (f.alpha * s * s + f.beta);
        ss += r * r;
        f.scale = std::max(f.scale, std::fabs(branches.lambda_max(i)));
    }
    f.rms = std::sqrt(ss / (n - lo));
    return f;
}

bool quadratic_dominates(const QuadraticFit& f, double s_max) {
    double lead = std::fabs(f.alpha) * s_max * s_max;
    return lead >= 10.0 * std::fabs(f.beta) && lead > 1e-10 * std::max(1.0, f.scale);
}

} // namespace

LambdaH fit_lambda_h(const EigenBranches& branches, double fit_window) {
    const int n = branches.grid.n;
    const double s_max = branches.grid.s_max;
    int lo = std::min(n - 8, static_cast<int>(std::ceil((1.0 - fit_window) * (n - 1))));
    lo = std::max(0, lo);
    int lo_half = std::min(n - 4, lo + (n - lo) / 2);

    QuadraticFit full = fit_quadratic(branches, lo);
    QuadraticFit half = fit_quadratic(branches, lo_half);

    // Ambiguity gate: the degree decision or the coefficient must be stable
    // against shrinking the window, and the residual must not swamp the
    // fitted model. Bounded oscillation (ring-coupling tails) stays benign.
    bool deg2_full = quadratic_dominates(full, s_max);
    bool deg2_half = quadratic_dominates(half, s_max);
    double model_scale = std::fabs(full.alpha) * s_max * s_max + std::fabs(full.beta);
    if (deg2_full != deg2_half)
        throw UnsupportedError("fit_lambda_h: ambiguous asymptote (degree decision "
                               "unstable under window refinement)");
    if (deg2_full && std::fabs(half.alpha - full.alpha) > 0.05 * std::fabs(full.alpha))
        throw UnsupportedError("fit_lambda_h: ambiguous asymptote (quadratic "
                               "coefficient unstable: " + std::to_string(full.alpha) +
                               " vs " + std::to_string(half.alpha) + ")");
    if (full.rms > 0.5 * std::max(model_scale, 1e-12))
        throw UnsupportedError("fit_lambda_h: ambiguous asymptote (fit residual " +
                               std::to_string(full.rms) + " over model scale " +
                               std::to_string(model_scale) + ")");

    LambdaH out;
    out.intercept = full.beta;
    out.fit_residual = full.rms;
    if (deg2_full) {
        if (full.alpha > 0.0)
            throw UnsupportedError("fit_lambda_h: growing leading transport (alpha > 0)");
        out.degree = 2;
        out.coefficient = full.alpha;
    }
    return out;
}

std::optional<CollisionData> detect_collision(const SymbolFn& fn, int size,
                                              const EigenBranches& branches) {
    if (size < 2) return std::nullopt;
    const int n = branches.grid.n;

    std::vector<bool> complex_here(n);
    for (int i = 0; i < n; ++i)
        complex_here[i] = conjugate_pair(branches.branches(i, 0), branches.branches(i, 1));

    int first = -1;
    int windows = 0;
    bool prev = false;
    for (int i = 0; i < n; ++i) {
        if (complex_here[i] && first < 0) first = i;
        if (complex_here[i] && !prev) ++windows;
        prev = complex_here[i];
    }
    if (first < 0) return std::nullopt;

    CollisionData cd;
    cd.windows = windows;
    if (first == 0) {
        cd.xi_c = 0.0; // window starts at the origin
    } else {
        double lo = branches.grid.point(first - 1);
        double hi = branches.grid.point(first);
        std::complex<double> r0 = branches.branches(first - 1, 0);
        std::complex<double> r1 = branches.branches(first - 1, 1);
        double width = branches.grid.spacing() / 64.0;
        while (hi - lo > width) {
            double mid = 0.5 * (lo + hi);
            if (pair_complex_at(solve_eigenvalues(fn(mid), mid), r0, r1))
                hi = mid;
            else
                lo = mid;
        }
        cd.xi_c = 0.5 * (lo + hi);
    }

    cd.a.resize(n);
    cd.b.resize(n);
    for (int i = 0; i < n; ++i) {
        cd.a(i) = branches.branches(i, 0).real();
        cd.b(i) = complex_here[i] ? branches.branches(i, 0).imag() : 0.0;
    }
    return cd;
}

} // namespace effkern
