#include "bsdlab/fitting.hpp"

#include "bsdlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsdlab::stats {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, double step, double tol, int max_iters) {
    const std::size_t n = start.size();
    struct Vertex {
        std::vector<double> x;
        double fx;
    };
    std::vector<Vertex> simplex;
    simplex.push_back({start, f(start)});
    for (std::size_t i = 0; i < n; ++i) {
        auto x = start;
        x[i] += step;
        simplex.push_back({x, f(x)});
    }
    auto by_f = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };

    for (int it = 0; it < max_iters; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_f);
        if (std::fabs(simplex.back().fx - simplex.front().fx) <= tol &&
            std::isfinite(simplex.front().fx))
            break;

        // centroid excluding the worst vertex
        std::vector<double> c(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) c[i] += simplex[v].x[i] / static_cast<double>(n);
        const Vertex& worst = simplex.back();

        auto mix = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = c[i] + coef * (worst.x[i] - c[i]);
            return x;
        };

        auto xr = mix(-1.0);
        double fr = f(xr);
        if (fr < simplex.front().fx) {
            auto xe = mix(-2.0);
            double fe = f(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[n - 1].fx) {
            simplex.back() = {xr, fr};
        } else {
            auto xc = mix(fr < worst.fx ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, worst.fx)) {
                simplex.back() = {xc, fc};
            } else { // shrink toward the best vertex
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].fx = f(simplex[v].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_f);
    return simplex.front().x;
}

namespace {

struct SampleStats {
    double mean = 0, var = 0, max = 0, min = 0;
    double log_mean = 0, log_var = 0;
    bool all_positive = true;
};

SampleStats describe(std::span<const double> s) {
    SampleStats st;
    st.mean = kernels::mean(s);
    st.var = kernels::variance(s);
    st.max = *std::max_element(s.begin(), s.end());
    st.min = *std::min_element(s.begin(), s.end());
    st.all_positive = st.min > 0;
    if (st.all_positive) {
        std::vector<double> logs(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) logs[i] = std::log(s[i]);
        st.log_mean = kernels::mean(logs);
        st.log_var = kernels::variance(logs);
    }
    return st;
}

// unconstrained theta -> natural params; scale-bound families get
// s = s_floor + exp(theta), keeping the support endpoint above max(sample)
std::vector<double> to_natural(Family f, std::span<const double> theta, double s_floor) {
    switch (f) {
        case Family::gamma:
        case Family::weibull:
            return {std::exp(theta[0]), std::exp(theta[1])};
        case Family::exp_weibull:
            return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
        case Family::beta_scaled:
            return {std::exp(theta[0]), std::exp(theta[1]), s_floor + std::exp(theta[2])};
        case Family::johnson_sb:
            return {theta[0], std::exp(theta[1]), s_floor + std::exp(theta[2])};
        default: return {theta.begin(), theta.end()};
    }
}

std::vector<double> base_start(Family f, const SampleStats& st) {
    switch (f) {
        case Family::gamma: {
            double k = st.var > 0 ? st.mean * st.mean / st.var : 1.0;
            double theta = k > 0 ? st.mean / k : 1.0;
            return {std::log(std::max(k, 1e-3)), std::log(std::max(theta, 1e-12))};
        }
        case Family::weibull:
            return {0.0, std::log(std::max(st.mean, 1e-12))};
        case Family::exp_weibull:
            return {0.0, 0.0, std::log(std::max(st.mean, 1e-12))};
        case Family::beta_scaled:
            // s ~ 1.5*max => theta2 = log(0.5*max)
            return {0.0, 0.0, std::log(std::max(0.5 * st.max, 1e-12))};
        case Family::johnson_sb:
            return {0.0, 0.0, std::log(std::max(0.5 * st.max, 1e-12))};
        default: return {};
    }
}

FitResult closed_form(Family f, std::span<const double> samples, const SampleStats& st) {
    FitResult r;
    r.family = f;
    r.n = samples.size();
    switch (f) {
        case Family::normal: {
            double sigma = std::sqrt(st.var);
            if (!(sigma > 0)) throw FitError("degenerate sample: zero variance");
            r.params = {st.mean, sigma};
            break;
        }
        case Family::exponential: {
            if (st.min < 0) throw FitError("exponential requires non-negative samples");
            if (!(st.mean > 0)) throw FitError("degenerate sample");
            r.params = {1.0 / st.mean};
            break;
        }
        case Family::lognormal: {
            if (!st.all_positive) throw FitError("lognormal requires positive samples");
            double sigma = std::sqrt(st.log_var);
            if (!(sigma > 0)) throw FitError("degenerate sample: zero variance");
            r.params = {st.log_mean, sigma};
            break;
        }
        default: throw FitError("not a closed-form family");
    }
    r.loglik = family_loglik(f, r.params, samples);
    r.aic = 2.0 * static_cast<double>(family_param_count(f)) - 2.0 * r.loglik;
    return r;
}

} // namespace

FitResult fit_family(Family f, std::span<const double> samples, const FitOptions& opt) {
    if (samples.size() < 2) throw FitError("need at least 2 samples");
    SampleStats st = describe(samples);
    if (st.var == 0.0) throw FitError("degenerate sample: all values equal");

    if (f == Family::normal || f == Family::exponential || f == Family::lognormal)
        return closed_form(f, samples, st);

    const double s_floor = st.max * (1.0 + 1e-9);
    auto objective = [&](std::span<const double> theta) {
        for (double t : theta)
            if (!std::isfinite(t) || std::fabs(t) > 60.0) return kInf;
        auto params = to_natural(f, theta, s_floor);
        double ll = family_loglik(f, params, samples);
        return std::isfinite(ll) ? -ll : kInf;
    };

    std::vector<double> base = base_start(f, st);
    double best_ll = -kInf;
    std::vector<double> best_params;
    Rng rng = Rng::stream(opt.seed, static_cast<std::uint64_t>(f));
    for (int r = 0; r < opt.restarts; ++r) {
        std::vector<double> start = base;
        if (r > 0)
            for (auto& t : start) t += rng.uniform(-2.0, 2.0);
        if (!std::isfinite(objective(start))) continue;
        auto theta = nelder_mead(objective, start, 0.5, opt.tol, opt.max_iters);
        auto params = to_natural(f, theta, s_floor);
        double ll = family_loglik(f, params, samples);
        if (ll > best_ll) {
            best_ll = ll;
            best_params = params;
        }
    }
    if (!std::isfinite(best_ll)) throw FitError(std::string("no feasible fit for ") + family_name(f));

    FitResult out;
    out.family = f;
    out.params = best_params;
    out.loglik = best_ll;
    out.aic = 2.0 * static_cast<double>(family_param_count(f)) - 2.0 * best_ll;
    out.n = samples.size();
    return out;
}

FitResult fit_beta_scaled(std::span<const double> samples, const FitOptions& opt) {
    if (!samples.empty() && *std::min_element(samples.begin(), samples.end()) < 0)
        throw FitError("scaled beta requires non-negative samples");
    return fit_family(Family::beta_scaled, samples, opt);
}

SelectionResult fit_select_aic(std::span<const double> samples, const std::vector<Family>& families,
                               const FitOptions& opt) {
    SelectionResult out;
    for (Family f : families) {
        try {
            out.ranked.push_back(fit_family(f, samples, opt));
        } catch (const std::exception& ex) {
            out.failures.emplace_back(f, ex.what());
        }
    }
    std::sort(out.ranked.begin(), out.ranked.end(),
              [](const FitResult& a, const FitResult& b) { return a.aic < b.aic; });
    return out;
}

} // namespace bsdlab::stats
