#include "bsdlab/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsdlab::stats {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLnSqrt2Pi = 0.91893853320467274178; // ln sqrt(2*pi)

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
} // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::exponential: return "exponential";
        case Family::lognormal: return "lognormal";
        case Family::gamma: return "gamma";
        case Family::weibull: return "weibull";
        case Family::beta_scaled: return "beta_scaled";
        case Family::exp_weibull: return "exp_weibull";
        case Family::johnson_sb: return "johnson_sb";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    for (Family f :
         {Family::normal, Family::exponential, Family::lognormal, Family::gamma, Family::weibull,
          Family::beta_scaled, Family::exp_weibull, Family::johnson_sb})
        if (name == family_name(f)) return f;
    throw std::invalid_argument("unknown distribution family: " + name);
}

std::vector<Family> default_registry() {
    return {Family::beta_scaled, Family::exp_weibull, Family::johnson_sb, Family::gamma,
            Family::weibull,     Family::lognormal,   Family::normal,     Family::exponential};
}

std::size_t family_param_count(Family f) {
    switch (f) {
        case Family::normal: return 2;
        case Family::exponential: return 1;
        case Family::lognormal: return 2;
        case Family::gamma: return 2;
        case Family::weibull: return 2;
        case Family::beta_scaled: return 3;
        case Family::exp_weibull: return 3;
        case Family::johnson_sb: return 3;
    }
    return 0;
}

double family_logpdf(Family f, std::span<const double> params, double x) {
    switch (f) {
        case Family::normal: {
            double mu = params[0], sigma = params[1];
            if (!(sigma > 0)) return kNegInf;
            double z = (x - mu) / sigma;
            return -0.5 * z * z - std::log(sigma) - kLnSqrt2Pi;
        }
        case Family::exponential: {
            double lambda = params[0];
            if (!(lambda > 0) || x < 0) return kNegInf;
            return std::log(lambda) - lambda * x;
        }
        case Family::lognormal: {
            double mu = params[0], sigma = params[1];
            if (!(sigma > 0) || x <= 0) return kNegInf;
            double lx = std::log(x);
            double z = (lx - mu) / sigma;
            return -0.5 * z * z - std::log(sigma) - kLnSqrt2Pi - lx;
        }
        case Family::gamma: {
            double k = params[0], theta = params[1];
            if (!(k > 0) || !(theta > 0) || x <= 0) return kNegInf;
            return (k - 1.0) * std::log(x) - x / theta - k * std::log(theta) - std::lgamma(k);
        }
        case Family::weibull: {
            double c = params[0], scale = params[1];
            if (!(c > 0) || !(scale > 0) || x <= 0) return kNegInf;
            double t = x / scale;
            return std::log(c / scale) + (c - 1.0) * std::log(t) - std::pow(t, c);
        }
        case Family::beta_scaled: {
            double a = params[0], b = params[1], s = params[2];
            if (!(a > 0) || !(b > 0) || !(s > 0) || x < 0 || x > s) return kNegInf;
            double u = x / s;
            if (u == 0.0 && a < 1.0) return kNegInf;
            if (u == 1.0 && b < 1.0) return kNegInf;
            double la = (a == 1.0 && u == 0.0) ? 0.0 : (a - 1.0) * std::log(u);
            double lb = (b == 1.0 && u == 1.0) ? 0.0 : (b - 1.0) * std::log1p(-u);
            return la + lb - log_beta(a, b) - std::log(s);
        }
        case Family::exp_weibull: {
            double a = params[0], c = params[1], scale = params[2];
            if (!(a > 0) || !(c > 0) || !(scale > 0) || x <= 0) return kNegInf;
            double t = std::pow(x / scale, c);
            // pdf = a*c/scale * (x/scale)^(c-1) * e^-t * (1 - e^-t)^(a-1)
            double log1me = t > 1e-8 ? std::log1p(-std::exp(-t)) : std::log(t) - t / 2.0;
            return std::log(a * c / scale) + (c - 1.0) * std::log(x / scale) - t +
                   (a - 1.0) * log1me;
        }
        case Family::johnson_sb: {
            double g = params[0], d = params[1], lambda = params[2];
            if (!(d > 0) || !(lambda > 0) || x <= 0 || x >= lambda) return kNegInf;
            double z = g + d * std::log(x / (lambda - x));
            return std::log(d * lambda) - kLnSqrt2Pi - std::log(x * (lambda - x)) - 0.5 * z * z;
        }
    }
    return kNegInf;
}

double family_loglik(Family f, std::span<const double> params, std::span<const double> samples) {
    double ll = 0.0;
    for (double x : samples) {
        double l = family_logpdf(f, params, x);
        if (!std::isfinite(l)) return kNegInf;
        ll += l;
    }
    return ll;
}

double family_sample(Family f, std::span<const double> params, Rng& rng) {
    switch (f) {
        case Family::normal: return params[0] + params[1] * rng.normal();
        case Family::exponential: return -std::log(1.0 - rng.uniform()) / params[0];
        case Family::lognormal: return std::exp(params[0] + params[1] * rng.normal());
        case Family::gamma: {
            // Marsaglia-Tsang, with boost for k < 1
            double k = params[0], theta = params[1];
            double boost = 1.0;
            if (k < 1.0) {
                boost = std::pow(rng.uniform(), 1.0 / k);
                k += 1.0;
            }
            double d = k - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
            for (;;) {
                double zv = rng.normal();
                double v = 1.0 + c * zv;
                if (v <= 0) continue;
                v = v * v * v;
                double u = rng.uniform();
                if (u < 1.0 - 0.0331 * zv * zv * zv * zv ||
                    std::log(u) < 0.5 * zv * zv + d * (1.0 - v + std::log(v)))
                    return boost * d * v * theta;
            }
        }
        case Family::weibull:
            return params[1] * std::pow(-std::log(1.0 - rng.uniform()), 1.0 / params[0]);
        case Family::beta_scaled: {
            double ga[2] = {params[0], 1.0}, gb[2] = {params[1], 1.0};
            double x = family_sample(Family::gamma, ga, rng);
            double y = family_sample(Family::gamma, gb, rng);
            return params[2] * x / (x + y);
        }
        case Family::exp_weibull: {
            // invert the cdf (1 - e^{-(x/s)^c})^a
            double u = rng.uniform();
            double t = -std::log(1.0 - std::pow(u, 1.0 / params[0]));
            return params[2] * std::pow(t, 1.0 / params[1]);
        }
        case Family::johnson_sb: {
            double z = rng.normal();
            double w = std::exp((z - params[0]) / params[1]);
            return params[2] * w / (1.0 + w);
        }
    }
    return 0.0;
}

} // namespace bsdlab::stats
