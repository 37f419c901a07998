#include "bsdlab/kernels.hpp"

#include <cmath>

namespace bsdlab::kernels {
namespace {

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

const Ops* pick() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_ops;
#endif
    return &scalar_ops;
}

} // namespace

const Ops scalar_ops{sum_scalar, dot_scalar, sqdist_scalar, "scalar"};

const Ops& active() {
    static const Ops* ops = pick();
    return *ops;
}

std::string_view active_name() { return active().name; }

double mean(std::span<const double> a) {
    return a.empty() ? 0.0 : sum(a) / static_cast<double>(a.size());
}

double variance(std::span<const double> a) {
    if (a.empty()) return 0.0;
    double m = mean(a);
    double s = 0.0;
    for (double x : a) s += (x - m) * (x - m);
    return s / static_cast<double>(a.size());
}

std::vector<double> pairwise_distances(std::span<const double> points, std::size_t n, std::size_t d) {
    std::vector<double> out(n * (n - 1) / 2);
    const auto& ops = active();
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out[k++] = std::sqrt(ops.sqdist(points.data() + i * d, points.data() + j * d, d));
    return out;
}

} // namespace bsdlab::kernels
