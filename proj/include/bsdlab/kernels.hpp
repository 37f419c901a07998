#pragma once
// Data-parallel inner loops: scalar reference kernels plus AVX2 variants,
// selected once at startup from CPU capabilities.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bsdlab::kernels {

struct Ops {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    // sum of (a[i]-b[i])^2
    double (*sqdist)(const double*, const double*, std::size_t);
    const char* name;
};

// Scalar reference implementations; always available, used as the oracle in
// equivalence tests.
extern const Ops scalar_ops;
#if defined(__x86_64__)
extern const Ops avx2_ops;
#endif

// Active implementation (scalar unless the CPU supports AVX2).
const Ops& active();
std::string_view active_name();

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sqdist(std::span<const double> a, std::span<const double> b) {
    return active().sqdist(a.data(), b.data(), a.size());
}

double mean(std::span<const double> a);
// population variance (divide by n)
double variance(std::span<const double> a);

// Condensed upper-triangular pairwise Euclidean distance matrix for n points
// of dimension d stored row-major; entry for (i,j), i<j at index
// i*n - i*(i+1)/2 + (j-i-1).
std::vector<double> pairwise_distances(std::span<const double> points, std::size_t n, std::size_t d);

} // namespace bsdlab::kernels
