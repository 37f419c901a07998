#pragma once
// Vietoris-Rips persistent homology over F2 with the clearing optimization.

#include "bsdlab/ingest.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::tda {

struct PointCloud {
    std::size_t n = 0, d = 0;
    std::vector<double> data; // row-major n x d
    std::vector<std::string> labels;

    double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * d, d}; }
};

struct Simplex {
    std::vector<int> vertices; // sorted ascending
    double diameter = 0.0;
};

struct Filtration {
    std::vector<Simplex> simplices; // sorted by (diameter, dimension, lex)
    std::size_t n_points = 0;
    int max_dim = 0;       // top homology dimension; simplices go to max_dim+1
    double max_eps = 0.0;
};

struct BudgetError : std::runtime_error {
    std::size_t count;
    BudgetError(std::size_t c, std::size_t budget)
        : std::runtime_error("simplex budget exceeded: " + std::to_string(c) + " > " +
                             std::to_string(budget)),
          count(c) {}
};

inline constexpr std::size_t kDefaultSimplexBudget = 5'000'000;
inline constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct Interval {
    double birth = 0.0;
    double death = kInfDeath;
    bool operator==(const Interval&) const = default;
};

struct Barcode {
    std::vector<std::vector<Interval>> dims; // dims[k] = intervals of H_k
};

Filtration build_rips(const PointCloud& cloud, int max_dim, double max_eps,
                      std::size_t budget = kDefaultSimplexBudget);

struct PersistenceOptions {
    bool keep_zero_length = false; // debug: retain birth == death pairs
};
Barcode persistence(const Filtration& f, const PersistenceOptions& opt = {});

// b_k(eps) = #{intervals in dim k with birth <= eps < death}
std::vector<std::size_t> betti_at(const Barcode& b, double eps);

enum class ColumnTransform { identity, slog, log };

struct PipelineSpec {
    std::vector<std::string> columns; // a1,a2,a3,a4,a6,conductor,rank,torsion,tamagawa,omega,regulator,sha
    std::vector<ColumnTransform> transforms; // parallel to columns
    std::size_t n_sample = 0;
    std::uint64_t seed = 0;
    int max_dim = 1;
    double max_eps = kInfDeath; // trimmed to the cloud's max pairwise distance
    std::size_t budget = kDefaultSimplexBudget;
};

double column_value(const ingest::CurveRecord& rec, const std::string& column);
PointCloud make_cloud(const std::vector<ingest::CurveRecord>& records, const PipelineSpec& spec);
Barcode barcode_pipeline(const std::vector<ingest::CurveRecord>& records, const PipelineSpec& spec);

} // namespace bsdlab::tda
