#pragma once
// Job orchestration: each job reads the cache, writes schema-versioned JSON/CSV
// reports plus a manifest (config hash, seed, artifacts, timestamp).

#include <cstdint>
#include <string>
#include <vector>

namespace bsdlab::jobs {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kDataError = 3;
inline constexpr int kNumericError = 4;

inline constexpr int kSchemaVersion = 1;

int run_ingest(const std::string& input, const std::string& map_path, const std::string& out_cache);
int run_validate(const std::string& cache, const std::string& report_path, bool recompute);

// job in {tally, pmf, fit-d, fit-rhs, perm, corr, groupstats}
int run_stats(const std::string& cache, const std::string& job, const std::string& out,
              std::uint64_t seed);

// split in {none, rank, parity, mod3}
int run_tda(const std::string& cache, const std::vector<std::string>& columns,
            const std::string& split, std::size_t n, std::uint64_t seed, int max_dim,
            const std::string& out);

int run_ml(const std::string& cache, const std::string& target, const std::string& features,
           const std::string& model, std::size_t k, std::uint64_t seed, const std::string& out,
           std::size_t subsample = 0);

int run_ap(const std::string& cache, const std::string& label, std::uint64_t pmax,
           const std::string& out);

std::vector<std::string> reproduce_ids();
int run_reproduce(const std::string& cache, const std::string& id, const std::string& out_dir,
                  std::uint64_t seed);

// aggregate every *.manifest.json under dir into one summary
int run_report(const std::string& dir, const std::string& out);

} // namespace bsdlab::jobs
