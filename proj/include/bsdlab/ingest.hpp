#pragma once
// Curve-table ingestion: parse text tables into validated CurveRecords,
// persist a versioned binary cache, build deterministic filtered/sampled views.

#include "bsdlab/ec/curve.hpp"
#include "bsdlab/ec/points.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::ingest {

struct CurveRecord {
    std::string label;
    ec::Int a1, a2, a3; // small in practice, exact always
    ec::Int a4, a6;
    ec::Int conductor;
    int rank = 0;
    int torsion_order = 1;
    long tamagawa_product = 1;
    double omega = 0.0;
    double regulator = 1.0;
    double sha_order = 1.0; // analytic order; integer-ness checked, not assumed
    std::optional<std::vector<ec::RationalPoint>> generators;

    ec::WeierstrassCurve curve() const { return {a1, a2, a3, a4, a6}; }
    bool operator==(const CurveRecord&) const = default;
};

struct RowError {
    std::size_t line = 0;
    std::string field;
    std::string message;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// field name -> 0-based column index; all CurveRecord fields except
// `generators` are required.
using ColumnMap = std::map<std::string, std::size_t>;

ColumnMap default_column_map();
// "field = index" lines; '#' comments
ColumnMap load_column_map(const std::string& path);

struct ParseResult {
    std::vector<CurveRecord> records;
    std::vector<RowError> errors;
};

// Whitespace- or comma-separated table with optional '#' comments. Rows that
// fail to parse are reported with their line number and skipped.
ParseResult parse_table(const std::string& path, const ColumnMap& map);
ParseResult parse_lines(const std::vector<std::string>& lines, const ColumnMap& map);

struct Violation {
    std::string field;
    std::string message;
};
// CurveRecord invariants plus the conductor/discriminant prime check;
// empty iff the record is consistent.
std::vector<Violation> validate(const CurveRecord& rec);

void write_cache(const std::vector<CurveRecord>& records, const std::string& path);
std::vector<CurveRecord> read_cache(const std::string& path);

// serialization helpers shared by the CSV and cache formats
std::string generators_to_string(const std::vector<ec::RationalPoint>& gens);
std::vector<ec::RationalPoint> generators_from_string(const std::string& s);

struct DatasetView {
    std::string source;
    std::vector<std::size_t> row_indices; // strictly increasing
    std::uint64_t seed = 0;
    std::string filter_desc;
};

DatasetView make_view(const std::vector<CurveRecord>& records,
                      const std::function<bool(const CurveRecord&)>& pred,
                      const std::string& filter_desc, std::uint64_t seed,
                      const std::string& source = "");

// uniform without replacement, deterministic in (view.seed, n)
std::vector<std::size_t> sample_indices(const DatasetView& view, std::size_t n);
std::vector<CurveRecord> sample(const std::vector<CurveRecord>& records, const DatasetView& view,
                                std::size_t n);

} // namespace bsdlab::ingest
