#pragma once
// Descriptive statistics: signed log transform, rank/coefficient tallies,
// histograms (linear/log/symlog), correlation matrices, grouped summaries.

#include "bsdlab/ingest.hpp"

#include <array>
#include <map>
#include <span>
#include <tuple>
#include <vector>

namespace bsdlab::stats {

// 0 at 0, sgn(x) log|x| otherwise
double slog(double x);

// symlog coordinate: linear on (-1,1), sign(x)(1+log10|x|) outside
double symlog(double x);

using Triple = std::tuple<int, int, int>; // (a1, a2, a3)

struct TallyTable {
    // counts[triple][rank] for ranks 0..4
    std::map<Triple, std::array<long, 5>> counts;
    long total = 0;
};
TallyTable tally_rank_by_triple(const std::vector<ingest::CurveRecord>& records);

enum class Binning { linear, log10, symlog };

struct Histogram {
    Binning binning = Binning::linear;
    std::vector<double> edges;  // nbins+1, in transformed coordinates for log/symlog
    std::vector<double> masses; // sums to 1
};
Histogram histogram(std::span<const double> values, Binning binning, std::size_t nbins);

struct JointHistogram {
    Histogram x_axis, y_axis;
    std::vector<double> masses; // row-major nx*ny, sums to 1
};
JointHistogram joint_histogram(std::span<const double> x, std::span<const double> y,
                               std::size_t nbins);

enum class CorrMethod { pearson, spearman };

struct CorrelationMatrix {
    std::vector<std::vector<double>> rho;
    std::vector<std::vector<bool>> defined; // false where a column has zero variance
    CorrMethod method;
};
CorrelationMatrix correlation_matrix(const std::vector<std::vector<double>>& columns,
                                     CorrMethod method);

// average ranks with tie handling
std::vector<double> rank_transform(std::span<const double> values);

struct SummaryRow {
    Triple triple;
    int rank = 0;
    std::size_t size = 0;
    double mean = 0.0;
    double stddev = 0.0;
    bool stddev_defined = true; // false when size == 1
    double median = 0.0;
    std::size_t zero_count = 0;
};
enum class CoeffColumn { a4, a6 };
std::vector<SummaryRow> group_stats(const std::vector<ingest::CurveRecord>& records,
                                    CoeffColumn column);

struct BoxplotSummary {
    double median, q25, q75, p2_5, p97_5; // whiskers = central 95%
};
BoxplotSummary boxplot_summary(std::span<const double> values);

// linear-interpolation quantile of an unsorted sample, q in [0,1]
double quantile(std::vector<double> values, double q);

} // namespace bsdlab::stats
