#include "bsdlab/stats.hpp"

#include "bsdlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsdlab::stats {

double slog(double x) {
    if (x == 0.0) return 0.0;
    return (x > 0 ? 1.0 : -1.0) * std::log(std::fabs(x));
}

double symlog(double x) {
    if (std::fabs(x) <= 1.0) return x;
    return (x > 0 ? 1.0 : -1.0) * (1.0 + std::log10(std::fabs(x)));
}

TallyTable tally_rank_by_triple(const std::vector<ingest::CurveRecord>& records) {
    TallyTable t;
    for (const auto& r : records) {
        if (r.rank < 0 || r.rank > 4) continue;
        Triple key{static_cast<int>(r.a1.get_si()), static_cast<int>(r.a2.get_si()),
                   static_cast<int>(r.a3.get_si())};
        auto& row = t.counts.try_emplace(key, std::array<long, 5>{}).first->second;
        ++row[static_cast<std::size_t>(r.rank)];
        ++t.total;
    }
    return t;
}

namespace {

double transform_for(Binning b, double x) {
    switch (b) {
        case Binning::linear: return x;
        case Binning::log10:
            if (x <= 0) throw std::invalid_argument("log binning requires positive values");
            return std::log10(x);
        case Binning::symlog: return symlog(x);
    }
    return x;
}

Histogram make_axis(std::span<const double> values, Binning binning, std::size_t nbins) {
    if (values.empty()) throw std::invalid_argument("histogram of empty input");
    if (nbins < 1) throw std::invalid_argument("nbins must be >= 1");
    Histogram h;
    h.binning = binning;
    double lo = transform_for(binning, values[0]), hi = lo;
    for (double v : values) {
        double t = transform_for(binning, v);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (lo == hi) { // single value: one full bin around it
        lo -= 0.5;
        hi += 0.5;
    }
    h.edges.resize(nbins + 1);
    for (std::size_t i = 0; i <= nbins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nbins);
    h.masses.assign(nbins, 0.0);
    return h;
}

std::size_t bin_of(const Histogram& h, double x) {
    double t = transform_for(h.binning, x);
    const std::size_t nbins = h.masses.size();
    double lo = h.edges.front(), hi = h.edges.back();
    if (t <= lo) return 0;
    if (t >= hi) return nbins - 1;
    auto idx = static_cast<std::size_t>((t - lo) / (hi - lo) * static_cast<double>(nbins));
    return std::min(idx, nbins - 1);
}

} // namespace

Histogram histogram(std::span<const double> values, Binning binning, std::size_t nbins) {
    Histogram h = make_axis(values, binning, nbins);
    const double w = 1.0 / static_cast<double>(values.size());
    for (double v : values) h.masses[bin_of(h, v)] += w;
    return h;
}

JointHistogram joint_histogram(std::span<const double> x, std::span<const double> y,
                               std::size_t nbins) {
    if (x.size() != y.size()) throw std::invalid_argument("joint histogram: length mismatch");
    JointHistogram j;
    j.x_axis = make_axis(x, Binning::symlog, nbins);
    j.y_axis = make_axis(y, Binning::symlog, nbins);
    j.masses.assign(nbins * nbins, 0.0);
    const double w = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        j.masses[bin_of(j.x_axis, x[i]) * nbins + bin_of(j.y_axis, y[i])] += w;
    return j;
}

std::vector<double> rank_transform(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

// pearson on centered columns; returns (rho, defined)
std::pair<double, bool> pearson(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<double>(a.size());
    double ma = kernels::mean(a), mb = kernels::mean(b);
    std::vector<double> ca(a.size()), cb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[i] = a[i] - ma;
        cb[i] = b[i] - mb;
    }
    double va = kernels::dot(ca, ca) / n, vb = kernels::dot(cb, cb) / n;
    if (va == 0.0 || vb == 0.0) return {0.0, false};
    double cov = kernels::dot(ca, cb) / n;
    return {std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0), true};
}

} // namespace

CorrelationMatrix correlation_matrix(const std::vector<std::vector<double>>& columns,
                                     CorrMethod method) {
    if (columns.size() < 2) throw std::invalid_argument("need at least two columns");
    for (const auto& c : columns)
        if (c.size() != columns[0].size())
            throw std::invalid_argument("correlation: column length mismatch");

    std::vector<std::vector<double>> cols = columns;
    if (method == CorrMethod::spearman)
        for (auto& c : cols) c = rank_transform(c);

    const std::size_t m = cols.size();
    CorrelationMatrix out;
    out.method = method;
    out.rho.assign(m, std::vector<double>(m, 1.0));
    out.defined.assign(m, std::vector<bool>(m, true));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            auto [rho, ok] = pearson(cols[i], cols[j]);
            out.rho[i][j] = out.rho[j][i] = rho;
            out.defined[i][j] = out.defined[j][i] = ok;
        }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

BoxplotSummary boxplot_summary(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    return BoxplotSummary{quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75),
                          quantile(v, 0.025), quantile(v, 0.975)};
}

std::vector<SummaryRow> group_stats(const std::vector<ingest::CurveRecord>& records,
                                    CoeffColumn column) {
    std::map<std::pair<Triple, int>, std::vector<double>> groups;
    for (const auto& r : records) {
        Triple key{static_cast<int>(r.a1.get_si()), static_cast<int>(r.a2.get_si()),
                   static_cast<int>(r.a3.get_si())};
        const ec::Int& v = column == CoeffColumn::a4 ? r.a4 : r.a6;
        groups[{key, r.rank}].push_back(v.get_d());
    }
    std::vector<SummaryRow> out;
    for (auto& [key, vals] : groups) {
        SummaryRow row;
        row.triple = key.first;
        row.rank = key.second;
        row.size = vals.size();
        row.mean = kernels::mean(vals);
        if (vals.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - row.mean) * (v - row.mean);
            row.stddev = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        } else {
            row.stddev_defined = false;
        }
        row.median = quantile(vals, 0.5);
        row.zero_count = static_cast<std::size_t>(std::count(vals.begin(), vals.end(), 0.0));
        out.push_back(row);
    }
    return out;
}

} // namespace bsdlab::stats
