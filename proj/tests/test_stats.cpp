#include <doctest.h>

#include "bsdlab/stats.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <numeric>

using namespace bsdlab;

TEST_CASE("slog and symlog transforms") {
    CHECK(stats::slog(0.0) == 0.0);
    CHECK(stats::slog(std::exp(1.0)) == doctest::Approx(1.0));
    CHECK(stats::slog(-std::exp(2.0)) == doctest::Approx(-2.0));

    CHECK(stats::symlog(0.0) == 0.0);
    CHECK(stats::symlog(0.5) == doctest::Approx(0.5));
    CHECK(stats::symlog(-0.25) == doctest::Approx(-0.25));
    CHECK(stats::symlog(10.0) == doctest::Approx(2.0));   // 1 + log10(10)
    CHECK(stats::symlog(-100.0) == doctest::Approx(-3.0));
}

TEST_CASE("rank tally is a partition of the input") {
    auto records = testsupport::fixture_1000();
    auto tally = stats::tally_rank_by_triple(records);
    CHECK(tally.total == long(records.size()));
    long sum = 0;
    for (const auto& [triple, row] : tally.counts)
        sum = std::accumulate(row.begin(), row.end(), sum);
    CHECK(sum == tally.total);

    // spot check one cell against a direct count
    long direct = 0;
    for (const auto& r : records)
        if (r.a1 == 0 && r.a2 == 0 && r.a3 == 1 && r.rank == 1) ++direct;
    auto it = tally.counts.find({0, 0, 1});
    REQUIRE(it != tally.counts.end());
    CHECK(it->second[1] == direct);
}

TEST_CASE("histograms have unit mass and respect bin placement") {
    std::vector<double> v{0.0, 1.0, 1.0, 3.0};
    auto h = stats::histogram(v, stats::Binning::linear, 3);
    REQUIRE(h.edges.size() == 4);
    CHECK(std::accumulate(h.masses.begin(), h.masses.end(), 0.0) == doctest::Approx(1.0));
    // edges span [0,3]; values 0,1,1 in the first bin, 3 in the last
    CHECK(h.masses[0] == doctest::Approx(0.75));
    CHECK(h.masses[2] == doctest::Approx(0.25));

    std::vector<double> x{-5, -1, 0, 1, 5, 100};
    auto hs = stats::histogram(x, stats::Binning::symlog, 8);
    CHECK(std::accumulate(hs.masses.begin(), hs.masses.end(), 0.0) == doctest::Approx(1.0));

    std::vector<double> x4(x.begin(), x.begin() + 4);
    auto j = stats::joint_histogram(v, x4, 4);
    CHECK(std::accumulate(j.masses.begin(), j.masses.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("pearson and spearman correlation") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> lin{2, 4, 6, 8, 10};
    std::vector<double> mono{1, 8, 27, 64, 125};
    std::vector<double> flat{7, 7, 7, 7, 7};

    auto p = stats::correlation_matrix({x, lin, mono, flat}, stats::CorrMethod::pearson);
    CHECK(p.rho[0][1] == doctest::Approx(1.0));
    CHECK(p.rho[0][2] < 1.0); // cubic is not perfectly linear
    CHECK(p.rho[0][2] > 0.9);
    CHECK(!p.defined[0][3]);
    CHECK(p.defined[0][2]);
    CHECK(p.rho[0][1] == p.rho[1][0]);

    auto s = stats::correlation_matrix({x, mono}, stats::CorrMethod::spearman);
    CHECK(s.rho[0][1] == doctest::Approx(1.0)); // monotone => rank-perfect
}

TEST_CASE("rank transform averages ties") {
    std::vector<double> v{1.0, 2.0, 2.0, 3.0};
    auto r = stats::rank_transform(v);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.5));
    CHECK(r[2] == doctest::Approx(2.5));
    CHECK(r[3] == doctest::Approx(4.0));
}

TEST_CASE("quantile and boxplot summary") {
    std::vector<double> v{4, 1, 3, 2};
    CHECK(stats::quantile(v, 0.0) == doctest::Approx(1.0));
    CHECK(stats::quantile(v, 1.0) == doctest::Approx(4.0));
    CHECK(stats::quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(stats::quantile(v, 1.0 / 3.0) == doctest::Approx(2.0));

    auto b = stats::boxplot_summary(v);
    CHECK(b.median == doctest::Approx(2.5));
    CHECK(b.q25 <= b.median);
    CHECK(b.median <= b.q75);
    CHECK(b.p2_5 <= b.q25);
    CHECK(b.q75 <= b.p97_5);
}

TEST_CASE("grouped coefficient summaries cover every record") {
    auto records = testsupport::fixture_1000();
    auto rows = stats::group_stats(records, stats::CoeffColumn::a4);
    std::size_t covered = 0;
    for (const auto& row : rows) {
        covered += row.size;
        if (row.size == 1) CHECK(!row.stddev_defined);
    }
    CHECK(covered == records.size());
}
