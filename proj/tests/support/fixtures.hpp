#pragma once
// Shared test support: anchor curves with published invariants, synthetic
// record generators, and independent oracles (AGM period, naive point count).

#include "bsdlab/ec/curve.hpp"
#include "bsdlab/ingest.hpp"

#include <cstdint>
#include <vector>

namespace bsdlab::testsupport {

// Anchor records: real curves with published conductor, rank, torsion,
// Tamagawa product, period, regulator and generators.
std::vector<ingest::CurveRecord> anchor_records();

// The worked-example curve (1,-1,0,-453981,117847851).
ingest::CurveRecord worked_example();

// Rank-1 rows derived from the 37a1 anchor: record k lists generator k*P and
// regulator k^2 * 0.0511114082399688 (height multiple law + published value).
std::vector<ingest::CurveRecord> rank1_family(std::size_t count);

// Synthetic database with learnable structure: omega is the true real period
// (AGM), tamagawa and sha are smooth functions of the coefficients plus
// bounded noise, rank correlates with the regulator column.
std::vector<ingest::CurveRecord> synthetic_db(std::size_t n, std::uint64_t seed);

// 1000-row mixed fixture used by the tally golden-file check.
std::vector<ingest::CurveRecord> fixture_1000();

// Independent period oracle: AGM on the roots of 4x^3 + b2x^2 + 2b4x + b6.
double agm_period(const ec::WeierstrassCurve& c);

// Independent point-count oracle: O(p^2) double loop over affine pairs.
std::uint64_t naive_point_count(const ec::WeierstrassCurve& c, std::uint64_t p);

// CSV lines in the default column order (for ingest/CLI tests).
std::vector<std::string> to_csv_lines(const std::vector<ingest::CurveRecord>& records,
                                      bool header = true);

} // namespace bsdlab::testsupport
