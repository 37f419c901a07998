#include "bsdlab/tda.hpp"

#include "bsdlab/kernels.hpp"
#include "bsdlab/parallel.hpp"
#include "bsdlab/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace bsdlab::tda {

namespace {

struct CondensedDist {
    const std::vector<double>& d;
    std::size_t n;
    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        auto [lo, hi] = std::minmax(i, j);
        return d[lo * n - lo * (lo + 1) / 2 + (hi - lo - 1)];
    }
};

// DFS over cliques whose minimum vertex is fixed; `nbr[u]` holds the
// neighbors of u greater than u, sorted. max_nverts bounds clique size.
void expand_cliques(std::vector<int>& verts, const std::vector<int>& candidates,
                    double diameter, const std::vector<std::vector<int>>& nbr,
                    const CondensedDist& dist, std::size_t max_nverts, std::vector<Simplex>& out,
                    std::atomic<std::size_t>& count, std::size_t budget) {
    for (int w : candidates) {
        double diam = diameter;
        for (int u : verts)
            diam = std::max(diam, dist(static_cast<std::size_t>(u), static_cast<std::size_t>(w)));
        verts.push_back(w);
        out.push_back({verts, diam});
        if (count.fetch_add(1, std::memory_order_relaxed) + 1 > budget)
            throw BudgetError(count.load(), budget);
        if (verts.size() < max_nverts) {
            std::vector<int> next_cand;
            const auto& wn = nbr[static_cast<std::size_t>(w)];
            std::set_intersection(candidates.begin(), candidates.end(), wn.begin(), wn.end(),
                                  std::back_inserter(next_cand));
            expand_cliques(verts, next_cand, diam, nbr, dist, max_nverts, out, count, budget);
        }
        verts.pop_back();
    }
}

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
        for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
        return h;
    }
};

} // namespace

Filtration build_rips(const PointCloud& cloud, int max_dim, double max_eps, std::size_t budget) {
    if (cloud.n == 0) throw std::invalid_argument("build_rips: empty cloud");
    if (max_dim < 0 || !(max_eps > 0)) throw std::invalid_argument("build_rips: bad parameters");

    auto condensed = kernels::pairwise_distances(cloud.data, cloud.n, cloud.d);
    CondensedDist dist{condensed, cloud.n};

    std::vector<std::vector<int>> nbr(cloud.n);
    for (std::size_t i = 0; i < cloud.n; ++i)
        for (std::size_t j = i + 1; j < cloud.n; ++j)
            if (dist(i, j) <= max_eps) nbr[i].push_back(static_cast<int>(j));

    // simplices go one dimension past max_dim so H_{max_dim} classes can die
    const std::size_t max_nverts = static_cast<std::size_t>(max_dim) + 2;
    std::atomic<std::size_t> count{cloud.n};
    if (cloud.n > budget) throw BudgetError(cloud.n, budget);

    std::vector<std::vector<Simplex>> per_vertex(cloud.n);
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    parallel_chunks(cloud.n, worker_count() * 4, [&](std::size_t, std::size_t lo, std::size_t hi) {
        try {
            for (std::size_t v = lo; v < hi && !failed.load(std::memory_order_relaxed); ++v) {
                std::vector<int> verts{static_cast<int>(v)};
                expand_cliques(verts, nbr[v], 0.0, nbr, dist, max_nverts, per_vertex[v], count,
                               budget);
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    Filtration f;
    f.n_points = cloud.n;
    f.max_dim = max_dim;
    f.max_eps = max_eps;
    f.simplices.reserve(count.load());
    for (std::size_t v = 0; v < cloud.n; ++v)
        f.simplices.push_back({{static_cast<int>(v)}, 0.0});
    for (auto& bucket : per_vertex)
        for (auto& s : bucket) f.simplices.push_back(std::move(s));

    std::sort(f.simplices.begin(), f.simplices.end(), [](const Simplex& a, const Simplex& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
        return a.vertices < b.vertices;
    });
    return f;
}

Barcode persistence(const Filtration& f, const PersistenceOptions& opt) {
    const std::size_t m = f.simplices.size();
    std::unordered_map<std::vector<int>, std::uint32_t, VecHash> index;
    index.reserve(m * 2);
    for (std::size_t i = 0; i < m; ++i) index.emplace(f.simplices[i].vertices, static_cast<std::uint32_t>(i));

    std::vector<std::int64_t> pivot_of(m, -1); // low row -> owning column
    std::vector<std::int64_t> killer(m, -1);   // birth simplex -> death column
    std::vector<char> cleared(m, 0);
    std::vector<char> reduced_to_zero(m, 0);
    std::vector<std::vector<std::uint32_t>> pivot_col(m);

    int top = f.max_dim + 2; // vertex count of the largest simplices
    for (int nverts = top; nverts >= 2; --nverts) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto& verts = f.simplices[j].vertices;
            if (static_cast<int>(verts.size()) != nverts || cleared[j]) continue;

            std::vector<std::uint32_t> col;
            col.reserve(verts.size());
            std::vector<int> face(verts.begin() + 1, verts.end());
            for (std::size_t k = 0;; ++k) {
                col.push_back(index.at(face));
                if (k == verts.size() - 1) break;
                face[k] = verts[k]; // restore k, drop k+1
            }
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                std::uint32_t low = col.back();
                std::int64_t owner = pivot_of[low];
                if (owner < 0) break;
                // symmetric difference over F2
                const auto& other = pivot_col[static_cast<std::size_t>(owner)];
                std::vector<std::uint32_t> merged;
                merged.reserve(col.size() + other.size());
                std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                              std::back_inserter(merged));
                col = std::move(merged);
            }
            if (!col.empty()) {
                std::uint32_t low = col.back();
                pivot_of[low] = static_cast<std::int64_t>(j);
                killer[low] = static_cast<std::int64_t>(j);
                cleared[low] = 1; // clearing: the paired birth column is known zero
                pivot_col[j] = std::move(col);
            } else {
                reduced_to_zero[j] = 1;
            }
        }
    }

    Barcode b;
    b.dims.assign(static_cast<std::size_t>(f.max_dim) + 1, {});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t dim = f.simplices[i].vertices.size() - 1;
        if (dim > static_cast<std::size_t>(f.max_dim)) continue;
        // births: vertices, cleared columns, and columns that reduced to zero
        bool birth = dim == 0 || cleared[i] || reduced_to_zero[i];
        if (!birth) continue;
        double death = killer[i] >= 0 ? f.simplices[static_cast<std::size_t>(killer[i])].diameter
                                      : kInfDeath;
        if (!opt.keep_zero_length && death == f.simplices[i].diameter) continue;
        b.dims[dim].push_back({f.simplices[i].diameter, death});
    }
    for (auto& bars : b.dims)
        std::sort(bars.begin(), bars.end(), [](const Interval& a, const Interval& c) {
            if (a.birth != c.birth) return a.birth < c.birth;
            return a.death < c.death;
        });
    return b;
}

std::vector<std::size_t> betti_at(const Barcode& b, double eps) {
    std::vector<std::size_t> betti(b.dims.size(), 0);
    for (std::size_t k = 0; k < b.dims.size(); ++k)
        for (const Interval& iv : b.dims[k])
            if (iv.birth <= eps && eps < iv.death) ++betti[k];
    return betti;
}

double column_value(const ingest::CurveRecord& rec, const std::string& column) {
    if (column == "a1") return rec.a1.get_d();
    if (column == "a2") return rec.a2.get_d();
    if (column == "a3") return rec.a3.get_d();
    if (column == "a4") return rec.a4.get_d();
    if (column == "a6") return rec.a6.get_d();
    if (column == "conductor") return rec.conductor.get_d();
    if (column == "rank") return static_cast<double>(rec.rank);
    if (column == "torsion") return static_cast<double>(rec.torsion_order);
    if (column == "tamagawa") return static_cast<double>(rec.tamagawa_product);
    if (column == "omega") return rec.omega;
    if (column == "regulator") return rec.regulator;
    if (column == "sha") return rec.sha_order;
    throw ingest::ConfigError("unknown column: " + column);
}

PointCloud make_cloud(const std::vector<ingest::CurveRecord>& records, const PipelineSpec& spec) {
    if (spec.columns.empty() || spec.columns.size() != spec.transforms.size())
        throw ingest::ConfigError("columns/transforms mismatch");
    PointCloud cloud;
    cloud.n = records.size();
    cloud.d = spec.columns.size();
    cloud.labels = spec.columns;
    cloud.data.resize(cloud.n * cloud.d);
    for (std::size_t i = 0; i < cloud.n; ++i)
        for (std::size_t j = 0; j < cloud.d; ++j) {
            double v = column_value(records[i], spec.columns[j]);
            switch (spec.transforms[j]) {
                case ColumnTransform::slog: v = stats::slog(v); break;
                case ColumnTransform::log:
                    if (!(v > 0)) throw ingest::ConfigError("log transform on non-positive value in " +
                                                            spec.columns[j]);
                    v = std::log10(v);
                    break;
                case ColumnTransform::identity: break;
            }
            cloud.data[i * cloud.d + j] = v;
        }
    return cloud;
}

Barcode barcode_pipeline(const std::vector<ingest::CurveRecord>& records, const PipelineSpec& spec) {
    auto view = ingest::make_view(records, [](const ingest::CurveRecord&) { return true; }, "all",
                                  spec.seed);
    std::vector<ingest::CurveRecord> rows =
        spec.n_sample == 0 || spec.n_sample >= records.size()
            ? records
            : ingest::sample(records, view, spec.n_sample);
    PointCloud cloud = make_cloud(rows, spec);

    double eps = spec.max_eps;
    if (!std::isfinite(eps)) {
        auto cond = kernels::pairwise_distances(cloud.data, cloud.n, cloud.d);
        eps = cond.empty() ? 1.0 : *std::max_element(cond.begin(), cond.end());
        if (!(eps > 0)) eps = 1.0;
    }
    return persistence(build_rips(cloud, spec.max_dim, eps, spec.budget));
}

} // namespace bsdlab::tda
