#include "bsdlab/ingest.hpp"

#include "bsdlab/parallel.hpp"
#include "bsdlab/rng.hpp"

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace bsdlab::ingest {

namespace {

const char* kRequiredFields[] = {"label",   "a1",      "a2",        "a3",
                                 "a4",      "a6",      "conductor", "rank",
                                 "torsion", "tamagawa", "omega",    "regulator",
                                 "sha"};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    const char sep = line.find(',') != std::string::npos ? ',' : ' ';
    std::string cur;
    for (char ch : line) {
        if (ch == sep || (sep == ' ' && (ch == '\t'))) {
            if (sep == ',' || !cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (sep == ',' || !cur.empty()) out.push_back(cur);
    return out;
}

bool parse_int(const std::string& s, ec::Int& out) {
    if (s.empty()) return false;
    return mpz_set_str(out.get_mpz_t(), s.c_str(), 10) == 0;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_long(const std::string& s, long& out) {
    ec::Int v;
    if (!parse_int(s, v) || !v.fits_slong_p()) return false;
    out = v.get_si();
    return true;
}

} // namespace

ColumnMap default_column_map() {
    ColumnMap m;
    std::size_t i = 0;
    for (const char* f : kRequiredFields) m[f] = i++;
    m["generators"] = i;
    return m;
}

ColumnMap load_column_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open column mapping file: " + path);
    ColumnMap m;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string key, eq;
        std::size_t idx;
        if (ls >> key >> eq >> idx && eq == "=") m[key] = idx;
    }
    for (const char* f : kRequiredFields)
        if (!m.count(f)) throw ConfigError(std::string("column mapping missing field: ") + f);
    return m;
}

ParseResult parse_lines(const std::vector<std::string>& lines, const ColumnMap& map) {
    for (const char* f : kRequiredFields)
        if (!map.count(f)) throw ConfigError(std::string("column mapping missing field: ") + f);

    std::size_t max_col = 0;
    for (auto& [k, v] : map) max_col = std::max(max_col, v);
    const bool has_gens = map.count("generators") > 0;

    const std::size_t n_chunks = std::max<std::size_t>(1, lines.size() / 4096);
    std::vector<ParseResult> parts(n_chunks);

    parallel_chunks(lines.size(), n_chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
        auto& part = parts[c];
        for (std::size_t i = b; i < e; ++i) {
            const std::string& raw = lines[i];
            const std::size_t line_no = i + 1;
            std::string line = raw;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

            auto cells = split_fields(line);
            // header line of the canonical CSV
            if (i == 0 && !cells.empty() && cells[map.at("label")] == "label") continue;
            if (cells.size() <= max_col && !(cells.size() == max_col && has_gens &&
                                             map.at("generators") == max_col)) {
                part.errors.push_back({line_no, "", "row has " + std::to_string(cells.size()) +
                                                        " cells, need " + std::to_string(max_col + 1)});
                continue;
            }
            auto cell = [&](const char* f) -> const std::string& {
                static const std::string empty;
                std::size_t idx = map.at(f);
                return idx < cells.size() ? cells[idx] : empty;
            };

            CurveRecord rec;
            rec.label = cell("label");
            bool ok = true;
            auto need_int = [&](const char* f, ec::Int& out) {
                if (!parse_int(cell(f), out)) {
                    part.errors.push_back({line_no, f, "non-integer cell '" + cell(f) + "'"});
                    ok = false;
                }
            };
            auto need_double = [&](const char* f, double& out) {
                if (!parse_double(cell(f), out)) {
                    part.errors.push_back({line_no, f, "non-numeric cell '" + cell(f) + "'"});
                    ok = false;
                }
            };
            need_int("a1", rec.a1);
            need_int("a2", rec.a2);
            need_int("a3", rec.a3);
            need_int("a4", rec.a4);
            need_int("a6", rec.a6);
            need_int("conductor", rec.conductor);
            long l;
            if (parse_long(cell("rank"), l)) {
                rec.rank = static_cast<int>(l);
            } else {
                part.errors.push_back({line_no, "rank", "non-integer cell '" + cell("rank") + "'"});
                ok = false;
            }
            if (parse_long(cell("torsion"), l)) {
                rec.torsion_order = static_cast<int>(l);
            } else {
                part.errors.push_back({line_no, "torsion", "non-integer cell"});
                ok = false;
            }
            if (parse_long(cell("tamagawa"), l)) {
                rec.tamagawa_product = l;
            } else {
                part.errors.push_back({line_no, "tamagawa", "non-integer cell"});
                ok = false;
            }
            need_double("omega", rec.omega);
            need_double("regulator", rec.regulator);
            need_double("sha", rec.sha_order);
            if (has_gens && map.at("generators") < cells.size()) {
                const std::string& g = cells[map.at("generators")];
                if (!g.empty() && g != "-") {
                    try {
                        rec.generators = generators_from_string(g);
                    } catch (const std::exception& ex) {
                        part.errors.push_back({line_no, "generators", ex.what()});
                        ok = false;
                    }
                }
            }
            if (ok) part.records.push_back(std::move(rec));
        }
    });

    ParseResult out;
    for (auto& p : parts) {
        out.records.insert(out.records.end(), std::make_move_iterator(p.records.begin()),
                           std::make_move_iterator(p.records.end()));
        out.errors.insert(out.errors.end(), p.errors.begin(), p.errors.end());
    }
    // duplicate labels are row errors; keep the first occurrence
    std::set<std::string> seen;
    std::vector<CurveRecord> unique;
    unique.reserve(out.records.size());
    for (auto& r : out.records) {
        if (!seen.insert(r.label).second)
            out.errors.push_back({0, "label", "duplicate label " + r.label});
        else
            unique.push_back(std::move(r));
    }
    out.records = std::move(unique);
    return out;
}

ParseResult parse_table(const std::string& path, const ColumnMap& map) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return parse_lines(lines, map);
}

std::vector<Violation> validate(const CurveRecord& rec) {
    std::vector<Violation> out;
    auto bad = [&](const char* f, std::string msg) { out.push_back({f, std::move(msg)}); };

    if (rec.a1 != 0 && rec.a1 != 1) bad("a1", "a1 must be 0 or 1");
    if (rec.a3 != 0 && rec.a3 != 1) bad("a3", "a3 must be 0 or 1");
    if (rec.a2 < -1 || rec.a2 > 1) bad("a2", "a2 must be -1, 0 or 1");

    auto inv = ec::invariants(rec.curve());
    if (inv.delta == 0) bad("a4", "discriminant is zero (singular curve)");

    static const std::set<int> mazur{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 16};
    if (!mazur.count(rec.torsion_order)) bad("torsion", "torsion order outside Mazur set");
    if (rec.rank < 0 || rec.rank > 4) bad("rank", "rank outside database range 0..4");
    if (rec.conductor <= 0) bad("conductor", "conductor must be positive");
    if (!(rec.omega > 0)) bad("omega", "omega must be positive");
    if (!(rec.regulator > 0)) bad("regulator", "regulator must be positive");
    if (rec.tamagawa_product < 1) bad("tamagawa", "tamagawa product must be positive");
    if (!(rec.sha_order > 0)) bad("sha", "sha order must be positive");
    if (rec.rank == 0 && std::abs(rec.regulator - 1.0) > 1e-12)
        bad("regulator", "rank-0 regulator must be 1");

    // every prime dividing N must divide the discriminant
    if (rec.conductor > 1 && inv.delta != 0) {
        ec::Int n = rec.conductor;
        ec::Int d = abs(inv.delta);
        for (ec::Int p = 2; p * p <= n; ++p) {
            if (n % p != 0) continue;
            while (n % p == 0) n /= p;
            if (d % p != 0) bad("conductor", "prime " + p.get_str() + " divides N but not delta");
        }
        if (n > 1 && d % n != 0) bad("conductor", "prime " + n.get_str() + " divides N but not delta");
    }

    if (rec.generators) {
        if (rec.generators->size() != static_cast<std::size_t>(rec.rank))
            bad("generators", "generator count differs from rank");
        auto curve = rec.curve();
        for (const auto& g : *rec.generators)
            if (!ec::on_curve(curve, g)) bad("generators", "generator not on curve");
    }
    return out;
}

// ---------------------------------------------------------------------------
// generators serialization: "xnum/xden:ynum/yden;..." with "/1" elided

std::string generators_to_string(const std::vector<ec::RationalPoint>& gens) {
    std::string out;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (i) out += ';';
        const auto& p = gens[i];
        out += p.x.get_num().get_str();
        if (p.x.get_den() != 1) out += "/" + p.x.get_den().get_str();
        out += ':';
        out += p.y.get_num().get_str();
        if (p.y.get_den() != 1) out += "/" + p.y.get_den().get_str();
    }
    return out.empty() ? "-" : out;
}

namespace {
ec::Rat parse_rat(const std::string& s) {
    ec::Rat q;
    if (s.empty() || mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw std::invalid_argument("bad rational '" + s + "'");
    q.canonicalize();
    return q;
}
} // namespace

std::vector<ec::RationalPoint> generators_from_string(const std::string& s) {
    std::vector<ec::RationalPoint> out;
    if (s.empty() || s == "-") return out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("bad generator '" + tok + "'");
        out.push_back(ec::RationalPoint::affine(parse_rat(tok.substr(0, colon)),
                                                parse_rat(tok.substr(colon + 1))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// binary cache: magic, u32 version, u64 count, length-prefixed fields

namespace {

constexpr char kMagic[8] = {'B', 'S', 'D', 'L', 'A', 'B', 'C', '\n'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<char*>(b), 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    put_u32(os, static_cast<std::uint32_t>(v));
    put_u32(os, static_cast<std::uint32_t>(v >> 32));
}
void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void put_mpz(std::ostream& os, const ec::Int& v) { put_str(os, v.get_str()); }
void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw CacheError("truncated cache file");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t lo = get_u32(is);
    return lo | std::uint64_t(get_u32(is)) << 32;
}
std::string get_str(std::istream& is) {
    std::uint32_t n = get_u32(is);
    std::string s(n, '\0');
    if (n && !is.read(s.data(), n)) throw CacheError("truncated cache file");
    return s;
}
ec::Int get_mpz(std::istream& is) {
    ec::Int v;
    std::string s = get_str(is);
    if (mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0) throw CacheError("corrupt integer field");
    return v;
}
double get_f64(std::istream& is) {
    std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

} // namespace

void write_cache(const std::vector<CurveRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CacheError("cannot open cache for writing: " + path);
    os.write(kMagic, 8);
    put_u32(os, kCacheVersion);
    put_u64(os, records.size());
    for (const auto& r : records) {
        put_str(os, r.label);
        put_mpz(os, r.a1);
        put_mpz(os, r.a2);
        put_mpz(os, r.a3);
        put_mpz(os, r.a4);
        put_mpz(os, r.a6);
        put_mpz(os, r.conductor);
        put_u64(os, static_cast<std::uint64_t>(r.rank));
        put_u64(os, static_cast<std::uint64_t>(r.torsion_order));
        put_u64(os, static_cast<std::uint64_t>(r.tamagawa_product));
        put_f64(os, r.omega);
        put_f64(os, r.regulator);
        put_f64(os, r.sha_order);
        os.put(r.generators ? 1 : 0);
        if (r.generators) put_str(os, generators_to_string(*r.generators));
    }
    if (!os) throw CacheError("write failure: " + path);
}

std::vector<CurveRecord> read_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CacheError("cannot open cache: " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw CacheError("not a bsdlab cache file");
    std::uint32_t version = get_u32(is);
    if (version != kCacheVersion)
        throw CacheError("cache version " + std::to_string(version) + " needs migration (expected " +
                         std::to_string(kCacheVersion) + ")");
    std::uint64_t count = get_u64(is);
    std::vector<CurveRecord> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        CurveRecord r;
        r.label = get_str(is);
        r.a1 = get_mpz(is);
        r.a2 = get_mpz(is);
        r.a3 = get_mpz(is);
        r.a4 = get_mpz(is);
        r.a6 = get_mpz(is);
        r.conductor = get_mpz(is);
        r.rank = static_cast<int>(get_u64(is));
        r.torsion_order = static_cast<int>(get_u64(is));
        r.tamagawa_product = static_cast<long>(get_u64(is));
        r.omega = get_f64(is);
        r.regulator = get_f64(is);
        r.sha_order = get_f64(is);
        int flag = is.get();
        if (flag == std::istream::traits_type::eof()) throw CacheError("truncated cache file");
        if (flag) r.generators = generators_from_string(get_str(is));
        out.push_back(std::move(r));
    }
    return out;
}

DatasetView make_view(const std::vector<CurveRecord>& records,
                      const std::function<bool(const CurveRecord&)>& pred,
                      const std::string& filter_desc, std::uint64_t seed,
                      const std::string& source) {
    DatasetView v;
    v.source = source;
    v.seed = seed;
    v.filter_desc = filter_desc;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!pred || pred(records[i])) v.row_indices.push_back(i);
    return v;
}

std::vector<std::size_t> sample_indices(const DatasetView& view, std::size_t n) {
    if (n > view.row_indices.size())
        throw std::invalid_argument("sample size " + std::to_string(n) + " exceeds view size " +
                                    std::to_string(view.row_indices.size()));
    std::vector<std::size_t> idx = view.row_indices;
    Rng rng = Rng::stream(view.seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

std::vector<CurveRecord> sample(const std::vector<CurveRecord>& records, const DatasetView& view,
                                std::size_t n) {
    std::vector<CurveRecord> out;
    out.reserve(n);
    for (std::size_t i : sample_indices(view, n)) out.push_back(records.at(i));
    return out;
}

} // namespace bsdlab::ingest
