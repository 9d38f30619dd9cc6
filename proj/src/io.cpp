#include "finepot/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <limits>
#include <sstream>

#include "finepot/expr.hpp"
#include "finepot/fixtures.hpp"

namespace finepot {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string digest_hex(const unsigned char* md, unsigned len) {
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        require(ctx_ != nullptr && EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) == 1, "sha256 unavailable", ErrorKind::Io);
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_, data, len); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_, md.data(), &len);
        return digest_hex(md.data(), len);
    }

private:
    EVP_MD_CTX* ctx_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<double> json_vector(const Json& j, const char* key) {
    require(j.contains(key) && j[key].is_array(), std::string("config needs array '") + key + "'", ErrorKind::Config);
    return j[key].get<std::vector<double>>();
}

} // namespace

bool CsvTable::has(std::string_view name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), "csv column '" + std::string(name) + "' missing", ErrorKind::Io);
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
    auto c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        require(c < r.size(), "csv row too short", ErrorKind::Io);
        out.push_back(parse_number(r[c]));
    }
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path.string(), ErrorKind::Io);
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        auto s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto cells = split(s);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        require(cells.size() == t.header.size(), "csv row width differs from header in " + path.string(), ErrorKind::Io);
        t.rows.push_back(std::move(cells));
    }
    require(!t.header.empty(), "csv file " + path.string() + " has no header", ErrorKind::Io);
    return t;
}

double parse_number(std::string_view text) {
    auto s = trim(text);
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity") return std::numeric_limits<double>::infinity();
    if (lower == "-inf" || lower == "-infinity") return -std::numeric_limits<double>::infinity();
    if (lower == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(ErrorKind::Io, "not a number: '" + s + "'");
    }
    require(used == s.size(), "not a number: '" + s + "'", ErrorKind::Io);
    return v;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open " + path.string(), ErrorKind::Io);
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string sha256_text(std::string_view text) {
    Sha256 h;
    h.update(text.data(), text.size());
    return h.hex();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns, std::uint64_t seed)
    : path_(path), out_(path), width_(columns.size()) {
    require(out_.good(), "cannot write " + path.string(), ErrorKind::Io);
    out_ << "# generated " << timestamp_utc() << " seed=" << seed << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    require(cells.size() == width_, "csv row width differs from header", ErrorKind::Io);
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    require(out_.good(), "write failed for " + path_.string(), ErrorKind::Io);
}

Json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config " + path.string(), ErrorKind::Io);
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const Json::exception& e) {
        fail(ErrorKind::Config, "config " + path.string() + ": " + e.what());
    }
}

SpacePtr space_from_config(const Json& j, const std::filesystem::path& base) {
    require(j.is_object() && j.contains("type"), "space config needs a 'type'", ErrorKind::Config);
    auto type = j["type"].get<std::string>();
    try {
        if (type == "grid") {
            int dim = j.value("dim", 0);
            auto lo = json_vector(j, "lower"), hi = json_vector(j, "upper");
            if (dim == 0) dim = static_cast<int>(lo.size());
            require(j.contains("h"), "grid config needs 'h'", ErrorKind::Config);
            double h = j["h"].get<double>();
            WeightFunction w;
            if (j.contains("weight")) {
                auto e = Expression::parse(j["weight"].get<std::string>());
                w = [e](std::span<const double> x) { return e(x); };
            }
            return build_grid(dim, lo, hi, h, w);
        }
        if (type == "graph") {
            require(j.contains("edges") && j.contains("vertices"), "graph config needs 'edges' and 'vertices'", ErrorKind::Config);
            auto vt = read_csv(resolve(base, j["vertices"].get<std::string>()));
            auto et = read_csv(resolve(base, j["edges"].get<std::string>()));
            auto ids = vt.numbers("id");
            auto mu = vt.numbers("measure");
            const std::size_t n = ids.size();
            std::vector<double> measure(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                auto id = static_cast<std::size_t>(ids[i]);
                require(ids[i] >= 0 && static_cast<double>(id) == ids[i] && id < n, "vertex ids must be 0..n-1", ErrorKind::Config);
                measure[id] = mu[i];
            }
            std::vector<double> coords;
            int dim = 0;
            for (const char* axis : {"x", "y", "z"})
                if (vt.has(axis)) ++dim;
            if (dim > 0) {
                coords.assign(n * static_cast<std::size_t>(dim), 0.0);
                const char* names[] = {"x", "y", "z"};
                for (int a = 0; a < dim; ++a) {
                    auto col = vt.numbers(names[a]);
                    for (std::size_t i = 0; i < n; ++i) coords[static_cast<std::size_t>(ids[i]) * dim + a] = col[i];
                }
            }
            auto src = et.numbers("src"), dst = et.numbers("dst");
            std::vector<double> len = et.has("length") ? et.numbers("length") : std::vector<double>(src.size(), 1.0);
            std::vector<GraphEdge> edges;
            for (std::size_t i = 0; i < src.size(); ++i)
                edges.push_back({static_cast<std::size_t>(src[i]), static_cast<std::size_t>(dst[i]), len[i]});
            return build_graph(n, edges, measure, coords, dim);
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Config, std::string("space config: ") + e.what());
    }
    fail(ErrorKind::Config, "unknown space type '" + type + "'");
}

ObstacleProblem problem_from_config(const Json& j, const std::filesystem::path& base) {
    require(j.is_object() && j.contains("space"), "problem config needs a 'space'", ErrorKind::Config);
    ObstacleProblem pr;
    pr.space = space_from_config(j["space"], base);
    const auto& sp = *pr.space;
    const auto n = sp.size();
    try {
        pr.p = j.value("p", 2.0);
        pr.mass_weight = j.value("mass_weight", 0.0);
        if (j.contains("data")) {
            auto t = read_csv(resolve(base, j["data"].get<std::string>()));
            auto ids = t.numbers("id");
            pr.boundary.assign(n, 0.0);
            pr.domain = VertexSet(n);
            ObstacleField lo(n, -std::numeric_limits<double>::infinity()), hi(n, std::numeric_limits<double>::infinity());
            auto f = t.numbers("f");
            auto e = t.numbers("E");
            auto psi1 = t.has("psi1") ? t.numbers("psi1") : std::vector<double>();
            auto psi2 = t.has("psi2") ? t.numbers("psi2") : std::vector<double>();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                auto v = static_cast<std::size_t>(ids[i]);
                require(v < n, "problem data vertex out of range", ErrorKind::Config);
                pr.boundary[v] = f[i];
                if (e[i] != 0.0) pr.domain.insert(v);
                if (!psi1.empty()) lo[v] = psi1[i];
                if (!psi2.empty()) hi[v] = psi2[i];
            }
            if (!psi1.empty()) pr.lower = std::move(lo);
            if (!psi2.empty()) pr.upper = std::move(hi);
            return pr;
        }
        pr.boundary = field_from_config(j.value("f", Json()), sp, 0.0);
        if (j.contains("psi1")) pr.lower = field_from_config(j["psi1"], sp, -std::numeric_limits<double>::infinity());
        if (j.contains("psi2")) pr.upper = field_from_config(j["psi2"], sp, std::numeric_limits<double>::infinity());
        if (j.contains("E")) {
            pr.domain = set_from_config(j["E"], sp);
        } else {
            require(sp.grid().has_value(), "graph problems need an explicit 'E'", ErrorKind::Config);
            const auto& g = *sp.grid();
            pr.domain = VertexSet::where(n, [&](std::size_t v) {
                auto m = g.multi_index(v);
                for (int a = 0; a < g.dim; ++a)
                    if (m[a] == 0 || m[a] + 1 == g.counts[a]) return false;
                return true;
            });
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Config, std::string("problem config: ") + e.what());
    }
    return pr;
}

ScalarField field_from_config(const Json& j, const Space& sp, double fallback) {
    ScalarField out(sp.size(), fallback);
    if (j.is_null()) return out;
    if (j.is_number()) {
        std::fill(out.begin(), out.end(), j.get<double>());
        return out;
    }
    require(j.is_string(), "field must be a number or an expression", ErrorKind::Config);
    auto text = j.get<std::string>();
    if (text == "inf" || text == "-inf" || text == "+inf") {
        std::fill(out.begin(), out.end(), parse_number(text));
        return out;
    }
    auto e = Expression::parse(text);
    for (std::size_t v = 0; v < sp.size(); ++v) out[v] = e(sp.coord(v));
    return out;
}

VertexSet set_from_config(const Json& j, const Space& sp) {
    if (j.is_array()) {
        auto ids = j.get<std::vector<std::size_t>>();
        for (auto v : ids) require(v < sp.size(), "vertex id out of range in set", ErrorKind::Config);
        return VertexSet::from_indices(sp.size(), ids);
    }
    require(j.is_string(), "set must be an expression or a list of vertex ids", ErrorKind::Config);
    auto e = Expression::parse(j.get<std::string>());
    return VertexSet::where(sp.size(), [&](std::size_t v) { return e(sp.coord(v)) != 0.0; });
}

SolverConfig solver_from_config(const Json& j) {
    SolverConfig c;
    if (j.is_null()) return c;
    require(j.is_object(), "solver config must be an object", ErrorKind::Config);
    try {
        c.max_iter = j.value("max_iter", c.max_iter);
        c.tol_kkt = j.value("tol_kkt", c.tol_kkt);
        c.tol_energy = j.value("tol_energy", c.tol_energy);
        auto method = j.value("method", std::string("newton"));
        require(method == "newton" || method == "gradient", "solver method must be 'newton' or 'gradient'", ErrorKind::Config);
        c.method = method == "newton" ? SolverMethod::ProjectedNewton : SolverMethod::ProjectedGradient;
        auto step = j.value("step", std::string("backtracking"));
        require(step == "fixed" || step == "backtracking", "step rule must be 'fixed' or 'backtracking'", ErrorKind::Config);
        c.step_rule = step == "fixed" ? StepRule::Fixed : StepRule::Backtracking;
        c.fixed_step = j.value("fixed_step", 0.0);
    } catch (const Json::exception& e) {
        fail(ErrorKind::Config, std::string("solver config: ") + e.what());
    }
    return c;
}

void write_field_csv(const std::filesystem::path& path, const Space& space, std::span<const double> values,
                     std::uint64_t seed, const VertexSet* E) {
    require(values.size() == space.size(), "field size does not match the space", ErrorKind::Io);
    std::vector<std::string> cols{"vertex"};
    const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < space.dim() && a < 3; ++a) cols.emplace_back(axes[a]);
    cols.emplace_back("value");
    if (E) cols.emplace_back("in_E");
    CsvWriter w(path, cols, seed);
    for (std::size_t v = 0; v < space.size(); ++v) {
        std::vector<std::string> r{std::to_string(v)};
        for (int a = 0; a < space.dim() && a < 3; ++a) r.push_back(format_number(space.coord(v)[a]));
        r.push_back(format_number(values[v]));
        if (E) r.push_back(E->contains(v) ? "1" : "0");
        w.row(r);
    }
}

void write_telemetry_csv(const std::filesystem::path& path, const std::vector<TelemetryRow>& rows, std::uint64_t seed) {
    CsvWriter w(path, {"iteration", "objective", "kkt", "step"}, seed);
    for (const auto& r : rows)
        w.row({std::to_string(r.iteration), format_number(r.objective), format_number(r.kkt), format_number(r.step)});
}

void write_error_json(const std::filesystem::path& path, ErrorKind kind, const std::string& message,
                      const std::string& command) {
    write_json(path, Json{{"kind", to_string(kind)}, {"message", message}, {"command", command}});
}

void write_json(const std::filesystem::path& path, const Json& value) {
    std::ofstream out(path);
    require(out.good(), "cannot write " + path.string(), ErrorKind::Io);
    out << value.dump(2) << '\n';
}

} // namespace finepot
