#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "finepot/error.hpp"
#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

using Json = nlohmann::json;

/// Comma-separated table; lines starting with '#' are comments.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has(std::string_view name) const;
    std::size_t column(std::string_view name) const;  ///< throws Io when missing
    std::vector<double> numbers(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Accepts "inf", "-inf", "+inf", "nan" and anything std::stod takes; throws Io otherwise.
double parse_number(std::string_view text);

/// Round-trip decimal ("%.17g"), with inf/-inf/nan spelled out.
std::string format_number(double value);

/// ISO 8601 UTC timestamp, second resolution.
std::string timestamp_utc();

/// Lowercase hex SHA-256 of a file or a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(std::string_view text);

/// CSV writer whose first line is "# generated <timestamp> seed=<seed>".
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns, std::uint64_t seed);

    void row(const std::vector<std::string>& cells);
    CsvWriter& operator<<(const std::vector<std::string>& cells) {
        row(cells);
        return *this;
    }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_ = 0;
};

Json load_config(const std::filesystem::path& path);

/// {"type": "grid", "dim", "lower", "upper", "h", "weight"?} or
/// {"type": "graph", "edges": csv(src,dst,length), "vertices": csv(id,measure[,x,y,z])}.
SpacePtr space_from_config(const Json& config, const std::filesystem::path& base_dir = {});

/// {"space": ..., "p", then either "data": csv(id,f,psi1,psi2,E) or expressions
/// "f", "psi1", "psi2", "E" (nonzero means member; default: grid interior)}.
ObstacleProblem problem_from_config(const Json& config, const std::filesystem::path& base_dir = {});

/// A number, "inf"/"-inf", or an expression in the coordinates.
ScalarField field_from_config(const Json& config, const Space& space, double fallback);

/// An expression (nonzero means member) or an explicit list of vertex ids.
VertexSet set_from_config(const Json& config, const Space& space);

/// {"max_iter", "tol_kkt", "tol_energy", "method": "newton" | "gradient", "step": "fixed" | "backtracking"}.
SolverConfig solver_from_config(const Json& config);

/// Writes vertex id, coordinates, value and, when given, membership in E.
void write_field_csv(const std::filesystem::path& path, const Space& space, std::span<const double> values,
                     std::uint64_t seed, const VertexSet* E = nullptr);

void write_telemetry_csv(const std::filesystem::path& path, const std::vector<TelemetryRow>& rows, std::uint64_t seed);

/// {"kind", "message", "command"} for a failed run.
void write_error_json(const std::filesystem::path& path, ErrorKind kind, const std::string& message,
                      const std::string& command);

void write_json(const std::filesystem::path& path, const Json& value);

} // namespace finepot
