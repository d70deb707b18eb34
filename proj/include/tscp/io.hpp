#pragma once

#include "tscp/dynamics.hpp"
#include "tscp/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

namespace tscp {

/// Shortest round-trip decimal representation.
std::string fmt(double x);
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }
inline std::string fmt(bool b) { return b ? "1" : "0"; }
template <class T>
    requires std::is_integral_v<T>
std::string fmt(T x)
{
    return std::to_string(x);
}

// CSV file with a `# twoscale v1 config_hash=... seed=...` first line.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& config_hash, std::uint64_t seed,
              const std::vector<std::string>& columns);

    template <class... Ts>
    void row(const Ts&... values)
    {
        std::string line;
        ((line += fmt(values), line += ','), ...);
        line.back() = '\n';
        out_ << line;
    }

private:
    std::ofstream out_;
};

/// d = 2: `TSCP v1` header plus one character row per y. Other d: `TSCPND v1`
/// header plus `x1 ... xd state` lines.
void write_snapshot(const std::filesystem::path& path, const Configuration& cfg, const TwoScaleGraph& g, double t,
                    std::uint64_t seed, const std::string& config_hash);

/// Reads a snapshot written by write_snapshot, or a bare whitespace-separated
/// list of states in vertex order.
std::vector<State> read_states(const std::filesystem::path& path, const TwoScaleGraph& g);

} // namespace tscp
