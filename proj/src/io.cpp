#include "tscp/io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace tscp {

std::string fmt(double x)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, p);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash, std::uint64_t seed,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary)
{
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# twoscale v1 config_hash=" << config_hash << " seed=" << seed << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void write_snapshot(const std::filesystem::path& path, const Configuration& cfg, const TwoScaleGraph& g, double t,
                    std::uint64_t seed, const std::string& config_hash)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    static constexpr char glyph[] = {'.', '1', '2'};
    const int side = g.spec().side();
    if (g.dim() == 2) {
        out << "TSCP v1 w=" << side << " h=" << side << " t=" << fmt(t) << " seed=" << seed
            << " config=" << config_hash << '\n';
        std::string row(static_cast<std::size_t>(side), '.');
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) row[x] = glyph[cfg.states[static_cast<std::size_t>(y) * side + x]];
            out << row << '\n';
        }
        return;
    }
    out << "TSCPND v1 d=" << g.dim() << " side=" << side << " t=" << fmt(t) << " seed=" << seed
        << " config=" << config_hash << '\n';
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const Coord x = g.coords(v);
        for (int xi : x) out << xi << ' ';
        out << static_cast<int>(cfg.states[v]) << '\n';
    }
}

std::vector<State> read_states(const std::filesystem::path& path, const TwoScaleGraph& g)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string first;
    std::getline(in, first);
    std::vector<State> states(g.num_vertices(), 0);
    auto state_of = [](char c) -> State {
        if (c == '.' || c == '0') return 0;
        if (c == '1') return 1;
        if (c == '2') return 2;
        throw std::runtime_error(std::string("bad state character '") + c + "'");
    };

    if (first.rfind("TSCP v1", 0) == 0) {
        if (g.dim() != 2) throw std::runtime_error("2-d snapshot for a non-2-d graph");
        const int side = g.spec().side();
        std::string row;
        for (int y = 0; y < side; ++y) {
            if (!std::getline(in, row) || static_cast<int>(row.size()) < side)
                throw std::runtime_error("snapshot too short");
            for (int x = 0; x < side; ++x) states[static_cast<std::size_t>(y) * side + x] = state_of(row[x]);
        }
        return states;
    }
    if (first.rfind("TSCPND v1", 0) == 0) {
        std::string line;
        std::size_t seen = 0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            Coord x(g.dim());
            int s = 0;
            for (int& xi : x) ls >> xi;
            if (!(ls >> s) || s < 0 || s > 2) throw std::runtime_error("bad snapshot line: " + line);
            states[g.vertex_at(x)] = static_cast<State>(s);
            ++seen;
        }
        if (seen != g.num_vertices()) throw std::runtime_error("snapshot vertex count mismatch");
        return states;
    }
    std::stringstream all;
    all << first << '\n' << in.rdbuf();
    std::size_t k = 0;
    char c;
    while (all >> c) {
        if (k >= states.size()) throw std::runtime_error("too many states in file");
        states[k++] = state_of(c);
    }
    if (k != states.size()) throw std::runtime_error("state file has " + std::to_string(k) + " entries");
    return states;
}

} // namespace tscp
