#include "slc/snapshot.hpp"
#include "slc/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace slc {

static_assert(std::endian::native == std::endian::little, "snapshot encoding assumes a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T v)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos)
{
    if (pos + sizeof(T) > in.size())
        throw IoError("snapshot truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

void put_header(std::string& out, std::uint32_t n_dim, std::array<std::uint32_t, 3> counts,
                std::array<double, 3> lengths, std::uint32_t components, double time)
{
    out.append("SLCF", 4);
    put(out, kVersion);
    put(out, n_dim);
    for (auto c : counts)
        put(out, c);
    for (auto l : lengths)
        put(out, l);
    put(out, components);
    put(out, time);
}

void put_array(std::string& out, const Array3& a)
{
    for (double v : a.values())
        put(out, v);
}

} // namespace

std::string encode_state(const Grid& g, const State& s)
{
    std::string out;
    std::array<double, 3> lengths{g.length(0), g.length(1), g.n_dim() == 3 ? g.length(2) : 0.0};
    std::array<std::uint32_t, 3> counts{};
    for (int a = 0; a < 3; ++a)
        counts[a] = static_cast<std::uint32_t>(g.cells(a));
    put_header(out, g.n_dim(), counts, lengths, static_cast<std::uint32_t>(g.n_dim() + 3), s.t);
    for (int c = 0; c < g.n_dim(); ++c) {
        g.require_face(c, s.v.c[c]);
        put_array(out, s.v.c[c]);
    }
    for (int k = 0; k < 3; ++k) {
        g.require_cell(s.d.c[k]);
        put_array(out, s.d.c[k]);
    }
    return out;
}

State decode_state(const Grid& g, const std::string& bytes)
{
    std::size_t pos = 0;
    if (bytes.size() < 4 || bytes.compare(0, 4, "SLCF") != 0)
        throw IoError("not a snapshot (bad magic)");
    pos = 4;
    if (take<std::uint32_t>(bytes, pos) != kVersion)
        throw IoError("unsupported snapshot version");
    auto n_dim = take<std::uint32_t>(bytes, pos);
    if (static_cast<int>(n_dim) != g.n_dim())
        throw DimensionError("snapshot dimension does not match the grid");
    for (int a = 0; a < 3; ++a)
        if (static_cast<int>(take<std::uint32_t>(bytes, pos)) != g.cells(a))
            throw DimensionError("snapshot cell counts do not match the grid");
    for (int a = 0; a < 3; ++a)
        take<double>(bytes, pos);
    if (take<std::uint32_t>(bytes, pos) != n_dim + 3)
        throw IoError("snapshot component count mismatch");
    State s = State::zeros(g);
    s.t = take<double>(bytes, pos);
    auto fill = [&](Array3& a) {
        for (std::size_t n = 0; n < a.size(); ++n)
            a[n] = take<double>(bytes, pos);
    };
    for (int c = 0; c < g.n_dim(); ++c)
        fill(s.v.c[c]);
    for (int k = 0; k < 3; ++k)
        fill(s.d.c[k]);
    if (pos != bytes.size())
        throw IoError("trailing bytes after snapshot");
    return s;
}

std::string encode_path(const BrownianPath& p)
{
    std::string out;
    put_header(out, 0,
               {static_cast<std::uint32_t>(p.steps), static_cast<std::uint32_t>(p.mode_count + 1),
                static_cast<std::uint32_t>(p.refinement_level)},
               {p.dt(), p.horizon(), 0.0}, 1, 0.0);
    for (std::size_t i = 0; i < p.steps; ++i)
        for (int j = 0; j < p.mode_count; ++j)
            put(out, p.w1(i, j));
    for (std::size_t i = 0; i < p.steps; ++i)
        put(out, p.w2(i));
    return out;
}

void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace slc
