#include "thermvisc/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"

namespace thermvisc {

namespace {

void append_le(std::string& out, const double* x, std::size_t n) {
  const std::size_t start = out.size();
  out.resize(start + n * sizeof(double));
  char* dst = out.data() + start;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &x[i], sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(dst + i * sizeof bits, &bits, sizeof bits);
  }
}

double read_le(const char* src) {
  std::uint64_t bits;
  std::memcpy(&bits, src, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace

const std::vector<double>& Snapshot::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return data[i];
  throw InvalidInput("snapshot has no field '" + name + "'");
}

template <int D>
void write_snapshot(const std::string& path, const State<D>& s, const Grid<D>& g, std::size_t step) {
  std::vector<std::pair<std::string, const double*>> blocks;
  for (int a = 0; a < D; ++a) blocks.push_back({"v" + std::to_string(a), s.v.comp(a)});
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) blocks.push_back({"F" + std::to_string(i) + std::to_string(j), s.F.comp(i * D + j)});
  blocks.push_back({"e", s.e.comp(0)});
  blocks.push_back({"theta", s.theta.comp(0)});
  if (s.has_B())
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) blocks.push_back({"B" + std::to_string(i) + std::to_string(j), s.B.comp(i * D + j)});

  nlohmann::ordered_json h;
  h["format"] = "thermvisc-snapshot";
  h["version"] = 1;
  h["dtype"] = "float64";
  h["byte_order"] = "little";
  h["layout"] = "row-major, last axis fastest";
  h["d"] = D;
  h["n"] = g.n();
  h["L"] = g.L();
  h["t"] = s.t;
  h["step"] = step;
  h["count"] = g.npts();
  nlohmann::ordered_json fields = nlohmann::ordered_json::array();
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    fields.push_back({{"name", b.first}, {"offset", offset}, {"count", g.npts()}});
    offset += g.npts() * sizeof(double);
  }
  h["fields"] = fields;
  std::string out = h.dump() + "\n";
  for (const auto& b : blocks) append_le(out, b.second, g.npts());
  write_file_atomic(path, out);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open snapshot '" + path + "'");
  std::string header;
  std::getline(in, header);
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string data = rest.str();
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const std::exception& e) {
    throw InvalidInput("snapshot header is not valid JSON: " + std::string(e.what()));
  }
  if (h.value("format", "") != "thermvisc-snapshot") throw InvalidInput("not a thermvisc snapshot");
  Snapshot s;
  s.d = h.at("d").get<int>();
  s.n = h.at("n").get<int>();
  s.L = h.at("L").get<double>();
  s.t = h.at("t").get<double>();
  s.step = h.at("step").get<std::size_t>();
  for (const auto& f : h.at("fields")) {
    const auto off = f.at("offset").get<std::size_t>();
    const auto cnt = f.at("count").get<std::size_t>();
    if (off + cnt * sizeof(double) > data.size()) throw InvalidInput("snapshot truncated");
    std::vector<double> v(cnt);
    for (std::size_t i = 0; i < cnt; ++i) v[i] = read_le(data.data() + off + i * sizeof(double));
    s.names.push_back(f.at("name").get<std::string>());
    s.data.push_back(std::move(v));
  }
  return s;
}

template void write_snapshot<2>(const std::string&, const State<2>&, const Grid<2>&, std::size_t);
template void write_snapshot<3>(const std::string&, const State<3>&, const Grid<3>&, std::size_t);

}  // namespace thermvisc
