#include "cdho/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "cdho/error.hpp"

namespace cdho {

namespace {

void put_le(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  os.write(reinterpret_cast<const char*>(&u), sizeof u);
}

double get_le(std::istream& is) {
  std::uint64_t u;
  is.read(reinterpret_cast<char*>(&u), sizeof u);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

}  // namespace

void write_field(const std::string& path, const Field& f, double time, const nlohmann::json& extra) {
  nlohmann::json h = extra;
  h["format"] = "cdho-field-1";
  h["n"] = f.grid.n;
  h["N"] = f.grid.N;
  h["L"] = f.grid.L;
  h["space"] = to_string(f.space);
  h["time"] = time;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << h.dump() << '\n';
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    put_le(os, f.values(i).real());
    put_le(os, f.values(i).imag());
  }
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

FieldFile read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string line;
  std::getline(is, line);
  FieldFile ff;
  try {
    ff.header = nlohmann::json::parse(line);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Io, path + ": bad header: " + e.what());
  }
  const Grid g(ff.header.at("n").get<int>(), ff.header.at("N").get<int>(),
               ff.header.at("L").get<double>());
  const Space s = ff.header.at("space").get<std::string>() == "frequency" ? Space::Frequency : Space::Position;
  ff.time = ff.header.at("time").get<double>();
  Eigen::ArrayXcd v(g.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = get_le(is), im = get_le(is);
    v(i) = cd(re, im);
  }
  if (!is) throw Error(ErrorKind::Io, path + ": truncated field data");
  ff.field = Field(g, s, std::move(v));
  return ff;
}

void write_field_csv(const std::string& path, const Field& f) {
  if (f.grid.n != 1) throw Error(ErrorKind::Precondition, "CSV field export supports n = 1 only");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os << (f.space == Space::Position ? "x" : "xi") << ",re,im,abs\n" << std::setprecision(17);
  const Eigen::ArrayXd ax = f.grid.axis(f.space);
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    os << ax(i) << ',' << f.values(i).real() << ',' << f.values(i).imag() << ','
       << std::abs(f.values(i)) << '\n';
}

}  // namespace cdho
