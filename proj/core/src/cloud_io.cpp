#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "affdim/errors.hpp"
#include "affdim/measure.hpp"

namespace affdim {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

template <class T>
T parse(const std::string& field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidInput("cloud CSV line " + std::to_string(line) + ": cannot parse '" + field + "'");
  }
  return value;
}

}  // namespace

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  const int d = cloud.dim();
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "word,depth\n";
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    for (int k = 0; k < d; ++k) out << shortest(cloud.points(k, static_cast<Eigen::Index>(j))) << ',';
    if (j < cloud.words.size()) {
      const auto& w = cloud.words[j].symbols;
      for (std::size_t s = 0; s < w.size(); ++s) out << (s ? "." : "") << (w[s] + 1);
    }
    out << ',' << cloud.depth << '\n';
  }
}

PointCloud read_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("cloud CSV is empty");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[header.size() - 2] != "word" || header.back() != "depth") {
    throw InvalidInput("cloud CSV header must be x1,...,xd,word,depth");
  }
  const auto d = header.size() - 2;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) throw InvalidInput("cloud CSV header: expected x" + std::to_string(k + 1));
  }
  std::vector<double> values;
  PointCloud cloud;
  std::size_t row = 1;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != d + 2) throw InvalidInput("cloud CSV line " + std::to_string(row) + ": wrong field count");
    for (std::size_t k = 0; k < d; ++k) values.push_back(parse<double>(fields[k], row));
    SymbolWord w;
    if (!fields[d].empty()) {
      for (const auto& s : split(fields[d], '.')) {
        const auto symbol = parse<unsigned>(s, row);
        if (symbol == 0 || symbol > 65536) throw InvalidInput("cloud CSV line " + std::to_string(row) + ": bad symbol");
        w.symbols.push_back(static_cast<Symbol>(symbol - 1));
      }
    }
    cloud.words.push_back(std::move(w));
    const auto depth = parse<std::size_t>(fields[d + 1], row);
    if (first) {
      cloud.depth = depth;
      first = false;
    } else if (depth != cloud.depth) {
      throw InvalidInput("cloud CSV line " + std::to_string(row) + ": depth differs from earlier rows");
    }
  }
  const auto m = static_cast<Eigen::Index>(cloud.words.size());
  cloud.points = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(d), m);
  return cloud;
}

}  // namespace affdim
