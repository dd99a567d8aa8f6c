#include "dcxlab/pattern_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

std::string fmt_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  return std::filesystem::path(csv_path.string() + ".json");
}

void write_pattern(const PointPattern& pattern, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
  for (std::size_t i = 0; i < pattern.dim(); ++i) csv << (i ? "," : "") << 'x' << (i + 1);
  csv << "\r\n";
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    const auto p = pattern.point(j);
    for (std::size_t i = 0; i < p.size(); ++i) csv << (i ? "," : "") << fmt_real(p[i]);
    csv << "\r\n";
  }
  if (!csv) throw IoError("write failed for '" + csv_path.string() + "'");

  nlohmann::ordered_json meta;
  meta["generator"] = pattern.provenance().generator;
  meta["seed"] = pattern.provenance().seed;
  meta["dim"] = pattern.dim();
  meta["window"] = {{"lower", pattern.window().lower()}, {"upper", pattern.window().upper()}};
  meta["points"] = pattern.size();
  meta["simple"] = pattern.simple();
  std::ofstream side(sidecar_path(csv_path), std::ios::binary);
  if (!side) throw IoError("cannot open '" + sidecar_path(csv_path).string() + "' for writing");
  side << meta.dump(2) << '\n';
}

PointPattern read_pattern(const std::filesystem::path& csv_path) {
  std::ifstream side(sidecar_path(csv_path));
  if (!side) throw IoError("missing sidecar metadata '" + sidecar_path(csv_path).string() + "'");
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar metadata: " + std::string(e.what()));
  }
  Window window(meta.at("window").at("lower").get<std::vector<double>>(),
                meta.at("window").at("upper").get<std::vector<double>>());
  PointPattern out(window, {meta.value("generator", ""), meta.value("seed", std::uint64_t{0})});
  out.set_simple(meta.value("simple", true));

  std::ifstream csv(csv_path);
  if (!csv) throw IoError("cannot open '" + csv_path.string() + "'");
  std::string line;
  if (!std::getline(csv, line)) throw IoError("empty pattern file '" + csv_path.string() + "'");
  std::vector<double> x(window.dim());
  std::size_t row = 1;
  while (std::getline(csv, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto [ptr, ec] = std::from_chars(p, end, x[i]);
      if (ec != std::errc()) throw IoError("row " + std::to_string(row) + ": malformed coordinate");
      p = ptr;
      if (i + 1 < x.size()) {
        if (p == end || *p != ',') throw IoError("row " + std::to_string(row) + ": expected " +
                                                 std::to_string(x.size()) + " columns");
        ++p;
      }
    }
    if (p != end) throw IoError("row " + std::to_string(row) + ": too many columns");
    if (!window.contains_closed(x))
      throw PreconditionError("row " + std::to_string(row) + ": point outside the recorded window");
    out.add(x);
  }
  return out;
}

}  // namespace dcx
