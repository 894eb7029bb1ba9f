#include "output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pinlab/error.hpp"

namespace pinlab::app {

namespace {

constexpr const char* kSchema = "pinlab-schema v1";

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool is_timestamp_line(const std::string& line) {
  return line.rfind("# generated", 0) == 0 || line.find("\"generated\":") != std::string::npos;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t, const std::string& timestamp) {
  std::ostringstream os;
  os << "# " << kSchema << "\n# generated " << timestamp << "\n";
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << cell_text(v) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string to_json(const Table& t, const std::string& timestamp) {
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["generated"] = timestamp;
  j["name"] = t.name;
  auto& meta = j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = cell_json(v);
  j["columns"] = t.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  return j.dump(1) + "\n";
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, Format format) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (t.name + (format == Format::Csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto ts = utc_timestamp();
  out << (format == Format::Csv ? to_csv(t, ts) : to_json(t, ts));
  if (!out) throw Error("write failed for " + path.string());
  return path;
}

bool same_data(const std::filesystem::path& a, const std::filesystem::path& b) {
  auto la = read_lines(a), lb = read_lines(b);
  std::erase_if(la, is_timestamp_line);
  std::erase_if(lb, is_timestamp_line);
  return la == lb;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pinlab::app
